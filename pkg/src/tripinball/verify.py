"""Acceptance checks: each verifies one pinned property of the dynamics.

Every check is self-contained, deterministic (fixed seeds) and returns a
CheckResult; the CLI `verify` subcommand and the test suite both run these.
"""

import math
import os
import tempfile
import time
from dataclasses import dataclass, field

import numpy as np

from . import symbolic
from .angular import expansion_factor, gaps, in_any_gap, period3, periodic_angle
from .attractor import (
    homoclinic_test,
    inaccessible_boundary,
    measure_stats,
    sample_attractor,
    transitive_components,
)
from .geometry import PhasePoint, VertexHit, delta, iterate, jacobian_product, jacobian_step, step
from .raster import GridSpec
from .symbolic import SymbolState, point_from_code, periodic_orbit_from_word, tau

__all__ = ["CheckResult", "CHECKS", "run_checks", "check_points_file"]

PI = math.pi


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extras = ", ".join(f"{k}={v}" for k, v in self.details.items())
        return f"{status} {self.name} ({self.seconds:.1f}s) {extras}"


def _result(name, passed, **details):
    return CheckResult(name=name, passed=bool(passed), details=details)


# 1 -------------------------------------------------------------------------


def check_cantor_attractor(lam=0.3, seed=7, n_transient=10_000, n_keep=100_000):
    """Sampled attractor angles avoid every level-<=6 gap and the outer strips."""
    smp = sample_attractor(lam, seed, n_transient, n_keep)
    a = np.abs(smp.theta)
    outside = int(np.sum((a <= lam * PI / 6.0) | (a >= lam * PI / 2.0)))
    gap_list = gaps(lam, 6)
    in_gap = sum(1 for th in smp.theta if in_any_gap(th, gap_list, shrink=1e-9))
    return _result(
        "cantor_attractor",
        outside == 0 and in_gap == 0,
        points=len(smp),
        outside_band=outside,
        inside_gaps=in_gap,
    )


# 2 -------------------------------------------------------------------------


def check_conjugacy(lam=0.3, n_states=1000, depth=40, seed=0):
    """step(point_from_code(x)) stays within 1e-6 of point_from_code(tau(x))."""
    rng = np.random.default_rng(seed)
    worst_s = worst_t = 0.0
    for _ in range(n_states):
        w = tuple(int(v) for v in rng.choice((-1, 1), size=depth))
        z = tuple(int(v) for v in rng.choice((-1, 1), size=depth))
        i = int(rng.integers(0, 3))
        x = SymbolState(w, z, i)
        p = point_from_code(x, lam)
        q = point_from_code(tau(x), lam)
        out = step(p, lam)
        worst_s = max(worst_s, abs(out.next.s - q.s))
        worst_t = max(worst_t, abs(out.next.theta - q.theta))
    return _result(
        "conjugacy",
        worst_s < 1e-6 and worst_t < 1e-6,
        max_ds=f"{worst_s:.2e}",
        max_dtheta=f"{worst_t:.2e}",
    )


# 3 -------------------------------------------------------------------------


def check_period3_continuation(lams=tuple(k / 10 for k in range(1, 10))):
    """The symmetric period-3 family closes, contracts by lam^3 and expands mu>1."""
    worst_res = 0.0
    worst_eig = 0.0
    min_mu = math.inf
    for lam in lams:
        orbit = period3(lam)[0]
        rec = iterate(orbit.phase_point, lam, 3)
        worst_res = max(worst_res, rec.closure_residual())
        prod = jacobian_product(rec, lam)
        worst_eig = max(worst_eig, abs(abs(prod[1, 1]) - lam**3))
        mu = expansion_factor(rec, lam)
        min_mu = min(min_mu, mu)
        # |det| = lam^3 * mu: the angular eigenvalue times the expansion
        det_err = abs(abs(np.linalg.det(prod)) - lam**3 * mu) / (lam**3 * mu)
        if det_err > 1e-10:
            return _result("period3_continuation", False, det_err=det_err, lam=lam)
    return _result(
        "period3_continuation",
        worst_res < 1e-10 and worst_eig < 1e-10 and min_mu > 1.0,
        max_residual=f"{worst_res:.2e}",
        max_eig_err=f"{worst_eig:.2e}",
        min_mu=f"{min_mu:.6f}",
    )


# 4 -------------------------------------------------------------------------


def _all_words(length):
    words = [()]
    for _ in range(length):
        words = [w + (z,) for w in words for z in (1, -1)]
    return words


def _is_two_sign_repetition(word):
    """Words repeating (+1,-1) or (-1,+1) describe forbidden period-2 motion."""
    return len(word) % 2 == 0 and all(
        word[k] == word[k % 2] for k in range(len(word))
    ) and word[0] == -word[1]


def check_periodic_words(lam=0.3, lengths=(3, 4, 5, 6)):
    """Every realizable word of length 3-6 yields a closing orbit at its angle.

    Repetitions of a two-sign pattern are the known exceptions: the triangle
    has no period-2 orbits, and their formal fixed point degenerates onto a
    vertex.  The check requires exactly those words (and no others) to be
    flagged degenerate.
    """
    worst_close = 0.0
    worst_angle = 0.0
    total = 0
    degenerate = 0
    for m in lengths:
        for word in _all_words(m):
            try:
                p, shift = periodic_orbit_from_word(word, lam)
            except symbolic.DegenerateWord:
                if not _is_two_sign_repetition(word):
                    return _result("periodic_words", False, unexpected_degenerate=word)
                degenerate += 1
                continue
            if _is_two_sign_repetition(word):
                return _result("periodic_words", False, missed_degenerate=word)
            rec = iterate(p, lam, m)
            # closure in side-local coordinates; the side advances by shift
            du = abs((rec.s[-1] - int(rec.s[-1])) - (p.s - int(p.s)))
            dth = abs(rec.theta[-1] - p.theta)
            side_ok = int(rec.s[-1]) == (int(p.s) + shift) % 3
            worst_close = max(worst_close, du, dth)
            if not side_ok:
                return _result("periodic_words", False, word=word)
            worst_angle = max(worst_angle, abs(periodic_angle(word, lam) - p.theta))
            total += 1
    return _result(
        "periodic_words",
        worst_close < 1e-8 and worst_angle < 1e-12 and degenerate == 4,
        words=total,
        degenerate=degenerate,
        max_closure=f"{worst_close:.2e}",
        max_angle_err=f"{worst_angle:.2e}",
    )


# 5 -------------------------------------------------------------------------


def check_inaccessible_geometry(lam=0.5, seed=11, n_keep=100_000, grid=(400, 400)):
    """alpha(2/3) = 0, the cutting line ends at arc 2, and the sampled
    attractor avoids the forbidden region with a one-cell margin."""
    from .attractor import cutting_line

    alpha_exact = inaccessible_boundary(2.0 / 3.0).alpha == 0.0
    ell_ok = abs(cutting_line(PI / 6.0) - 2.0) <= 1e-12
    boundary = inaccessible_boundary(lam)
    smp = sample_attractor(lam, seed, 10_000, n_keep)
    ms = 3.0 / grid[0]
    mt = PI / grid[1]
    bad = sum(
        1
        for s, th in zip(smp.s, smp.theta)
        if boundary.contains(s, th, margin_s=ms, margin_theta=mt)
    )
    return _result(
        "inaccessible_geometry",
        alpha_exact and ell_ok and bad == 0,
        alpha_two_thirds_zero=alpha_exact,
        cutting_line_end=ell_ok,
        forbidden_hits=bad,
    )


# 6 -------------------------------------------------------------------------


def check_homoclinic_transition(n=30, size=800):
    """Stable/unstable manifolds of the period-3 orbit meet at 0.55, not 0.75."""
    grid = GridSpec.side0_positive(size, size)
    hit = homoclinic_test(0.55, n=n, grid=grid)
    miss = homoclinic_test(0.75, n=n, grid=grid)
    return _result(
        "homoclinic_transition",
        hit.found and not miss.found,
        at_055=hit.found,
        at_075=miss.found,
    )


# 7 -------------------------------------------------------------------------


def check_transitive_components(seed=3):
    """Three non-communicating parts at 0.98; a single one at 0.5 and 0.3."""
    c98 = transitive_components(0.98, seed=seed).count
    c50 = transitive_components(0.5, seed=seed).count
    c30 = transitive_components(0.3, seed=seed).count
    return _result(
        "transitive_components",
        c98 == 3 and c50 == 1 and c30 == 1,
        at_098=c98,
        at_05=c50,
        at_03=c30,
    )


# 8 -------------------------------------------------------------------------


def check_ergodic_statistics(lam=0.3, seed=5, n=1_000_000):
    """Fair signs, equal sides, and full-support arc histograms per band."""
    stats = measure_stats(lam, n=n, seed=seed)
    sign_ok = abs(stats.sign_freq - 0.5) <= 0.01
    side_ok = bool(np.all(np.abs(stats.side_freq - 1.0 / 3.0) <= 0.01))
    support_ok = True
    worst_ratio = 0.0
    for band in stats.bands:
        hist = band.s_hist
        if np.any(hist == 0):
            support_ok = False
            break
        ratio = float(hist.max() / hist.min())
        worst_ratio = max(worst_ratio, ratio)
        if ratio >= 20.0:
            support_ok = False
            break
    return _result(
        "ergodic_statistics",
        sign_ok and side_ok and support_ok,
        sign_freq=f"{stats.sign_freq:.4f}",
        side_freq="/".join(f"{v:.4f}" for v in stats.side_freq),
        max_bin_ratio=f"{worst_ratio:.2f}",
    )


# 9 -------------------------------------------------------------------------


def _random_regular_point(rng, lam, margin=1e-3):
    """A phase point whose finite-difference stencil stays in one domain."""
    while True:
        s = rng.uniform(margin, 3.0 - margin)
        if abs(s - round(s)) < margin:
            continue
        theta = rng.uniform(-PI / 2 + margin, PI / 2 - margin)
        if abs(theta - delta(s)) < margin:
            continue
        p = PhasePoint(s, theta)
        try:
            out = step(p, lam)
        except VertexHit:
            continue
        u1 = out.next.s - int(out.next.s)
        if u1 < margin or u1 > 1.0 - margin:
            continue
        return p, out


def check_jacobian_fd(lams=(0.3, 0.7), n_points=100, h=1e-7, seed=12):
    """Step derivative matches central finite differences to 1e-5 relative."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for lam in lams:
        for _ in range(n_points):
            p, out = _random_regular_point(rng, lam)
            jac = jacobian_step(p, out, lam)
            sp = step(PhasePoint(p.s + h, p.theta), lam)
            sm = step(PhasePoint(p.s - h, p.theta), lam)
            tp = step(PhasePoint(p.s, p.theta + h), lam)
            tm = step(PhasePoint(p.s, p.theta - h), lam)
            fd = np.array(
                [
                    [
                        (sp.next.s - sm.next.s) / (2 * h),
                        (tp.next.s - tm.next.s) / (2 * h),
                    ],
                    [
                        (sp.next.theta - sm.next.theta) / (2 * h),
                        (tp.next.theta - tm.next.theta) / (2 * h),
                    ],
                ]
            )
            for r in range(2):
                for c in range(2):
                    exact = jac[r, c]
                    if exact == 0.0:
                        if abs(fd[r, c]) > 1e-9:
                            return _result("jacobian_fd", False, zero_entry=fd[r, c])
                    else:
                        worst = max(worst, abs(fd[r, c] - exact) / abs(exact))
    return _result("jacobian_fd", worst <= 1e-5, max_rel_err=f"{worst:.2e}")


# 10 ------------------------------------------------------------------------


def check_determinism(lam=0.3, seed=7, keep=50_000):
    """Identical configuration produces byte-identical attractor CSV output."""
    from .cli import main as cli_main

    with tempfile.TemporaryDirectory() as tmp:
        blobs = []
        for run in ("a", "b"):
            prefix = os.path.join(tmp, run)
            rc = cli_main(
                [
                    "attractor",
                    "--lambda",
                    str(lam),
                    "--seed",
                    str(seed),
                    "--transient",
                    "2000",
                    "--keep",
                    str(keep),
                    "--out",
                    prefix,
                ]
            )
            if rc != 0:
                return _result("determinism", False, exit_code=rc)
            with open(prefix + ".points.csv", "rb") as fh:
                blobs.append(fh.read())
    identical = blobs[0] == blobs[1]
    return _result("determinism", identical, bytes=len(blobs[0]), identical=identical)


# ---------------------------------------------------------------------------

CHECKS = {
    "cantor_attractor": check_cantor_attractor,
    "conjugacy": check_conjugacy,
    "period3_continuation": check_period3_continuation,
    "periodic_words": check_periodic_words,
    "inaccessible_geometry": check_inaccessible_geometry,
    "homoclinic_transition": check_homoclinic_transition,
    "transitive_components": check_transitive_components,
    "ergodic_statistics": check_ergodic_statistics,
    "jacobian_fd": check_jacobian_fd,
    "determinism": check_determinism,
}


def run_checks(names=None):
    """Run the named checks (all by default), timing each."""
    selected = list(CHECKS) if names is None else list(names)
    results = []
    for name in selected:
        if name not in CHECKS:
            raise KeyError(f"unknown check {name!r}; known: {', '.join(CHECKS)}")
        t0 = time.perf_counter()
        res = CHECKS[name]()
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results


def check_points_file(path, lam):
    """Validate an attractor CSV: strip bounds always, gap avoidance for lam<1/3."""
    from .output import read_points_csv

    s, theta = read_points_csv(path)
    a = np.abs(theta)
    strip_bad = int(np.sum(a >= lam * PI / 2.0 + 1e-12))
    details = {"points": len(s), "strip_violations": strip_bad}
    ok = strip_bad == 0
    if lam < 1.0 / 3.0:
        central_bad = int(np.sum(a <= lam * PI / 6.0 - 1e-12))
        gap_list = gaps(lam, 6)
        in_gap = sum(1 for th in theta if in_any_gap(th, gap_list, shrink=1e-9))
        details.update(central_violations=central_bad, inside_gaps=in_gap)
        ok = ok and central_bad == 0 and in_gap == 0
    return CheckResult(name="points_file", passed=ok, details=details)
