"""Acceptance suite: one test per pinned criterion, at its stated tolerance.

Each test delegates to the corresponding check in tripinball.verify (also
runnable via `tripinball verify`) and prints one PASS/FAIL line.
"""

import time

from tripinball.verify import CHECKS


def _run(name):
    t0 = time.perf_counter()
    res = CHECKS[name]()
    res.seconds = time.perf_counter() - t0
    print(res.line())
    assert res.passed, res.line()
    return res


def test_01_cantor_attractor():
    # 1e5-point sample at lam=0.3: no angle in any level<=6 gap (margin 1e-9)
    # and none outside (lam*pi/6, lam*pi/2) in absolute value
    res = _run("cantor_attractor")
    assert res.details["points"] == 100_000


def test_02_conjugacy():
    # 1000 random depth-40 symbol states: step o code vs code o shift < 1e-6
    _run("conjugacy")


def test_03_period3_continuation():
    # lam in {0.1..0.9}: T^3 residual < 1e-10, angular eigenvalue lam^3
    # within 1e-10, expansion factor > 1
    _run("period3_continuation")


def test_04_periodic_words():
    # all words of length 3-6 at lam=0.3 close to < 1e-8 at the closed-form
    # angle (1e-12), except the four vertex-degenerate two-sign repetitions
    res = _run("periodic_words")
    assert res.details["words"] == 116
    assert res.details["degenerate"] == 4


def test_05_inaccessible_geometry():
    # alpha(2/3) == 0 exactly, cutting line ends at arc 2 (1e-12), and the
    # lam=0.5 attractor avoids the forbidden region with a one-cell margin
    _run("inaccessible_geometry")


def test_06_homoclinic_transition():
    # found at lam=0.55, absent at lam=0.75 (n=30, 800x800 grid)
    _run("homoclinic_transition")


def test_07_transitive_components():
    # 3 parts at lam=0.98; single part at 0.5 and 0.3 (12 seeds, 5e4 points)
    _run("transitive_components")


def test_08_ergodic_statistics():
    # 1e6 iterates at lam=0.3: sign 0.5 +/- 0.01, sides 1/3 +/- 0.01,
    # top-4 band histograms with 64/64 support and max/min ratio < 20
    _run("ergodic_statistics")


def test_09_jacobian_fd():
    # central differences (h=1e-7) match the derivative to 1e-5 relative
    # at 100 random regular points for lam in {0.3, 0.7}
    _run("jacobian_fd")


def test_10_determinism():
    # identical attractor runs produce byte-identical CSV
    _run("determinism")
