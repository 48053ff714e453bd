"""Hot numeric kernels: the bounce map, orbit loops and rasters.

Everything here is scalar math inside tight loops, compiled with numba
(see :mod:`tripinball._numba`).  The geometry is the unit-side equilateral
triangle with counterclockwise boundary parametrised by arc length
``s in (0, 3)``; side ``i = floor(s)``.  The outgoing angle ``theta`` is
measured from the inward normal, positive toward increasing arc length.

Reflection rule: the outgoing angle after a collision is ``-lam`` times the
signed incoming angle, ``lam in (0, 1]`` (``lam = 1`` is elastic).
"""

import math

import numpy as np

from ._numba import njit

SQRT3 = math.sqrt(3.0)
PI = math.pi
PI_3 = math.pi / 3.0
PI_6 = math.pi / 6.0

VERTEX_EPS = 1e-12

STEP_OK = 0
STEP_VERTEX = 1

# vertices, unit tangents and inward normals of the table, one row per side
_VX = np.array([0.0, 1.0, 0.5])
_VY = np.array([0.0, 0.0, SQRT3 / 2.0])
_TX = np.array([1.0, -0.5, -0.5])
_TY = np.array([0.0, SQRT3 / 2.0, -SQRT3 / 2.0])
_NX = np.array([0.0, -SQRT3 / 2.0, SQRT3 / 2.0])
_NY = np.array([1.0, -0.5, -0.5])


@njit(cache=True)
def step_kernel(s, theta, lam):
    """One bounce of the map.

    Returns ``(s1, theta1, sign, flight, eta, status)``.  ``sign`` is +1 for
    a bounce onto side i+1 and -1 for side i-1.  ``eta`` is the signed
    incoming angle at the landing point, so ``theta1 == -lam * eta``.
    On ``status == STEP_VERTEX`` the first slot carries the arc length of
    the offending vertex and the remaining float slots are zero.
    """
    i = int(s)
    u = s - i
    dsplit = math.atan((1.0 - 2.0 * u) / SQRT3)
    if theta == dsplit:
        # aimed exactly at the opposite vertex
        return (float((i + 2) % 3), 0.0, 0, 0.0, 0.0, STEP_VERTEX)
    z = 1 if theta > dsplit else -1
    j = (i + z) % 3

    px = _VX[i] + u * _TX[i]
    py = _VY[i] + u * _TY[i]
    st = math.sin(theta)
    ct = math.cos(theta)
    dx = st * _TX[i] + ct * _NX[i]
    dy = st * _TY[i] + ct * _NY[i]

    # ray-segment intersection: p + t*d = V_j + v*T_j
    det = _TX[j] * dy - _TY[j] * dx
    rx = _VX[j] - px
    ry = _VY[j] - py
    t = (_TX[j] * ry - _TY[j] * rx) / det
    v = (dx * ry - dy * rx) / det
    if v <= VERTEX_EPS or v >= 1.0 - VERTEX_EPS:
        varc = float(j) if v < 0.5 else float((j + 1) % 3)
        return (varc, 0.0, z, 0.0, 0.0, STEP_VERTEX)

    a = -(dx * _NX[j] + dy * _NY[j])
    b = dx * _TX[j] + dy * _TY[j]
    eta = -math.atan2(b, a)
    theta1 = -lam * eta
    return (j + v, theta1, z, t, eta, STEP_OK)


@njit(cache=True)
def orbit_kernel(s0, theta0, lam, n):
    """Iterate up to n steps; truncate at a vertex hit.

    Returns post-step arrays ``(s, theta, signs, flights, etas, status)``.
    """
    ss = np.empty(n)
    ths = np.empty(n)
    zs = np.empty(n, np.int8)
    fls = np.empty(n)
    ets = np.empty(n)
    s = s0
    th = theta0
    done = 0
    status = STEP_OK
    for _ in range(n):
        s1, th1, z, fl, eta, st = step_kernel(s, th, lam)
        if st != STEP_OK:
            status = st
            break
        ss[done] = s1
        ths[done] = th1
        zs[done] = z
        fls[done] = fl
        ets[done] = eta
        s = s1
        th = th1
        done += 1
    return (
        ss[:done].copy(),
        ths[:done].copy(),
        zs[:done].copy(),
        fls[:done].copy(),
        ets[:done].copy(),
        status,
    )


# ---------------------------------------------------------------------------
# counter-based random stream (splitmix64)
#
# contract (language independent):
#   state0(seed, stream) = mix(seed + (stream + 1) * GAMMA)   (mod 2**64)
#   advance:             state += GAMMA; output = mix(state)
#   mix(z): z ^= z>>30; z *= 0xBF58476D1CE4E5B9;
#           z ^= z>>27; z *= 0x94D049BB133111EB; z ^= z>>31
#   unit double in [0,1): (output >> 11) * 2**-53
# ---------------------------------------------------------------------------

U64 = np.uint64
_GAMMA = U64(0x9E3779B97F4A7C15)
_MIX_A = U64(0xBF58476D1CE4E5B9)
_MIX_B = U64(0x94D049BB133111EB)
_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX_A
    z = (z ^ (z >> U64(27))) * _MIX_B
    return z ^ (z >> U64(31))


@njit(cache=True)
def stream_state(seed, stream):
    return mix64(seed + (stream + U64(1)) * _GAMMA)


@njit(cache=True)
def next_unit(state):
    """Advance the stream; returns (new_state, uniform double in [0,1))."""
    state = state + _GAMMA
    x = mix64(state)
    return state, (x >> U64(11)) * _TO_UNIT


@njit(cache=True)
def _draw_initial(state):
    """Uniform initial condition in (0,3) x (-pi/2, pi/2); two draws."""
    state, u1 = next_unit(state)
    state, u2 = next_unit(state)
    s = 3.0 * u1
    th = PI * u2 - PI / 2.0
    return state, s, th


@njit(cache=True)
def attractor_kernel(lam, seed, stream, n_transient, n_keep, max_restarts):
    """Collect n_keep post-transient phase points from one stream.

    A vertex hit (or a degenerate draw landing exactly on a vertex) restarts
    from a fresh random point, burning the transient again; restarts are
    counted.  Returns (s, theta, restarts).
    """
    out_s = np.empty(n_keep)
    out_t = np.empty(n_keep)
    state = stream_state(seed, stream)
    filled = 0
    restarts = -1
    while filled < n_keep:
        restarts += 1
        if restarts > max_restarts:
            break
        state, s, th = _draw_initial(state)
        if s - int(s) <= 0.0 or s >= 3.0:
            continue
        ok = True
        for _ in range(n_transient):
            s, th, z, fl, eta, st = step_kernel(s, th, lam)
            if st != STEP_OK:
                ok = False
                break
        if not ok:
            continue
        while filled < n_keep:
            s, th, z, fl, eta, st = step_kernel(s, th, lam)
            if st != STEP_OK:
                break
            out_s[filled] = s
            out_t[filled] = th
            filled += 1
    return out_s[:filled].copy(), out_t[:filled].copy(), restarts


@njit(cache=True)
def measure_kernel(lam, seed, stream, n, n_transient, theta_bins, s_bins, max_restarts):
    """Birkhoff statistics along one long orbit.

    Accumulates a (theta_bins x s_bins) visit histogram (theta ascending,
    s over (0,3)), per-side counts and the +1 bounce count.  Returns
    (hist2d, side_counts, plus_count, collected, restarts).
    """
    hist = np.zeros((theta_bins, s_bins), np.int64)
    sides = np.zeros(3, np.int64)
    plus = 0
    state = stream_state(seed, stream)
    collected = 0
    restarts = -1
    while collected < n:
        restarts += 1
        if restarts > max_restarts:
            break
        state, s, th = _draw_initial(state)
        if s - int(s) <= 0.0 or s >= 3.0:
            continue
        ok = True
        for _ in range(n_transient):
            s, th, z, fl, eta, st = step_kernel(s, th, lam)
            if st != STEP_OK:
                ok = False
                break
        if not ok:
            continue
        while collected < n:
            s, th, z, fl, eta, st = step_kernel(s, th, lam)
            if st != STEP_OK:
                break
            if z == 1:
                plus += 1
            sides[int(s)] += 1
            tb = int((th + PI / 2.0) / PI * theta_bins)
            if tb < 0:
                tb = 0
            elif tb >= theta_bins:
                tb = theta_bins - 1
            sb = int(s / 3.0 * s_bins)
            if sb < 0:
                sb = 0
            elif sb >= s_bins:
                sb = s_bins - 1
            hist[tb, sb] += 1
            collected += 1
    return hist, sides, plus, collected, restarts


@njit(cache=True)
def escape_kernel(lam, s_min, s_max, t_min, t_max, width, height, n, target):
    """Escape-time raster: consecutive bounces matching `target` per cell.

    Cell centers are iterated up to n steps; a vertex hit keeps the count
    so far.  Row 0 is the top of the grid (theta_max).
    """
    grid = np.zeros((height, width), np.uint32)
    ds = (s_max - s_min) / width
    dt = (t_max - t_min) / height
    for r in range(height):
        th0 = t_max - (r + 0.5) * dt
        for c in range(width):
            s = s_min + (c + 0.5) * ds
            th = th0
            count = 0
            for _ in range(n):
                s, th, z, fl, eta, st = step_kernel(s, th, lam)
                if st != STEP_OK or z != target:
                    break
                count += 1
            grid[r, c] = count
    return grid


@njit(cache=True)
def basin_kernel(
    lam,
    s_min,
    s_max,
    t_min,
    t_max,
    width,
    height,
    horizon,
    extra,
    labels,
    l_height,
    l_width,
):
    """Classify each cell center by the component label it lands on.

    `labels` covers the full phase space (0,3) x (-pi/2, pi/2), row 0 at
    theta_max.  After `horizon` steps the orbit is looked up in `labels`;
    if the cell is unlabeled the orbit continues for up to `extra` more
    steps.  0 means unresolved (or a vertex hit).
    """
    out = np.zeros((height, width), np.uint32)
    ds = (s_max - s_min) / width
    dt = (t_max - t_min) / height
    lds = 3.0 / l_width
    ldt = PI / l_height
    for r in range(height):
        th0 = t_max - (r + 0.5) * dt
        for c in range(width):
            s = s_min + (c + 0.5) * ds
            th = th0
            dead = False
            for _ in range(horizon):
                s, th, z, fl, eta, st = step_kernel(s, th, lam)
                if st != STEP_OK:
                    dead = True
                    break
            if dead:
                continue
            label = 0
            for _ in range(extra + 1):
                lr = int((PI / 2.0 - th) / ldt)
                if lr < 0:
                    lr = 0
                elif lr >= l_height:
                    lr = l_height - 1
                lc = int(s / lds)
                if lc < 0:
                    lc = 0
                elif lc >= l_width:
                    lc = l_width - 1
                lab = labels[lr, lc]
                if lab > 0:
                    label = lab
                    break
                s, th, z, fl, eta, st = step_kernel(s, th, lam)
                if st != STEP_OK:
                    break
            out[r, c] = label
    return out
