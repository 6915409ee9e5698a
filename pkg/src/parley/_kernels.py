"""Hot numeric kernels: log-utility math, golden-section steps, the IDM and
NIN inner loops, and the Monte-Carlo estimators.

Every kernel is written in scalar numpy/math style so the same source runs
either compiled by numba or as plain Python. The compiled path is the default
whenever numba imports; set ``PARLEY_DISABLE_NUMBA=1`` to force the pure
fallback (roughly 100x slower on the Monte-Carlo estimators, fine for
debugging). ``benchmarks/bench_numba.py`` times the two paths side by side.
"""

import math
import os

import numpy as np

try:
    import numba
except ImportError:
    numba = None

NUMBA_ENABLED = numba is not None and os.environ.get("PARLEY_DISABLE_NUMBA", "") != "1"


def jit(func):
    """Compile with numba when enabled, otherwise return func unchanged."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(func)
    return func


INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
TWO_PI = 6.283185307179586
U53 = 1.1102230246251565e-16  # 2**-53

# idm_trace status codes
IDM_MAX_ITER = 0
IDM_CONVERGED = 1
IDM_DEGENERATE = -1


# ---------------------------------------------------------------------------
# splitmix64 stream
#
# The mixer has numba/pure twins because 64-bit wrap-around needs uint64
# scalars under numba but masked Python ints in CPython (numpy scalar
# arithmetic warns on overflow). Twins must produce identical streams;
# tests/test_kernels.py checks them draw-for-draw. Everything above the
# mixer is shared source.
# ---------------------------------------------------------------------------

_GAMMA_INT = 0x9E3779B97F4A7C15
_MIX1_INT = 0xBF58476D1CE4E5B9
_MIX2_INT = 0x94D049BB133111EB
_MASK = (1 << 64) - 1

_GAMMA = np.uint64(_GAMMA_INT)
_MIX1 = np.uint64(_MIX1_INT)
_MIX2 = np.uint64(_MIX2_INT)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)


def _mix64_py(z):
    z = ((z ^ (z >> 30)) * _MIX1_INT) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2_INT) & _MASK
    return z ^ (z >> 31)


def next_u64_py(state):
    """Advance state[0] by the splitmix64 increment, return the mixed draw."""
    s = (int(state[0]) + _GAMMA_INT) & _MASK
    state[0] = s
    return _mix64_py(s)


def stream_state_py(root, index):
    """Start state of the index-th independent stream under a root seed."""
    return _mix64_py((int(root) + (index + 1) * _GAMMA_INT) & _MASK)


def _mix64_impl(z):
    z = (z ^ (z >> _U30)) * _MIX1
    z = (z ^ (z >> _U27)) * _MIX2
    return z ^ (z >> _U31)


def _next_u64_impl(state):
    s = state[0] + _GAMMA
    state[0] = s
    return _mix64_impl(s)


def _stream_state_impl(root, index):
    return _mix64_impl(root + np.uint64(index + 1) * _GAMMA)


if NUMBA_ENABLED:
    _mix64_nb = numba.njit(cache=True)(_mix64_impl)

    @numba.njit(cache=True)
    def next_u64_nb(state):
        s = state[0] + _GAMMA
        state[0] = s
        return _mix64_nb(s)

    @numba.njit(cache=True)
    def stream_state_nb(root, index):
        return _mix64_nb(root + np.uint64(index + 1) * _GAMMA)

    next_u64 = next_u64_nb
    stream_state = stream_state_nb
else:
    next_u64 = next_u64_py
    stream_state = stream_state_py


def as_seed(seed):
    """Root-seed representation the active kernel path expects."""
    if NUMBA_ENABLED:
        return np.uint64(int(seed) & _MASK)
    return int(seed) & _MASK


@jit
def std_normal_pair(state):
    """Two standard normals via Box-Muller on splitmix64 uniforms."""
    a = next_u64(state)
    b = next_u64(state)
    u1 = (float(a >> 11) + 0.5) * U53
    u2 = (float(b >> 11) + 0.5) * U53
    r = math.sqrt(-2.0 * math.log(u1))
    return r * math.cos(TWO_PI * u2), r * math.sin(TWO_PI * u2)


# ---------------------------------------------------------------------------
# log-utility family over the triangular domain
# ---------------------------------------------------------------------------


@jit
def util_value(c, k, x1, x2):
    """a1*ln(x1) + a2*ln(x2) + a3*ln(k - x1 - x2), zero-coefficient terms skipped."""
    v = 0.0
    if c[0] != 0.0:
        v += c[0] * math.log(x1)
    if c[1] != 0.0:
        v += c[1] * math.log(x2)
    if c[2] != 0.0:
        v += c[2] * math.log(k - x1 - x2)
    return v


@jit
def util_grad(c, k, x1, x2):
    g3 = c[2] / (k - x1 - x2) if c[2] != 0.0 else 0.0
    gx = -g3
    gy = -g3
    if c[0] != 0.0:
        gx += c[0] / x1
    if c[1] != 0.0:
        gy += c[1] / x2
    return gx, gy


@jit
def seg_distance(ax, ay, bx, by, px, py):
    """Euclidean distance from (px, py) to segment (ax, ay)-(bx, by)."""
    vx = bx - ax
    vy = by - ay
    denom = vx * vx + vy * vy
    if denom == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * vx + (py - ay) * vy) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


@jit
def max_feasible_step(x1, x2, dx, dy, k, margin):
    """Largest t keeping (x1, x2) + t*(dx, dy) at slack >= margin on all constraints."""
    t = math.inf
    if dx < 0.0:
        t = min(t, (x1 - margin) / -dx)
    if dy < 0.0:
        t = min(t, (x2 - margin) / -dy)
    ds = dx + dy
    if ds > 0.0:
        t = min(t, (k - x1 - x2 - margin) / ds)
    return t


@jit
def line_step(c, k, x1, x2, dx, dy, margin, tol, cap):
    """Utility-maximizing step along (dx, dy), bounded by feasibility and cap.

    Returns 0 when the directional derivative at the start is <= 0 (the
    party's veto). The objective is strictly concave along any ray, so a
    golden-section search on [0, hi] finds the bounded maximizer.
    """
    gx, gy = util_grad(c, k, x1, x2)
    if gx * dx + gy * dy <= 0.0:
        return 0.0
    hi = max_feasible_step(x1, x2, dx, dy, k, margin)
    if cap < hi:
        hi = cap
    if hi <= 0.0:
        return 0.0
    # concave along the ray: still rising at the bound means the bound is it
    hx, hy = util_grad(c, k, x1 + hi * dx, x2 + hi * dy)
    if hx * dx + hy * dy >= 0.0:
        return hi
    lo = 0.0
    a = hi - INVPHI * hi
    b = INVPHI * hi
    fa = util_value(c, k, x1 + a * dx, x2 + a * dy)
    fb = util_value(c, k, x1 + b * dx, x2 + b * dy)
    while hi - lo > tol:
        if fa > fb:
            hi = b
            b = a
            fb = fa
            a = hi - INVPHI * (hi - lo)
            fa = util_value(c, k, x1 + a * dx, x2 + a * dy)
        else:
            lo = a
            a = b
            fa = fb
            b = lo + INVPHI * (hi - lo)
            fb = util_value(c, k, x1 + b * dx, x2 + b * dy)
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# IDM fixed-point iteration
# ---------------------------------------------------------------------------


@jit
def idm_trace(c1, c2, k, x1, x2, margin, conv_tol, ls_tol, cap, max_iter,
              pts, dirs, lams):
    """Iterate the bisector/joint-step map, recording the trace.

    Fills pts[t] (settlement path), dirs[t] (announced direction) and
    lams[t] = (lam1, lam2, lam*) for each taken step. A proposed step whose
    displacement falls below conv_tol is not taken. Returns (steps, status).
    """
    pts[0, 0] = x1
    pts[0, 1] = x2
    n = 0
    status = IDM_MAX_ITER
    for _ in range(max_iter):
        g1x, g1y = util_grad(c1, k, x1, x2)
        g2x, g2y = util_grad(c2, k, x1, x2)
        n1 = math.hypot(g1x, g1y)
        n2 = math.hypot(g2x, g2y)
        if n1 == 0.0 or n2 == 0.0:
            status = IDM_DEGENERATE
            break
        dx = g1x / (2.0 * n1) + g2x / (2.0 * n2)
        dy = g1y / (2.0 * n1) + g2y / (2.0 * n2)
        nd = math.hypot(dx, dy)
        if nd < 1e-14:
            # anti-parallel gradients: the frontier signature
            status = IDM_CONVERGED
            break
        l1 = line_step(c1, k, x1, x2, dx, dy, margin, ls_tol, cap)
        l2 = line_step(c2, k, x1, x2, dx, dy, margin, ls_tol, cap)
        ls = min(l1, l2)
        if ls * nd < conv_tol:
            status = IDM_CONVERGED
            break
        x1 += ls * dx
        x2 += ls * dy
        dirs[n, 0] = dx
        dirs[n, 1] = dy
        lams[n, 0] = l1
        lams[n, 1] = l2
        lams[n, 2] = ls
        pts[n + 1, 0] = x1
        pts[n + 1, 1] = x2
        n += 1
    return n, status


# ---------------------------------------------------------------------------
# NIN rounds and Monte-Carlo estimators
# ---------------------------------------------------------------------------


@jit
def nin_round(c1, c2, k, x1, x2, margin, ls_tol, cap, spread1, spread2, state):
    """One stochastic-announcement round; returns (new_x1, new_x2, lam*).

    lam* = 0 marks a failed round (veto, degenerate draw, or a direction
    that improves neither party); the caller keeps the old point then.
    """
    g1x, g1y = util_grad(c1, k, x1, x2)
    g2x, g2y = util_grad(c2, k, x1, x2)
    n1 = math.hypot(g1x, g1y)
    n2 = math.hypot(g2x, g2y)
    if n1 == 0.0 or n2 == 0.0:
        return x1, x2, 0.0
    v1x = g1x
    v1y = g1y
    if spread1 > 0.0:
        for _ in range(100):
            e1, e2 = std_normal_pair(state)
            v1x = g1x + spread1 * n1 * e1
            v1y = g1y + spread1 * n1 * e2
            if math.hypot(v1x, v1y) >= 1e-12:
                break
    v2x = g2x
    v2y = g2y
    if spread2 > 0.0:
        for _ in range(100):
            e1, e2 = std_normal_pair(state)
            v2x = g2x + spread2 * n2 * e1
            v2y = g2y + spread2 * n2 * e2
            if math.hypot(v2x, v2y) >= 1e-12:
                break
    m1 = math.hypot(v1x, v1y)
    m2 = math.hypot(v2x, v2y)
    if m1 < 1e-12 or m2 < 1e-12:
        return x1, x2, 0.0
    dx = v1x / (2.0 * m1) + v2x / (2.0 * m2)
    dy = v1y / (2.0 * m1) + v2y / (2.0 * m2)
    if math.hypot(dx, dy) < 1e-14:
        return x1, x2, 0.0
    l1 = line_step(c1, k, x1, x2, dx, dy, margin, ls_tol, cap)
    l2 = line_step(c2, k, x1, x2, dx, dy, margin, ls_tol, cap)
    ls = min(l1, l2)
    if ls <= 0.0:
        return x1, x2, 0.0
    return x1 + ls * dx, x2 + ls * dy, ls


@jit
def nin_loop(c1, c2, k, x1, x2, margin, ls_tol, cap, spread1, spread2,
             m_bound, threshold, max_rounds, state, traj):
    """Run rounds until m_bound consecutive failures or max_rounds.

    traj receives the accepted path (row 0 = start) up to its capacity;
    pass a zero-row array to skip recording. Returns
    (x1, x2, accepted, total_rounds, consecutive_failures).
    """
    if traj.shape[0] > 0:
        traj[0, 0] = x1
        traj[0, 1] = x2
    r = 0
    total = 0
    accepted = 0
    while r < m_bound and total < max_rounds:
        nx, ny, ls = nin_round(c1, c2, k, x1, x2, margin, ls_tol, cap,
                               spread1, spread2, state)
        total += 1
        if ls > threshold:
            x1 = nx
            x2 = ny
            accepted += 1
            r = 0
            if accepted < traj.shape[0]:
                traj[accepted, 0] = x1
                traj[accepted, 1] = x2
        else:
            r += 1
    return x1, x2, accepted, total, r


@jit
def improve_count(c1, c2, k, x1, x2, margin, ls_tol, cap, spread1, spread2,
                  threshold, n, root):
    """Number of n independent single rounds at (x1, x2) that move."""
    state = np.empty(1, dtype=np.uint64)
    count = 0
    for i in range(n):
        state[0] = stream_state(root, i)
        _, _, ls = nin_round(c1, c2, k, x1, x2, margin, ls_tol, cap,
                             spread1, spread2, state)
        if ls > threshold:
            count += 1
    return count


@jit
def stop_at_start_count(c1, c2, k, x1, x2, margin, ls_tol, cap, spread1,
                        spread2, threshold, m_bound, n, root):
    """Number of n trials whose first m_bound rounds at the start all fail."""
    state = np.empty(1, dtype=np.uint64)
    count = 0
    for i in range(n):
        state[0] = stream_state(root, i)
        fails = 0
        while fails < m_bound:
            _, _, ls = nin_round(c1, c2, k, x1, x2, margin, ls_tol, cap,
                                 spread1, spread2, state)
            if ls > threshold:
                break
            fails += 1
        if fails == m_bound:
            count += 1
    return count


@jit
def mre_errors(c1, c2, k, x1, x2, margin, ls_tol, cap, spread1, spread2,
               m_bound, threshold, max_rounds, root, b1x, b1y, b2x, b2y, out):
    """Relative error of each of len(out) independent trials.

    Trial i runs on stream i of the root seed, so results are independent
    of execution order and of how many trials run.
    """
    d0 = seg_distance(b1x, b1y, b2x, b2y, x1, x2)
    if d0 == 0.0:
        # already on the frontier: absorbed immediately, zero error
        out[:] = 0.0
        return
    state = np.empty(1, dtype=np.uint64)
    traj = np.empty((0, 2))
    for i in range(out.shape[0]):
        state[0] = stream_state(root, i)
        fx, fy, _, _, _ = nin_loop(c1, c2, k, x1, x2, margin, ls_tol, cap,
                                   spread1, spread2, m_bound, threshold,
                                   max_rounds, state, traj)
        out[i] = seg_distance(b1x, b1y, b2x, b2y, fx, fy) / d0
