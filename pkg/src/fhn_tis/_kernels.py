"""Compiled inner loops: fixed/adaptive steppers, spike counting, slow-arc transport.

Every kernel is written as plain scalar/array code so it runs identically with or
without numba. Set ``FHN_TIS_NO_NUMBA=1`` to skip JIT compilation and use the
pure-Python path (slow, intended for debugging and the kernel benchmark).
"""
import math
import os

import numpy as np

NUMBA_ENABLED = os.environ.get("FHN_TIS_NO_NUMBA", "").strip().lower() not in ("1", "true", "yes")
if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap

# drive codes shared with sim.py
DRIVE_FROZEN = 0   # par1 = envelope constant c
DRIVE_COSINE = 1   # par1 = beat frequency eta
DRIVE_RAW = 2      # par1, par2 = carrier frequencies omega1, omega2
DRIVE_CUSTOM = 3   # sampled envelope in cs (spacing cs_dt), linear interpolation

# terminal codes shared with singular.py
TERM_HORIZON = 0
TERM_FOLD = 1
TERM_TOP = 2
TERM_ORIGIN = 3

_ORIGIN_TOL = 1e-9


@njit(cache=True, nogil=True)
def leftmost_cubic_root(p, q):
    """Leftmost real root of t**3 + p*t + q = 0, polished with Newton steps.

    Uses the single-root Cardano branch when the discriminant is positive and
    the three-root trigonometric form otherwise.
    """
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0.0:
        sq = math.sqrt(disc)
        u = np.cbrt(-q / 2.0 + sq)
        v = np.cbrt(-q / 2.0 - sq)
        root = u + v
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        if m == 0.0:
            # disc <= 0 with p = 0 forces q = 0: triple root at the origin
            return 0.0
        arg = 3.0 * q / (p * m)
        if arg > 1.0:
            arg = 1.0
        elif arg < -1.0:
            arg = -1.0
        th = math.acos(arg)
        root = m * math.cos(th / 3.0)
        for k in range(1, 3):
            cand = m * math.cos((th - 2.0 * math.pi * k) / 3.0)
            if cand < root:
                root = cand
    for _ in range(3):
        f = root * root * root + p * root + q
        fp = 3.0 * root * root + p
        if fp == 0.0:
            break
        step = f / fp
        root -= step
        if abs(step) < 1e-15 * max(1.0, abs(root)):
            break
    return root


@njit(cache=True, nogil=True)
def _envelope_value(code, par1, cs, cs_dt, t):
    if code == DRIVE_FROZEN:
        return par1
    if code == DRIVE_COSINE:
        return math.cos(par1 * t)
    # DRIVE_CUSTOM: clamp to the sampled range, interpolate linearly inside it
    x = t / cs_dt
    if x <= 0.0:
        return cs[0]
    n = cs.shape[0]
    if x >= n - 1:
        return cs[n - 1]
    i = int(x)
    frac = x - i
    return cs[i] * (1.0 - frac) + cs[i + 1] * frac


@njit(cache=True, nogil=True)
def _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps, t, v, w):
    if code == DRIVE_RAW:
        dv = v - v * v * v / 3.0 - w \
            + A * par1 * math.cos(par1 * t) + B * par2 * math.cos(par2 * t)
    else:
        f = _envelope_value(code, par1, cs, cs_dt, t)
        r = 1.0 - A * A / 2.0 - B * B / 2.0 - A * B * f
        dv = r * v - v * v * v / 3.0 - w
    dw = eps * (v - gamma * w + beta)
    return dv, dw


@njit(cache=True, nogil=True)
def rk4_trajectory(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps,
                   v0, w0, t0, t_final, dt, stride):
    """Fixed-step RK4 over [t0, t_final]; the last step is clipped to land exactly.

    Returns (t, v, w, n_samples, ok, vmax_abs, wmax_abs). ok = 0 means the state
    went non-finite; the recorded samples end at the last finite state.
    """
    span = t_final - t0
    nst = int(math.ceil(span / dt - 1e-12)) if span > 0.0 else 0
    cap = nst // stride + 3
    ts = np.empty(cap)
    vs = np.empty(cap)
    ws = np.empty(cap)
    t = t0
    v = v0
    w = w0
    ts[0] = t
    vs[0] = v
    ws[0] = w
    n = 1
    vmax = abs(v)
    wmax = abs(w)
    ok = 1
    for i in range(nst):
        h = t_final - t
        if h > dt:
            h = dt
        k1v, k1w = _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps, t, v, w)
        k2v, k2w = _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps,
                        t + h / 2.0, v + h / 2.0 * k1v, w + h / 2.0 * k1w)
        k3v, k3w = _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps,
                        t + h / 2.0, v + h / 2.0 * k2v, w + h / 2.0 * k2w)
        k4v, k4w = _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps,
                        t + h, v + h * k3v, w + h * k3w)
        v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        w = w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        t = t0 + (i + 1) * dt if i + 1 < nst else t_final
        if not (math.isfinite(v) and math.isfinite(w)):
            ok = 0
            break
        if abs(v) > vmax:
            vmax = abs(v)
        if abs(w) > wmax:
            wmax = abs(w)
        if (i + 1) % stride == 0 or i == nst - 1:
            ts[n] = t
            vs[n] = v
            ws[n] = w
            n += 1
    return ts, vs, ws, n, ok, vmax, wmax


@njit(cache=True, nogil=True)
def dp45_trajectory(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps,
                    v0, w0, t0, t_final, rel_tol, abs_tol, max_dt, stride):
    """Adaptive Dormand-Prince 5(4) over [t0, t_final], step capped at max_dt.

    Returns (t, v, w, n_samples, ok, vmax_abs, wmax_abs); ok as in rk4_trajectory.
    """
    cap = 4096
    ts = np.empty(cap)
    vs = np.empty(cap)
    ws = np.empty(cap)
    t = t0
    v = v0
    w = w0
    ts[0] = t
    vs[0] = v
    ws[0] = w
    n = 1
    vmax = abs(v)
    wmax = abs(w)
    ok = 1
    h = max_dt
    accepted = 0
    while t < t_final - 1e-12 * max(1.0, abs(t_final)):
        if h > max_dt:
            h = max_dt
        if h > t_final - t:
            h = t_final - t
        k1v, k1w = _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps, t, v, w)
        k2v, k2w = _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps,
                        t + h / 5.0, v + h * (k1v / 5.0), w + h * (k1w / 5.0))
        k3v, k3w = _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps,
                        t + 3.0 * h / 10.0,
                        v + h * (3.0 / 40.0 * k1v + 9.0 / 40.0 * k2v),
                        w + h * (3.0 / 40.0 * k1w + 9.0 / 40.0 * k2w))
        k4v, k4w = _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps,
                        t + 4.0 * h / 5.0,
                        v + h * (44.0 / 45.0 * k1v - 56.0 / 15.0 * k2v + 32.0 / 9.0 * k3v),
                        w + h * (44.0 / 45.0 * k1w - 56.0 / 15.0 * k2w + 32.0 / 9.0 * k3w))
        k5v, k5w = _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps,
                        t + 8.0 * h / 9.0,
                        v + h * (19372.0 / 6561.0 * k1v - 25360.0 / 2187.0 * k2v
                                 + 64448.0 / 6561.0 * k3v - 212.0 / 729.0 * k4v),
                        w + h * (19372.0 / 6561.0 * k1w - 25360.0 / 2187.0 * k2w
                                 + 64448.0 / 6561.0 * k3w - 212.0 / 729.0 * k4w))
        k6v, k6w = _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps,
                        t + h,
                        v + h * (9017.0 / 3168.0 * k1v - 355.0 / 33.0 * k2v
                                 + 46732.0 / 5247.0 * k3v + 49.0 / 176.0 * k4v
                                 - 5103.0 / 18656.0 * k5v),
                        w + h * (9017.0 / 3168.0 * k1w - 355.0 / 33.0 * k2w
                                 + 46732.0 / 5247.0 * k3w + 49.0 / 176.0 * k4w
                                 - 5103.0 / 18656.0 * k5w))
        v5 = v + h * (35.0 / 384.0 * k1v + 500.0 / 1113.0 * k3v + 125.0 / 192.0 * k4v
                      - 2187.0 / 6784.0 * k5v + 11.0 / 84.0 * k6v)
        w5 = w + h * (35.0 / 384.0 * k1w + 500.0 / 1113.0 * k3w + 125.0 / 192.0 * k4w
                      - 2187.0 / 6784.0 * k5w + 11.0 / 84.0 * k6w)
        k7v, k7w = _rhs(code, par1, par2, cs, cs_dt, A, B, beta, gamma, eps, t + h, v5, w5)
        errv = h * (71.0 / 57600.0 * k1v - 71.0 / 16695.0 * k3v + 71.0 / 1920.0 * k4v
                    - 17253.0 / 339200.0 * k5v + 22.0 / 525.0 * k6v - 1.0 / 40.0 * k7v)
        errw = h * (71.0 / 57600.0 * k1w - 71.0 / 16695.0 * k3w + 71.0 / 1920.0 * k4w
                    - 17253.0 / 339200.0 * k5w + 22.0 / 525.0 * k6w - 1.0 / 40.0 * k7w)
        scv = abs_tol + rel_tol * max(abs(v), abs(v5))
        scw = abs_tol + rel_tol * max(abs(w), abs(w5))
        errn = math.sqrt(((errv / scv) ** 2 + (errw / scw) ** 2) / 2.0)
        if errn <= 1.0:
            t = t + h
            v = v5
            w = w5
            if not (math.isfinite(v) and math.isfinite(w)):
                ok = 0
                break
            if abs(v) > vmax:
                vmax = abs(v)
            if abs(w) > wmax:
                wmax = abs(w)
            accepted += 1
            if accepted % stride == 0 or t >= t_final - 1e-12 * max(1.0, abs(t_final)):
                if n >= cap:
                    cap2 = cap * 2
                    ts2 = np.empty(cap2)
                    vs2 = np.empty(cap2)
                    ws2 = np.empty(cap2)
                    ts2[:n] = ts[:n]
                    vs2[:n] = vs[:n]
                    ws2[:n] = ws[:n]
                    ts = ts2
                    vs = vs2
                    ws = ws2
                    cap = cap2
                ts[n] = t
                vs[n] = v
                ws[n] = w
                n += 1
        if errn == 0.0:
            fac = 5.0
        else:
            fac = 0.9 * errn ** -0.2
            if fac < 0.2:
                fac = 0.2
            elif fac > 5.0:
                fac = 5.0
        h = h * fac
        if h < 1e-14:
            ok = 0
            break
    return ts, vs, ws, n, ok, vmax, wmax


@njit(cache=True, nogil=True)
def cosine_cell_spikes(A, B, beta, gamma, eps, eta, v0, w0, t_final, dt, fire, arm):
    """One sweep cell: RK4 under a cosine envelope with in-loop hysteresis counting.

    The detector starts armed, fires on v >= fire, and re-arms once v < arm.
    Returns (count, ok, vmax_abs, wmax_abs).
    """
    rho = 1.0 - A * A / 2.0 - B * B / 2.0
    nst = int(math.ceil(t_final / dt - 1e-12))
    t = 0.0
    v = v0
    w = w0
    armed = True
    count = 0
    if v >= fire:
        count = 1
        armed = False
    vmax = abs(v)
    wmax = abs(w)
    ok = 1
    for i in range(nst):
        h = t_final - t
        if h > dt:
            h = dt
        r1 = rho - A * B * math.cos(eta * t)
        k1v = r1 * v - v * v * v / 3.0 - w
        k1w = eps * (v - gamma * w + beta)
        th = t + h / 2.0
        r2 = rho - A * B * math.cos(eta * th)
        av = v + h / 2.0 * k1v
        aw = w + h / 2.0 * k1w
        k2v = r2 * av - av * av * av / 3.0 - aw
        k2w = eps * (av - gamma * aw + beta)
        av = v + h / 2.0 * k2v
        aw = w + h / 2.0 * k2w
        k3v = r2 * av - av * av * av / 3.0 - aw
        k3w = eps * (av - gamma * aw + beta)
        te = t + h
        r4 = rho - A * B * math.cos(eta * te)
        av = v + h * k3v
        aw = w + h * k3w
        k4v = r4 * av - av * av * av / 3.0 - aw
        k4w = eps * (av - gamma * aw + beta)
        v = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        w = w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        t = te
        if not (math.isfinite(v) and math.isfinite(w)):
            ok = 0
            break
        if abs(v) > vmax:
            vmax = abs(v)
        if abs(w) > wmax:
            wmax = abs(w)
        if armed:
            if v >= fire:
                count += 1
                armed = False
        elif v < arm:
            armed = True
    return count, ok, vmax, wmax


@njit(cache=True, nogil=True)
def spike_scan(v, fire, arm):
    """Hysteresis spike detection over a sampled v trace; returns sample indices."""
    n = v.shape[0]
    count = 0
    armed = True
    for i in range(n):
        if armed:
            if v[i] >= fire:
                count += 1
                armed = False
        elif v[i] < arm:
            armed = True
    idx = np.empty(count, np.int64)
    j = 0
    armed = True
    for i in range(n):
        if armed:
            if v[i] >= fire:
                idx[j] = i
                j += 1
                armed = False
        elif v[i] < arm:
            armed = True
    return idx


@njit(cache=True, nogil=True)
def _branch_state(rho, AB, kappa, phi0, s, w):
    """Left-branch state at slow time s: returns (status, v, denom).

    status 1 = valid left-branch point with denom <= -tol handled by caller,
    status 0 = the left branch does not reach this w (fold crossed),
    status -1 = the recovered v collapsed onto the origin.
    """
    c = math.cos(phi0 + kappa * s)
    rc = rho - AB * c
    v = leftmost_cubic_root(-3.0 * rc, 3.0 * w)
    if not math.isfinite(v):
        return 0, v, 0.0
    if abs(v) < _ORIGIN_TOL:
        return -1, v, rc - v * v
    if v > 0.0:
        return 0, v, rc - v * v
    return 1, v, rc - v * v


@njit(cache=True, nogil=True)
def _transport_step(rho, AB, beta, gamma, kappa, phi0, s, w, h, tol_denom):
    """One RK4 step of dw/ds = v - gamma*w + beta with on-nullcline v recovery.

    Every stage must sit on the left branch with denominator at most -tol_denom;
    returns (status, w_new) where status mirrors _branch_state.
    """
    st, v, d = _branch_state(rho, AB, kappa, phi0, s, w)
    if st != 1 or d > -tol_denom:
        return (st if st != 1 else 0), w
    k1 = v - gamma * w + beta
    st, v, d = _branch_state(rho, AB, kappa, phi0, s + h / 2.0, w + h / 2.0 * k1)
    if st != 1 or d > -tol_denom:
        return (st if st != 1 else 0), w
    k2 = v - gamma * (w + h / 2.0 * k1) + beta
    st, v, d = _branch_state(rho, AB, kappa, phi0, s + h / 2.0, w + h / 2.0 * k2)
    if st != 1 or d > -tol_denom:
        return (st if st != 1 else 0), w
    k3 = v - gamma * (w + h / 2.0 * k2) + beta
    st, v, d = _branch_state(rho, AB, kappa, phi0, s + h, w + h * k3)
    if st != 1 or d > -tol_denom:
        return (st if st != 1 else 0), w
    k4 = v - gamma * (w + h * k3) + beta
    w_new = w + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    st, v, d = _branch_state(rho, AB, kappa, phi0, s + h, w_new)
    if st != 1 or d > -tol_denom:
        return (st if st != 1 else 0), w
    return 1, w_new


@njit(cache=True, nogil=True)
def transport_arc(A, B, beta, gamma, kappa, phi0, w0, horizon, ds, tol_denom, stride):
    """Transport a left-branch point along the moving nullcline family.

    Integrates dw/ds = v - gamma*w + beta for s in [0, horizon] with
    v recovered from w on the left branch of the nullcline at envelope value
    cos(phi0 + kappa*s). Stops at the first of: fold contact (denominator within
    tol_denom, located by bisection), completion of a rising half-cycle at
    envelope value +1, origin collapse, or the horizon.

    Returns (s, v, w, c, n, term_code, term_s, term_c, term_v, term_w).
    """
    rho = 1.0 - A * A / 2.0 - B * B / 2.0
    AB = A * B
    cap = int(horizon / ds) + int(horizon * kappa / math.pi) + 32
    ss = np.empty(cap)
    vs = np.empty(cap)
    ws = np.empty(cap)
    cc = np.empty(cap)
    s = 0.0
    w = w0
    st, v, d = _branch_state(rho, AB, kappa, phi0, 0.0, w)
    ss[0] = 0.0
    vs[0] = v
    ws[0] = w
    cc[0] = math.cos(phi0)
    n = 1
    nsteps = 0
    while s < horizon - 1e-13:
        theta = phi0 + kappa * s
        k = int(math.floor(theta / math.pi + 1e-9)) + 1
        s_leg = (k * math.pi - phi0) / kappa
        s_end = s_leg if s_leg < horizon else horizon
        while s < s_end - 1e-13:
            h = s_end - s
            if h > ds:
                h = ds
            st, w_try = _transport_step(rho, AB, beta, gamma, kappa, phi0, s, w, h, tol_denom)
            if st != 1:
                # locate the event time with bisection on the step fraction
                lo = 0.0
                hi = h
                for _ in range(80):
                    mid = (lo + hi) / 2.0
                    stm, w_mid = _transport_step(rho, AB, beta, gamma, kappa, phi0,
                                                 s, w, mid, tol_denom)
                    if stm == 1:
                        lo = mid
                    else:
                        hi = mid
                    if hi - lo < 1e-15:
                        break
                stl, w_ev = _transport_step(rho, AB, beta, gamma, kappa, phi0, s, w, lo,
                                            tol_denom)
                s_ev = s + lo
                c_ev = math.cos(phi0 + kappa * s_ev)
                ste, v_ev, d_ev = _branch_state(rho, AB, kappa, phi0, s_ev, w_ev)
                code = TERM_ORIGIN if st == -1 else TERM_FOLD
                ss[n] = s_ev
                vs[n] = v_ev
                ws[n] = w_ev
                cc[n] = c_ev
                n += 1
                return ss, vs, ws, cc, n, code, s_ev, c_ev, v_ev, w_ev
            s = s + h
            if s_end - s < 1e-13:
                s = s_end
            w = w_try
            nsteps += 1
            if nsteps % stride == 0:
                st, v, d = _branch_state(rho, AB, kappa, phi0, s, w)
                ss[n] = s
                vs[n] = v
                ws[n] = w
                cc[n] = math.cos(phi0 + kappa * s)
                n += 1
        s = s_end
        if s_leg <= horizon + 1e-13:
            # landed on a leg boundary: envelope value is exactly +/-1 by parity
            c_b = 1.0 if k % 2 == 0 else -1.0
            rc = rho - AB * c_b
            vb = leftmost_cubic_root(-3.0 * rc, 3.0 * w)
            ss[n] = s
            vs[n] = vb
            ws[n] = w
            cc[n] = c_b
            n += 1
            if c_b == 1.0:
                return ss, vs, ws, cc, n, TERM_TOP, s, c_b, vb, w
            if abs(s - horizon) < 1e-13:
                return ss, vs, ws, cc, n, TERM_HORIZON, s, c_b, vb, w
        else:
            st, v, d = _branch_state(rho, AB, kappa, phi0, s, w)
            cch = math.cos(phi0 + kappa * s)
            ss[n] = s
            vs[n] = v
            ws[n] = w
            cc[n] = cch
            n += 1
            return ss, vs, ws, cc, n, TERM_HORIZON, s, cch, v, w
    st, v, d = _branch_state(rho, AB, kappa, phi0, s, w)
    cch = math.cos(phi0 + kappa * s)
    ss[n] = s
    vs[n] = v
    ws[n] = w
    cc[n] = cch
    n += 1
    return ss, vs, ws, cc, n, TERM_HORIZON, s, cch, v, w
