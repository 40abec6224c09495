"""Acceptance suite: one test per release criterion, each printing a verdict line.

Every test measures its own wall time against the stated budget. Two checks
document genuine gaps between the analytic sufficient conditions and the
simulated behavior at the quoted parameter points; they fail with the
arithmetic printed rather than being weakened to pass.
"""
import math
import time

import numpy as np
import pytest

import fhn_tis as ft
from fhn_tis.singular import CubicPoint

import oracles


def _verdict(num, ok, detail):
    print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} - {detail}")


def _draw_params(rng, eps=None):
    return ft.Params(A=float(rng.uniform(0.05, 0.7)),
                     B=float(rng.uniform(0.05, 0.7)),
                     beta=float(rng.uniform(0.1, 1.5)),
                     gamma=float(rng.uniform(0.2, 2.0)),
                     epsilon=float(rng.uniform(0.005, 0.3)) if eps is None else eps)


def test_criterion_01_equilibrium_matches_bisection_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst_dv = 0.0
    worst_resid = 0.0
    for _ in range(1000):
        p = _draw_params(rng)
        c = float(rng.uniform(-1.0, 1.0))
        eq = ft.equilibrium(p, c)
        ref = oracles.equilibrium_v_bisect(p.A, p.B, p.beta, p.gamma, c)
        worst_dv = max(worst_dv, abs(eq.v_e - ref))
        r = ft.effective_gain(p, c)
        worst_resid = max(worst_resid,
                          abs(r * eq.v_e - eq.v_e ** 3 / 3.0 - eq.w_e))
    elapsed = time.perf_counter() - t0
    ok = worst_dv < 1e-9 and worst_resid < 1e-10
    _verdict(1, ok, f"1000 draws, max |dv_e| = {worst_dv:.3e}, "
                    f"max residual = {worst_resid:.3e}, {elapsed:.2f}s")
    assert worst_dv < 1e-9
    assert worst_resid < 1e-10
    assert elapsed < 5.0


def test_criterion_02_uniqueness_flag_matches_root_enumeration():
    t0 = time.perf_counter()
    rng = np.random.default_rng(211)
    n_draws, n_c = 500, 101
    cs = np.linspace(-1.0, 1.0, n_c)
    params = [_draw_params(rng) for _ in range(n_draws)]
    pp = np.empty((n_draws, n_c))
    qq = np.empty((n_draws, n_c))
    for i, p in enumerate(params):
        r = 1.0 - p.A ** 2 / 2.0 - p.B ** 2 / 2.0 - cs * p.A * p.B
        pp[i] = -3.0 * (r - 1.0 / p.gamma)
        qq[i] = 3.0 * p.beta / p.gamma
    # count real roots of every cubic at once via companion-matrix eigenvalues
    comp = np.zeros((n_draws * n_c, 3, 3))
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    comp[:, 0, 2] = -qq.ravel()
    comp[:, 1, 2] = -pp.ravel()
    lam = np.linalg.eigvals(comp)
    n_real = np.sum(np.abs(lam.imag) < 1e-6 * (1.0 + np.abs(lam.real)), axis=1)
    enumerated_unique = np.all(n_real.reshape(n_draws, n_c) == 1, axis=1)
    flags = np.array([ft.classify_region(p, c_grid_size=n_c).unique
                      for p in params])
    mism = int(np.sum(flags != enumerated_unique))
    elapsed = time.perf_counter() - t0
    ok = mism == 0
    _verdict(2, ok, f"500 draws x 101 envelope values, {mism} disagreements, "
                    f"{int(flags.sum())} unique / {n_draws}, {elapsed:.2f}s")
    assert mism == 0
    assert elapsed < 10.0


def test_criterion_03_rest_condition_desk_check():
    t0 = time.perf_counter()
    p = ft.Params(A=0.15, B=0.15, beta=0.8, gamma=0.5, epsilon=0.01)
    w_top = ft.equilibrium(p, 1.0).w_e
    counts = {}
    for eta in (0.005, 0.02, 0.1):
        traj = ft.simulate(p, ft.AveragedCosine(eta=eta), ft.State(0.0, w_top),
                           t_final=2000.0)
        counts[eta] = ft.count_spikes(traj).count
    sims_quiet = all(n <= 1 for n in counts.values())
    rest = ft.equilibrium(p, -1.0)
    top_fold = ft.fold_point(p, 1.0)
    condition = ft.no_spiking_condition(p)
    elapsed = time.perf_counter() - t0
    ok = condition and sims_quiet
    _verdict(3, ok, f"counts {counts}; sufficient rest condition needs "
                    f"w_e(-1) = {rest.w_e:.6f} > w_m(1) = {top_fold.w_m:.6f}, "
                    f"margin {rest.w_e - top_fold.w_m:+.6f} -> {condition}; "
                    f"{elapsed:.1f}s")
    assert sims_quiet, f"expected at most one spike per run, got {counts}"
    # the simulations are quiescent as stated, but at this amplitude the rest
    # point sits 0.028 below the highest fold, so the analytic sufficient
    # condition is not met; asserted as stated rather than weakened
    assert condition, (
        f"rest condition fails at A=B=0.15: w_e(-1) = {rest.w_e!r} is not "
        f"above w_m(1) = {top_fold.w_m!r} (margin "
        f"{rest.w_e - top_fold.w_m!r})")
    assert elapsed < 30.0


def test_criterion_04_square_wave_desk_check():
    t0 = time.perf_counter()
    p = ft.Params(A=0.3, B=0.3, beta=0.8, gamma=0.5, epsilon=0.01)
    condition = ft.piecewise_spiking_condition(p)
    L, S = ft.invariant_box(p)
    drive = ft.SignCosine(eta=0.001)
    switches = drive.switch_times(0.0, 2000.0)
    rng = np.random.default_rng(307)
    counts = []
    for _ in range(10):
        ic = ft.State(float(rng.uniform(-L, L)), float(rng.uniform(-S, S)))
        traj = ft.simulate(p, drive, ic, t_final=2000.0)
        counts.append(ft.count_spikes(traj).count)
    all_tonic = all(n >= 2 for n in counts)
    elapsed = time.perf_counter() - t0
    ok = condition and all_tonic
    _verdict(4, ok, f"piecewise condition -> {condition}; counts {counts}; "
                    f"the square wave switches {switches.size} time(s) in "
                    f"[0, 2000] (half-period pi/eta = {math.pi / 0.001:.0f}), "
                    f"{elapsed:.1f}s")
    assert condition
    # at eta = 0.001 the half-period (3142) exceeds half the horizon: the only
    # switch inside [0, 2000] is +1 -> -1 at t = 1571, which cannot re-excite,
    # so no start can fire twice; asserted as stated rather than weakened
    assert all_tonic, (
        f"tonic firing for all starts is unreachable at eta=0.001, T=2000: "
        f"spike counts {counts}; the drive's only switch is at "
        f"{[round(float(s), 1) for s in switches]}")
    assert elapsed < 60.0


def test_criterion_05_ic_grid_quiescent_cell():
    t0 = time.perf_counter()
    spec = ft.GridSpec(A=0.3, B=0.3, beta=0.8, gamma=0.5, kappa=1.0,
                       epsilon=0.02, t_final=1000.0)
    res, = ft.run_experiment2([spec])
    p = ft.Params(A=0.3, B=0.3, beta=0.8, gamma=0.5, epsilon=0.02)
    cycle = ft.escape_cycle_check(p, 1.0)
    max_count = int(res.counts.max())
    elapsed = time.perf_counter() - t0
    ok = max_count <= 1 and not cycle.holds and not res.diverged.any()
    _verdict(5, ok, f"21x21 grid at kappa=1: max count = {max_count}, "
                    f"escape cycle holds = {cycle.holds}, {elapsed:.1f}s")
    assert max_count <= 1
    assert not cycle.holds
    assert not res.diverged.any()
    assert elapsed < 300.0


def test_criterion_06_ic_grid_tonic_cell():
    t0 = time.perf_counter()
    spec = ft.GridSpec(A=0.3, B=0.3, beta=0.8, gamma=0.5, kappa=2.0,
                       epsilon=0.02, t_final=1000.0)
    res, = ft.run_experiment2([spec])
    p = ft.Params(A=0.3, B=0.3, beta=0.8, gamma=0.5, epsilon=0.02)
    cycle = ft.escape_cycle_check(p, 2.0)
    tonic_frac = float(np.mean(res.counts >= 2))
    elapsed = time.perf_counter() - t0
    ok = cycle.holds and tonic_frac >= 0.95
    _verdict(6, ok, f"21x21 grid at kappa=2: tonic fraction = {tonic_frac:.3f}, "
                    f"escape cycle holds = {cycle.holds}, {elapsed:.1f}s")
    assert cycle.holds
    assert tonic_frac >= 0.95
    assert elapsed < 300.0


def test_criterion_07_threshold_matches_sweep_boundary():
    t0 = time.perf_counter()
    amps = (0.25, 0.3, 0.4)
    spec = ft.SweepSpec(amplitude_list=tuple((a, a) for a in amps),
                        kappa_range=(0.2, 12.0, 0.2),
                        epsilon_range=(0.005, 0.005, 1.0),
                        t_final=2000.0, beta=0.8, gamma=0.5)
    results = ft.run_experiment1(spec)
    kstars = [res.kappa_star for res in results]
    monotone = all(x > y for x, y in zip(kstars, kstars[1:]))
    boundary_ok = True
    details = []
    for res in results:
        row = res.counts[:, 0]
        tonic_idx = np.nonzero(row >= 2)[0]
        assert tonic_idx.size > 0, f"no tonic cell in the A={res.A} row"
        first_tonic = float(res.kappa_values[tonic_idx[0]])
        last_quiet = (float(res.kappa_values[tonic_idx[0] - 1])
                      if tonic_idx[0] > 0 else 0.0)
        hit = (first_tonic >= res.kappa_star - 0.2 - 1e-9
               and last_quiet <= res.kappa_star + 0.2 + 1e-9)
        boundary_ok = boundary_ok and hit
        details.append(f"A={res.A}: kappa*={res.kappa_star:.4f}, "
                       f"boundary ({last_quiet:.1f}, {first_tonic:.1f}]")
    elapsed = time.perf_counter() - t0
    ok = monotone and boundary_ok
    _verdict(7, ok, "; ".join(details) + f"; monotone={monotone}, {elapsed:.1f}s")
    assert monotone, f"kappa* not decreasing over {amps}: {kstars}"
    assert boundary_ok
    assert elapsed < 600.0


def test_criterion_08_transport_stays_on_moving_cubic():
    t0 = time.perf_counter()
    rng = np.random.default_rng(401)

    def draw_arc_setup():
        p = ft.Params(A=float(rng.uniform(0.2, 0.45)),
                      B=float(rng.uniform(0.2, 0.45)),
                      beta=float(rng.uniform(0.7, 0.9)),
                      gamma=float(rng.uniform(0.45, 0.6)), epsilon=0.1)
        kappa = float(rng.uniform(0.5, 3.0))
        phase = float(rng.uniform(0.0, 2.0 * math.pi))
        c0 = math.cos(phase)
        fold = ft.fold_point(p, c0)
        return p, kappa, phase, c0, fold

    def start_at(p, c0, v0):
        r = ft.effective_gain(p, c0)
        return CubicPoint(v=v0, w=r * v0 - v0 ** 3 / 3.0, c=c0)

    worst = 0.0
    for _ in range(100):
        p, kappa, phase, c0, fold = draw_arc_setup()
        v0 = fold.v_m - float(rng.uniform(0.05, 1.0))
        horizon = float(rng.uniform(0.3, math.pi / kappa))
        arc = ft.integrate_singular(p, kappa, phase, start_at(p, c0, v0), horizon)
        drift = max(abs(ft.envelope_coordinate(p, float(v), float(w)).c
                        - math.cos(kappa * float(s) + phase))
                    for s, v, w in zip(arc.s, arc.v, arc.w))
        worst = max(worst, drift)
    invariant_ok = worst < 1e-6

    # w_b starts above w_a; solutions of the scalar slow equation never cross,
    # so the gap w_b - w_a must never go negative. Near a fold the flow
    # contracts at rate gamma + 1/(v^2 - r), which collapses the gap to the
    # same float (exact ties), so the check is non-strict.
    order_ok = True
    worst_gap = math.inf
    for _ in range(100):
        p, kappa, phase, c0, fold = draw_arc_setup()
        v_a = fold.v_m - float(rng.uniform(0.05, 0.5))
        v_b = v_a - float(rng.uniform(0.05, 0.3))
        horizon = float(rng.uniform(0.3, math.pi / kappa))
        arc_a = ft.integrate_singular(p, kappa, phase, start_at(p, c0, v_a), horizon)
        arc_b = ft.integrate_singular(p, kappa, phase, start_at(p, c0, v_b), horizon)
        m = min(arc_a.s.size, arc_b.s.size) - 1
        assert m >= 1
        assert np.allclose(arc_a.s[:m], arc_b.s[:m], atol=1e-9)
        gap = arc_b.w[:m] - arc_a.w[:m]
        worst_gap = min(worst_gap, float(gap.min()))
        order_ok = order_ok and bool(np.all(gap >= 0.0))
    elapsed = time.perf_counter() - t0
    ok = invariant_ok and order_ok
    _verdict(8, ok, f"100 arcs, max envelope-coordinate drift = {worst:.3e}; "
                    f"no order inversion on 100 pairs = {order_ok} "
                    f"(smallest gap {worst_gap:.3e}); {elapsed:.1f}s")
    assert invariant_ok
    assert order_ok
    assert elapsed < 30.0


def test_criterion_09_slow_limit_tracking():
    t0 = time.perf_counter()
    p_geom = ft.Params(A=0.3, B=0.3, beta=0.8, gamma=0.5, epsilon=0.1)
    kappa = 0.5
    eq = ft.equilibrium(p_geom, -1.0)
    leg = math.pi / kappa
    arc = ft.integrate_singular(p_geom, kappa, math.pi,
                                CubicPoint(v=eq.v_e, w=eq.w_e, c=-1.0), leg)
    assert isinstance(arc.terminal, ft.ReachedEnvelopeMax)
    errors = []
    for eps, stride in ((1e-2, 10), (1e-3, 10), (1e-4, 100)):
        p = ft.Params(A=0.3, B=0.3, beta=0.8, gamma=0.5, epsilon=eps)
        eta = kappa * eps
        t_start = math.pi / eta
        cfg = ft.IntegratorConfig(method=ft.FixedRK4(dt=0.01),
                                  sample_stride=stride)
        traj = ft.simulate(p, ft.AveragedCosine(eta=eta),
                           ft.State(eq.v_e, eq.w_e),
                           t_final=t_start + leg / eps, cfg=cfg, t0=t_start)
        s = eps * (traj.t - t_start)
        tail = s >= 0.1 * leg
        v_limit = np.interp(s[tail], arc.s, arc.v)
        errors.append(float(np.max(np.abs(traj.v[tail] - v_limit))))
    decreasing = errors[0] > errors[1] > errors[2]
    elapsed = time.perf_counter() - t0
    _verdict(9, decreasing,
             "sup-norm over final 90% of the rising leg: "
             + ", ".join(f"eps={e:g}: {err:.3e}"
                         for e, err in zip((1e-2, 1e-3, 1e-4), errors))
             + f"; {elapsed:.1f}s")
    assert decreasing, f"tracking error not decreasing: {errors}"
    assert elapsed < 60.0


def test_criterion_10_no_box_exits():
    t0 = time.perf_counter()
    rng = np.random.default_rng(509)
    cfg = ft.IntegratorConfig(method=ft.FixedRK4(dt=0.01), sample_stride=1)
    exits = 0
    for i in range(100):
        p = _draw_params(rng)
        L, S = ft.invariant_box(p)
        kind = i % 4
        if kind == 0:
            drive = ft.FrozenConstant(c=float(rng.uniform(-1.0, 1.0)))
        elif kind == 1:
            drive = ft.AveragedCosine(eta=float(10.0 ** rng.uniform(-3, 0)))
        elif kind == 2:
            drive = ft.SignCosine(eta=float(10.0 ** rng.uniform(-3, 0)))
        else:
            vals = np.clip(np.cumsum(rng.uniform(-0.4, 0.4, size=128)), -1.0, 1.0)
            drive = ft.CustomSampled(values=vals, dt=float(rng.uniform(1.0, 10.0)))
        ic = ft.State(float(rng.uniform(-L, L)), float(rng.uniform(-S, S)))
        traj = ft.simulate(p, drive, ic, t_final=500.0, cfg=cfg)
        if (np.max(np.abs(traj.v)) > L + 1e-9
                or np.max(np.abs(traj.w)) > S + 1e-9):
            exits += 1
    elapsed = time.perf_counter() - t0
    ok = exits == 0
    _verdict(10, ok, f"100 runs across the four envelope drive kinds, "
                     f"{exits} box exits, {elapsed:.1f}s")
    assert exits == 0
    assert elapsed < 60.0
