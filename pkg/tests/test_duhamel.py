import math

import numpy as np
import pytest

from morreyheat import duhamel as D
from morreyheat import evolution as E
from morreyheat import fields as F
from morreyheat import morrey as M
from morreyheat.params import make_params

P5 = make_params(5, 3.0)


def test_auxiliary_exponent_in_admissible_interval():
    r = D.auxiliary_exponent(P5, 2.0)
    assert max(P5.p, 2.0) < r < P5.p * 2.0
    lam = 4.0 / (P5.p - 1.0)
    beta = (lam / 2.0) * (1.0 / 2.0 - 1.0 / r)
    # both singular exponents of the Duhamel integrand stay below 1
    assert 2.0 / r < 1.0
    assert beta * P5.p < 1.0


def test_picard_zero_data():
    g = F.make_grid(5, 10.0, 100)
    run = D.picard_solve(F.zero_field(g), P5, 1.0, 4, [0.5, 1.0],
                         nodes=32, max_nodes=32)
    assert run.converged
    assert all(F.sup_norm(f) == 0.0 for f in run.fields)


def test_picard_rejects_bad_arguments():
    g = F.make_grid(5, 10.0, 100)
    z = F.zero_field(g)
    with pytest.raises(ValueError):
        D.picard_solve(z, P5, -1.0, 4, [0.5])
    with pytest.raises(ValueError):
        D.picard_solve(z, P5, 1.0, 1, [0.5])
    with pytest.raises(ValueError):
        D.picard_solve(z, P5, 1.0, 4, [2.0])


def test_first_correction_scales_like_amplitude_cubed():
    g = F.make_grid(5, 20.0, 400)

    def first_diff(amp):
        run = D.picard_solve(F.gaussian(g, amp, 2.0), P5, 0.5, 2, [0.5],
                             nodes=64, max_nodes=64, tol=1e-300)
        return run.cauchy_diffs[0]

    order = math.log(first_diff(0.01) / first_diff(0.005), 2.0)
    assert order == pytest.approx(P5.p, abs=0.1)


def test_mild_matches_classical(energy_run):
    grid = F.make_grid(5, 20.0, 400)
    u0 = F.gaussian(grid, 0.3, 2.0)
    run = D.picard_solve(u0, P5, 1.0, 10, [0.1, 0.5, 1.0])
    assert run.converged and not run.diverged
    u0d = F.gaussian(grid, 0.3, 2.0, F.DIRICHLET)
    traj = E.solve(u0d, P5, E.SolverConfig(t_end=1.0, checkpoint_times=(0.1, 0.5, 1.0)))
    for (t, f), (_, fc) in zip(zip(run.sample_times, run.fields), traj.checkpoints):
        rel = np.max(np.abs(f.values - fc.values)) / F.sup_norm(fc)
        assert rel < 0.01, f"mild/classical disagree at t={t}: {rel:.3%}"


def test_budget_is_bounded_and_linear_in_amplitude():
    g = F.make_grid(5, 40.0, 200)
    cfg = E.SolverConfig(t_end=100.0,
                         checkpoint_times=tuple(np.geomspace(1.0, 100.0, 8)))
    spec = M.critical_spec(P5)

    def budget_constant(amp):
        u0 = F.gaussian(g, amp, 2.0, F.DIRICHLET)
        traj = E.solve(u0, P5, cfg)
        assert traj.status.kind == "reached_horizon"
        mask = traj.times > 0
        top = np.max(traj.times[mask] ** P5.beta * traj.sup_norms[mask])
        return top / M.morrey_norm(u0, spec)

    c1, c2 = budget_constant(0.02), budget_constant(0.04)
    exponent = math.log((c2 * 0.04) / (c1 * 0.02), 2.0)
    assert exponent == pytest.approx(1.0, abs=0.1)
    assert c2 == pytest.approx(c1, rel=0.05)


def test_gronwall_domination_window():
    from morreyheat.quadrature import heat_kernel_matrix
    g = F.make_grid(5, 30.0, 600)
    u0 = F.gaussian(g, 0.3, 2.0, F.DIRICHLET)
    cps = tuple(np.geomspace(0.01, 0.25, 6))
    traj = E.solve(u0, P5, E.SolverConfig(t_end=5.0, checkpoint_times=cps))
    m_win = float(np.max(traj.sup_norms[traj.times <= 0.25])) ** (P5.p - 1.0)
    for t, fld in traj.checkpoints:
        if t > 0.25:
            continue
        dom = math.exp(m_win * t) * (heat_kernel_matrix(g, t) @ np.abs(u0.values))
        mask = dom > 1e-10 * dom.max()
        assert np.max(np.abs(fld.values[mask]) / dom[mask]) <= 1.0 + 1e-6


def test_smallness_probe_gaussian_family():
    g = F.make_grid(5, 40.0, 200)
    cfg = E.SolverConfig(t_end=100.0,
                         checkpoint_times=tuple(np.geomspace(1.0, 100.0, 8)))
    probe = D.smallness_threshold_probe(lambda a: F.gaussian(g, a, 2.0, F.DIRICHLET),
                                        P5, cfg, amp_lo=0.05, amp_hi=4.0, rel_tol=0.25)
    assert not probe.undecided
    assert probe.epsilon_star > 0
    assert np.isfinite(probe.C0_measured) and probe.C0_measured > 0
    kinds = {k for _, k in probe.trials}
    assert kinds == {"decaying", "blowup"}


def test_smallness_probe_large_plateau_blows_up():
    g = F.make_grid(5, 40.0, 200)
    traj = E.solve(F.plateau(g, 3.0, 15.0, 2.0, F.DIRICHLET), P5,
                   E.SolverConfig(t_end=10.0))
    assert traj.status.kind == "blowup"


def test_dependence_degenerate_and_flagged():
    g = F.make_grid(5, 30.0, 300)
    u0 = F.gaussian(g, 0.3, 2.0, F.DIRICHLET)
    spec = M.critical_spec(P5)
    res = D.continuous_dependence(u0, u0, 2.0, P5, spec)
    assert res.degenerate
    assert np.all(res.ratios == 1.0)
    bump = F.make_field(g, u0.values + F.plateau(g, 5.0, 10.0, 2.0, F.DIRICHLET).values,
                        F.DIRICHLET)
    res2 = D.continuous_dependence(u0, bump, 5.0, P5, spec)
    assert res2.failed_before_T0


def test_dependence_ratio_near_one_at_small_time():
    g = F.make_grid(5, 30.0, 300)
    u0 = F.gaussian(g, 0.3, 2.0, F.DIRICHLET)
    v0 = F.make_field(g, 1.001 * u0.values, F.DIRICHLET)
    res = D.continuous_dependence(u0, v0, 5.0, P5, M.critical_spec(P5))
    assert not res.failed_before_T0
    assert res.ratios[0] >= 1.0 - 0.05
    assert res.max_ratio <= 2.0


def test_dependence_stable_across_perturbation_sizes():
    g = F.make_grid(5, 30.0, 300)
    u0 = F.gaussian(g, 0.3, 2.0, F.DIRICHLET)
    spec = M.critical_spec(P5)
    maxima = []
    for size in (1e-2, 1e-3):
        v0 = F.make_field(g, (1.0 + size) * u0.values, F.DIRICHLET)
        maxima.append(D.continuous_dependence(u0, v0, 5.0, P5, spec).max_ratio)
    assert abs(maxima[0] - maxima[1]) / max(maxima) < 0.25


def test_picard_series_is_trajectory_compatible():
    g = F.make_grid(5, 16.0, 160)
    run = D.picard_solve(F.gaussian(g, 0.1, 2.0), P5, 0.5, 5, [0.25, 0.5],
                         nodes=32, max_nodes=64)
    assert run.series.shape == (2, 4)
    assert np.all(np.diff(run.series[:, 0]) > 0)
    assert np.all(run.series[:, 1] > 0)
