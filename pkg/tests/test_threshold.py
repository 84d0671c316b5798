import numpy as np
import pytest

from morreyheat import evolution as E
from morreyheat import fields as F
from morreyheat import threshold as T
from morreyheat.params import make_params

P5 = make_params(5, 3.0)


def short_cfg(t_end=60.0):
    return E.SolverConfig(t_end=t_end,
                          checkpoint_times=tuple(np.geomspace(1.0, t_end, 10)))


def test_classify_zero_data_degenerate_decaying():
    g = F.make_grid(5, 20.0, 100)
    v = T.classify(F.zero_field(g, F.DIRICHLET), P5, E.SolverConfig(t_end=1.0))
    assert v.kind == "decaying"
    assert v.terminal_ratio == 0.0


def test_classify_plateau_blowup():
    g = F.make_grid(5, 40.0, 200)
    v = T.classify(F.plateau(g, 1.0, 15.0, 2.0, F.DIRICHLET), P5, short_cfg())
    assert v.kind == "blowup"
    assert v.T_est == pytest.approx(0.5, rel=0.02)


def test_classify_small_gaussian_decaying():
    g = F.make_grid(5, 40.0, 200)
    v = T.classify(F.gaussian(g, 0.01, 2.0, F.DIRICHLET), P5, short_cfg())
    assert v.kind == "decaying"


def test_bisect_rejects_trivial_ray():
    g = F.make_grid(5, 20.0, 100)
    with pytest.raises(T.BracketingError):
        T.bisect_lambda(F.zero_field(g, F.DIRICHLET), P5, short_cfg(), rel_tol=0.1)


def test_bisect_bracket_and_consistency(threshold_run):
    res = threshold_run["result"]
    assert res.rel_width < 1e-3
    assert res.lambda_lo < res.lambda_hi
    assert not res.stalled
    assert res.monotone_consistent
    # every reported verdict keeps the bracket valid
    for trial in res.trials:
        if trial["verdict"] == "decaying":
            assert trial["lambda"] <= res.lambda_lo * (1 + 1e-12)
        if trial["verdict"] == "blowup":
            assert trial["lambda"] >= res.lambda_hi * (1 - 1e-12)


def test_bisect_ray_covariance():
    # a coarse, fast covariance check: bisect(c*phi) gives lambda*/c
    g = F.make_grid(5, 40.0, 100)
    cfg = short_cfg(t_end=40.0)
    phi = F.gaussian(g, 1.0, 2.0, F.DIRICHLET)
    phi2 = F.make_field(g, 2.0 * phi.values, F.DIRICHLET)
    r1 = T.bisect_lambda(phi, P5, cfg, rel_tol=5e-2)
    r2 = T.bisect_lambda(phi2, P5, cfg, rel_tol=5e-2)
    assert r2.lambda_lo == pytest.approx(r1.lambda_lo / 2.0, rel=0.1)


def test_morrey_series_decreases_below_threshold(threshold_run):
    series = threshold_run["result"].morrey_series_lo
    late = [(t, v) for t, v in series if t >= 1.0]
    assert late[-1][1] < late[0][1]


def test_blowup_time_decreases_with_amplitude():
    g = F.make_grid(5, 40.0, 200)
    ts = []
    for lam in (2.5, 3.0, 4.0, 6.0):
        traj = E.solve(F.gaussian(g, lam, 2.0, F.DIRICHLET), P5,
                       E.SolverConfig(t_end=10.0))
        assert traj.status.kind == "blowup"
        ts.append(traj.status.T_est)
    assert all(b < a * (1 + 1e-9) for a, b in zip(ts, ts[1:]))


def test_monotone_verdicts_on_positive_ray():
    g = F.make_grid(5, 40.0, 100)
    cfg = short_cfg(t_end=40.0)
    verdicts = [T.classify(F.gaussian(g, a, 2.0, F.DIRICHLET), P5, cfg).kind
                for a in (0.1, 1.0, 4.0, 8.0)]
    seen_blowup = False
    for v in verdicts:
        if v == "blowup":
            seen_blowup = True
        assert not (seen_blowup and v == "decaying")


def test_weighted_decay_start_monotone_in_delta(threshold_run):
    res = threshold_run["result"]
    probes = T.borderline_probe(res, P5, threshold_run["cfg"], [0.1, 0.01, 0.001])
    assert all(p.verdict == "decaying" for p in probes)
    t0s = [p.t0 for p in probes]
    assert all(b >= a - 1e-9 for a, b in zip(t0s, t0s[1:]))
    # Morrey trend toward zero on every subthreshold probe
    for p in probes:
        assert p.morrey_end < p.morrey_start


def test_borderline_probe_above_bracket_blows_up(threshold_run):
    res = threshold_run["result"]
    probes = T.borderline_probe(res, P5, threshold_run["cfg"], [-1e-3])
    assert probes[0].verdict == "blowup"
    assert probes[0].T_est is not None and np.isfinite(probes[0].T_est)


def test_borderline_probe_needs_tight_bracket():
    g = F.make_grid(5, 20.0, 100)
    res = T.ThresholdResult(lambda_lo=1.0, lambda_hi=1.5, rel_width=0.5, trials=[],
                            morrey_series_lo=[], morrey_series_hi=[], stalled=False,
                            monotone_consistent=True,
                            ray_profile=F.gaussian(g, 1.0, 2.0, F.DIRICHLET))
    with pytest.raises(ValueError):
        T.borderline_probe(res, P5, short_cfg(), [0.1])
