"""Amplitude-threshold bisection along a ray of initial data, and borderline probes.

Runs are classified as decaying, blowup, or undecided on a finite horizon; the
bisection brackets the largest decaying and smallest blowing-up amplitudes.
Undecided is a first-class outcome; it stalls the bracket rather than forcing
a verdict.
"""

from dataclasses import dataclass, field

import numpy as np

from .evolution import SolverConfig, Trajectory, decay_diagnostics, solve
from .fields import RadialField, make_field
from .morrey import MorreyLattice, critical_spec, morrey_norm
from .params import ModelParams


class BracketingError(RuntimeError):
    """The initial decaying/blowup bracket could not be established."""


@dataclass(frozen=True)
class Verdict:
    kind: str                  # "decaying" | "blowup" | "undecided"
    T_est: float | None = None
    horizon: float = 0.0
    status_kind: str = ""
    terminal_ratio: float | None = None   # ||u(t_end)||_inf / ||u0||_inf


def classify(u0: RadialField, params: ModelParams, cfg: SolverConfig,
             terminal_factor: float = 1e-2) -> Verdict:
    """Decaying iff the run reaches the horizon with a monotone weighted tail and
    the terminal sup-norm below terminal_factor times the initial one."""
    v, _ = classify_with_trajectory(u0, params, cfg, terminal_factor)
    return v


def classify_with_trajectory(u0: RadialField, params: ModelParams, cfg: SolverConfig,
                             terminal_factor: float = 1e-2):
    sup0 = float(np.max(np.abs(u0.values)))
    if sup0 == 0.0:
        traj = solve(u0, params, cfg)
        return Verdict("decaying", horizon=cfg.t_end, status_kind=traj.status.kind,
                       terminal_ratio=0.0), traj
    traj = solve(u0, params, cfg)
    st = traj.status
    if st.kind == "blowup":
        return Verdict("blowup", T_est=st.T_est, horizon=st.t_final,
                       status_kind=st.kind), traj
    if st.kind != "reached_horizon":
        return Verdict("undecided", horizon=st.t_final, status_kind=st.kind), traj
    diag = decay_diagnostics(traj, params)
    ratio = traj.sup_norms[-1] / sup0
    if diag.tail_monotone and ratio < terminal_factor:
        return Verdict("decaying", horizon=st.t_final, status_kind=st.kind,
                       terminal_ratio=float(ratio)), traj
    return Verdict("undecided", horizon=st.t_final, status_kind=st.kind,
                   terminal_ratio=float(ratio)), traj


@dataclass
class ThresholdResult:
    lambda_lo: float
    lambda_hi: float
    rel_width: float
    trials: list                       # dicts: lambda, verdict, T_est, horizon
    morrey_series_lo: list             # [(t, ||u(t)||_{M^{2,mu}}), ...]
    morrey_series_hi: list
    stalled: bool
    monotone_consistent: bool          # no decaying trial above a blowup trial
    ray_profile: RadialField = field(repr=False, default=None)


def _scaled(phi: RadialField, lam: float) -> RadialField:
    return make_field(phi.grid, lam * phi.values, phi.boundary)


def _morrey_series(traj: Trajectory, params: ModelParams, lattice) -> list:
    spec = critical_spec(params)
    return [(t, morrey_norm(f, spec, lattice)) for t, f in traj.checkpoints]


def bisect_lambda(phi: RadialField, params: ModelParams, cfg: SolverConfig,
                  rel_tol: float, lambda_init: float = 1.0,
                  max_iter: int = 80) -> ThresholdResult:
    """Bisect the amplitude threshold along the ray lambda * phi.

    The initial bracket is found by geometric scanning from lambda_init; the
    bisection never widens the bracket, and stalls (reported) if an undecided
    verdict blocks the midpoint.
    """
    if float(np.max(np.abs(phi.values))) == 0.0:
        raise BracketingError("ray profile is trivial")
    trials = []

    def run(lam):
        v = classify(_scaled(phi, lam), params, cfg)
        trials.append({"lambda": lam, "verdict": v.kind, "T_est": v.T_est,
                       "horizon": v.horizon})
        return v

    lo = hi = None
    lam = lambda_init
    v = run(lam)
    if v.kind == "decaying":
        lo = lam
        for _ in range(40):
            lam *= 2.0
            v = run(lam)
            if v.kind == "blowup":
                hi = lam
                break
            if v.kind == "decaying":
                lo = lam
    elif v.kind == "blowup":
        hi = lam
        for _ in range(40):
            lam *= 0.5
            v = run(lam)
            if v.kind == "decaying":
                lo = lam
                break
            if v.kind == "blowup":
                hi = lam
    if lo is None or hi is None:
        raise BracketingError(
            f"could not bracket a threshold from lambda_init={lambda_init}; trials: "
            + ", ".join(f"{t['lambda']:.3g}:{t['verdict']}" for t in trials))

    stalled = False
    it = 0
    while (hi - lo) / lo >= rel_tol and it < max_iter:
        it += 1
        mid = 0.5 * (lo + hi)
        v = run(mid)
        if v.kind == "decaying":
            lo = mid
        elif v.kind == "blowup":
            hi = mid
        else:
            stalled = True
            break

    blowup_lams = [t["lambda"] for t in trials if t["verdict"] == "blowup"]
    decay_lams = [t["lambda"] for t in trials if t["verdict"] == "decaying"]
    consistent = (not blowup_lams or not decay_lams
                  or max(decay_lams) < min(blowup_lams))

    lattice = MorreyLattice.default(phi.grid)
    _, traj_lo = classify_with_trajectory(_scaled(phi, lo), params, cfg)
    _, traj_hi = classify_with_trajectory(_scaled(phi, hi), params, cfg)
    return ThresholdResult(
        lambda_lo=lo, lambda_hi=hi, rel_width=(hi - lo) / lo, trials=trials,
        morrey_series_lo=_morrey_series(traj_lo, params, lattice),
        morrey_series_hi=_morrey_series(traj_hi, params, lattice),
        stalled=stalled, monotone_consistent=consistent, ray_profile=phi)


def weighted_decay_start(traj: Trajectory, params: ModelParams,
                         rel_tol: float = 1e-9) -> float:
    """Earliest recorded time after which t^(1/(p-1)) ||u(t)||_inf is nonincreasing."""
    mask = traj.times > 0
    t_arr = traj.times[mask]
    w = t_arr ** params.beta * traj.sup_norms[mask]
    if w.size < 2:
        return float(t_arr[0]) if t_arr.size else 0.0
    ups = np.nonzero(np.diff(w) > rel_tol * w.max())[0]
    if ups.size == 0:
        return float(t_arr[0])
    return float(t_arr[ups[-1] + 1])


@dataclass(frozen=True)
class BorderlineTrial:
    delta: float
    lam: float
    verdict: str
    T_est: float | None
    t0: float | None                  # start of the final monotone weighted decrease
    morrey_start: float | None        # ||u(t)||_{M^{2,mu}} at the first checkpoint >= 1
    morrey_end: float | None          # ... at the horizon


def borderline_probe(result: ThresholdResult, params: ModelParams, cfg: SolverConfig,
                     deltas) -> list[BorderlineTrial]:
    """Probe the ray just below (delta > 0) or above (delta < 0) the bracket.

    Runs at lambda_lo (1 - delta); negative deltas probe lambda_hi (1 - delta)
    instead, exercising the blowup side of the bracket.
    """
    if result.rel_width > 1e-2:
        raise ValueError("bracket must be tighter than 1e-2 before probing")
    phi = result.ray_profile
    lattice = MorreyLattice.default(phi.grid)
    spec = critical_spec(params)
    out = []
    for delta in deltas:
        lam = result.lambda_lo * (1.0 - delta) if delta >= 0 else result.lambda_hi * (1.0 - delta)
        v, traj = classify_with_trajectory(_scaled(phi, lam), params, cfg)
        t0 = m_start = m_end = None
        if v.kind == "decaying":
            t0 = weighted_decay_start(traj, params)
            series = _morrey_series(traj, params, lattice)
            late = [val for t, val in series if t >= 1.0]
            if late:
                m_start, m_end = late[0], late[-1]
        out.append(BorderlineTrial(delta=float(delta), lam=lam, verdict=v.kind,
                                   T_est=v.T_est, t0=t0, morrey_start=m_start,
                                   morrey_end=m_end))
    return out
