"""Direct integration of u_t = Laplace(u) + |u|^(p-1) u for radial data.

Method of lines on the uniform radial grid with explicit RK4 and two step
caps: the diffusive stability cap safety*h^2/(2n) and the nonlinear cap
0.5*||u||_inf^(1-p).  Near blowup the nonlinear cap collapses dt, which is the
robust blowup signal alongside the sup-norm threshold.
"""

import math
from dataclasses import dataclass

import numpy as np

from .fields import DIRICHLET, FREE, RadialField, make_field
from .params import ModelParams
from .quadrature import heat_kernel_matrix


def log_checkpoints(t_end: float, count: int = 20, t_min: float | None = None) -> tuple:
    """Log-spaced checkpoint times in (0, t_end]."""
    if t_min is None:
        t_min = t_end / 1000.0
    return tuple(np.geomspace(t_min, t_end, count))


@dataclass(frozen=True)
class SolverConfig:
    dt_init: float = 0.1               # upper bound on any step
    dt_min: float = 1e-14              # collapse below this declares blowup
    safety: float = 0.8                # fraction of the diffusive cap h^2/(2n)
    blowup_threshold: float = 1e8      # sup-norm blowup threshold
    t_end: float = 10.0
    checkpoint_times: tuple = ()       # exact times to snapshot (empty: log-spaced 20)
    series_stride: int = 1
    nonlinear: bool = True             # test hook: False integrates the pure heat flow
    boundary_guard: float = 1e-6       # truncated-R^n contamination level
    max_steps: int | None = None

    def __post_init__(self):
        if not self.dt_min < self.dt_init:
            raise ValueError("need dt_min < dt_init")
        if self.blowup_threshold < 1e6:
            raise ValueError("blowup threshold must be >= 1e6")
        ts = np.asarray(self.checkpoint_times, dtype=float)
        if ts.size and not np.all(np.diff(ts) > 0):
            raise ValueError("checkpoint times must be strictly increasing")


@dataclass(frozen=True)
class TrajectoryStatus:
    kind: str                       # "reached_horizon" | "blowup" | "aborted"
    t_final: float
    T_est: float | None = None
    fit_quality: float | None = None
    reason: str | None = None


@dataclass
class Trajectory:
    params: ModelParams
    checkpoints: list          # [(t, RadialField), ...]
    series: np.ndarray         # columns t, sup_norm, weighted_sup, dt
    status: TrajectoryStatus
    boundary_mode: str = FREE

    @property
    def times(self) -> np.ndarray:
        return self.series[:, 0]

    @property
    def sup_norms(self) -> np.ndarray:
        return self.series[:, 1]


class _RadialLaplacian:
    """L u = u'' + (n-1)/r u'; at r = 0 the even-symmetry limit 2n (u_1 - u_0)/h^2."""

    def __init__(self, grid, n):
        h = grid.h
        r = grid.nodes
        self.inv_h2 = 1.0 / h**2
        self.origin = 2.0 * n / h**2
        drift = (n - 1) / (2.0 * h * r[1:-1])
        self.c_plus = self.inv_h2 + drift
        self.c_minus = self.inv_h2 - drift
        self.c_last_minus = self.inv_h2 - (n - 1) / (2.0 * h * r[-1])

    def __call__(self, u, out):
        out[0] = self.origin * (u[1] - u[0])
        out[1:-1] = self.c_plus * u[2:] + self.c_minus * u[:-2] - 2.0 * self.inv_h2 * u[1:-1]
        # zero ghost value beyond r_max in both boundary modes
        out[-1] = self.c_last_minus * u[-2] - 2.0 * self.inv_h2 * u[-1]
        return out


def solve(u0: RadialField, params: ModelParams, cfg: SolverConfig) -> Trajectory:
    """Integrate to cfg.t_end, stopping early on blowup or abort.

    Boundary handling follows u0's tag: dirichlet_at_Rmax pins u(r_max) = 0
    (ball problem); even_at_origin_only treats the grid as a truncated copy of
    R^n and aborts if the solution contaminates the boundary region.
    """
    grid = u0.grid
    n = params.n
    p = params.p
    lap = _RadialLaplacian(grid, n)
    dirichlet = u0.boundary == DIRICHLET
    wk = 2.0 / (p - 1.0)
    r_pow = grid.nodes**wk

    dt_diff = cfg.safety * grid.h**2 / (2.0 * n)
    checkpoint_times = np.asarray(
        cfg.checkpoint_times if len(cfg.checkpoint_times) else log_checkpoints(cfg.t_end),
        dtype=float)
    checkpoint_times = checkpoint_times[checkpoint_times <= cfg.t_end * (1 + 1e-12)]

    u = u0.values.astype(float).copy()
    scratch = [np.empty_like(u) for _ in range(4)]

    def rhs(v, out):
        lap(v, out)
        if cfg.nonlinear:
            out += np.abs(v) ** (p - 1.0) * v
        if dirichlet:
            out[-1] = 0.0
        return out

    t = 0.0
    series = []
    checkpoints = []
    next_cp = 0
    step = 0
    status = None

    sup = float(np.max(np.abs(u)))
    wsup = float(np.max(r_pow * np.abs(u)))
    series.append((t, sup, wsup, 0.0))

    while t < cfg.t_end:
        dt = min(cfg.dt_init, dt_diff)
        if cfg.nonlinear and sup > 0:
            dt = min(dt, 0.5 * sup ** (1.0 - p))
        if dt < cfg.dt_min:
            status = _blowup_status(series, params, t)
            break
        # land exactly on the next checkpoint / horizon
        target = cfg.t_end if next_cp >= len(checkpoint_times) else checkpoint_times[next_cp]
        dt = min(dt, target - t) if target > t else dt
        k1, k2, k3, k4 = scratch
        rhs(u, k1)
        rhs(u + (0.5 * dt) * k1, k2)
        rhs(u + (0.5 * dt) * k2, k3)
        rhs(u + dt * k3, k4)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if dirichlet:
            u[-1] = 0.0
        t += dt
        step += 1

        if not np.all(np.isfinite(u)):
            status = TrajectoryStatus("aborted", t, reason="nonfinite")
            break
        sup = float(np.max(np.abs(u)))
        wsup = float(np.max(r_pow * np.abs(u)))
        if step % cfg.series_stride == 0:
            series.append((t, sup, wsup, dt))
        if not dirichlet and sup > 0 and abs(u[-2]) > cfg.boundary_guard * sup:
            status = TrajectoryStatus("aborted", t, reason="boundary_contamination")
            break
        if next_cp < len(checkpoint_times) and t >= checkpoint_times[next_cp] * (1 - 1e-12):
            checkpoints.append((t, make_field(grid, u, u0.boundary)))
            next_cp += 1
        if sup >= cfg.blowup_threshold:
            status = _blowup_status(series, params, t)
            break
        if cfg.max_steps is not None and step >= cfg.max_steps:
            status = TrajectoryStatus("aborted", t, reason="max_steps")
            break

    if status is None:
        status = TrajectoryStatus("reached_horizon", t)
    if series[-1][0] < t:
        series.append((t, sup, wsup, 0.0))

    traj = Trajectory(params=params, checkpoints=checkpoints,
                      series=np.array(series), status=status,
                      boundary_mode=DIRICHLET if dirichlet else FREE)
    return traj


def _blowup_status(series, params, t):
    arr = np.array(series)
    fit = _fit_blowup_time(arr, params)
    if fit is None:
        # ODE-tail fallback: T - t ~ sup^(1-p)/(p-1)
        sup = arr[-1, 1]
        t_est = t + sup ** (1.0 - params.p) / (params.p - 1.0)
        return TrajectoryStatus("blowup", t, T_est=t_est, fit_quality=None)
    t_est, r2 = fit
    if t_est <= t:
        t_est = t + arr[-1, 1] ** (1.0 - params.p) / (params.p - 1.0)
    return TrajectoryStatus("blowup", t, T_est=t_est, fit_quality=r2)


def _fit_blowup_time(series: np.ndarray, params: ModelParams):
    """Linear fit of sup^(1-p) against t over the last decade of growth.

    The window is only ~sup_final^(1-p) wide in t, so the regression is done
    on centered variables (differences of nearby floats are exact) to avoid
    cancellation; the fitted line crosses zero at the estimated blowup time.
    """
    t_arr, sup = series[:, 0], series[:, 1]
    cut = 10.0
    mask = (sup >= sup[-1] / cut) & (sup > 0)
    # the adaptive step puts only a handful of samples per decade of growth;
    # widen decade by decade until the fit window is populated
    while mask.sum() < 8 and cut < 1e16:
        cut *= 10.0
        mask = (sup >= sup[-1] / cut) & (sup > 0)
    if mask.sum() < 8:
        return None
    x = t_arr[mask]
    y = sup[mask] ** (1.0 - params.p)
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    var = float(np.sum(dx * dx))
    if var == 0.0:
        return None
    slope = float(np.sum(dx * (y - ym))) / var
    if slope >= 0:
        return None
    resid = (y - ym) - slope * dx
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 0.0
    return xm - ym / slope, r2


@dataclass(frozen=True)
class BlowupFit:
    T_est: float | None
    fit_quality: float | None
    ok: bool
    reason: str | None = None


def estimate_blowup_time(traj: Trajectory, params: ModelParams) -> BlowupFit:
    """Type-I extrapolation of the blowup time from the recorded sup-norm series."""
    sup = traj.sup_norms
    grew = sup[-1] >= 1e3 * max(sup[0], 1e-300)
    if traj.status.kind != "blowup" and not grew:
        return BlowupFit(None, None, False, "run is not blowing up")
    fit = _fit_blowup_time(traj.series, params)
    if fit is None:
        return BlowupFit(None, None, False, "fewer than 8 samples in the fit window")
    t_est, r2 = fit
    return BlowupFit(t_est, r2, True)


@dataclass(frozen=True)
class DecayDiagnostics:
    slope: float | None          # log-log decay rate of the sup-norm, final decade
    sup_t_beta_norm: float       # max over the run of t^(1/(p-1)) ||u(t)||_inf
    tail_monotone: bool          # is t^(1/(p-1)) ||u(t)||_inf nonincreasing over the final decade
    defined: bool


def decay_diagnostics(traj: Trajectory, params: ModelParams) -> DecayDiagnostics:
    if traj.status.kind != "reached_horizon":
        raise ValueError("decay diagnostics need a run that reached the horizon")
    t_arr, sup = traj.times, traj.sup_norms
    pos = t_arr > 0
    beta_series = t_arr[pos] ** params.beta * sup[pos]
    sup_t_beta = float(beta_series.max()) if beta_series.size else 0.0
    t_hi = t_arr[-1]
    final = pos & (t_arr >= t_hi / 10.0)
    s_fin = sup[final]
    if s_fin.size < 4 or np.any(s_fin <= 0):
        return DecayDiagnostics(None, sup_t_beta, s_fin.size >= 2 and not np.any(s_fin > 0),
                                defined=False)
    slope = float(np.polyfit(np.log(t_arr[final]), np.log(s_fin), 1)[0])
    w = t_arr[final] ** params.beta * s_fin
    tail_monotone = bool(np.all(np.diff(w) <= 1e-8 * w.max()))
    return DecayDiagnostics(slope, sup_t_beta, tail_monotone, defined=True)


def linear_domination(traj: Trajectory, u0: RadialField) -> float:
    """max over checkpoints and nodes of |u(x,t)| / (G_t * |u0|)(x).

    A finite stable value certifies that the run is dominated by a constant
    multiple of the heat flow of |u0|.
    """
    abs_u0 = np.abs(u0.values)
    worst = 0.0
    for t, f in traj.checkpoints:
        denom = heat_kernel_matrix(u0.grid, t) @ abs_u0
        mask = denom >= 1e-14
        if not np.any(mask):
            continue
        worst = max(worst, float(np.max(np.abs(f.values[mask]) / denom[mask])))
    return worst


def gradient_majorant_check(traj: Trajectory, u0: RadialField, grad_u0: RadialField,
                            t_small: float) -> tuple[bool, float]:
    """Check |du/dr(t)| <= 2 (G_t * |grad u0|) nodewise for checkpoints t <= t_small.

    Returns (holds, worst_ratio) where worst_ratio is the max of the left side
    over twice the smoothed gradient; t_small must be in the first 5% of the run.
    """
    horizon = traj.series[-1, 0]
    if t_small > 0.05 * horizon * (1 + 1e-12):
        raise ValueError("t_small must lie in the first 5% of the run")
    abs_g0 = np.abs(grad_u0.values)
    worst = 0.0
    checked = 0
    for t, f in traj.checkpoints:
        if t > t_small:
            continue
        checked += 1
        majorant = 2.0 * (heat_kernel_matrix(u0.grid, t) @ abs_g0)
        du = np.abs(np.gradient(f.values, u0.grid.h))
        du[0] = 0.0
        mask = majorant >= 1e-14
        bad = du[~mask] > 1e-12
        if np.any(bad):
            return False, math.inf
        if np.any(mask):
            worst = max(worst, float(np.max(du[mask] / majorant[mask])))
    if checked == 0:
        raise ValueError("no checkpoints inside (0, t_small]")
    return worst <= 1.0 + 1e-9, worst


def family_sup_after(trajs: list[Trajectory], t0: float) -> float:
    """sup over a family of runs of sup_{t >= t0} ||u(t)||_inf (delayed-bound table entry)."""
    best = 0.0
    for traj in trajs:
        mask = traj.times >= t0
        if np.any(mask):
            best = max(best, float(traj.sup_norms[mask].max()))
    return best
