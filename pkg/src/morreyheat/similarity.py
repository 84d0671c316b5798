"""Backward similarity variables, the Gaussian-weighted energy, and the
kernel functionals that tie the energy to critical Morrey norms.

A field u(., t) rescaled around (a=0, T) is w(y, s) = (T-t)^beta u(y sqrt(T-t), t)
with s = -log(T-t).  The energy of w uses the weight rho(y) = exp(-|y|^2/4),
and is nonincreasing in s along solutions of the flow.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .evolution import Trajectory
from .fields import RadialField
from .params import ModelParams
from .quadrature import TruncationWarning, gauss_convolve, sphere_area


@dataclass(frozen=True)
class RescaledField:
    """Similarity-variable profile w(y) at one rescaled time s = -log(T-t)."""

    y: np.ndarray
    values: np.ndarray
    T: float
    t: float
    s: float
    truncated: bool  # True when the stated y-range maps past the field's r_max


def similarity_grid(y_max: float = 10.0, h_y: float = 0.01) -> np.ndarray:
    if y_max < 8.0:
        raise ValueError("y_max must be >= 8 so the Gaussian weight is negligible at the edge")
    return np.linspace(0.0, y_max, int(round(y_max / h_y)) + 1)


def to_similarity(field: RadialField, t: float, T: float, params: ModelParams,
                  y_max: float = 10.0, h_y: float = 0.01) -> RescaledField:
    """Rescale a field sampled at time t around the blowup ansatz (0, T)."""
    if not T > t:
        raise ValueError("rescaling time T must exceed the sample time t")
    y = similarity_grid(y_max, h_y)
    tau = T - t
    r = y * math.sqrt(tau)
    truncated = r[-1] > field.grid.r_max * (1 + 1e-12)
    if truncated:
        warnings.warn(
            f"similarity window reaches r={r[-1]:.3g} beyond r_max={field.grid.r_max:g}",
            TruncationWarning, stacklevel=2)
    interp = PchipInterpolator(field.grid.nodes, field.values, extrapolate=False)
    vals = interp(np.minimum(r, field.grid.r_max))
    vals = np.where(np.isnan(vals), 0.0, vals)
    w = tau**params.beta * vals
    w.setflags(write=False)
    y.setflags(write=False)
    return RescaledField(y=y, values=w, T=T, t=t, s=-math.log(tau), truncated=truncated)


def _weighted_integrals(w: RescaledField, params: ModelParams):
    """(E, m, P, G): energy, weighted mass, weighted |w|^{p+1} and |w'|^2 integrals."""
    n, p, beta = params.n, params.p, params.beta
    y = w.y
    rho_vol = np.exp(-(y**2) / 4.0) * y ** (n - 1)
    dw = np.gradient(w.values, y[1] - y[0])
    dw[0] = 0.0
    area = sphere_area(n)
    mass = area * np.trapezoid(w.values**2 * rho_vol, y)
    pot = area * np.trapezoid(np.abs(w.values) ** (p + 1) * rho_vol, y)
    grad = area * np.trapezoid(dw**2 * rho_vol, y)
    energy_val = 0.5 * grad + 0.5 * beta * mass - pot / (p + 1.0)
    return energy_val, mass, pot, grad


def energy(w: RescaledField, params: ModelParams) -> tuple[float, float]:
    """Weighted energy E and weighted mass m = integral w^2 rho of a rescaled profile."""
    e, m, _, _ = _weighted_integrals(w, params)
    return float(e), float(m)


def stationary_energy(params: ModelParams) -> float:
    """Closed-form energy of the flat rescaled profile w = beta^beta."""
    kappa2 = params.beta ** (2.0 * params.beta)
    return (kappa2 * params.beta * (params.p - 1.0) / (2.0 * (params.p + 1.0))
            * (4.0 * math.pi) ** (params.n / 2.0))


@dataclass
class EnergySeries:
    T: float
    a: float
    s: np.ndarray
    E: np.ndarray
    m: np.ndarray
    nonlinear_mass: np.ndarray      # integral |w|^{p+1} rho
    identity_residual: np.ndarray   # |dm/ds /2 - (-2E + (p-1)/(p+1) * nonlinear_mass)|, nan at ends
    identity_relative: np.ndarray
    monotone_violation: float       # worst E(s_{j+1}) - E(s_j) - tol_E, <= 0 when monotone
    min_energy: float
    truncated: bool

    @property
    def monotone_ok(self) -> bool:
        return self.monotone_violation <= 0.0


def energy_series(traj: Trajectory, T: float, params: ModelParams, s_grid,
                  y_max: float = 10.0, h_y: float = 0.01) -> EnergySeries:
    """Energy/mass along a trajectory in similarity variables at rescaling time T.

    The trajectory must carry checkpoints at exactly the times T - exp(-s) for
    every s in s_grid (use checkpoint_times_for_s_grid when configuring the run).
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.size < 3 or not np.all(np.diff(s_grid) > 0):
        raise ValueError("s_grid must be increasing with at least 3 points")
    wanted = T - np.exp(-s_grid)
    have = {round(t, 12): f for t, f in traj.checkpoints}
    e_arr = np.empty_like(s_grid)
    m_arr = np.empty_like(s_grid)
    p_arr = np.empty_like(s_grid)
    g_arr = np.empty_like(s_grid)
    truncated = False
    for i, (s, t) in enumerate(zip(s_grid, wanted)):
        key = round(float(t), 12)
        if key not in have:
            raise ValueError(f"trajectory lacks a checkpoint at t={t!r} (s={s:g})")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            w = to_similarity(have[key], float(t), T, params, y_max, h_y)
        truncated |= w.truncated
        e_arr[i], m_arr[i], p_arr[i], g_arr[i] = _weighted_integrals(w, params)

    dm = np.full_like(s_grid, np.nan)
    dm[1:-1] = (m_arr[2:] - m_arr[:-2]) / (s_grid[2:] - s_grid[:-2])
    balance = -2.0 * e_arr + (params.p - 1.0) / (params.p + 1.0) * p_arr
    residual = np.abs(0.5 * dm - balance)
    # relative to the largest constituent of the identity, not to the (often
    # cancelling) net terms
    scale = np.maximum.reduce([np.abs(0.5 * dm), g_arr, params.beta * m_arr,
                               p_arr / (params.p + 1.0),
                               np.full_like(s_grid, 1e-30)])
    relative = residual / scale

    tol = 1e-6 * (1.0 + np.abs(e_arr[:-1]))
    monotone_violation = float(np.max(np.diff(e_arr) - tol)) if e_arr.size > 1 else -math.inf
    return EnergySeries(T=T, a=0.0, s=s_grid, E=e_arr, m=m_arr, nonlinear_mass=p_arr,
                        identity_residual=residual, identity_relative=relative,
                        monotone_violation=monotone_violation,
                        min_energy=float(e_arr.min()), truncated=truncated)


def checkpoint_times_for_s_grid(T: float, s_grid) -> np.ndarray:
    """The sample times t = T - exp(-s) a solver run must checkpoint for energy_series."""
    s_grid = np.asarray(s_grid, dtype=float)
    return T - np.exp(-s_grid)


def mass_bound_constant(series: EnergySeries, params: ModelParams) -> float:
    """Fitted C in m(s) <= C E(s_0)^{2/(p+1)} along one energy series."""
    e0 = max(series.E[0], 1e-300)
    return float(series.m.max() / e0 ** (2.0 / (params.p + 1.0)))


def functional_A(u0: RadialField, grad_u0: RadialField, T: float, a: float,
                 params: ModelParams) -> float:
    """T^((p+1)/(p-1)) (G_T*|grad u0|^2)(a) + T^(2/(p-1)) (G_T*|u0|^2)(a)."""
    if not T > 0:
        raise ValueError("T must be positive")
    from .fields import make_field
    p = params.p
    g2 = make_field(u0.grid, grad_u0.values**2)
    u2 = make_field(u0.grid, u0.values**2)
    return (T ** ((p + 1.0) / (p - 1.0)) * gauss_convolve(g2, T, a)
            + T ** (2.0 / (p - 1.0)) * gauss_convolve(u2, T, a))


def functional_N(u0: RadialField, grad_u0: RadialField, t0: float, t_grid,
                 params: ModelParams, centers=None) -> float:
    """Finite surrogate of sup over t >= t0 and centers of the functional_A integrand."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < t0 * (1 - 1e-12)):
        raise ValueError("t_grid must lie in [t0, infinity)")
    if centers is None:
        from .morrey import MorreyLattice
        centers = MorreyLattice.default(u0.grid).centers
    best = 0.0
    for t in t_grid:
        best = max(best, max(functional_A(u0, grad_u0, float(t), float(a), params)
                             for a in centers))
    return best
