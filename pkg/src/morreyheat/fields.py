"""Radial grids, sampled radial fields, sup-type norms and the critical rescaling."""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .params import ModelParams

# Boundary tags.  DIRICHLET pins u(R_max) = 0 (ball problem); FREE marks a
# truncated whole-space field, extended by zero beyond R_max, with only the
# even-at-origin symmetry built in.
DIRICHLET = "dirichlet_at_Rmax"
FREE = "even_at_origin_only"
_BOUNDARY_TAGS = (DIRICHLET, FREE)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid r_0 = 0 < r_1 < ... < r_M = r_max."""

    n: int
    nodes: np.ndarray
    h: float

    @property
    def m(self) -> int:
        return len(self.nodes) - 1

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])


def make_grid(n: int, r_max: float, m: int) -> RadialGrid:
    """Uniform grid with m intervals on [0, r_max]; m >= 16."""
    if n < 3:
        raise ValueError("dimension n must be >= 3")
    if m < 16:
        raise ValueError(f"grid needs at least 16 intervals, got {m}")
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    nodes = np.linspace(0.0, float(r_max), m + 1)
    nodes.setflags(write=False)
    return RadialGrid(n=int(n), nodes=nodes, h=float(nodes[1] - nodes[0]))


@dataclass(frozen=True)
class RadialField:
    """Samples u_i = u(r_i) of a radially symmetric function, plus boundary tag."""

    grid: RadialGrid
    values: np.ndarray
    boundary: str = FREE


def make_field(grid: RadialGrid, values, boundary: str = FREE) -> RadialField:
    values = np.asarray(values, dtype=float)
    if values.shape != grid.nodes.shape:
        raise ValueError(f"expected {grid.nodes.shape[0]} samples, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("field samples must be finite")
    if boundary not in _BOUNDARY_TAGS:
        raise ValueError(f"unknown boundary tag {boundary!r}")
    if boundary == DIRICHLET and values[-1] != 0.0:
        raise ValueError("dirichlet_at_Rmax requires u(r_max) = 0")
    out = values.copy()
    out.setflags(write=False)
    return RadialField(grid=grid, values=out, boundary=boundary)


def zero_field(grid: RadialGrid, boundary: str = FREE) -> RadialField:
    return make_field(grid, np.zeros(grid.m + 1), boundary)


def sup_norm(f: RadialField) -> float:
    """max_i |u_i|."""
    return float(np.max(np.abs(f.values)))


def weighted_sup_norm(f: RadialField, k: float) -> float:
    """max_i r_i^k |u_i|, the radial form of ess sup |x|^k |f|; k >= 0."""
    if k < 0:
        raise ValueError("weight exponent k must be >= 0")
    if k == 0:
        return sup_norm(f)
    return float(np.max(f.grid.nodes**k * np.abs(f.values)))


def radial_derivative(f: RadialField) -> RadialField:
    """Centered-difference du/dr; zero at the origin by even symmetry."""
    d = np.gradient(f.values, f.grid.h)
    d[0] = 0.0
    if f.boundary == DIRICHLET:
        # keep the tag legal; the one-sided end value is diagnostic only
        return make_field(f.grid, np.where(np.arange(d.size) == d.size - 1, 0.0, d), DIRICHLET)
    return make_field(f.grid, d, f.boundary)


def rescale_field(f: RadialField, lam: float, params: ModelParams) -> RadialField:
    """Critical rescaling u_lam(r) = lam^(2/(p-1)) u(lam r) resampled onto f's grid.

    Values needed beyond r_max are taken as zero (zero-extension convention).
    Monotone cubic interpolation keeps the resampling overshoot-free.
    """
    if not lam > 0:
        raise ValueError("scaling factor must be positive")
    amp = lam ** (2.0 / (params.p - 1.0))
    if lam == 1.0:
        return f
    r_src = f.grid.nodes * lam
    # near-zero slopes make scipy's harmonic-mean weights overflow harmlessly
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        interp = PchipInterpolator(f.grid.nodes, f.values, extrapolate=False)
    vals = interp(r_src)
    vals = np.where(np.isnan(vals), 0.0, vals) * amp
    if f.boundary == DIRICHLET:
        vals[-1] = 0.0
    return make_field(f.grid, vals, f.boundary)


# ---------------------------------------------------------------------------
# Named analytic initial-data families.
# ---------------------------------------------------------------------------


def gaussian(grid: RadialGrid, amplitude: float, width: float, boundary: str = FREE) -> RadialField:
    """amplitude * exp(-(r/width)^2)."""
    vals = amplitude * np.exp(-((grid.nodes / width) ** 2))
    if boundary == DIRICHLET:
        vals[-1] = 0.0
    return make_field(grid, vals, boundary)


def gaussian_gradient(grid: RadialGrid, amplitude: float, width: float) -> RadialField:
    """|d/dr| of the gaussian profile, analytic."""
    r = grid.nodes
    vals = np.abs(-2.0 * amplitude * r / width**2 * np.exp(-((r / width) ** 2)))
    return make_field(grid, vals, FREE)


def plateau(grid: RadialGrid, amplitude: float, radius: float, ramp: float,
            boundary: str = FREE) -> RadialField:
    """Flat core of height `amplitude` up to `radius`, cosine ramp to 0 over `ramp`."""
    r = grid.nodes
    vals = np.zeros_like(r)
    vals[r <= radius] = amplitude
    on_ramp = (r > radius) & (r < radius + ramp)
    vals[on_ramp] = amplitude * 0.5 * (1.0 + np.cos(np.pi * (r[on_ramp] - radius) / ramp))
    if boundary == DIRICHLET:
        vals[-1] = 0.0
    return make_field(grid, vals, boundary)


def power_tail(grid: RadialGrid, amplitude: float, exponent: float, core_radius: float,
               boundary: str = FREE) -> RadialField:
    """amplitude * (1 + (r/core_radius)^2)^(-exponent/2); tail ~ r^(-exponent)."""
    vals = amplitude * (1.0 + (grid.nodes / core_radius) ** 2) ** (-exponent / 2.0)
    if boundary == DIRICHLET:
        vals[-1] = 0.0
    return make_field(grid, vals, boundary)


def power_tail_gradient(grid: RadialGrid, amplitude: float, exponent: float,
                        core_radius: float) -> RadialField:
    r = grid.nodes
    base = 1.0 + (r / core_radius) ** 2
    vals = np.abs(amplitude * (-exponent) * (r / core_radius**2) * base ** (-exponent / 2.0 - 1.0))
    return make_field(grid, vals, FREE)


def indicator(grid: RadialGrid, radius: float, boundary: str = FREE) -> RadialField:
    vals = (grid.nodes <= radius).astype(float)
    if boundary == DIRICHLET:
        vals[-1] = 0.0
    return make_field(grid, vals, boundary)


def singular_steady_state_amplitude(params: ModelParams) -> float:
    """L with L^(p-1) = (2/(p-1)) (n - 2 - 2/(p-1)), the exact scale-invariant profile height."""
    p, n = params.p, params.n
    k = 2.0 / (p - 1.0)
    val = k * (n - 2.0 - k)
    if val <= 0:
        raise ValueError("no positive singular steady state for these (n, p)")
    return val ** (1.0 / (p - 1.0))


def singular_steady_state(grid: RadialGrid, params: ModelParams, boundary: str = FREE) -> RadialField:
    """L r^(-2/(p-1)), capped at the first node value to regularize the origin."""
    big_l = singular_steady_state_amplitude(params)
    k = 2.0 / (params.p - 1.0)
    r = np.maximum(grid.nodes, grid.nodes[1])
    vals = big_l * r ** (-k)
    if boundary == DIRICHLET:
        vals[-1] = 0.0
    return make_field(grid, vals, boundary)


def _zero_profile(grid: RadialGrid, boundary: str = FREE) -> RadialField:
    return zero_field(grid, boundary)


PROFILES = {
    "gaussian": gaussian,
    "plateau": plateau,
    "power_tail": power_tail,
    "indicator": indicator,
    "singular_steady_state": singular_steady_state,
    "zero": _zero_profile,
}


def build_profile(name: str, grid: RadialGrid, params: ModelParams, args: dict,
                  boundary: str = FREE) -> RadialField:
    """Construct a named initial-data profile from keyword args (config entry point)."""
    if name not in PROFILES:
        raise ValueError(f"unknown profile {name!r}; known: {sorted(PROFILES)}")
    if name == "singular_steady_state":
        return PROFILES[name](grid, params, boundary=boundary, **args)
    return PROFILES[name](grid, boundary=boundary, **args)
