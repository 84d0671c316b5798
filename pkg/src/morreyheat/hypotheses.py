"""Numeric checkers for the decay/integrability classes of admissible initial data.

Each condition is judged on the sampled grid: integrability through least-squares
tail-exponent fits (a decay strictly faster than the target, by at least the
o-margin 0.1, counts as "little-o"), and kernel-weighted limits through a
fitted trend slope on a logarithmic time grid.
"""

import math
from dataclasses import dataclass

import numpy as np

from .fields import RadialField, make_field
from .params import ModelParams
from .quadrature import gauss_convolve

O_MARGIN = 0.1            # fitted exponent must beat the target by this much
TREND_SLOPE = -0.05       # log-log slope that certifies a vanishing limit
TAIL_FLOOR = 1e-12
TAIL_FRACTION = 0.25
MIN_TAIL_POINTS = 8


@dataclass(frozen=True)
class TailFit:
    exponent: float | None     # decay exponent gamma in |f| ~ r^(-gamma)
    n_points: int
    resolved: bool


def tail_exponent(f: RadialField, fraction: float = TAIL_FRACTION,
                  floor: float = TAIL_FLOOR) -> TailFit:
    """Least-squares fit of log|f| against log r over the outer quarter of the
    nodes whose magnitude still exceeds the floor."""
    r = f.grid.nodes
    vals = np.abs(f.values)
    alive = np.nonzero(vals > floor)[0]
    if alive.size == 0:
        return TailFit(None, 0, False)
    last = alive[-1]
    start = max(1, int(math.ceil(last * (1.0 - fraction))))
    window = np.arange(start, last + 1)
    window = window[vals[window] > floor]
    if window.size < MIN_TAIL_POINTS:
        return TailFit(None, int(window.size), False)
    slope = np.polyfit(np.log(r[window]), np.log(vals[window]), 1)[0]
    return TailFit(float(-slope), int(window.size), True)


@dataclass(frozen=True)
class ConditionCheck:
    satisfied: bool | None      # None when undecidable at this resolution
    evidence: dict

    @property
    def undecidable(self) -> bool:
        return self.satisfied is None


@dataclass(frozen=True)
class HypothesisReport:
    gradient_integrability: ConditionCheck   # grad u0 in L^q, q in [2, n(p-1)/(p+1))
    gradient_decay: ConditionCheck           # |grad u0| = o(r^(-2/(p-1)-1))
    kernel_limit: ConditionCheck             # weighted kernel quantities -> 0
    energy_integrability: ConditionCheck     # |u0|^(p+1) + |grad u0|^2 in L^m
    pointwise_decay: ConditionCheck          # |u0| + r|grad u0| = o(r^(-2/(p-1)))


def _zero_check() -> ConditionCheck:
    return ConditionCheck(True, {"zero_data": True})


def _lq_radial(vals: np.ndarray, grid, q: float) -> float:
    from .quadrature import sphere_area, volume_weights
    return float((sphere_area(grid.n)
                  * np.sum(volume_weights(grid) * np.abs(vals) ** q)) ** (1.0 / q))


def check_hypotheses(f: RadialField, grad_f: RadialField, params: ModelParams,
                     t_grid=None, centers=None,
                     consistency_tol: float = 0.05) -> HypothesisReport:
    """Evaluate the admissibility conditions on sampled data.

    grad_f must be the sampled |du0/dr|, consistent with f's centered
    differences to within consistency_tol relative to the gradient scale.
    """
    grid = f.grid
    n, p = params.n, params.p
    k_crit = 2.0 / (p - 1.0)

    g_vals = np.abs(grad_f.values)
    fd = np.abs(np.gradient(f.values, grid.h))
    fd[0] = 0.0
    scale = max(float(g_vals.max()), 1e-300)
    # 95th percentile so isolated kinks in the data do not trip the guard
    mismatch = float(np.percentile(np.abs(fd[1:-1] - g_vals[1:-1]), 95)) / scale
    if g_vals.max() > 0 and mismatch > consistency_tol:
        raise ValueError(
            f"grad_f disagrees with centered differences of f ({mismatch:.3g} relative)")

    zero_f = float(np.abs(f.values).max()) == 0.0
    zero_g = float(g_vals.max()) == 0.0

    fit_g = tail_exponent(grad_f)
    fit_f = tail_exponent(f)
    rg = make_field(grid, grid.nodes * g_vals)
    fit_rg = tail_exponent(rg)

    # gradient integrability: grad u0 in L^q for some q in [2, n(p-1)/(p+1))
    q_hi = n * (p - 1.0) / (p + 1.0)
    if zero_g:
        c21 = _zero_check()
    elif q_hi <= 2.0:
        c21 = ConditionCheck(False, {"admissible_q_interval": (2.0, q_hi)})
    else:
        qs = [2.0, math.sqrt(2.0 * q_hi), 0.999 * q_hi]
        norms = {f"L{q:.3f}": _lq_radial(g_vals, grid, q) for q in qs}
        if not fit_g.resolved:
            c21 = ConditionCheck(None, {"norms": norms, "tail_points": fit_g.n_points})
        else:
            need = n / (0.999 * q_hi)
            c21 = ConditionCheck(fit_g.exponent > need + O_MARGIN,
                                 {"norms": norms, "tail_exponent": fit_g.exponent,
                                  "required_exponent": need})

    # gradient decay: |grad u0| = o(r^(-2/(p-1)-1))
    target_g = k_crit + 1.0
    if zero_g:
        c22 = _zero_check()
    elif not fit_g.resolved:
        c22 = ConditionCheck(None, {"tail_points": fit_g.n_points})
    else:
        c22 = ConditionCheck(fit_g.exponent >= target_g + O_MARGIN,
                             {"tail_exponent": fit_g.exponent, "target": target_g})

    # kernel-weighted limit on a logarithmic horizon
    if t_grid is None:
        t_grid = np.geomspace(1.0, 1e4, 5)
    if centers is None:
        centers = np.concatenate(([0.0], np.geomspace(grid.h, grid.r_max, 8)))
    if zero_f and zero_g:
        c24 = _zero_check()
    else:
        u2 = make_field(grid, f.values**2)
        g2 = make_field(grid, g_vals**2)
        qs_t = []
        for t in t_grid:
            sup_u = max(gauss_convolve(u2, float(t), float(a)) for a in centers)
            sup_g = max(gauss_convolve(g2, float(t), float(a)) for a in centers)
            qs_t.append(t ** ((p + 1.0) / (p - 1.0)) * sup_g + t ** k_crit * sup_u)
        qs_t = np.asarray(qs_t)
        if np.all(qs_t < 1e-290):
            c24 = ConditionCheck(True, {"kernel_values": qs_t.tolist()})
        else:
            slope = float(np.polyfit(np.log(np.asarray(t_grid, dtype=float)),
                                     np.log(np.maximum(qs_t, 1e-300)), 1)[0])
            c24 = ConditionCheck(slope < TREND_SLOPE,
                                 {"kernel_values": qs_t.tolist(), "trend_slope": slope})

    # energy integrability: |u0|^(p+1) + |grad u0|^2 in L^m, m in [1, n(p-1)/(2(p+1)))
    m_hi = n * (p - 1.0) / (2.0 * (p + 1.0))
    combo = np.abs(f.values) ** (p + 1.0) + g_vals**2
    fit_c = tail_exponent(make_field(grid, combo))
    if zero_f and zero_g:
        c25 = _zero_check()
    elif m_hi <= 1.0:
        c25 = ConditionCheck(False, {"admissible_m_interval": (1.0, m_hi)})
    else:
        ms = [1.0, math.sqrt(m_hi), 0.999 * m_hi]
        norms = {f"L{m:.3f}": _lq_radial(combo, grid, m) for m in ms}
        if not fit_c.resolved:
            c25 = ConditionCheck(None, {"norms": norms, "tail_points": fit_c.n_points})
        else:
            need = n / (0.999 * m_hi)
            c25 = ConditionCheck(fit_c.exponent > need + O_MARGIN,
                                 {"norms": norms, "tail_exponent": fit_c.exponent,
                                  "required_exponent": need})

    # pointwise decay: |u0| + r |grad u0| = o(r^(-2/(p-1)))
    if zero_f and zero_g:
        c26 = _zero_check()
    else:
        checks, evid = [], {}
        if not zero_f:
            if not fit_f.resolved:
                checks.append(None)
            else:
                checks.append(fit_f.exponent >= k_crit + O_MARGIN)
                evid["u_tail_exponent"] = fit_f.exponent
        if not zero_g:
            if not fit_rg.resolved:
                checks.append(None)
            else:
                checks.append(fit_rg.exponent >= k_crit + O_MARGIN)
                evid["r_grad_tail_exponent"] = fit_rg.exponent
        evid["target"] = k_crit
        if any(c is None for c in checks):
            c26 = ConditionCheck(None, evid)
        else:
            c26 = ConditionCheck(all(checks), evid)

    return HypothesisReport(gradient_integrability=c21, gradient_decay=c22,
                            kernel_limit=c24, energy_integrability=c25,
                            pointwise_decay=c26)
