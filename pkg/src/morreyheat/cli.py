"""Configuration-driven experiment runner with reproducible CSV/JSON artifacts.

Every experiment kind reads one JSON config, writes its data artifacts plus a
manifest recording the config hash, wall time, and the pass/fail of each
invariant the pipeline checks.  The process exit code is 0 only if every
asserted invariant passed; exploratory (report-only) quantities never affect it.
"""

import argparse
import hashlib
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import duhamel, evolution, hypotheses, morrey, similarity, threshold
from .fields import DIRICHLET, build_profile, make_grid
from .io import write_csv, write_json
from .params import make_params


class ConfigError(ValueError):
    """Invalid experiment config; the message names the offending field path."""


class PipelineError(RuntimeError):
    """An experiment pipeline failed; wraps the module-level error."""


EXPERIMENT_KINDS = ("solve", "morrey", "smoothing", "energy", "picard",
                    "threshold", "dependence", "hypotheses")


def default_config(kind: str) -> dict:
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"experiment.kind: unknown kind {kind!r}")
    cfg = {
        "params": {"n": 5, "p": 3.0},
        "grid": {"r_max": 40.0, "nodes": 400},
        "solver": {"t_end": 20.0, "dt_init": 0.1, "dt_min": 1e-14, "safety": 0.8,
                   "blowup_threshold": 1e8, "checkpoints": 20, "series_stride": 1},
        "initial_data": {"profile": "gaussian", "args": {"amplitude": 0.05, "width": 2.0},
                         "boundary": DIRICHLET},
        "experiment": {"kind": kind},
        "output_dir": "out",
        "seed": 0,
    }
    extras = {
        "morrey": {"q": 2.0, "lam": 2.0, "refinements": 1},
        "smoothing": {"from_q": 2.0, "to_q": "inf", "lam": 2.0,
                      "t_lo": 0.01, "t_hi": 100.0, "t_count": 20},
        "energy": {"T_values": [2.0, 5.0, 10.0], "ds": 0.01, "t_lo_fraction": 0.5, "t_margin": 0.1},
        "picard": {"t_end": 1.0, "iterations": 8, "sample_times": [0.1, 0.5, 1.0],
                   "compare_classical": True},
        "threshold": {"rel_tol": 1e-3, "lambda_init": 1.0, "deltas": [0.1, 0.01, 0.001]},
        "dependence": {"T0": 5.0, "sizes": [1e-2, 1e-3, 1e-4], "q": 2.0,
                       "stability_tol": 0.25},
        "hypotheses": {},
    }
    cfg["experiment"].update(extras.get(kind, {}))
    if kind == "threshold":
        cfg["initial_data"]["args"] = {"amplitude": 1.0, "width": 2.0}
        cfg["solver"]["t_end"] = 200.0
        cfg["grid"] = {"r_max": 40.0, "nodes": 200}
    return cfg


def _get(cfg: dict, path: str, typ=None, required=True, default=None):
    node = cfg
    parts = path.split(".")
    for i, key in enumerate(parts):
        if not isinstance(node, dict) or key not in node:
            if required:
                raise ConfigError(path)
            return default
        node = node[key]
    if typ is not None and not isinstance(node, typ):
        if typ is float and isinstance(node, int):
            return float(node)
        raise ConfigError(f"{path}: expected {typ}, got {type(node).__name__}")
    return node


def _solver_config(cfg: dict, t_end=None, checkpoint_times=None) -> evolution.SolverConfig:
    sol = _get(cfg, "solver", dict)
    t_end = t_end if t_end is not None else _get(cfg, "solver.t_end", float)
    if checkpoint_times is None:
        cps = sol.get("checkpoints", 20)
        if isinstance(cps, int):
            checkpoint_times = evolution.log_checkpoints(t_end, cps)
        else:
            checkpoint_times = tuple(float(t) for t in cps)
    return evolution.SolverConfig(
        dt_init=float(sol.get("dt_init", 0.1)), dt_min=float(sol.get("dt_min", 1e-14)),
        safety=float(sol.get("safety", 0.8)),
        blowup_threshold=float(sol.get("blowup_threshold", 1e8)),
        t_end=float(t_end), checkpoint_times=tuple(checkpoint_times),
        series_stride=int(sol.get("series_stride", 1)))


@dataclass
class ArtifactBundle:
    kind: str
    out_dir: Path
    tables: dict = field(default_factory=dict)      # filename stem -> (header, rows)
    documents: dict = field(default_factory=dict)   # filename stem -> json-able dict
    checks: list = field(default_factory=list)      # {"name", "passed", "value"}
    plot_series: dict = field(default_factory=dict)  # stem -> rows of (series, x, y)
    manifest: dict = field(default_factory=dict)

    def check(self, name: str, passed: bool, value) -> None:
        self.checks.append({"name": name, "passed": bool(passed),
                            "value": None if value is None else float(value)})

    @property
    def all_passed(self) -> bool:
        return all(c["passed"] for c in self.checks)


def _build_inputs(cfg: dict):
    n = _get(cfg, "params.n", int)
    p = _get(cfg, "params.p", (int, float))
    try:
        params = make_params(n, float(p))
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from exc
    try:
        grid = make_grid(params.n, _get(cfg, "grid.r_max", (int, float)),
                         _get(cfg, "grid.nodes", int))
    except ValueError as exc:
        raise ConfigError(f"grid: {exc}") from exc
    prof = _get(cfg, "initial_data.profile", str, required=False, default="gaussian")
    args = _get(cfg, "initial_data.args", dict, required=False, default={})
    boundary = _get(cfg, "initial_data.boundary", str, required=False, default=DIRICHLET)
    try:
        u0 = build_profile(prof, grid, params, dict(args), boundary)
    except TypeError as exc:
        raise ConfigError(f"initial_data.args: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"initial_data.profile: {exc}") from exc
    return params, grid, u0


# ---------------------------------------------------------------------------
# Experiment pipelines.
# ---------------------------------------------------------------------------


def _run_solve(cfg, bundle, jobs):
    params, grid, u0 = _build_inputs(cfg)
    traj = evolution.solve(u0, params, _solver_config(cfg))
    bundle.tables["series"] = ("t,sup_norm,weighted_sup,dt",
                               [tuple(row) for row in traj.series])
    for i, (t, f) in enumerate(traj.checkpoints):
        bundle.tables[f"checkpoint_{i:03d}"] = ("r,u", list(zip(grid.nodes, f.values)))
    doc = {"status": traj.status.kind, "t_final": traj.status.t_final,
           "T_est": traj.status.T_est, "fit_quality": traj.status.fit_quality,
           "reason": traj.status.reason, "checkpoint_times": [t for t, _ in traj.checkpoints]}
    bundle.check("series_finite", bool(np.all(np.isfinite(traj.series))),
                 float(traj.series[-1, 1]))
    if traj.status.kind == "reached_horizon":
        diag = evolution.decay_diagnostics(traj, params)
        doc["decay_slope"] = diag.slope
        doc["sup_t_beta_norm"] = diag.sup_t_beta_norm
        doc["tail_monotone"] = diag.tail_monotone
        # the weighted-decay signature is only checkable once the weighted
        # norm has peaked before the final decade of the run
        mask = traj.times > 0
        w = traj.times[mask] ** params.beta * traj.sup_norms[mask]
        peaked_early = w.size > 0 and w.max() > 0 and \
            traj.times[mask][int(np.argmax(w))] < traj.status.t_final / 10.0
        if diag.defined and peaked_early:
            bundle.check("tail_monotone", diag.tail_monotone, diag.sup_t_beta_norm)
    if np.all(u0.values >= 0):
        floor = -1e-10 * max(float(np.max(u0.values)), 1e-300)
        worst = min((float(f.values.min()) for _, f in traj.checkpoints), default=0.0)
        bundle.check("positivity", worst >= floor, worst)
    bundle.documents["diagnostics"] = doc
    bundle.plot_series["decay"] = [("sup_norm", t, s) for t, s in
                                   zip(traj.times, traj.sup_norms)]


def _run_morrey(cfg, bundle, jobs):
    params, grid, u0 = _build_inputs(cfg)
    spec = morrey.MorreySpec(q=_get(cfg, "experiment.q", (int, float)),
                             lam=_get(cfg, "experiment.lam", (int, float)))
    refinements = int(_get(cfg, "experiment.refinements", int, required=False, default=1))
    lattice = morrey.MorreyLattice.default(grid)
    norms = []
    for level in range(refinements + 1):
        ev = morrey.morrey_evaluate(u0, spec, lattice)
        norms.append(ev.norm)
        rows = [(a, r, ev.cells[i, j])
                for i, a in enumerate(lattice.centers)
                for j, r in enumerate(lattice.radii)]
        bundle.tables[f"cells_level{level}"] = ("a,R,value", rows)
        if level < refinements:
            lattice = lattice.refine()
    doc = {"norms_by_level": norms, "argmax_center": ev.center, "argmax_radius": ev.radius,
           "q": spec.q, "lam": spec.lam,
           "small_scale": morrey.small_scale_diagnostic(u0, spec)}
    bundle.documents["morrey"] = doc
    monotone = all(norms[i + 1] >= norms[i] * (1 - 1e-12) for i in range(len(norms) - 1))
    bundle.check("refinement_monotone", monotone, norms[-1])


def _run_smoothing(cfg, bundle, jobs):
    params, grid, u0 = _build_inputs(cfg)
    to_q_raw = _get(cfg, "experiment.to_q")
    to_q = math.inf if to_q_raw in ("inf", None) else float(to_q_raw)
    t_grid = np.geomspace(_get(cfg, "experiment.t_lo", (int, float)),
                          _get(cfg, "experiment.t_hi", (int, float)),
                          _get(cfg, "experiment.t_count", int))
    points = morrey.smoothing_profile(u0, float(_get(cfg, "experiment.from_q", (int, float))),
                                      to_q, float(_get(cfg, "experiment.lam", (int, float))),
                                      t_grid)
    rows = [(pt.t, pt.norm_to, pt.ratio, pt.norm_from_after, pt.contraction_ok)
            for pt in points]
    bundle.tables["smoothing"] = ("t,norm_to,ratio,norm_from_after,contraction_ok", rows)
    bundle.check("contraction", all(pt.contraction_ok for pt in points),
                 max(pt.norm_from_after for pt in points))
    bundle.check("ratio_bounded", all(math.isfinite(pt.ratio) for pt in points),
                 max(pt.ratio for pt in points))
    bundle.plot_series["smoothing"] = [("ratio", pt.t, pt.ratio) for pt in points]


def _run_energy(cfg, bundle, jobs):
    params, grid, u0 = _build_inputs(cfg)
    t_values = [float(T) for T in _get(cfg, "experiment.T_values", list)]
    ds = float(_get(cfg, "experiment.ds", (int, float)))
    frac = float(_get(cfg, "experiment.t_lo_fraction", (int, float), required=False,
                      default=0.5))
    t_margin = float(_get(cfg, "experiment.t_margin", (int, float)))
    horizon = _get(cfg, "solver.t_end", (int, float))
    grids = {}
    all_times = []
    for T in t_values:
        # start each window at a fixed fraction of T so the s-compression of
        # the t-dynamics stays bounded and dm/ds is resolved at this ds
        t_lo = frac * T
        t_hi = min(horizon, T - t_margin)
        if t_hi <= t_lo:
            raise ConfigError(f"experiment.T_values: window empty for T={T}")
        s_grid = np.arange(-math.log(T - t_lo), -math.log(T - t_hi), ds)
        grids[T] = s_grid
        all_times.extend(similarity.checkpoint_times_for_s_grid(T, s_grid))
    times = tuple(sorted(set(round(float(t), 12) for t in all_times)))
    traj = evolution.solve(u0, params, _solver_config(cfg, checkpoint_times=times))
    if traj.status.kind != "reached_horizon":
        raise PipelineError(f"energy run did not reach the horizon: {traj.status}")
    rows_plot = []
    for T in t_values:
        series = similarity.energy_series(traj, T, params, grids[T])
        # endpoint rows have no centered dm/ds; their residual stays nan
        rows = list(zip(series.s, series.E, series.m, series.identity_residual))
        bundle.tables[f"energy_T{T:g}"] = ("s,E,m,residual_4_16", rows)
        rel = series.identity_relative[1:-1]
        bundle.check(f"energy_monotone_T{T:g}", series.monotone_ok,
                     series.monotone_violation)
        bundle.check(f"energy_nonneg_T{T:g}", series.min_energy >= -1e-6,
                     series.min_energy)
        bundle.check(f"energy_identity_T{T:g}", float(np.max(rel)) < 1e-3,
                     float(np.max(rel)))
        rows_plot.extend(("E_T%g" % T, s, e) for s, e in zip(series.s, series.E))
    bundle.plot_series["energy"] = rows_plot


def _run_picard(cfg, bundle, jobs):
    params, grid, u0 = _build_inputs(cfg)
    t_end = float(_get(cfg, "experiment.t_end", (int, float)))
    run = duhamel.picard_solve(u0, params, t_end,
                               int(_get(cfg, "experiment.iterations", int)),
                               [float(t) for t in _get(cfg, "experiment.sample_times", list)])
    rows = [(t, br, bi, d) for (t, br, bi), d in
            zip(run.budget, run.last_sample_diffs)]
    bundle.tables["budget"] = ("t,budget_r,budget_inf,cauchy_diff", rows)
    bundle.documents["picard"] = {
        "converged": run.converged, "diverged": run.diverged,
        "iterations": run.iterations, "nodes_used": run.nodes_used,
        "node_stability": run.node_stability, "convergence_ratio": run.convergence_ratio,
        "aux_r": run.aux_r, "beta_aux": run.beta_aux,
        "cauchy_diffs": list(run.cauchy_diffs)}
    bundle.check("picard_converged", run.converged and not run.diverged,
                 run.cauchy_diffs[-1] if run.cauchy_diffs else None)
    if _get(cfg, "experiment.compare_classical", bool, required=False, default=False):
        u0d = build_profile(_get(cfg, "initial_data.profile", str), grid, params,
                            dict(_get(cfg, "initial_data.args", dict)), DIRICHLET)
        traj = evolution.solve(u0d, params, _solver_config(
            cfg, t_end=t_end, checkpoint_times=tuple(run.sample_times)))
        worst = 0.0
        for (t, f), (_, fc) in zip(zip(run.sample_times, run.fields), traj.checkpoints):
            denom = float(np.max(np.abs(fc.values)))
            if denom > 0:
                worst = max(worst, float(np.max(np.abs(f.values - fc.values))) / denom)
        bundle.check("mild_classical_agreement", worst < 0.01, worst)
    bundle.plot_series["budget"] = [("budget_inf", t, bi) for t, _, bi in run.budget]


def _run_threshold(cfg, bundle, jobs):
    params, grid, phi = _build_inputs(cfg)
    cfg_solver = _solver_config(cfg)
    result = threshold.bisect_lambda(phi, params, cfg_solver,
                                     rel_tol=float(_get(cfg, "experiment.rel_tol", (int, float))),
                                     lambda_init=float(_get(cfg, "experiment.lambda_init",
                                                            (int, float))))
    doc = {"lambda_lo": result.lambda_lo, "lambda_hi": result.lambda_hi,
           "rel_width": result.rel_width, "stalled": result.stalled,
           "trials": result.trials,
           "morrey_series_lo": [[t, v] for t, v in result.morrey_series_lo],
           "morrey_series_hi": [[t, v] for t, v in result.morrey_series_hi]}
    bundle.documents["threshold"] = doc
    bundle.tables["morrey_series_lo"] = ("t,value", result.morrey_series_lo)
    bundle.tables["morrey_series_hi"] = ("t,value", result.morrey_series_hi)
    bundle.check("bracket_consistent", result.monotone_consistent, result.rel_width)
    bundle.check("bracket_tight", not result.stalled, result.rel_width)
    late = [(t, v) for t, v in result.morrey_series_lo if t >= 1.0]
    if len(late) >= 2:
        bundle.check("morrey_decreases_below_threshold", late[-1][1] < late[0][1],
                     late[-1][1] / late[0][1])
    deltas = _get(cfg, "experiment.deltas", list, required=False, default=None)
    if deltas and result.rel_width > 1e-2:
        doc["probes_skipped"] = "bracket wider than 1e-2"
        deltas = None
    if deltas:
        probes = threshold.borderline_probe(result, params, cfg_solver,
                                            [float(d) for d in deltas])
        doc["probes"] = [{"delta": p_.delta, "lambda": p_.lam, "verdict": p_.verdict,
                          "T_est": p_.T_est, "t0": p_.t0,
                          "morrey_start": p_.morrey_start, "morrey_end": p_.morrey_end}
                         for p_ in probes]
        bundle.check("subthreshold_probes_decay",
                     all(p_.verdict == "decaying" for p_ in probes if p_.delta > 0),
                     None)
    bundle.plot_series["morrey_threshold"] = (
        [("morrey_lo", t, v) for t, v in result.morrey_series_lo]
        + [("morrey_hi", t, v) for t, v in result.morrey_series_hi])


def _run_dependence(cfg, bundle, jobs):
    params, grid, u0 = _build_inputs(cfg)
    t0_horizon = float(_get(cfg, "experiment.T0", (int, float)))
    sizes = [float(s) for s in _get(cfg, "experiment.sizes", list)]
    spec = morrey.critical_spec(params, q=float(_get(cfg, "experiment.q", (int, float),
                                                     required=False, default=2.0)))
    from .fields import make_field

    def one(size):
        v0 = make_field(grid, u0.values * (1.0 + size), u0.boundary)
        return size, duhamel.continuous_dependence(u0, v0, t0_horizon, params, spec)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, sizes))
    else:
        results = [one(s) for s in sizes]
    rows = []
    max_ratios = []
    for size, res in results:
        rows.extend((size, t, r) for t, r in zip(res.times, res.ratios))
        max_ratios.append(res.max_ratio)
        bundle.check(f"run_completes_size{size:g}", not res.failed_before_T0,
                     res.max_ratio)
    bundle.tables["dependence"] = ("size,t,ratio", rows)
    spread = (max(max_ratios) - min(max_ratios)) / max(max_ratios)
    tol = float(_get(cfg, "experiment.stability_tol", (int, float), required=False,
                     default=0.25))
    bundle.check("lipschitz_stability", spread < tol, spread)
    bundle.documents["dependence"] = {"sizes": sizes, "max_ratios": max_ratios,
                                      "spread": spread}
    bundle.plot_series["dependence"] = [(f"size_{size:g}", t, r) for size, t, r in rows]


def _run_hypotheses(cfg, bundle, jobs):
    params, grid, u0 = _build_inputs(cfg)
    from .fields import radial_derivative
    grad = radial_derivative(u0)
    rep = hypotheses.check_hypotheses(u0, grad, params)
    doc = {}
    for name in ("gradient_integrability", "gradient_decay", "kernel_limit",
                 "energy_integrability", "pointwise_decay"):
        c = getattr(rep, name)
        doc[name] = {"satisfied": c.satisfied, "evidence": c.evidence}
    bundle.documents["hypotheses"] = doc
    # report-only: admissibility is data-dependent, not an invariant


_PIPELINES = {
    "solve": _run_solve, "morrey": _run_morrey, "smoothing": _run_smoothing,
    "energy": _run_energy, "picard": _run_picard, "threshold": _run_threshold,
    "dependence": _run_dependence, "hypotheses": _run_hypotheses,
}


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def run_experiment(cfg: dict, out_dir=None, jobs: int = 1) -> ArtifactBundle:
    """Validate the config, dispatch the pipeline, and write all artifacts.

    The manifest is written last; its `checks` entries record every invariant
    the pipeline asserted, with the measured value.
    """
    kind = _get(cfg, "experiment.kind", str)
    if kind not in _PIPELINES:
        raise ConfigError(f"experiment.kind: unknown kind {kind!r}")
    # fail fast on the universally required blocks
    _get(cfg, "params.n", int)
    _get(cfg, "params.p", (int, float))
    _get(cfg, "grid.r_max", (int, float))
    _get(cfg, "grid.nodes", int)
    _get(cfg, "seed", int, required=False, default=0)
    out = Path(out_dir if out_dir is not None
               else _get(cfg, "output_dir", str, required=False, default="out"))
    bundle = ArtifactBundle(kind=kind, out_dir=out)
    started = time.perf_counter()
    try:
        _PIPELINES[kind](cfg, bundle, jobs)
    except (ConfigError,):
        raise
    except Exception as exc:
        raise PipelineError(f"{kind} pipeline failed: {exc}") from exc
    wall = time.perf_counter() - started

    out.mkdir(parents=True, exist_ok=True)
    artifacts = []
    for stem, (header, rows) in sorted(bundle.tables.items()):
        write_csv(out / f"{stem}.csv", header, rows)
        artifacts.append(f"{stem}.csv")
    for stem, doc in sorted(bundle.documents.items()):
        write_json(out / f"{stem}.json", doc)
        artifacts.append(f"{stem}.json")
    artifacts.extend(emit_plot_data(bundle))
    bundle.manifest = {
        "kind": kind,
        "config_hash": config_hash(cfg),
        "wall_time_s": wall,
        "checks": bundle.checks,
        "artifacts": sorted(artifacts),
    }
    write_json(out / "manifest.json", bundle.manifest)
    return bundle


def emit_plot_data(bundle: ArtifactBundle) -> list:
    """Write the normalized long-format plot CSVs (`series,x,y`) of a bundle."""
    written = []
    for stem, rows in sorted(bundle.plot_series.items()):
        name = f"plot_{stem}.csv"
        write_csv(bundle.out_dir / name, "series,x,y", rows)
        written.append(name)
    return written


# ---------------------------------------------------------------------------
# Command line.
# ---------------------------------------------------------------------------


def _apply_overrides(cfg: dict, args) -> dict:
    if args.n is not None:
        cfg.setdefault("params", {})["n"] = args.n
    if args.p is not None:
        cfg.setdefault("params", {})["p"] = args.p
    if args.rmax is not None:
        cfg.setdefault("grid", {})["r_max"] = args.rmax
    if args.nodes is not None:
        cfg.setdefault("grid", {})["nodes"] = args.nodes
    if args.tend is not None:
        cfg.setdefault("solver", {})["t_end"] = args.tend
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="morreyheat",
        description="Radial semilinear-heat laboratory: solver, Morrey norms, "
                    "energy and threshold experiments")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in EXPERIMENT_KINDS:
        sp = sub.add_parser(kind, help=f"run the {kind} experiment")
        sp.add_argument("--config", type=Path, help="JSON config path")
        sp.add_argument("--out", type=Path, help="output directory")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--n", type=int)
        sp.add_argument("--p", type=float)
        sp.add_argument("--rmax", type=float)
        sp.add_argument("--nodes", type=int)
        sp.add_argument("--tend", type=float)
    args = parser.parse_args(argv)

    if args.config is not None:
        with open(args.config) as fh:
            cfg = json.load(fh)
        cfg.setdefault("experiment", {}).setdefault("kind", args.kind)
        if cfg["experiment"]["kind"] != args.kind:
            print(f"config kind {cfg['experiment']['kind']!r} != subcommand {args.kind!r}",
                  file=sys.stderr)
            return 2
        base = default_config(args.kind)
        for block in ("params", "grid", "solver", "experiment", "initial_data"):
            merged = dict(base.get(block, {}))
            merged.update(cfg.get(block, {}))
            cfg[block] = merged
        cfg.setdefault("output_dir", base["output_dir"])
        cfg.setdefault("seed", base["seed"])
    else:
        cfg = default_config(args.kind)

    cfg = _apply_overrides(cfg, args)
    try:
        bundle = run_experiment(cfg, out_dir=args.out, jobs=args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return 3
    for check in bundle.checks:
        mark = "PASS" if check["passed"] else "FAIL"
        val = "" if check["value"] is None else f" ({check['value']:.6g})"
        print(f"[{mark}] {check['name']}{val}")
    print(f"artifacts in {bundle.out_dir}")
    return 0 if bundle.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
