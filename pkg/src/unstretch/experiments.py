"""The named experiments behind the CLI.

Every experiment validates all of its cross-field preconditions before doing
any work, writes CSV data files plus a single JSON summary into the output
directory, and is deterministic for a fixed config and seed (CSV outputs are
byte identical across runs; the summary additionally records wall time).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import dynamics, lyapunov, suspension, words
from .autos import GroupAutomorphism, enumerate_commuting_matrices, require_valid
from .config import ExperimentConfig
from .errors import ValidationError
from .group import GroupContext, GroupElement, ToralMatrix
from .words import GeneratingSet, choose_lambda, word_ball


def _parse_element(raw, dim: int) -> GroupElement:
    try:
        vec, k = raw
        x = tuple(int(v) for v in vec)
        k = int(k)
    except (TypeError, ValueError):
        raise ValidationError(
            f"element {raw!r} is not of the form [[x1, ..., xd], k]"
        ) from None
    if len(x) != dim:
        raise ValidationError(f"element {raw!r} has dimension {len(x)}, expected {dim}")
    return GroupElement(x, k)


def _element_row(g: GroupElement) -> list:
    return [*g.x, g.k]


@dataclass
class Prepared:
    """Validated inputs shared by the experiment runners."""

    cfg: ExperimentConfig
    matrix: ToralMatrix
    phi: GroupAutomorphism
    ctx: GroupContext | None = None
    gens: GeneratingSet | None = None


_NEEDS_CONTEXT = {
    "ball-census",
    "word-length",
    "box-lemmas",
    "set-dynamics",
    "qi-compare",
}


def prepare(cfg: ExperimentConfig) -> Prepared:
    """Validate every precondition the chosen experiment relies on."""
    cfg.check_experiment_name()
    matrix = ToralMatrix(cfg.matrix)
    if cfg.automorphism is None:
        phi = GroupAutomorphism.identity(matrix.dim)
    else:
        spec = cfg.automorphism
        extra = set(spec) - {"b", "v", "e"}
        if extra:
            raise ValidationError(f"automorphism has unknown keys {sorted(extra)}")
        phi = GroupAutomorphism.from_parts(
            spec["b"], spec.get("v", [0] * matrix.dim), spec.get("e", 1)
        )
    prep = Prepared(cfg, matrix, phi)
    if cfg.experiment in _NEEDS_CONTEXT or cfg.experiment == "abelian-control":
        if not matrix.is_hyperbolic:
            raise ValidationError(
                f"matrix is not hyperbolic: {matrix.hyperbolicity.reason}"
            )
    if cfg.experiment in _NEEDS_CONTEXT:
        prep.ctx = GroupContext(matrix)
        prep.gens = GeneratingSet.standard(matrix.dim)
        require_valid(matrix, phi)
    if cfg.experiment == "set-dynamics":
        # Cross-checks the starting set against its declared box up front.
        lam = choose_lambda(matrix, phi)
        dynamics.IterationConfig.make(
            prep.ctx, phi, cfg.neighborhood_n, _starting_set(cfg, prep),
            cfg.k_max, lam, cfg.ell0, cfg.h0,
        )
    if cfg.experiment == "word-length" and not cfg.elements:
        raise ValidationError("word-length experiment needs a nonempty 'elements' list")
    if cfg.experiment in ("lyapunov", "birkhoff"):
        _toy_map(cfg, matrix)  # raises on bad kind/direction combinations
    return prep


def _starting_set(cfg: ExperimentConfig, prep: Prepared) -> set:
    if not cfg.a0:
        return {prep.ctx.identity}
    return {_parse_element(raw, prep.matrix.dim) for raw in cfg.a0}


def _toy_map(cfg: ExperimentConfig, matrix: ToralMatrix):
    kind = cfg.map_kind
    if kind == "linear_toral":
        toy = lyapunov.linear_toral(matrix)
    elif kind == "suspension_time_one":
        toy = lyapunov.suspension_time_one(matrix)
    elif kind == "shear_conjugated":
        toy = lyapunov.shear_conjugated(matrix, cfg.shear_coefficients)
    else:
        raise ValidationError(f"unknown map kind {kind!r}")
    direction = cfg.direction
    if direction == "flow":
        if kind != "suspension_time_one":
            raise ValidationError("flow direction requires the suspension map")
        fld = lyapunov.DirectionField.flow_direction(toy.dim)
    elif direction in ("unstable", "stable"):
        if kind == "shear_conjugated":
            fld = lyapunov.shear_conjugated_eigen(
                matrix, cfg.shear_coefficients, direction
            )
        elif kind == "suspension_time_one":
            base = lyapunov.eigen_direction(matrix, direction)
            vec = base((0.0,) * matrix.dim) + (0.0,)
            fld = lyapunov.DirectionField.constant(vec)
        else:
            fld = lyapunov.eigen_direction(matrix, direction)
    else:
        raise ValidationError(f"unknown direction {direction!r}")
    return toy, fld


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])


def _fmt(v: float) -> str:
    return repr(float(v))


# ---------------------------------------------------------------- runners


def run_ball_census(prep: Prepared, rng, outdir: Path) -> dict:
    cfg = prep.cfg
    oracle = word_ball(
        prep.ctx, prep.gens, cfg.bfs_radius, budget=cfg.budget_elements
    )
    _write_csv(
        outdir / "census.csv",
        ["radius", "ball_size", "sphere_size"],
        oracle.census(),
    )
    return {"radius": oracle.radius, "ball_size": len(oracle)}


def run_word_length(prep: Prepared, rng, outdir: Path) -> dict:
    cfg = prep.cfg
    oracle = word_ball(prep.ctx, prep.gens, cfg.bfs_radius, budget=cfg.budget_elements)
    rows = []
    for raw in cfg.elements:
        g = _parse_element(raw, prep.matrix.dim)
        n = oracle.word_length(g)
        status = "exact" if n is not None else "gt_radius"
        value = n if n is not None else oracle.radius
        rows.append(_element_row(g) + [status, value])
    dim = prep.matrix.dim
    header = [f"x{i}" for i in range(dim)] + ["k", "status", "length"]
    _write_csv(outdir / "word_lengths.csv", header, rows)
    exact = sum(1 for r in rows if r[-2] == "exact")
    return {"queried": len(rows), "exact": exact, "radius": oracle.radius}


def run_box_lemmas(prep: Prepared, rng, outdir: Path) -> dict:
    cfg = prep.cfg
    lam = choose_lambda(prep.matrix, prep.phi)
    rows = []
    total_violations = 0
    for ell in cfg.box_ell_values:
        for h in cfg.box_h_values:
            rep = words.check_box_inclusion_u1(
                prep.ctx, prep.gens, lam, ell, h, cfg.box_samples, rng
            )
            rows.append(["u1", ell, h, "", rep.checked, len(rep.violations)])
            total_violations += len(rep.violations)
            for n in cfg.box_n_values:
                rep = words.check_box_inclusion_un(
                    prep.ctx, prep.gens, lam, ell, h, n, cfg.box_samples, rng
                )
                rows.append(["un", ell, h, n, rep.checked, len(rep.violations)])
                total_violations += len(rep.violations)
            if ell >= 2 and h >= 2:
                rep = dynamics.check_box_inclusion_phi(
                    prep.ctx, prep.phi, lam, ell, h, cfg.box_samples, rng
                )
                rows.append(["phi", ell, h, "", rep.checked, len(rep.violations)])
                total_violations += len(rep.violations)
    _write_csv(
        outdir / "box_checks.csv",
        ["check", "ell", "h", "n", "checked", "violations"],
        rows,
    )
    return {
        "lambda": str(lam),
        "checks": len(rows),
        "violations": total_violations,
        "zero_violations": total_violations == 0,
    }


def _verdict_dict(verdict: dynamics.GrowthVerdict) -> dict:
    return {
        "kind": verdict.kind,
        "degree_estimate": verdict.degree_estimate,
        "rate_estimate": verdict.rate_estimate,
        "r2_polynomial": verdict.r2_polynomial,
        "r2_exponential": verdict.r2_exponential,
        "reason": verdict.reason,
    }


def _write_growth_csv(path: Path, curve: dynamics.GrowthCurve):
    _write_csv(
        path,
        ["k", "diam", "diam_is_exact", "set_size", "envelope_ell", "envelope_h"],
        [
            [p.k, p.diameter, int(p.diameter_exact), p.set_size,
             p.envelope_ell, p.envelope_h]
            for p in curve.points
        ],
    )


def run_set_dynamics(prep: Prepared, rng, outdir: Path) -> dict:
    cfg = prep.cfg
    lam = choose_lambda(prep.matrix, prep.phi)
    iteration = dynamics.IterationConfig.make(
        prep.ctx, prep.phi, cfg.neighborhood_n, _starting_set(cfg, prep),
        cfg.k_max, lam, cfg.ell0, cfg.h0,
    )
    oracle = word_ball(prep.ctx, prep.gens, cfg.bfs_radius, budget=cfg.budget_elements)
    curve = dynamics.run_iteration(
        prep.ctx, prep.gens, iteration, oracle, budget=cfg.budget_elements
    )
    curve.verdict = dynamics.classify_growth(curve)
    _write_growth_csv(outdir / "growth.csv", curve)
    return {
        "lambda": str(lam),
        "envelope": "certified",
        "growth": _verdict_dict(curve.verdict),
    }


def run_abelian_control(prep: Prepared, rng, outdir: Path) -> dict:
    cfg = prep.cfg
    if cfg.control_a0 is None:
        seeds = [[0] * prep.matrix.dim, [1] + [0] * (prep.matrix.dim - 1)]
    else:
        seeds = cfg.control_a0
    curve = dynamics.abelian_control(
        prep.matrix, cfg.neighborhood_n, seeds, cfg.k_max, budget=cfg.budget_elements
    )
    curve.verdict = dynamics.classify_growth(curve)
    _write_growth_csv(outdir / "growth.csv", curve)
    return {"growth": _verdict_dict(curve.verdict)}


def run_qi_compare(prep: Prepared, rng, outdir: Path) -> dict:
    cfg = prep.cfg
    radii = sorted(int(r) for r in cfg.qi_radii)
    if not radii:
        raise ValidationError("qi-compare needs at least one radius")
    split = suspension.compute_splitting(prep.matrix)
    top = max(max(radii), cfg.bfs_radius)
    oracle = word_ball(prep.ctx, prep.gens, top, budget=cfg.budget_elements)
    per_radius = {}
    reports = []
    for r in radii:
        rep = suspension.qi_comparison(oracle.restricted(r), split)
        reports.append(rep)
        _write_csv(
            outdir / f"qi_r{r}.csv",
            ["word_length", "bound", "ratio"],
            [
                [int(l), _fmt(b), _fmt(l / b)]
                for l, b in zip(rep.lengths, rep.bounds)
            ],
        )
        per_radius[str(r)] = {
            "q_hat": rep.q_hat,
            "fitted_slope": rep.fitted_slope,
            "intercept": rep.intercept,
            "max_ratio": rep.max_ratio,
            "coverage_ok": rep.coverage_ok,
            "entries": rep.n_entries,
        }
    stability = None
    if len(reports) >= 2:
        first, last = reports[0], reports[-1]
        stability = abs(last.q_hat - first.q_hat) / first.q_hat
    return {"per_radius": per_radius, "q_hat_relative_change": stability}


def run_centralizer(prep: Prepared, rng, outdir: Path) -> dict:
    cfg = prep.cfg
    found = enumerate_commuting_matrices(
        prep.matrix, cfg.centralizer_e, cfg.centralizer_bound
    )
    dim = prep.matrix.dim
    header = [f"b{r}{c}" for r in range(dim) for c in range(dim)]
    _write_csv(
        outdir / "centralizer.csv",
        header,
        [[v for row in B for v in row] for B in found],
    )
    return {
        "count": len(found),
        "bound": cfg.centralizer_bound,
        "e": cfg.centralizer_e,
    }


def run_lyapunov(prep: Prepared, rng, outdir: Path) -> dict:
    cfg = prep.cfg
    toy, fld = _toy_map(cfg, prep.matrix)
    starts = rng.random((max(1, cfg.orbit_starts), toy.dim))
    values = []
    trace_rows = []
    for i in range(starts.shape[0]):
        x0 = tuple(starts[i])
        value = lyapunov.finite_time_exponent(toy, fld, x0, cfg.orbit_steps)
        values.append(value)
        if cfg.dump_orbit:
            x = x0
            for step in range(min(cfg.orbit_steps, 1000)):
                trace_rows.append([i, step] + [_fmt(c) for c in x])
                x = toy.step(x)
    arr = np.array(values)
    half_width = (
        float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
    )
    if cfg.dump_orbit:
        header = ["start", "step"] + [f"x{i}" for i in range(toy.dim)]
        _write_csv(outdir / "orbits.csv", header, trace_rows)
    return {
        "records": [
            {
                "estimate": float(arr.mean()),
                "half_width": half_width,
                "n": cfg.orbit_steps,
                "seed": cfg.seed,
            }
        ],
        "map_kind": cfg.map_kind,
        "direction": cfg.direction,
    }


def run_birkhoff(prep: Prepared, rng, outdir: Path) -> dict:
    cfg = prep.cfg
    toy, fld = _toy_map(cfg, prep.matrix)
    rep = lyapunov.birkhoff_consistency(
        toy, fld, cfg.birkhoff_starts, cfg.birkhoff_steps, rng
    )
    return {
        "orbit_mean": rep.orbit_mean,
        "orbit_se": rep.orbit_se,
        "space_value": rep.space_value,
        "space_se": rep.space_se,
        "discrepancy": rep.discrepancy,
        "combined_se": rep.combined_se,
        "x_count": rep.x_count,
        "n": rep.n,
    }


@dataclass(frozen=True)
class ExperimentInfo:
    runner: Callable
    required: str
    emits: str


REGISTRY = {
    "abelian-control": ExperimentInfo(
        run_abelian_control, "matrix, k_max, neighborhood_n[, control_a0]",
        "growth.csv, summary.json",
    ),
    "ball-census": ExperimentInfo(
        run_ball_census, "matrix, bfs_radius", "census.csv, summary.json"
    ),
    "birkhoff": ExperimentInfo(
        run_birkhoff,
        "matrix, map_kind, direction, birkhoff_starts, birkhoff_steps",
        "summary.json",
    ),
    "box-lemmas": ExperimentInfo(
        run_box_lemmas,
        "matrix[, automorphism], box_ell_values, box_h_values, box_n_values, box_samples",
        "box_checks.csv, summary.json",
    ),
    "centralizer": ExperimentInfo(
        run_centralizer, "matrix, centralizer_bound, centralizer_e",
        "centralizer.csv, summary.json",
    ),
    "lyapunov": ExperimentInfo(
        run_lyapunov,
        "matrix, map_kind, direction, orbit_steps[, shear_coefficients]",
        "summary.json[, orbits.csv]",
    ),
    "qi-compare": ExperimentInfo(
        run_qi_compare, "matrix, qi_radii", "qi_r<R>.csv per radius, summary.json"
    ),
    "set-dynamics": ExperimentInfo(
        run_set_dynamics,
        "matrix, automorphism, neighborhood_n, a0, k_max, bfs_radius",
        "growth.csv, summary.json",
    ),
    "word-length": ExperimentInfo(
        run_word_length, "matrix, bfs_radius, elements",
        "word_lengths.csv, summary.json",
    ),
}


def list_experiments() -> str:
    """Stable text table of experiments, required fields, emitted files."""
    name_w = max(len(n) for n in REGISTRY) + 2
    lines = [f"{'experiment':<{name_w}}required config fields -> emitted files"]
    for name in sorted(REGISTRY):
        info = REGISTRY[name]
        lines.append(f"{name:<{name_w}}{info.required} -> {info.emits}")
    return "\n".join(lines) + "\n"
