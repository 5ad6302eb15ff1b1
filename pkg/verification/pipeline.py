"""
Orchestration of checks, Levi-Civita solves and evaluations into reports.

Reports are plain dicts of strings, ints and bools rendered as canonical JSON
(sorted keys), so identical inputs give byte-identical output. Wall-clock
timings are only included on request.
"""

import json
import logging
import time
from functools import lru_cache
from pathlib import Path

from django.conf import settings

from geometry.algebra import format_element
from geometry.calculus import (
    braided_antisymmetry_residual,
    cartan_suite,
    draw_samples,
    jacobi_residual,
    leibniz_residual,
    residual_size,
)
from geometry.connections import (
    Connection,
    DualConnection,
    DualOfLeft,
    LeftSum,
    RightSum,
    bianchi_check,
    cartan_relation_check,
    cartan_structure_check,
    curvature_comm,
    curvature_sq,
    dual_affine_residual,
    torsion,
    vector_valued_samples,
)
from geometry.exceptions import SolverError
from geometry.expressions import parse_expression
from geometry.loader import load_geometry, resolve_geometry
from geometry.riemann import einstein_check, levi_civita, ricci, uniqueness_probe

logger = logging.getLogger(__name__)

SUITES = ("cartan", "connection", "riemann", "all")


def engine_options():
    """Engine tunables from Django settings."""
    return {
        "directory": Path(settings.GEOMETRY_DIR),
        "default_order": settings.GEOMETRY_DEFAULT_ORDER,
        "degree_bound": settings.GEOMETRY_DEGREE_BOUND,
    }


@lru_cache(maxsize=32)
def _load_cached(path, default_order, degree_bound, order):
    return load_geometry(path, default_order=default_order, degree_bound=degree_bound, order=order)


def load(name, order=None):
    """Resolve a shipped name or a .geo path and load it (cached per path and order)."""
    options = engine_options()
    path = resolve_geometry(name, options["directory"])
    return _load_cached(str(path.resolve()), options["default_order"], options["degree_bound"], order)


def render(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _idx(*indices):
    return "[" + ",".join(str(i + 1) for i in indices) + "]"


def _elements(table, prefix):
    return {f"{prefix}{_idx(*key)}": format_element(value) for key, value in sorted(table.items()) if value}


class Stopwatch:
    def __init__(self):
        self.timings = {}

    def run(self, name, func, *args, **kwargs):
        start = time.perf_counter()
        result = func(*args, **kwargs)
        elapsed = time.perf_counter() - start
        self.timings[name] = round(elapsed, 4)
        logger.info("stage %s finished in %.3fs", name, elapsed)
        return result


def _header(spec, command):
    return {
        "command": command,
        "geometry": spec.name,
        "order": spec.order,
        "spec_sha256": spec.digest,
    }


# -- check --------------------------------------------------------------------


def _calculus_residuals(spec, samples):
    ctx = spec.ctx
    residuals = dict(cartan_suite(ctx, samples))
    vectors = samples["vectors"]
    functions = samples["functions"]
    leibniz = antisymmetry = jacobi = 0
    for k, u in enumerate(vectors):
        v = vectors[(k + 1) % len(vectors)]
        a = functions[k % len(functions)]
        b = functions[(k + 1) % len(functions)]
        leibniz = max(leibniz, residual_size(leibniz_residual(u, a, b)))
        antisymmetry = max(antisymmetry, residual_size(braided_antisymmetry_residual(u, v)))
        if k < settings.GEOMETRY_CONNECTION_SAMPLES:
            z = vectors[(k + 2) % len(vectors)]
            jacobi = max(jacobi, residual_size(jacobi_residual(u, v, z)))
    residuals.update(leibniz=leibniz, bracket_antisymmetry=antisymmetry, jacobi=jacobi)
    return residuals


def _test_connections(spec):
    """The zero connection and the fixed test connections s11 = x2 e1 and s12 = 3 e1."""
    ctx = spec.ctx
    algebra = ctx.algebra
    coordinate = algebra.generator(1 if algebra.dim > 1 else 0)
    connections = {
        "zero": Connection.zero(ctx),
        "s11": Connection(ctx, {(0, 0): ctx.e(0, coordinate)}),
    }
    if ctx.rank > 1:
        connections["s12"] = Connection(ctx, {(0, 1): ctx.e(0).scale(3)})
    return connections


def _leading(samples, count):
    return {key: values[:count] for key, values in samples.items()}


def _connection_residuals(name, conn, samples):
    ctx = conn.ctx
    frame = [ctx.e(i) for i in range(ctx.rank)]
    curvature = curvature_sq(conn)
    torsion_data = torsion(conn)
    equivalence = 0
    for (i, j, k), vector in curvature.vectors.items():
        equivalence += residual_size(curvature_comm(conn, frame[i], frame[j], frame[k]) - vector)
    relation = max(
        cartan_relation_check(conn, frame[0], frame[-1], vector_valued_samples(ctx, samples)),
        default=0,
    )
    dual = DualConnection(conn)
    dual_sum = residual_size(_dual_sum_difference(conn, dual))
    structure = cartan_structure_check(conn, curvature, torsion_data)
    bianchi = bianchi_check(conn, curvature, torsion_data)
    shift = {(0, 0): ctx.e(0, ctx.algebra.generator(0))}
    residuals = {
        f"{name}.curvature_equivalence": equivalence,
        f"{name}.torsion_equivalence": 0 if torsion_data.agree else 1,
        f"{name}.cartan_relation": relation,
        f"{name}.dual_involution": 0 if dual.to_left() == conn else 1,
        f"{name}.dual_of_sum": dual_sum,
        f"{name}.dual_affine": dual_affine_residual(conn, shift),
        f"{name}.structure_first": structure["first"],
        f"{name}.structure_second": structure["second"],
        f"{name}.bianchi_curvature": bianchi["curvature"],
        f"{name}.bianchi_torsion": bianchi["torsion"],
    }
    return residuals


def _dual_sum_difference(conn, dual):
    """Dual of the lifted sum against the sum of duals, on every basis word."""
    ctx = conn.ctx
    left = DualOfLeft(LeftSum(conn, conn))
    right = RightSum(dual, dual)
    total = ctx.zero(left.target_kinds)
    for a in range(ctx.rank):
        for b in range(ctx.rank):
            total = total + (left.basis_image((a, b)) - right.basis_image((a, b)))
    return total


def default_seed(spec):
    """The seed declared by the geometry, else the configured default."""
    return settings.GEOMETRY_DEFAULT_SEED if spec.seed is None else spec.seed


def default_samples(spec):
    return settings.GEOMETRY_SUITE_SAMPLES if spec.samples is None else spec.samples


def run_check(spec, suite="all", seed=None, samples=None, probes=None, timings=False):
    """Aggregate residuals of the requested suites; ok iff all are zero."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    seed = default_seed(spec) if seed is None else seed
    samples = default_samples(spec) if samples is None else samples
    probes = settings.GEOMETRY_UNIQUENESS_PROBES if probes is None else probes
    watch = Stopwatch()
    drawn = watch.run("samples", draw_samples, spec.ctx, seed, samples)
    residuals = {}
    if suite in ("cartan", "all"):
        residuals.update(watch.run("cartan", _calculus_residuals, spec, drawn))
    if suite in ("connection", "all"):
        subset = _leading(drawn, settings.GEOMETRY_CONNECTION_SAMPLES)
        for name, conn in _test_connections(spec).items():
            residuals.update(watch.run(f"connection.{name}", _connection_residuals, name, conn, subset))
    if suite in ("riemann", "all"):
        result = watch.run("levi_civita", levi_civita, spec.metric, strict=False)
        residuals["levi_civita.torsion"] = result.torsion_residual
        residuals["levi_civita.metric"] = result.metric_residual
        subset = _leading(drawn, settings.GEOMETRY_CONNECTION_SAMPLES)
        residuals.update(
            watch.run("connection.levi_civita", _connection_residuals, "levi_civita", result.connection, subset)
        )
        probe = watch.run("uniqueness", uniqueness_probe, result, spec.metric, seed, probes)
        residuals["uniqueness.undetected"] = probe["probes"] - probe["detected"]
    report = _header(spec, "check")
    report.update(
        suite=suite,
        seed=seed,
        samples=samples,
        residuals=residuals,
        ok=not any(residuals.values()),
    )
    if timings:
        report["timings"] = watch.timings
    return report


# -- levi-civita --------------------------------------------------------------


def run_levi_civita(spec, seed=None, probes=None, timings=False):
    """Solve for the Levi-Civita connection and report its curvature data."""
    seed = default_seed(spec) if seed is None else seed
    probes = settings.GEOMETRY_UNIQUENESS_PROBES if probes is None else probes
    watch = Stopwatch()
    result = watch.run("levi_civita", levi_civita, spec.metric, strict=False)
    conn = result.connection
    curvature = watch.run("curvature", curvature_sq, conn)
    torsion_data = watch.run("torsion", torsion, conn)
    ricci_table = watch.run("ricci", ricci, conn, curvature)
    einstein = einstein_check(spec.metric, ricci_table)
    report = _header(spec, "levi-civita")
    report.update(
        christoffel=_elements(conn.table(), "Gamma"),
        koszul=_elements(result.koszul, "K"),
        curvature=_elements(curvature.coefficients, "R"),
        torsion=_elements(torsion_data.coefficients, "T"),
        ricci=_elements(ricci_table, "Ric"),
        einstein={
            "einstein": einstein.einstein,
            "lambda": None if einstein.lam is None else einstein.lam.to_text(),
            "constant": einstein.constant,
            "violation": None if einstein.violation is None else _idx(*einstein.violation),
        },
        residuals=result.residuals(),
    )
    report["structure_residuals"] = cartan_structure_check(conn, curvature, torsion_data)
    report["bianchi_residuals"] = bianchi_check(conn, curvature, torsion_data)
    if probes:
        probe = watch.run("uniqueness", uniqueness_probe, result, spec.metric, seed, probes)
        report["uniqueness"] = {"probes": probe["probes"], "detected": probe["detected"]}
    report["ok"] = result.ok
    if timings:
        report["timings"] = watch.timings
    if not result.ok:
        raise SolverError("levi-civita residuals are nonzero", report)
    return report


# -- eval ---------------------------------------------------------------------


def run_eval(spec, expr):
    value = parse_expression(expr, spec.algebra)
    return {"geometry": spec.name, "expr": expr, "result": format_element(value)}
