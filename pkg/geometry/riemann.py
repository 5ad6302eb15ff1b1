"""
Pseudo-Riemannian structure on a frame module.

The metric is stored as g = sum w^j (x) w^i . g_ij with g_ij = <e_i (x) e_j, g>.
Its order-0 part must be a constant invertible matrix; the inverse of the
flat map is built order by order from that matrix.
"""

import logging
import random
from dataclasses import dataclass, field

from .calculus import _braided_pairs, apply_vector, bracket, draw_samples, residual_size
from .connections import (
    Connection,
    DualConnection,
    RightSum,
    curvature_sq,
    torsion,
)
from .exceptions import InvarianceError, SolverError, SpecError
from .modules import FORM, braid, concat, pair, tensor
from .scalars import ONE, ZERO, GaussianRational, Series

logger = logging.getLogger(__name__)

HALF = GaussianRational(1) / 2


def gauss_jordan(matrix):
    """Inverse of a square matrix over the Gaussian rationals, None when singular."""
    n = len(matrix)
    rows = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if rows[r][col]), None)
        if pivot_row is None:
            return None
        rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
        pivot = rows[col][col].inverse()
        rows[col] = [value * pivot for value in rows[col]]
        for r in range(n):
            if r != col and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return [row[n:] for row in rows]


def _transpose(matrix):
    return [list(column) for column in zip(*matrix)]


@dataclass
class Metric:
    ctx: object
    g: object
    components: dict
    flat_rows: list
    g0: list
    g0_inverse: list

    @property
    def rank(self):
        return self.ctx.rank

    def component(self, i, j):
        return self.components.get((i, j), self.ctx.algebra.zero())


def metric_from_components(ctx, table, g0_inverse=None):
    """Assemble and validate g from {(i, j): g_ij}."""
    algebra = ctx.algebra
    g = ctx.zero(FORM + FORM)
    for (i, j), value in sorted(table.items()):
        if value:
            g = g + concat(ctx.w(j), ctx.w(i)).rmul(value)
    if g != braid(g, 0):
        raise InvarianceError("metric not braided symmetric: g != tau(g)")

    n = ctx.rank
    unit = algebra.unit_monomial
    flat_rows = []
    g0_t = []
    for j in range(n):
        image = pair(ctx.e(j), g)
        row = [image.component((b,)) for b in range(n)]
        for b, value in enumerate(row):
            for mono, series in value.terms.items():
                if mono != unit and series.coeffs[0]:
                    raise SpecError(f"metric order-0 part must be constant: g[{b + 1},{j + 1}]")
        flat_rows.append(row)
        g0_t.append([value.constant_part().coeffs[0] for value in row])

    g0 = _transpose(g0_t)
    inverse = gauss_jordan(g0)
    if inverse is None:
        raise InvarianceError("metric is degenerate at order 0")
    if g0_inverse is not None:
        declared = [[GaussianRational.coerce(v) for v in row] for row in g0_inverse]
        if declared != inverse:
            raise SpecError("declared g0_inverse is not the inverse of the order-0 metric")
    components = {
        (i, j): pair(tensor(ctx.e(i), ctx.e(j)), g).scalar_part()
        for i in range(n)
        for j in range(n)
    }
    components = {key: value for key, value in components.items() if value}
    logger.debug("metric validated with %d nonzero components", len(components))
    return Metric(ctx, g, components, flat_rows, g0, inverse)


def flat(metric, v):
    """g-flat(v) = <v, g>."""
    return pair(v, metric.g)


def sharp(metric, theta):
    """Solve flat(v) = theta order by order from the order-0 inverse."""
    ctx = metric.ctx
    algebra = ctx.algebra
    n = ctx.rank
    # row j of flat: sum_j v^j * G[j][b] = theta_b with G = G0 + delta
    g0_inverse_t = _transpose(metric.g0_inverse)
    delta = [
        [metric.flat_rows[j][b] - algebra.constant(metric.g0[b][j]) for b in range(n)]
        for j in range(n)
    ]
    target = [theta.component((b,)) for b in range(n)]
    v = [algebra.zero() for _ in range(n)]
    for _ in range(ctx.order + 1):
        w = []
        for b in range(n):
            value = target[b]
            for j in range(n):
                if v[j] and delta[j][b]:
                    value = value - algebra.star(v[j], delta[j][b])
            w.append(value)
        v = [
            sum((w[b].scale(g0_inverse_t[b][j]) for b in range(n) if w[b]), algebra.zero())
            for j in range(n)
        ]
    return ctx.vector(v)


def metric_value(metric, x, y):
    """<x (x) y, g> for vector fields x, y."""
    return pair(tensor(x, y), metric.g).scalar_part()


def koszul(metric, u, v, z):
    """The six-term braided Koszul expression, equal to 2<R-bar^alpha v (x) nabla_(R-bar_alpha u) z, g>."""
    algebra = metric.ctx.algebra
    G = lambda x, y: metric_value(metric, x, y)  # noqa: E731
    value = apply_vector(u, G(v, z))
    for c, moved_v, moved_u in _braided_pairs(u, v):
        value = value - apply_vector(moved_v, G(moved_u, z)).scale(c)
    for (l1, r1), c1 in algebra.R_inv.items():
        moved_u = u.act(r1)
        if not moved_u:
            continue
        for (l2, r2), c2 in algebra.R_inv.items():
            moved_z = z.act(l1 * l2)
            if not moved_z:
                continue
            moved_v = v.act(r2)
            if not moved_v:
                continue
            value = value + apply_vector(moved_z, G(moved_u, moved_v)).scale(c1 * c2)
    value = value - G(bracket(u, v), z)
    value = value + G(u, bracket(v, z))
    for c, moved_z, moved_v in _braided_pairs(v, z):
        value = value + G(bracket(u, moved_z), moved_v).scale(c)
    return value


def koszul_table(metric):
    ctx = metric.ctx
    frame = [ctx.e(i) for i in range(ctx.rank)]
    table = {}
    for i in range(ctx.rank):
        for j in range(ctx.rank):
            for k in range(ctx.rank):
                value = koszul(metric, frame[i], frame[j], frame[k])
                if value:
                    table[(i, j, k)] = value
    return table


def koszul_linearity_residual(metric, a, u, v, z):
    """K(a u, v, z) - a * K(u, v, z)."""
    algebra = metric.ctx.algebra
    return koszul(metric, u.lmul(a), v, z) - algebra.star(a, koszul(metric, u, v, z))


def koszul_derivation_residual(metric, a, u, v, z):
    """K(u, v, a z) - K(u, v a, z) - 2 <R-bar^alpha v . (R-bar_alpha u)(a) (x) z, g>."""
    residual = koszul(metric, u, v, z.lmul(a)) - koszul(metric, u, v.rmul(a), z)
    algebra = metric.ctx.algebra
    for (left, right), c in algebra.R_inv.items():
        moved_v = v.act(left)
        if not moved_v:
            continue
        moved_u = u.act(right)
        if not moved_u:
            continue
        derivative = apply_vector(moved_u, a)
        if derivative:
            term = metric_value(metric, moved_v.rmul(derivative), z)
            residual = residual - term.scale(c * 2)
    return residual


@dataclass
class LCResult:
    connection: Connection
    koszul: dict = field(default_factory=dict)
    torsion_residual: int = 0
    metric_residual: int = 0

    @property
    def ok(self):
        return not self.torsion_residual and not self.metric_residual

    def residuals(self):
        return {"torsion": self.torsion_residual, "metric": self.metric_residual}


def metric_compatibility(conn, metric):
    """Lift of the dual connection to one-forms (x) one-forms applied to g."""
    dual = DualConnection(conn)
    return RightSum(dual, dual).nabla(metric.g)


def levi_civita(metric, strict=True):
    """Torsion free, metric compatible connection of g."""
    ctx = metric.ctx
    algebra = ctx.algebra
    table = koszul_table(metric)
    frame = [ctx.e(i) for i in range(ctx.rank)]
    christoffel = {}
    for i in range(ctx.rank):
        for k in range(ctx.rank):
            theta = ctx.zero(FORM)
            for j in range(ctx.rank):
                if ctx.invariant:
                    value = table.get((i, j, k), algebra.zero())
                else:
                    value = algebra.zero()
                    for (left, right), c in algebra.R_inv.items():
                        moved_i = frame[i].act(left)
                        moved_j = frame[j].act(right)
                        if moved_i and moved_j:
                            value = value + koszul(metric, moved_i, moved_j, frame[k]).scale(c)
                if value:
                    theta = theta + ctx.w(j).rmul(value)
            if theta:
                s = sharp(metric, theta).scale(HALF)
                if s:
                    christoffel[(i, k)] = s
    conn = Connection(ctx, christoffel)
    result = LCResult(
        connection=conn,
        koszul=table,
        torsion_residual=torsion(conn).residual(),
        metric_residual=residual_size(metric_compatibility(conn, metric)),
    )
    logger.debug("levi-civita residuals: %s", result.residuals())
    if strict and not result.ok:
        raise SolverError("levi-civita residuals are nonzero", result.residuals())
    return result


def uniqueness_probe(result, metric, seed=0, count=20):
    """Perturb the solved connection by random left A-linear maps; count detections."""
    ctx = metric.ctx
    rng = random.Random(seed)
    vectors = [v for v in draw_samples(ctx, seed, count)["vectors"] if v] or [ctx.e(0)]
    probes = []
    for k in range(count):
        key = (rng.randrange(ctx.rank), rng.randrange(ctx.rank))
        perturbed = result.connection.perturbed({key: vectors[k % len(vectors)]})
        torsion_residual = torsion(perturbed).residual()
        metric_residual = residual_size(metric_compatibility(perturbed, metric))
        probes.append(
            {
                "slot": [key[0] + 1, key[1] + 1],
                "torsion": torsion_residual,
                "metric": metric_residual,
                "detected": bool(torsion_residual or metric_residual),
            }
        )
    detected = sum(1 for probe in probes if probe["detected"])
    logger.info("uniqueness probe: %d of %d perturbations detected", detected, count)
    return {"probes": count, "detected": detected, "details": probes}


def ricci(conn, curvature=None):
    """Ric_jk = sum_i <R-bar^alpha |> R(e_i, e_j, e_k), R-bar_alpha |> w^i>."""
    ctx = conn.ctx
    algebra = ctx.algebra
    curvature = curvature or curvature_sq(conn)
    table = {}
    for j in range(ctx.rank):
        for k in range(ctx.rank):
            value = algebra.zero()
            for i in range(ctx.rank):
                vector = curvature.vectors.get((i, j, k))
                if not vector:
                    continue
                for (left, right), c in algebra.R_inv.items():
                    moved = vector.act(left)
                    if not moved:
                        continue
                    form = ctx.w(i).act(right)
                    if not form:
                        continue
                    value = value + pair(moved, form).scalar_part().scale(c)
            if value:
                table[(j, k)] = value
    return table


@dataclass
class EinsteinResult:
    einstein: bool
    lam: Series = None
    constant: bool = False
    violation: tuple = None


def einstein_check(metric, ricci_table):
    """Ric_ij == lam * g_ij with lam a constant of A (a Series in h)."""
    ctx = metric.ctx
    algebra = ctx.algebra
    n = ctx.rank
    keys = [(i, j) for i in range(n) for j in range(n)]
    lam = Series.zero(ctx.order)
    for key in keys:
        g_ij = metric.component(*key)
        if g_ij and g_ij.constant_part().is_unit():
            ric = ricci_table.get(key, algebra.zero())
            lam = ric.constant_part() * g_ij.constant_part().invert()
            break
    for key in keys:
        expected = metric.component(*key).scale(lam)
        if ricci_table.get(key, algebra.zero()) != expected:
            return EinsteinResult(einstein=False, violation=key)
    return EinsteinResult(einstein=True, lam=lam, constant=lam.is_constant())
