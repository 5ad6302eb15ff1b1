"""
Connections on frame modules.

A Connection is stored by its Christoffel data on the frame; everything else
(lifts to tensor powers, duals, the degree-one extension to vector valued
forms, curvature and torsion) is derived from it.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from itertools import product

from .algebra import AlgebraElement
from .calculus import _braided_pairs, bracket, ext_d, inner, residual_size, wedge
from .exceptions import ContextMismatchError, DegreeError
from .modules import (
    FORM,
    VECTOR,
    TensorField,
    braid_blocks,
    coevaluation,
    concat,
    pair,
    to_right_normal,
)
from .symmetry import adjoint_operator_terms

logger = logging.getLogger(__name__)


class LeftConnection(ABC):
    """Left connection on the `span`-fold tensor power of vector fields.

    Images live in one-forms (x) vector fields^span, the form slot first.
    """

    span = 1

    def __init__(self, ctx):
        self.ctx = ctx
        self._images = {}

    @property
    def source_kinds(self):
        return VECTOR * self.span

    @property
    def target_kinds(self):
        return FORM + self.source_kinds

    @abstractmethod
    def nabla_basis(self, index):
        """Image of the basis word e_index."""

    def basis_image(self, index):
        index = tuple(index)
        image = self._images.get(index)
        if image is None:
            image = self.nabla_basis(index)
            self._images[index] = image
        return image

    def nabla(self, t):
        """Leibniz rule: d(a) (x) e_I + a nabla(e_I)."""
        if t.kinds != self.source_kinds:
            raise DegreeError(f"connection acts on {self.source_kinds!r}, got {t.kinds!r}")
        ctx = self.ctx
        result = ctx.zero(self.target_kinds)
        for index, coeff in t.terms.items():
            result = result + concat(ext_d(ctx.scalar(coeff)), ctx.basis(t.kinds, index))
            result = result + self.basis_image(index).lmul(coeff)
        return result

    def covariant(self, u, t):
        return inner(u, self.nabla(t))

    def _moved_image(self, index, m):
        """nabla(m e_index) for a basis action coefficient m."""
        if isinstance(m, AlgebraElement):
            return self.nabla(self.ctx.basis(self.source_kinds, index, m))
        return self.basis_image(index).scale(m)

    def adjoint_basis(self, word, index):
        """(word |>^cop nabla)(e_index)."""
        if word.is_unit:
            return self.basis_image(index)
        ctx = self.ctx
        result = ctx.zero(self.target_kinds)
        for after, before, c in adjoint_operator_terms(word, cop=True):
            for index2, m in ctx.act_basis(before, self.source_kinds, tuple(index)).items():
                result = result + self._moved_image(index2, m).act(after).scale(c)
        return result


class Connection(LeftConnection):
    """Left connection on vector fields: nabla e_j = sum_i w^i (x) s_ij."""

    def __init__(self, ctx, christoffel=None):
        super().__init__(ctx)
        christoffel = christoffel or {}
        for key, value in christoffel.items():
            if not isinstance(value, TensorField) or value.kinds != VECTOR:
                raise DegreeError(f"Christoffel entry {key} must be a vector field")
            if value.ctx is not ctx:
                raise ContextMismatchError("Christoffel data from another module context")
        self.christoffel = {key: value for key, value in christoffel.items() if value}

    @classmethod
    def zero(cls, ctx):
        return cls(ctx, {})

    @classmethod
    def from_table(cls, ctx, table):
        """Build from {(i, j, k): a} meaning s_ij = sum_k a e_k."""
        grouped = {}
        for (i, j, k), a in table.items():
            grouped.setdefault((i, j), [None] * ctx.rank)[k] = a
        return cls(ctx, {key: ctx.vector(values) for key, values in grouped.items()})

    def christoffel_symbol(self, i, j):
        return self.christoffel.get((i, j), self.ctx.zero(VECTOR))

    def nabla_basis(self, index):
        (j,) = index
        ctx = self.ctx
        result = ctx.zero(self.target_kinds)
        for i in range(ctx.rank):
            s = self.christoffel.get((i, j))
            if s:
                result = result + concat(ctx.w(i), s)
        return result

    def perturbed(self, difference):
        """conn + L for a left A-linear L given by {(i, j): vector field}."""
        christoffel = dict(self.christoffel)
        for key, value in difference.items():
            christoffel[key] = self.christoffel_symbol(*key) + value
        return Connection(self.ctx, christoffel)

    def difference(self, other):
        keys = set(self.christoffel) | set(other.christoffel)
        out = {}
        for key in sorted(keys):
            value = self.christoffel_symbol(*key) - other.christoffel_symbol(*key)
            if value:
                out[key] = value
        return out

    def table(self):
        """{(i, j, k): coefficient of e_k in s_ij}."""
        out = {}
        for (i, j), s in sorted(self.christoffel.items()):
            for (k,), a in s.terms.items():
                out[(i, j, k)] = a
        return out

    def __eq__(self, other):
        if not isinstance(other, Connection):
            return NotImplemented
        return self.ctx is other.ctx and not self.difference(other)

    __hash__ = None


class LeftSum(LeftConnection):
    """Sum of left connections on a tensor product of vector field powers."""

    def __init__(self, first, second):
        if first.ctx is not second.ctx:
            raise ContextMismatchError("connections from different module contexts")
        super().__init__(first.ctx)
        self.first = first
        self.second = second
        self.span = first.span + second.span

    def nabla_basis(self, index):
        ctx = self.ctx
        q1 = self.first.span
        head, tail = index[:q1], index[q1:]
        rest = ctx.basis(self.second.source_kinds, tail)
        result = ctx.zero(self.target_kinds)
        for (left, right), c in ctx.algebra.R_inv.items():
            moved_rest = rest.act(right)
            if not moved_rest:
                continue
            image = self.first.adjoint_basis(left, head)
            if image:
                result = result + concat(image, moved_rest).scale(c)
        front = ctx.basis(self.first.source_kinds, head)
        result = result + braid_blocks(concat(front, self.second.basis_image(tail)), 0, q1, 1)
        return result


class RightConnection(ABC):
    """Right connection on the `span`-fold tensor power of one-forms.

    Images carry the connection's one-form in the last slot.
    """

    span = 1

    def __init__(self, ctx):
        self.ctx = ctx
        self._images = {}

    @property
    def source_kinds(self):
        return FORM * self.span

    @property
    def target_kinds(self):
        return self.source_kinds + FORM

    @abstractmethod
    def nabla_basis(self, index):
        """Image of the basis word w^index."""

    def basis_image(self, index):
        index = tuple(index)
        image = self._images.get(index)
        if image is None:
            image = self.nabla_basis(index)
            self._images[index] = image
        return image

    def nabla(self, t):
        """Right Leibniz rule on X c: nabla(X) c + X (x) dc."""
        if t.kinds != self.source_kinds:
            raise DegreeError(f"connection acts on {self.source_kinds!r}, got {t.kinds!r}")
        ctx = self.ctx
        result = ctx.zero(self.target_kinds)
        for index, c in to_right_normal(t).items():
            result = result + self.basis_image(index).rmul(c)
            result = result + concat(ctx.basis(t.kinds, index), ext_d(ctx.scalar(c)))
        return result

    def _moved_image(self, index, m):
        """nabla(m w^index) for a basis action coefficient m."""
        if isinstance(m, AlgebraElement):
            return self.nabla(self.ctx.basis(self.source_kinds, index, m))
        return self.basis_image(index).scale(m)

    def adjoint_basis(self, word, index):
        """(word |> nabla)(w^index)."""
        if word.is_unit:
            return self.basis_image(index)
        ctx = self.ctx
        result = ctx.zero(self.target_kinds)
        for after, before, c in adjoint_operator_terms(word):
            for index2, m in ctx.act_basis(before, self.source_kinds, tuple(index)).items():
                result = result + self._moved_image(index2, m).act(after).scale(c)
        return result


class DualConnection(RightConnection):
    """Right connection on one-forms dual to a left Connection on vector fields."""

    def __init__(self, connection):
        super().__init__(connection.ctx)
        self.connection = connection
        ctx = self.ctx
        forms = {}
        for j in range(ctx.rank):
            for l in range(ctx.rank):
                form = ctx.zero(FORM)
                for i in range(ctx.rank):
                    s = connection.christoffel.get((i, j))
                    if not s:
                        continue
                    value = pair(s, ctx.w(l)).scalar_part()
                    if value:
                        form = form - ctx.w(i).rmul(value)
                if form:
                    forms[(j, l)] = form
        self.forms = forms

    def connection_form(self, k, l):
        """w_k^l with nabla* w^l = sum_k w^k (x) w_k^l."""
        return self.forms.get((k, l), self.ctx.zero(FORM))

    def nabla_basis(self, index):
        (l,) = index
        ctx = self.ctx
        result = ctx.zero(self.target_kinds)
        for k in range(ctx.rank):
            form = self.forms.get((k, l))
            if form:
                result = result + concat(ctx.w(k), form)
        return result

    def to_left(self):
        """The left connection this is dual to: s_ij = -sum_l <e_i, w_j^l> e_l."""
        ctx = self.ctx
        table = {}
        for (j, l), form in self.forms.items():
            for i in range(ctx.rank):
                value = pair(ctx.e(i), form).scalar_part()
                if value:
                    table[(i, j, l)] = -value
        return Connection.from_table(ctx, table)


def dual_of_linear(ctx, difference):
    """Connection forms of the dual of a left A-linear map {(i, j): vector}."""
    forms = {}
    for (i, j), vector in difference.items():
        for l in range(ctx.rank):
            value = pair(vector, ctx.w(l)).scalar_part()
            if value:
                term = ctx.w(i).rmul(value)
                forms[(j, l)] = forms[(j, l)] + term if (j, l) in forms else term
    return forms


def dual_affine_residual(conn, difference):
    """Residual size of dual(conn + L) = dual(conn) - dual_of_linear(L)."""
    ctx = conn.ctx
    shifted = DualConnection(conn.perturbed(difference))
    base = DualConnection(conn)
    linear = dual_of_linear(ctx, difference)
    total = 0
    for key in sorted(set(shifted.forms) | set(base.forms) | set(linear)):
        value = shifted.connection_form(*key) - base.connection_form(*key)
        if key in linear:
            value = value + linear[key]
        total += residual_size(value)
    return total


class RightSum(RightConnection):
    """Sum of right connections on a tensor product of one-form powers."""

    def __init__(self, first, second):
        if first.ctx is not second.ctx:
            raise ContextMismatchError("connections from different module contexts")
        super().__init__(first.ctx)
        self.first = first
        self.second = second
        self.span = first.span + second.span

    def nabla_basis(self, index):
        ctx = self.ctx
        p1, p2 = self.first.span, self.second.span
        head, tail = index[:p1], index[p1:]
        rest = ctx.basis(self.second.source_kinds, tail)
        result = braid_blocks(concat(self.first.basis_image(head), rest), p1, 1, p2)
        front = ctx.basis(self.first.source_kinds, head)
        for (left, right), c in ctx.algebra.R_inv.items():
            moved = front.act(left)
            if not moved:
                continue
            image = self.second.adjoint_basis(right, tail)
            if image:
                result = result + concat(moved, image).scale(c)
        return result


class DualOfLeft(RightConnection):
    """Dual of a left connection on vector field powers, on the dual basis w^(reverse I)."""

    def __init__(self, left):
        super().__init__(left.ctx)
        self.left = left
        self.span = left.span

    def nabla_basis(self, index):
        ctx = self.ctx
        q = self.span
        result = ctx.zero(self.target_kinds)
        for word in product(range(ctx.rank), repeat=q):
            form = ctx.zero(FORM)
            for (m, *rest), c in self.left.basis_image(word).terms.items():
                if all(rest[q - 1 - k] == index[k] for k in range(q)):
                    form = form + ctx.w(m, c)
            if form:
                result = result - concat(ctx.basis(self.source_kinds, tuple(reversed(word))), form)
        return result


def dual_connection(conn):
    return DualConnection(conn)


def sum_connection(first, second):
    if isinstance(first, LeftConnection) and isinstance(second, LeftConnection):
        return LeftSum(first, second)
    if isinstance(first, RightConnection) and isinstance(second, RightConnection):
        return RightSum(first, second)
    raise TypeError("can only sum two left or two right connections")


def lift_left(conn, q):
    """conn lifted to vector fields^q by iterated sums."""
    if q < 1:
        raise DegreeError("lift needs at least one tensor factor")
    return conn if q == 1 else LeftSum(conn, lift_left(conn, q - 1))


# -- vector valued forms ------------------------------------------------------


def _split_vector_valued(t):
    if not t.kinds or t.kinds[-1] != VECTOR or not set(t.kinds[:-1]) <= {FORM}:
        raise DegreeError(f"expected a vector valued form, got layout {t.kinds!r}")
    grouped = {}
    for index, coeff in t.terms.items():
        grouped.setdefault(index[-1], {})[index[:-1]] = coeff
    return {m: TensorField(t.ctx, t.kinds[:-1], terms) for m, terms in grouped.items()}


def extend(conn, t):
    """Degree-one extension: d theta (x) s + (-1)^k theta ^ nabla s on k-forms (x) vector fields."""
    ctx = conn.ctx
    k = t.slots - 1
    result = ctx.zero(FORM * (k + 1) + VECTOR)
    for m, theta in sorted(_split_vector_valued(t).items()):
        result = result + concat(ext_d(theta), ctx.e(m))
        for (a, b), c in conn.basis_image((m,)).terms.items():
            piece = concat(wedge(theta, ctx.w(a, c)), ctx.e(b))
            result = result + piece if k % 2 == 0 else result - piece
    return result


def covariant_forms(conn, u, t):
    """nabla_u = i_u nabla~ + nabla~ i_u on vector valued forms."""
    result = inner(u, extend(conn, t))
    if t.slots > 1:
        result = result + extend(conn, inner(u, t))
    return result


def cartan_relation_check(conn, u, v, samples):
    """Residual sizes of nabla_u i_v - i_(R-bar^alpha v) nabla_(R-bar_alpha u) - i_[u,v]."""
    uv = bracket(u, v)
    braided = _braided_pairs(u, v)
    residuals = []
    for t in samples:
        value = covariant_forms(conn, u, inner(v, t)) - inner(uv, t)
        for c, moved_v, moved_u in braided:
            value = value - inner(moved_v, covariant_forms(conn, moved_u, t)).scale(c)
        residuals.append(residual_size(value))
    return residuals


# -- curvature and torsion ----------------------------------------------------


@dataclass
class CurvatureData:
    vectors: dict = field(default_factory=dict)
    coefficients: dict = field(default_factory=dict)
    forms: dict = field(default_factory=dict)

    def coefficient(self, i, j, k, l):
        return self.coefficients.get((i, j, k, l))


@dataclass
class TorsionData:
    vectors: dict = field(default_factory=dict)
    coefficients: dict = field(default_factory=dict)
    forms: dict = field(default_factory=dict)
    pointwise: dict = field(default_factory=dict)
    agree: bool = True

    def residual(self):
        return sum(residual_size(v) for v in self.vectors.values())


def _forms_along(t):
    """Split a two-form valued vector field into its w (x) w parts along each e_l."""
    return _split_vector_valued(t)


def curvature_sq(conn):
    ctx = conn.ctx
    data = CurvatureData()
    frame = [ctx.e(i) for i in range(ctx.rank)]
    for k in range(ctx.rank):
        square = extend(conn, extend(conn, frame[k]))
        for l, theta in _forms_along(square).items():
            if theta:
                data.forms[(k, l)] = theta
        for i in range(ctx.rank):
            for j in range(ctx.rank):
                vector = -inner(frame[i], inner(frame[j], square))
                data.vectors[(i, j, k)] = vector
                for (l,), a in vector.terms.items():
                    data.coefficients[(i, j, k, l)] = a
    return data


def curvature_comm(conn, u, v, s):
    """nabla_u nabla_v s - nabla_(R-bar^alpha v) nabla_(R-bar_alpha u) s - nabla_[u,v] s."""
    result = conn.covariant(u, conn.covariant(v, s)) - conn.covariant(bracket(u, v), s)
    for c, moved_v, moved_u in _braided_pairs(u, v):
        result = result - conn.covariant(moved_v, conn.covariant(moved_u, s)).scale(c)
    return result


def torsion_pointwise(conn, u, v):
    """nabla_u v - nabla_(R-bar^alpha v)(R-bar_alpha u) - [u, v]."""
    result = conn.covariant(u, v) - bracket(u, v)
    for c, moved_v, moved_u in _braided_pairs(u, v):
        result = result - conn.covariant(moved_v, moved_u).scale(c)
    return result


def torsion(conn):
    ctx = conn.ctx
    data = TorsionData()
    two_form = extend(conn, coevaluation(ctx))
    for l, theta in _forms_along(two_form).items():
        if theta:
            data.forms[l] = theta
    frame = [ctx.e(i) for i in range(ctx.rank)]
    for i in range(ctx.rank):
        for j in range(ctx.rank):
            vector = -inner(frame[i], inner(frame[j], two_form))
            data.vectors[(i, j)] = vector
            for (l,), a in vector.terms.items():
                data.coefficients[(i, j, l)] = a
            pointwise = torsion_pointwise(conn, frame[i], frame[j])
            data.pointwise[(i, j)] = pointwise
            if pointwise != vector:
                data.agree = False
    if not data.agree:
        logger.warning("torsion from nabla(I) and the pointwise formula disagree")
    return data


def cartan_structure_check(conn, curvature=None, torsion_data=None):
    """Residual sizes of the first and second structure equations."""
    ctx = conn.ctx
    dual = DualConnection(conn)
    curvature = curvature or curvature_sq(conn)
    torsion_data = torsion_data or torsion(conn)
    zero2 = ctx.zero(FORM + FORM)
    second = 0
    first = 0
    for l in range(ctx.rank):
        total = ctx.zero(FORM * 3)
        for k in range(ctx.rank):
            value = ext_d(dual.connection_form(k, l)) + curvature.forms.get((k, l), zero2)
            for j in range(ctx.rank):
                value = value + wedge(dual.connection_form(k, j), dual.connection_form(j, l))
            total = total + concat(ctx.w(k), value)
        second += residual_size(total)
        value = ext_d(ctx.w(l)) - torsion_data.forms.get(l, zero2)
        for j in range(ctx.rank):
            value = value + wedge(ctx.w(j), dual.connection_form(j, l))
        first += residual_size(value)
    return {"first": first, "second": second}


def bianchi_check(conn, curvature=None, torsion_data=None):
    """Residual sizes of the two Bianchi identities."""
    ctx = conn.ctx
    dual = DualConnection(conn)
    curvature = curvature or curvature_sq(conn)
    torsion_data = torsion_data or torsion(conn)
    zero2 = ctx.zero(FORM + FORM)
    curvature_residual = 0
    torsion_residual = 0
    for l in range(ctx.rank):
        total = ctx.zero(FORM * 4)
        for k in range(ctx.rank):
            value = ext_d(curvature.forms.get((k, l), zero2))
            for j in range(ctx.rank):
                value = value + wedge(dual.connection_form(k, j), curvature.forms.get((j, l), zero2))
                value = value - wedge(curvature.forms.get((k, j), zero2), dual.connection_form(j, l))
            total = total + concat(ctx.w(k), value)
        curvature_residual += residual_size(total)
        value = ext_d(torsion_data.forms.get(l, zero2))
        for j in range(ctx.rank):
            value = value - wedge(torsion_data.forms.get(j, zero2), dual.connection_form(j, l))
            value = value - wedge(ctx.w(j), curvature.forms.get((j, l), zero2))
        torsion_residual += residual_size(value)
    return {"curvature": curvature_residual, "torsion": torsion_residual}


def vector_valued_samples(ctx, samples):
    """Vector valued one- and two-forms built from calculus samples."""
    out = []
    vectors = samples["vectors"]
    for k, theta in enumerate(samples["one_forms"] + samples["two_forms"]):
        out.append(concat(theta, vectors[k % len(vectors)]))
    return out

