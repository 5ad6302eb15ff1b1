"""
Braided Cartan calculus on a frame module.

Vector fields act on functions through the frame derivations; the Lie
derivative, contraction and exterior derivative are extended to tensor
fields by the braided Leibniz rules, and forms are stored as antisymmetrized
tensors.
"""

import logging
import random
from fractions import Fraction
from math import factorial

from .algebra import AlgebraElement
from .exceptions import ContextMismatchError, DegreeError
from .modules import FORM, VECTOR, TensorField, braid, concat, pair
from .scalars import GaussianRational

logger = logging.getLogger(__name__)


def _require_vector(u):
    if not isinstance(u, TensorField) or u.kinds != VECTOR:
        raise DegreeError("expected a vector field")


def _require_form(t):
    if not t.is_form():
        raise DegreeError(f"expected a differential form, got layout {t.kinds!r}")


def residual_size(value):
    """Number of nonzero Series coefficients in a function or tensor field."""
    if isinstance(value, TensorField):
        return sum(residual_size(c) for c in value.terms.values())
    return sum(len(series.terms()) for series in value.terms.values())


def apply_vector(u, a):
    """u(a) = sum_i u^i * e_i(a)."""
    _require_vector(u)
    ctx = u.ctx
    if a.algebra is not ctx.algebra:
        raise ContextMismatchError("vector field and function from different algebras")
    result = ctx.algebra.zero()
    for (i,), coeff in u.terms.items():
        derivative = ctx.frame_derivative(i, a)
        if derivative:
            result = result + ctx.algebra.star(coeff, derivative)
    return result


def leibniz_residual(u, a, b):
    """u(a*b) - u(a)*b - sum (R-bar^alpha |> a)*(R-bar_alpha |> u)(b)."""
    algebra = u.ctx.algebra
    residual = apply_vector(u, algebra.star(a, b)) - algebra.star(apply_vector(u, a), b)
    for (left, right), c in algebra.R_inv.items():
        acted = algebra.act(left, a)
        if not acted:
            continue
        moved = u.act(right)
        if not moved:
            continue
        residual = residual - algebra.star(acted, apply_vector(moved, b)).scale(c)
    return residual


def _coefficient_bracket(q, u, v, plain):
    """[q u, v] = q [u, v] - sum (R-bar^alpha R-bar^beta |> v)(R-bar_alpha |> q) (R-bar_beta |> u).

    ``plain`` is [u, v]; a constant q only rescales it.
    """
    if not isinstance(q, AlgebraElement):
        return plain.scale(q)
    algebra = q.algebra
    result = plain.lmul(q)
    for (left_a, right_a), c_a in algebra.R_inv.items():
        acted = algebra.act(right_a, q)
        if not acted:
            continue
        for (left_b, right_b), c_b in algebra.R_inv.items():
            moved_u = u.act(right_b)
            if not moved_u:
                continue
            value = apply_vector(v.act(left_a * left_b), acted)
            if value:
                result = result - moved_u.lmul(value).scale(c_a * c_b)
    return result


def _frame_bracket(m, w):
    """[e_m, w] from the frame derivations and the structure functions."""
    ctx = w.ctx
    algebra = ctx.algebra
    result = ctx.zero(VECTOR)
    for (k,), wk in w.terms.items():
        result = result + ctx.e(k, ctx.frame_derivative(m, wk))
        for (left, right), c in algebra.R_inv.items():
            moved = ctx.act_basis(right, VECTOR, (m,))
            if not moved:
                continue
            acted = algebra.act(left, wk)
            if not acted:
                continue
            for (mm,), weight in moved.items():
                plain = ctx.zero(VECTOR)
                for l in range(ctx.rank):
                    structure = ctx.structure_function(mm, k, l)
                    if structure:
                        plain = plain + ctx.e(l, structure)
                term = _coefficient_bracket(weight, ctx.e(mm), ctx.e(k), plain)
                if term:
                    result = result + term.lmul(acted).scale(c)
    return result


def _bracket_with_frame(x, j):
    """[x, e_j] = -sum [R-bar^alpha |> e_j, R-bar_alpha |> x]."""
    ctx = x.ctx
    result = ctx.zero(VECTOR)
    for (left, right), c in ctx.algebra.R_inv.items():
        row = ctx.act_basis(left, VECTOR, (j,))
        if not row:
            continue
        moved = x.act(right)
        if not moved:
            continue
        for (jj,), weight in row.items():
            plain = _frame_bracket(jj, moved)
            result = result - _coefficient_bracket(weight, ctx.e(jj), moved, plain).scale(c)
    return result


def bracket(u, v):
    """Braided Lie bracket through [u, b e_j] = u(b) e_j + (R-bar^alpha |> b)[R-bar_alpha |> u, e_j]."""
    _require_vector(u)
    _require_vector(v)
    if u.ctx is not v.ctx:
        raise ContextMismatchError("vector fields from different module contexts")
    ctx = u.ctx
    algebra = ctx.algebra
    result = ctx.zero(VECTOR)
    for (j,), b in v.terms.items():
        result = result + ctx.e(j, apply_vector(u, b))
        for (left, right), c in algebra.R_inv.items():
            acted = algebra.act(left, b)
            if not acted:
                continue
            moved = u.act(right)
            if not moved:
                continue
            result = result + _bracket_with_frame(moved, j).lmul(acted).scale(c)
    return result


def bracket_oracle(u, v, a):
    """[u, v](a) evaluated as the braided commutator of operators."""
    algebra = u.ctx.algebra
    result = apply_vector(u, apply_vector(v, a))
    for (left, right), c in algebra.R_inv.items():
        moved_v = v.act(left)
        if not moved_v:
            continue
        moved_u = u.act(right)
        if not moved_u:
            continue
        result = result - apply_vector(moved_v, apply_vector(moved_u, a)).scale(c)
    return result


def braided_antisymmetry_residual(u, v):
    residual = bracket(u, v)
    for (left, right), c in u.ctx.algebra.R_inv.items():
        moved_v = v.act(left)
        moved_u = u.act(right)
        if moved_v and moved_u:
            residual = residual + bracket(moved_v, moved_u).scale(c)
    return residual


def jacobi_residual(u, v, z):
    """[u,[v,z]] - [[u,v],z] - [R-bar^alpha |> v, [R-bar_alpha |> u, z]]."""
    residual = bracket(u, bracket(v, z)) - bracket(bracket(u, v), z)
    for (left, right), c in u.ctx.algebra.R_inv.items():
        moved_v = v.act(left)
        moved_u = u.act(right)
        if moved_v and moved_u:
            residual = residual - bracket(moved_v, bracket(moved_u, z)).scale(c)
    return residual


def inner(u, t):
    """Contraction of the first slot of t, which must be a one-form slot."""
    _require_vector(u)
    if not t.kinds or t.kinds[0] != FORM:
        raise DegreeError(f"cannot contract a vector field with layout {t.kinds!r}")
    return pair(u, t)


def _lie_one_form(u, theta):
    """<e_i, L_u theta> from L_u<v, theta> = <[u,v], theta> + <R-bar^alpha |> v, L_(R-bar_alpha |> u) theta>."""
    ctx = u.ctx
    algebra = ctx.algebra
    result = ctx.zero(FORM)
    moved = {}
    for (left, _right), _c in algebra.R_inv.items():
        if left not in moved:
            moved[left] = u.act(left)
    for i in range(ctx.rank):
        frame_vector = ctx.e(i)
        coefficient = algebra.zero()
        for (left, right), c in algebra.R_inv.items():
            moved_e = frame_vector.act(right)
            if not moved_e:
                continue
            moved_u = moved[left]
            if not moved_u:
                continue
            term = apply_vector(moved_u, pair(moved_e, theta).scalar_part())
            term = term - pair(bracket(moved_u, moved_e), theta).scalar_part()
            coefficient = coefficient + term.scale(c)
        if coefficient:
            result = result + ctx.w(i).rmul(coefficient)
    return result


def lie(u, t):
    """Lie derivative along u, extended slot by slot by the braided Leibniz rule."""
    _require_vector(u)
    ctx = u.ctx
    if t.ctx is not ctx:
        raise ContextMismatchError("vector field and tensor from different module contexts")
    if not t.kinds:
        return ctx.scalar(apply_vector(u, t.scalar_part()))
    if t.kinds == VECTOR:
        return bracket(u, t)
    if t.kinds == FORM:
        return _lie_one_form(u, t)
    head, tail = t.kinds[:1], t.kinds[1:]
    grouped = {}
    for index, coeff in t.terms.items():
        grouped.setdefault(index[1:], {})[index[:1]] = coeff
    result = ctx.zero(t.kinds)
    moved = {}
    for rest_index, head_terms in sorted(grouped.items()):
        x = TensorField(ctx, head, head_terms)
        rest = ctx.basis(tail, rest_index)
        result = result + concat(lie(u, x), rest)
        for (left, right), c in ctx.algebra.R_inv.items():
            moved_x = x.act(left)
            if not moved_x:
                continue
            if right not in moved:
                moved[right] = u.act(right)
            moved_u = moved[right]
            if not moved_u:
                continue
            result = result + concat(moved_x, lie(moved_u, rest)).scale(c)
    return result


def antisymmetrize(t, count=None):
    """sum over permutations of the first `count` slots of sign * braided permutation."""
    n = t.slots if count is None else count
    if n <= 1:
        return t
    previous = antisymmetrize(t, n - 1)
    result = previous
    moved = previous
    for k in range(n - 2, -1, -1):
        moved = braid(moved, k)
        result = result + moved if (n - 1 - k) % 2 == 0 else result - moved
    return result


def wedge(s, t):
    _require_form(s)
    _require_form(t)
    if s.ctx is not t.ctx:
        raise ContextMismatchError("forms from different module contexts")
    p, q = s.slots, t.slots
    if p == 0:
        return t.lmul(s.scalar_part())
    if q == 0:
        return s.rmul(t.scalar_part())
    if p + q > s.ctx.rank:
        return s.ctx.zero(FORM * (p + q))
    weight = GaussianRational(Fraction(1, factorial(p) * factorial(q)))
    return antisymmetrize(concat(s, t)).scale(weight)


def _basis_wedge(ctx, index):
    key = ("wedge", index)
    cached = ctx.derived.get(key)
    if cached is None:
        cached = ctx.scalar(ctx.algebra.one())
        for i in index:
            cached = wedge(cached, ctx.w(i))
        ctx.derived[key] = cached
    return cached


def _d_basis_wedge(ctx, index):
    """d(w^I0 ^ ... ^ w^Ik) by the graded Leibniz rule."""
    key = ("d-wedge", index)
    cached = ctx.derived.get(key)
    if cached is not None:
        return cached
    result = ctx.zero(FORM * (len(index) + 1))
    for k in range(len(index)):
        piece = ctx.scalar(ctx.algebra.one())
        for position, i in enumerate(index):
            factor = _d_frame_form(ctx, i) if position == k else ctx.w(i)
            piece = wedge(piece, factor)
        result = result + piece if k % 2 == 0 else result - piece
    ctx.derived[key] = result
    return result


def _d_frame_form(ctx, i):
    key = ("d-frame", i)
    cached = ctx.derived.get(key)
    if cached is None:
        cached = _d_one_form(ctx.w(i))
        ctx.derived[key] = cached
    return cached


def _d_function(ctx, a):
    result = ctx.zero(FORM)
    for i in range(ctx.rank):
        derivative = ctx.frame_derivative(i, a)
        if derivative:
            result = result + ctx.w(i).rmul(derivative)
    return result


def _d_one_form(theta):
    """Reconstruct d theta from its values c_ab = <e_a (x) e_b, d theta> on frame pairs."""
    ctx = theta.ctx
    algebra = ctx.algebra
    frame = [ctx.e(i) for i in range(ctx.rank)]
    pairings = [pair(e, theta).scalar_part() for e in frame]
    result = ctx.zero(FORM + FORM)
    for a in range(ctx.rank):
        for b in range(ctx.rank):
            value = -ctx.frame_derivative(a, pairings[b])
            for k in range(ctx.rank):
                structure = ctx.structure_function(a, b, k)
                if structure:
                    value = value + algebra.star(structure, pairings[k])
            for (left, right), c in algebra.R_inv.items():
                moved_b = frame[b].act(left)
                if not moved_b:
                    continue
                moved_a = frame[a].act(right)
                if not moved_a:
                    continue
                term = apply_vector(moved_b, pair(moved_a, theta).scalar_part())
                value = value + term.scale(c)
            if value:
                result = result + ctx.basis(FORM + FORM, (b, a)).rmul(value)
    return result


def ext_d(t):
    """Exterior derivative of a function or a form."""
    _require_form(t)
    ctx = t.ctx
    p = t.slots
    if p == 0:
        return _d_function(ctx, t.scalar_part())
    if p > ctx.rank:
        raise DegreeError(f"form degree {p} exceeds frame rank {ctx.rank}")
    if p == ctx.rank:
        return ctx.zero(FORM * (p + 1))
    if p == 1:
        return _d_one_form(t)
    result = ctx.zero(FORM * (p + 1))
    for index, coeff in t.terms.items():
        result = result + wedge(_d_function(ctx, coeff), _basis_wedge(ctx, index))
        result = result + _d_basis_wedge(ctx, index).lmul(coeff)
    return result.scale(GaussianRational(Fraction(1, factorial(p))))


def _random_function(ctx, rng):
    algebra = ctx.algebra
    result = algebra.zero()
    for _ in range(rng.randint(1, 2)):
        if algebra.kind == "torus":
            mono = tuple(rng.randint(-1, 1) for _ in range(algebra.dim))
        else:
            mono = [0] * algebra.dim
            for _ in range(rng.randint(0, 2)):
                mono[rng.randrange(algebra.dim)] += 1
            mono = tuple(mono)
        value = rng.choice((-2, -1, 1, 2))
        term = algebra.monomial(mono, value)
        if rng.random() < 0.25:
            term = algebra.star(algebra.h(), term)
        result = result + term
    return result


def draw_samples(ctx, seed, count):
    """Deterministic functions, vector fields, one-forms and two-forms."""
    rng = random.Random(seed)
    functions = [_random_function(ctx, rng) for _ in range(count)]
    vectors = []
    one_forms = []
    for _ in range(count):
        vectors.append(
            ctx.vector([_random_function(ctx, rng) if rng.random() < 0.7 else None for _ in range(ctx.rank)])
        )
        one_forms.append(
            ctx.form([_random_function(ctx, rng) if rng.random() < 0.7 else None for _ in range(ctx.rank)])
        )
    two_forms = []
    if ctx.rank >= 2:
        for k in range(count):
            two_forms.append(wedge(one_forms[k], ctx.w(rng.randrange(ctx.rank))))
    return {
        "functions": functions,
        "vectors": vectors,
        "one_forms": one_forms,
        "two_forms": two_forms,
    }


def _braided_pairs(u, v):
    """[(c, R-bar^alpha |> v, R-bar_alpha |> u)] with zero legs dropped."""
    out = []
    for (left, right), c in u.ctx.algebra.R_inv.items():
        moved_v = v.act(left)
        if not moved_v:
            continue
        moved_u = u.act(right)
        if not moved_u:
            continue
        out.append((c, moved_v, moved_u))
    return out


def cartan_suite(ctx, samples):
    """Residual sizes of the six graded braided commutator relations on the samples.

    Sample k contributes the vector pair (u_k, u_k+1) together with the k-th
    function, one-form and two-form.
    """
    functions = [ctx.scalar(a) for a in samples["functions"]]
    vectors = samples["vectors"]
    one_forms = samples["one_forms"]
    two_forms = samples["two_forms"]
    residuals = {name: 0 for name in ("lie_lie", "lie_inner", "lie_d", "inner_inner", "inner_d", "d_d")}

    def record(name, value):
        residuals[name] = max(residuals[name], residual_size(value))

    for k, u in enumerate(vectors):
        v = vectors[(k + 1) % len(vectors)]
        low = [functions[k], one_forms[k]]
        high = [one_forms[k]] + two_forms[k : k + 1]
        braided = _braided_pairs(u, v)
        uv = bracket(u, v)
        for t in low:
            value = lie(u, lie(v, t)) - lie(uv, t)
            for c, moved_v, moved_u in braided:
                value = value - lie(moved_v, lie(moved_u, t)).scale(c)
            record("lie_lie", value)
        for t in high:
            value = lie(u, inner(v, t)) - inner(uv, t)
            for c, moved_v, moved_u in braided:
                value = value - inner(moved_v, lie(moved_u, t)).scale(c)
            record("lie_inner", value)
        for t in two_forms[k : k + 1]:
            value = inner(u, inner(v, t))
            for c, moved_v, moved_u in braided:
                value = value + inner(moved_v, inner(moved_u, t)).scale(c)
            record("inner_inner", value)
        for t in low:
            dt = ext_d(t)
            lie_t = lie(u, t)
            record("lie_d", lie(u, dt) - ext_d(lie_t))
            value = inner(u, dt) - lie_t
            if t.slots:
                value = value + ext_d(inner(u, t))
            record("inner_d", value)
            record("d_d", ext_d(dt))
    logger.info("cartan suite residuals over %d samples: %s", len(vectors), residuals)
    return residuals
