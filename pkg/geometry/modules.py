"""
Free frame modules over the algebra.

A ModuleContext fixes an Algebra together with a frame e_1..e_n of vector
fields and the dual basis w^1..w^n of one-forms. TensorField stores an
element of a tensor product of these modules in left-normal form: index
tuples map to algebra coefficients standing to the left of the basis word.
The slot layout is a string over "w" (one-form) and "e" (vector field).

When every symmetry action on the frame is a constant matrix the basis
actions are Gaussian rationals. Otherwise they are algebra elements, found
by deforming the classical action on the frame derivations.
"""

import logging
from dataclasses import dataclass, field

from .algebra import AlgebraElement, _accumulate, format_element, format_monomial
from .exceptions import ContextMismatchError, DegreeError, InvarianceError, SpecError
from .scalars import ONE, ZERO, GaussianRational, Series
from .symmetry import SymmetryWord

logger = logging.getLogger(__name__)

VECTOR = "e"
FORM = "w"


def identity_matrix(n):
    return tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))


def matrix_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum((a[i][k] * b[k][j] for k in range(n)), ZERO) for j in range(n))
        for i in range(n)
    )


def dual_matrix(m):
    """-M^T: the action on the dual basis that keeps <e_i, w^j> invariant."""
    n = len(m)
    return tuple(tuple(-m[j][i] for j in range(n)) for i in range(n))


def is_zero_matrix(m):
    return not any(any(row) for row in m)


def weigh(a, m):
    """a * m for m a Gaussian rational or an algebra element."""
    if isinstance(m, AlgebraElement):
        return a.algebra.star(a, m)
    return a.scale(m)


def _fixed_point(target, image, order, what):
    """Solve image(x) == target for a map that is the identity plus O(h)."""
    current = dict(target)
    for _ in range(order + 2):
        residual = dict(target)
        for key, value in image(current).items():
            _accumulate(residual, key, -value)
        if not residual:
            return current
        for key, value in residual.items():
            _accumulate(current, key, value)
    raise InvarianceError(f"{what} did not settle within order {order}")


def _frame_entry(algebra, value):
    """Gaussian rational when constant, algebra element otherwise."""
    if isinstance(value, AlgebraElement):
        if value.algebra is not algebra:
            raise ContextMismatchError("frame action coefficient from another algebra")
        if value.is_constant():
            series = value.constant_part()
            if series.is_constant():
                return series.coeffs[0]
        return value
    return GaussianRational.coerce(value)


def _as_element(algebra, value):
    if isinstance(value, AlgebraElement):
        return value
    return algebra.constant(GaussianRational.coerce(value))


@dataclass
class FrameSpec:
    """Declared frame data.

    ``derivations[i]`` is the classical derivation D_i whose twist
    deformation is e_i; ``symmetry[a]`` is the matrix M_a with
    [Z_a, D_i] = sum_j M_a[i][j] D_j, entries constant or algebra elements;
    ``structure[(i, j)]`` lists C_ij^k.
    """

    rank: int
    derivations: tuple
    symmetry: tuple
    structure: dict = field(default_factory=dict)
    dual_symmetry: tuple = None


class ModuleContext:
    """Algebra, frame and dual basis shared by all tensor fields of a geometry."""

    def __init__(self, algebra, frame, degree_bound=2):
        if frame.rank < 1:
            raise SpecError("frame rank must be positive")
        if len(frame.derivations) != frame.rank:
            raise SpecError(
                f"frame declares rank {frame.rank} but {len(frame.derivations)} "
                "frame actions"
            )
        if len(frame.symmetry) != algebra.generators:
            raise SpecError(
                f"frame symmetry given for {len(frame.symmetry)} generators, "
                f"algebra has {algebra.generators}"
            )
        matrices = []
        for a, matrix in enumerate(frame.symmetry):
            if len(matrix) != frame.rank or any(len(row) != frame.rank for row in matrix):
                raise SpecError(f"Z[{a + 1}] |> e must be a {frame.rank}x{frame.rank} matrix")
            matrices.append(tuple(tuple(_frame_entry(algebra, c) for c in row) for row in matrix))
        self.algebra = algebra
        self.frame = frame
        self.rank = frame.rank
        self.constant_action = all(
            isinstance(c, GaussianRational) for m in matrices for row in m for c in row
        )
        if not self.constant_action:
            matrices = [
                tuple(
                    tuple(c if isinstance(c, AlgebraElement) else algebra.constant(c) for c in row)
                    for row in m
                )
                for m in matrices
            ]
        self.M = tuple(matrices)
        self.invariant = all(is_zero_matrix(m) for m in self.M)
        self.structure = {
            key: tuple(values) for key, values in frame.structure.items() if any(values)
        }
        self._matrix_cache = {}
        self._classical_cache = {}
        self._basis_cache = {}
        self._derivative_cache = {}
        self.derived = {}
        self._check_symmetry()
        if self.constant_action:
            self.N = tuple(dual_matrix(m) for m in self.M)
        else:
            self._letter_rows = {VECTOR: (), FORM: ()}
            self._letter_rows[VECTOR] = tuple(
                self._deformed_vector_rows(a) for a in range(algebra.generators)
            )
            self._letter_rows[FORM] = tuple(
                self._deformed_form_rows(a) for a in range(algebra.generators)
            )
            self.N = tuple(self._letter_rows[FORM])
        self._check_dual_basis(frame.dual_symmetry)
        self._check_derivations()
        self._check_structure(degree_bound)
        logger.debug(
            "module context: rank %d, %s frame, %s action",
            self.rank,
            "invariant" if self.invariant else "non-invariant",
            "constant" if self.constant_action else "algebra-valued",
        )

    @property
    def order(self):
        return self.algebra.order

    def _generator(self, a):
        return SymmetryWord.generator(a, self.algebra.generators)

    # -- validation ---------------------------------------------------------

    def _check_symmetry(self):
        for a in range(len(self.M)):
            for b in range(a + 1, len(self.M)):
                if self.constant_action:
                    commute = matrix_mul(self.M[a], self.M[b]) == matrix_mul(self.M[b], self.M[a])
                else:
                    start = self._unit_rows()
                    ab = self._classical_step(self._classical_step(start, a), b)
                    ba = self._classical_step(self._classical_step(start, b), a)
                    commute = ab == ba
                if not commute:
                    raise InvarianceError(
                        f"symmetry actions of Z[{a + 1}] and Z[{b + 1}] on the frame "
                        "do not commute"
                    )

    def _check_dual_basis(self, declared):
        if declared is None:
            return
        for a, matrix in enumerate(declared):
            if self.constant_action:
                coerced = tuple(tuple(_frame_entry(self.algebra, c) for c in row) for row in matrix)
                matches = coerced == self.N[a]
            else:
                rows = tuple(
                    {j: _as_element(self.algebra, c) for j, c in enumerate(row) if c}
                    for row in matrix
                )
                matches = rows == self.N[a]
            if not matches:
                raise InvarianceError(
                    f"dual basis violated: Z[{a + 1}] does not preserve <e_i, w^j> = delta_ij"
                )

    def _check_derivations(self):
        """[Z_a, D_i] = sum_j M_a[i][j] D_j on the algebra generators."""
        algebra = self.algebra
        for a, z in enumerate(algebra.symmetry):
            for i, d in enumerate(self.frame.derivations):
                for l in range(algebra.dim):
                    mono = tuple(1 if k == l else 0 for k in range(algebra.dim))
                    one = {mono: Series.one(self.order)}
                    lhs = dict(z.apply_terms(d.apply_terms(one)))
                    for m, c in d.apply_terms(z.apply_terms(one)).items():
                        _accumulate(lhs, m, -c)
                    rhs = {}
                    for j, m_ij in enumerate(self.M[a][i]):
                        if not m_ij:
                            continue
                        derived = self.frame.derivations[j].apply_terms(one)
                        if isinstance(m_ij, AlgebraElement):
                            derived = algebra.classical_mul(
                                m_ij, algebra.element(derived)
                            ).terms
                            for m, c in derived.items():
                                _accumulate(rhs, m, c)
                        else:
                            for m, c in derived.items():
                                _accumulate(rhs, m, c.scale(m_ij))
                    if lhs != rhs:
                        raise InvarianceError(
                            f"declared action Z[{a + 1}] |> e[{i + 1}] does not match "
                            f"the commutator on {format_monomial(algebra.kind, mono)}"
                        )

    def _check_structure(self, bound):
        algebra = self.algebra
        for i in range(self.rank):
            for j in range(self.rank):
                coefficients = self.structure.get((i, j), ())
                for mono in algebra.basis_samples(bound):
                    b = algebra.monomial(mono)
                    expected = algebra.zero()
                    for k, c in enumerate(coefficients):
                        if c:
                            expected = expected + algebra.star(c, self.frame_derivative(k, b))
                    if self.frame_bracket_value(i, j, b) != expected:
                        raise InvarianceError(
                            f"structure functions C[{i + 1},{j + 1},k] do not reproduce "
                            f"[e{i + 1}, e{j + 1}] on {format_monomial(algebra.kind, mono)}"
                        )

    # -- classical action on the derivations ---------------------------------

    def _unit_rows(self):
        one = self.algebra.one()
        return tuple({i: one} for i in range(self.rank))

    def _classical_step(self, rows, a):
        """Z_a applied to sum_j P[i][j] D_j for every row i."""
        algebra = self.algebra
        generator = self._generator(a)
        out = []
        for row in rows:
            new = {}
            for j, p in row.items():
                _accumulate(new, j, algebra.act(generator, p))
                for k, m in enumerate(self.M[a][j]):
                    if m:
                        _accumulate(new, k, algebra.classical_mul(p, m))
            out.append(new)
        return tuple(out)

    def symmetry_matrix(self, word, kind=VECTOR):
        """Matrix of word |> e_i (kind "e") or word |> w^i (kind "w"), constant actions only."""
        key = (word, kind)
        cached = self._matrix_cache.get(key)
        if cached is not None:
            return cached
        matrices = self.M if kind == VECTOR else self.N
        result = identity_matrix(self.rank)
        for letter in word.letters():
            result = matrix_mul(result, matrices[letter])
        self._matrix_cache[key] = result
        return result

    def classical_rows(self, word):
        """word |> D_i = sum_j P[i][j] D_j with pointwise coefficients, as rows {j: P[i][j]}."""
        cached = self._classical_cache.get(word)
        if cached is not None:
            return cached
        if self.constant_action:
            rows = tuple(
                {j: m for j, m in enumerate(row) if m} for row in self.symmetry_matrix(word)
            )
        else:
            rows = self._unit_rows()
            for letter in word.letters():
                rows = self._classical_step(rows, letter)
        self._classical_cache[word] = rows
        return rows

    # -- deformed action on the bases ----------------------------------------

    def _classical_image(self, coefficients):
        """sum_j q_j e_j rewritten as sum_k p_k D_k with pointwise coefficients."""
        algebra = self.algebra
        out = {}
        for (left, right), c in algebra.F_inv.items():
            rows = self.classical_rows(right)
            for j, q in coefficients.items():
                if not rows[j]:
                    continue
                acted = algebra.act(left, q)
                if not acted:
                    continue
                for k, p in rows[j].items():
                    _accumulate(out, k, algebra.classical_mul(acted, p).scale(c))
        return out

    def _deformed_vector_rows(self, a):
        """Left-normal coefficients of Z_a |> e_i for every i."""
        rows = []
        for i in range(self.rank):
            target = {j: m for j, m in enumerate(self.M[a][i]) if m}
            rows.append(
                _fixed_point(target, self._classical_image, self.order, f"Z[{a + 1}] |> e[{i + 1}]")
            )
        return tuple(rows)

    def _pairing_image(self, coefficients):
        """i -> <e_i, sum_k n_k w^k> for the map k -> n_k."""
        algebra = self.algebra
        out = {}
        for (left, right), c in algebra.R_inv.items():
            for k, n in coefficients.items():
                acted = algebra.act(left, n)
                if not acted:
                    continue
                for i in range(self.rank):
                    m = self.act_basis(right, VECTOR, (i,)).get((k,))
                    if m:
                        _accumulate(out, i, weigh(acted, m).scale(c))
        return out

    def _deformed_form_rows(self, a):
        """Z_a |> w^j fixed by <Z_a |> e_i, w^j> + <e_i, Z_a |> w^j> = 0."""
        rows = []
        vector_rows = self._letter_rows[VECTOR][a]
        for j in range(self.rank):
            target = {}
            for i, row in enumerate(vector_rows):
                if j in row:
                    target[i] = -row[j]
            rows.append(
                _fixed_point(target, self._pairing_image, self.order, f"Z[{a + 1}] |> w[{j + 1}]")
            )
        return tuple(rows)

    def _act_letter(self, t, a):
        """Z_a |> t, slot by slot, moving new coefficients to the front."""
        algebra = self.algebra
        generator = self._generator(a)
        out = {}
        for index, coeff in t.terms.items():
            _accumulate(out, index, algebra.act(generator, coeff))
            for k, kind in enumerate(t.kinds):
                for j, q in self._letter_rows[kind][a][index[k]].items():
                    for prefix, p in pass_through(self, t.kinds[:k], index[:k], q).items():
                        _accumulate(out, prefix + (j,) + index[k + 1 :], algebra.star(coeff, p))
        return TensorField(self, t.kinds, out)

    def act_basis(self, word, kinds, index):
        """word |> (basis word) as a map index -> Gaussian rational or algebra element."""
        if word.is_unit:
            return {index: ONE}
        if self.invariant or not kinds:
            return {}
        key = (word, kinds, index)
        cached = self._basis_cache.get(key)
        if cached is not None:
            return cached
        if self.constant_action:
            current = {index: ONE}
            for letter in word.letters():
                step = {}
                for idx, c in current.items():
                    for k, kind in enumerate(kinds):
                        row = (self.M if kind == VECTOR else self.N)[letter][idx[k]]
                        for j, m in enumerate(row):
                            if m:
                                _accumulate(step, idx[:k] + (j,) + idx[k + 1 :], c * m)
                current = step
                if not current:
                    break
        else:
            moved = TensorField(self, kinds, {index: self.algebra.one()})
            for letter in word.letters():
                moved = self._act_letter(moved, letter)
                if not moved:
                    break
            current = dict(moved.terms)
        self._basis_cache[key] = current
        return current

    def frame_derivative_terms(self, i, mono):
        """e_i(x^mono) = sum (f-bar^alpha |> D_i)(f-bar_alpha |> x^mono)."""
        key = (i, mono)
        cached = self._derivative_cache.get(key)
        if cached is not None:
            return cached
        algebra = self.algebra
        out = {}
        for (left, right), c in algebra.F_inv.items():
            row = self.classical_rows(left)[i]
            if not row:
                continue
            acted = algebra.act_monomial(right, mono)
            if not acted:
                continue
            for j, m_ij in row.items():
                derived = self.frame.derivations[j].apply_terms(acted)
                if isinstance(m_ij, AlgebraElement):
                    product_terms = algebra.classical_mul(m_ij, algebra.element(derived)).terms
                    for m, d in product_terms.items():
                        _accumulate(out, m, c * d)
                else:
                    for m, d in derived.items():
                        _accumulate(out, m, (c * d).scale(m_ij))
        self._derivative_cache[key] = out
        return out

    def frame_derivative(self, i, a):
        out = {}
        for mono, c in a.terms.items():
            for m, d in self.frame_derivative_terms(i, mono).items():
                _accumulate(out, m, c * d)
        return AlgebraElement(self.algebra, out)

    def apply_frame_combination(self, combination, b):
        """sum_k m_k e_k(b) for {(k,): m_k} as returned by act_basis."""
        result = self.algebra.zero()
        for (k,), m in combination.items():
            derivative = self.frame_derivative(k, b)
            if derivative:
                if isinstance(m, AlgebraElement):
                    result = result + self.algebra.star(m, derivative)
                else:
                    result = result + derivative.scale(m)
        return result

    def frame_bracket_value(self, i, j, b):
        """[e_i, e_j](b) = e_i(e_j(b)) - sum (R-bar^alpha |> e_j)((R-bar_alpha |> e_i)(b))."""
        result = self.frame_derivative(i, self.frame_derivative(j, b))
        for (left, right), c in self.algebra.R_inv.items():
            moved_j = self.act_basis(left, VECTOR, (j,))
            if not moved_j:
                continue
            moved_i = self.act_basis(right, VECTOR, (i,))
            if not moved_i:
                continue
            inner = self.apply_frame_combination(moved_i, b)
            result = result - self.apply_frame_combination(moved_j, inner).scale(c)
        return result

    def structure_function(self, i, j, k):
        values = self.structure.get((i, j))
        if not values or not values[k]:
            return self.algebra.zero()
        return values[k]

    # -- constructors -------------------------------------------------------

    def tensor_field(self, kinds, terms):
        return TensorField(self, kinds, terms)

    def zero(self, kinds=""):
        return TensorField(self, kinds, {})

    def scalar(self, a):
        if not isinstance(a, AlgebraElement):
            a = self.algebra.constant(a)
        return TensorField(self, "", {(): a})

    def basis(self, kinds, index, coefficient=None):
        coefficient = self.algebra.one() if coefficient is None else coefficient
        return TensorField(self, kinds, {tuple(index): coefficient})

    def e(self, i, coefficient=None):
        return self.basis(VECTOR, (i,), coefficient)

    def w(self, i, coefficient=None):
        return self.basis(FORM, (i,), coefficient)

    def vector(self, coefficients):
        """sum_i a_i e_i from a list of algebra elements (None for zero)."""
        return TensorField(
            self, VECTOR, {(i,): a for i, a in enumerate(coefficients) if a is not None}
        )

    def form(self, coefficients):
        return TensorField(
            self, FORM, {(i,): a for i, a in enumerate(coefficients) if a is not None}
        )


class TensorField:
    """Left-normal element sum_I a_I (b_I0 (x) ... (x) b_Ik) of a tensor product."""

    __slots__ = ("ctx", "kinds", "terms")

    def __init__(self, ctx, kinds, terms):
        self.ctx = ctx
        self.kinds = kinds
        clean = {}
        for index, coeff in terms.items():
            if len(index) != len(kinds):
                raise DegreeError(f"index {index} does not fit slot layout {kinds!r}")
            if coeff:
                clean[tuple(index)] = coeff
        self.terms = clean

    @property
    def slots(self):
        return len(self.kinds)

    @property
    def covariant(self):
        return self.kinds.count(FORM)

    @property
    def contravariant(self):
        return self.kinds.count(VECTOR)

    @property
    def algebra(self):
        return self.ctx.algebra

    def is_form(self):
        return set(self.kinds) <= {FORM}

    def is_vector(self):
        return self.kinds == VECTOR

    def component(self, index):
        return self.terms.get(tuple(index), self.ctx.algebra.zero())

    def scalar_part(self):
        if self.kinds:
            raise DegreeError(f"tensor of layout {self.kinds!r} is not a function")
        return self.component(())

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TensorField):
            return NotImplemented
        return self.ctx is other.ctx and self.kinds == other.kinds and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        return f"TensorField({self.kinds!r}, {format_tensor(self)!r})"

    def __str__(self):
        return format_tensor(self)

    def _check(self, other):
        if not isinstance(other, TensorField) or other.ctx is not self.ctx:
            raise ContextMismatchError("tensor fields from different module contexts")
        if other.kinds != self.kinds:
            raise DegreeError(f"cannot add layouts {self.kinds!r} and {other.kinds!r}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for index, coeff in other.terms.items():
            _accumulate(out, index, coeff)
        return TensorField(self.ctx, self.kinds, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return TensorField(self.ctx, self.kinds, {i: -c for i, c in self.terms.items()})

    def scale(self, value):
        """Multiply by a Series or a Gaussian rational."""
        return TensorField(
            self.ctx, self.kinds, {i: c.scale(value) for i, c in self.terms.items()}
        )

    def lmul(self, a):
        algebra = self.ctx.algebra
        return TensorField(
            self.ctx, self.kinds, {i: algebra.star(a, c) for i, c in self.terms.items()}
        )

    def rmul(self, b):
        """(a X) b = a * sum (R-bar^alpha |> b)(R-bar_alpha |> X)."""
        if not isinstance(b, AlgebraElement):
            return self.scale(b)
        algebra = self.ctx.algebra
        out = {}
        for index, a in self.terms.items():
            for index2, coeff in pass_through(self.ctx, self.kinds, index, b).items():
                _accumulate(out, index2, algebra.star(a, coeff))
        return TensorField(self.ctx, self.kinds, out)

    def act(self, word):
        """word |> t through the coproduct: (w_(1) |> a)(w_(2) |> X)."""
        if word.is_unit:
            return self
        ctx = self.ctx
        algebra = ctx.algebra
        out = {}
        for left, right, weight in word.coproduct():
            for index, coeff in self.terms.items():
                acted = algebra.act(left, coeff)
                if not acted:
                    continue
                for index2, m in ctx.act_basis(right, self.kinds, index).items():
                    _accumulate(out, index2, weigh(acted, m).scale(weight))
        return TensorField(ctx, self.kinds, out)


def pass_through(ctx, kinds, index, b):
    """X b = sum_I c_I X_I for a basis word X: the coefficients c_I."""
    if ctx.invariant or not kinds:
        return {index: b}
    algebra = ctx.algebra
    out = {}
    for (left, right), c in algebra.R_inv.items():
        acted = algebra.act(left, b)
        if not acted:
            continue
        scaled = acted.scale(c)
        for index2, m in ctx.act_basis(right, kinds, index).items():
            _accumulate(out, index2, weigh(scaled, m))
    return out


def _same_context(*fields):
    ctx = fields[0].ctx
    for t in fields[1:]:
        if t.ctx is not ctx:
            raise ContextMismatchError("tensor fields from different module contexts")
    return ctx


def braid_blocks(t, start, first, second):
    """Braid the block of `first` slots at `start` past the following `second` slots."""
    end = start + first + second
    if start < 0 or first < 0 or second < 0 or end > t.slots:
        raise DegreeError(
            f"cannot braid blocks ({start}, {first}, {second}) of layout {t.kinds!r}"
        )
    if not first or not second:
        return t
    ctx = t.ctx
    kinds_x = t.kinds[start : start + first]
    kinds_y = t.kinds[start + first : end]
    kinds = t.kinds[:start] + kinds_y + kinds_x + t.kinds[end:]
    out = {}
    for index, coeff in t.terms.items():
        x = index[start : start + first]
        y = index[start + first : end]
        for (left, right), c in ctx.algebra.R_inv.items():
            acted_y = ctx.act_basis(left, kinds_y, y)
            if not acted_y:
                continue
            acted_x = ctx.act_basis(right, kinds_x, x)
            if not acted_x:
                continue
            scaled = coeff.scale(c)
            for y2, my in acted_y.items():
                moved = weigh(scaled, my)
                for x2, mx in acted_x.items():
                    if isinstance(mx, AlgebraElement):
                        # (m Y)(n X) = m (Y n) X
                        for y3, p in pass_through(ctx, kinds_y, y2, mx).items():
                            key = index[:start] + y3 + x2 + index[end:]
                            _accumulate(out, key, ctx.algebra.star(moved, p))
                    else:
                        key = index[:start] + y2 + x2 + index[end:]
                        _accumulate(out, key, moved.scale(mx))
    return TensorField(ctx, kinds, out)


def braid(t, k, graded=False):
    """tau on slots (k, k+1); graded adds (-1) when both slots are one-forms."""
    if k < 0 or k + 1 >= t.slots:
        raise DegreeError(f"slot {k} out of range for layout {t.kinds!r}")
    result = braid_blocks(t, k, 1, 1)
    if graded and t.kinds[k] == FORM and t.kinds[k + 1] == FORM:
        return -result
    return result


def concat(s, t):
    """Balanced tensor product (a X) (x) (b Y) = a (X b) (x) Y, no block interchange."""
    ctx = _same_context(s, t)
    algebra = ctx.algebra
    out = {}
    for ix, a in s.terms.items():
        for iy, b in t.terms.items():
            for ix2, coeff in pass_through(ctx, s.kinds, ix, b).items():
                _accumulate(out, ix2 + iy, algebra.star(a, coeff))
    return TensorField(ctx, s.kinds + t.kinds, out)


def tensor(s, t):
    """Product of tensor algebras: braid the vector block of s past the form block of t."""
    joined = concat(s, t)
    trailing = len(s.kinds) - len(s.kinds.rstrip(VECTOR))
    leading = len(t.kinds) - len(t.kinds.lstrip(FORM))
    return braid_blocks(joined, s.slots - trailing, trailing, leading)


def left_normalize(ctx, factors):
    """Fold a product of algebra elements and tensor fields into left-normal form."""
    result = ctx.scalar(ctx.algebra.one())
    for factor in factors:
        if isinstance(factor, AlgebraElement):
            result = result.rmul(factor)
        elif isinstance(factor, TensorField):
            result = concat(result, factor)
        else:
            raise TypeError(f"cannot normalize a factor of type {type(factor).__name__}")
    return result


def pair(contra, mixed):
    """Nested evaluation <v_r (x) ... (x) v_1, w_1 (x) ... (x) w_r (x) rest>."""
    ctx = _same_context(contra, mixed)
    if set(contra.kinds) - {VECTOR}:
        raise DegreeError(f"pairing needs a contravariant tensor, got {contra.kinds!r}")
    r = contra.slots
    leading = len(mixed.kinds) - len(mixed.kinds.lstrip(FORM))
    if r > leading:
        return TensorField(ctx, mixed.kinds[leading:], {})
    algebra = ctx.algebra
    out = {}
    for ic, a in contra.terms.items():
        for im, b in mixed.terms.items():
            for ic2, coeff in pass_through(ctx, contra.kinds, ic, b).items():
                if all(ic2[r - 1 - k] == im[k] for k in range(r)):
                    _accumulate(out, im[r:], algebra.star(a, coeff))
    return TensorField(ctx, mixed.kinds[r:], out)


def coevaluation(ctx):
    """I = sum_i w^i (x) e_i, checked to be H-invariant."""
    one = ctx.algebra.one()
    element = TensorField(ctx, FORM + VECTOR, {(i, i): one for i in range(ctx.rank)})
    for a in range(ctx.algebra.generators):
        word = SymmetryWord.generator(a, ctx.algebra.generators)
        if element.act(word):
            raise InvarianceError(f"coevaluation element is not invariant under Z[{a + 1}]")
    return element


def to_right_normal(t):
    """a X = sum (R-bar^alpha |> X)(R-bar_alpha |> a): map index -> right coefficient."""
    ctx = t.ctx
    algebra = ctx.algebra
    if ctx.invariant or not t.kinds:
        return dict(t.terms)
    if not ctx.constant_action:
        return _fixed_point(
            t.terms,
            lambda right_terms: from_right_normal(ctx, t.kinds, right_terms).terms,
            ctx.order,
            "right-normal form",
        )
    out = {}
    for index, a in t.terms.items():
        for (left, right), c in algebra.R_inv.items():
            basis = ctx.act_basis(left, t.kinds, index)
            if not basis:
                continue
            acted = algebra.act(right, a)
            if not acted:
                continue
            scaled = acted.scale(c)
            for index2, m in basis.items():
                _accumulate(out, index2, scaled.scale(m))
    return out


def from_right_normal(ctx, kinds, right_terms):
    result = ctx.zero(kinds)
    for index, c in right_terms.items():
        result = result + ctx.basis(kinds, index).rmul(c)
    return result


def format_basis(kinds, index):
    if not kinds:
        return "1"
    names = {FORM: "w", VECTOR: "e"}
    return " (x) ".join(f"{names[k]}{i + 1}" for k, i in zip(kinds, index))


def format_tensor(t):
    if not t.terms:
        return "0"
    pieces = []
    for index, coeff in t.sorted_terms():
        pieces.append(f"({format_element(coeff)}) {format_basis(t.kinds, index)}")
    return " + ".join(pieces)
