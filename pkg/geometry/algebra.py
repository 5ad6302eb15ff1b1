"""
The braided-commutative H-module algebra A.

Elements are stored in the classical (undeformed) basis: monomials x^e of a
polynomial algebra or modes U_k of a torus, each carrying a Series in h. The
star product is the classical product twisted by F^-1.
"""

import logging
from itertools import product

from .exceptions import ContextMismatchError, InvarianceError, SpecError
from .scalars import GaussianRational, Series
from .symmetry import act_legwise, build_r_matrix, build_twist

logger = logging.getLogger(__name__)

POLYNOMIAL = "polynomial"
TORUS = "torus"
KINDS = (POLYNOMIAL, TORUS)


def _accumulate(out, key, value):
    if key in out:
        total = out[key] + value
        if total:
            out[key] = total
        else:
            del out[key]
    elif value:
        out[key] = value


def _shift(mono, other):
    return tuple(a + b for a, b in zip(mono, other))


class Derivation:
    """A classical derivation fixed by its values on the algebra generators.

    D(x^e) = sum_j e_j x^(e - delta_j) D(x_j); on torus modes the same rule
    with integer exponents gives D(U_k) from D(U_j).
    """

    __slots__ = ("values", "_cache")

    def __init__(self, values):
        self.values = tuple(dict(v) for v in values)
        self._cache = {}

    def is_zero(self):
        return not any(self.values)

    def apply_monomial(self, mono):
        cached = self._cache.get(mono)
        if cached is not None:
            return cached
        out = {}
        for j, e in enumerate(mono):
            if not e:
                continue
            lowered = mono[:j] + (e - 1,) + mono[j + 1 :]
            for m, c in self.values[j].items():
                _accumulate(out, _shift(lowered, m), c.scale(e))
        self._cache[mono] = out
        return out

    def apply_terms(self, terms):
        out = {}
        for mono, c in terms.items():
            for m, d in self.apply_monomial(mono).items():
                _accumulate(out, m, c * d)
        return out


class AlgebraElement:
    """Finite map basis monomial -> Series inside one Algebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms):
        self.algebra = algebra
        self.terms = {m: c for m, c in terms.items() if c}

    @property
    def order(self):
        return self.algebra.order

    def sorted_terms(self):
        return sorted(self.terms.items())

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.algebra is other.algebra and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"AlgebraElement({format_element(self)!r})"

    def __str__(self):
        return format_element(self)

    def _check(self, other):
        if not isinstance(other, AlgebraElement) or other.algebra is not self.algebra:
            raise ContextMismatchError("algebra elements from different algebras")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            _accumulate(out, m, c)
        return AlgebraElement(self.algebra, out)

    def __sub__(self, other):
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            _accumulate(out, m, -c)
        return AlgebraElement(self.algebra, out)

    def __neg__(self):
        return AlgebraElement(self.algebra, {m: -c for m, c in self.terms.items()})

    def scale(self, value):
        """Multiply by a Series or a Gaussian rational."""
        if isinstance(value, Series):
            return AlgebraElement(
                self.algebra, {m: c * value for m, c in self.terms.items()}
            )
        value = GaussianRational.coerce(value)
        return AlgebraElement(self.algebra, {m: c.scale(value) for m, c in self.terms.items()})

    def __mul__(self, value):
        if isinstance(value, AlgebraElement):
            raise TypeError("use classical_mul or star to multiply algebra elements")
        return self.scale(value)

    __rmul__ = __mul__

    def coefficient(self, mono):
        return self.terms.get(mono, Series.zero(self.order))

    def constant_part(self):
        return self.coefficient(self.algebra.unit_monomial)

    def is_constant(self):
        return all(m == self.algebra.unit_monomial for m in self.terms)

    def star(self, other):
        return self.algebra.star(self, other)


class Algebra:
    """Presentation of A: kind, dimension, symmetry derivations and twist."""

    def __init__(self, kind, dim, order, generator_actions, twist):
        if kind not in KINDS:
            raise SpecError(f"unknown algebra kind {kind!r}")
        if dim < 1:
            raise SpecError("algebra dimension must be positive")
        if len(generator_actions) != twist.generators:
            raise SpecError(
                f"{len(generator_actions)} generator actions for "
                f"{twist.generators} symmetry generators"
            )
        self.kind = kind
        self.dim = dim
        self.order = order
        self.symmetry = tuple(generator_actions)
        self.twist = twist
        self.F, self.F_inv = build_twist(twist, order)
        self.R, self.R_inv = build_r_matrix(self.F, self.F_inv)
        self.trivial = self.F_inv.is_identity()
        self.unit_monomial = (0,) * dim
        self._act_cache = {}
        self._star_cache = {}
        logger.debug(
            "algebra %s(dim=%d, N=%d) with %d symmetry generators",
            kind,
            dim,
            order,
            len(self.symmetry),
        )

    @property
    def generators(self):
        return self.twist.generators

    def element(self, terms):
        return AlgebraElement(self, terms)

    def zero(self):
        return AlgebraElement(self, {})

    def one(self):
        return self.constant(1)

    def constant(self, value):
        if isinstance(value, Series):
            return AlgebraElement(self, {self.unit_monomial: value})
        return AlgebraElement(self, {self.unit_monomial: Series.constant(value, self.order)})

    def monomial(self, index, coefficient=1):
        index = tuple(index)
        if len(index) != self.dim:
            raise SpecError(f"monomial {index} has wrong length for dimension {self.dim}")
        if self.kind == POLYNOMIAL and any(e < 0 for e in index):
            raise SpecError("polynomial exponents must be non-negative")
        if not isinstance(coefficient, Series):
            coefficient = Series.constant(coefficient, self.order)
        return AlgebraElement(self, {index: coefficient})

    def generator(self, j):
        index = [0] * self.dim
        index[j] = 1
        return self.monomial(index)

    def h(self, degree=1):
        return self.constant(Series.monomial(1, degree, self.order))

    def _own(self, *elements):
        for element in elements:
            if not isinstance(element, AlgebraElement) or element.algebra is not self:
                raise ContextMismatchError("algebra element belongs to another algebra")

    def act_monomial(self, word, mono):
        """word |> x^mono as a terms map (cached)."""
        key = (word, mono)
        cached = self._act_cache.get(key)
        if cached is not None:
            return cached
        if word.is_unit:
            result = {mono: Series.one(self.order)}
        else:
            letters = word.letters()
            rest = type(word)(
                tuple(k - (1 if a == letters[0] else 0) for a, k in enumerate(word.exponents))
            )
            result = self.symmetry[letters[0]].apply_terms(self.act_monomial(rest, mono))
        self._act_cache[key] = result
        return result

    def act(self, word, a):
        self._own(a)
        if word.is_unit:
            return a
        out = {}
        for mono, c in a.terms.items():
            for m, d in self.act_monomial(word, mono).items():
                _accumulate(out, m, c * d)
        return AlgebraElement(self, out)

    def derive(self, derivation, a):
        self._own(a)
        return AlgebraElement(self, derivation.apply_terms(a.terms))

    def _classical_terms(self, left, right):
        out = {}
        for m1, c1 in left.items():
            for m2, c2 in right.items():
                coeff = c1 * c2
                if coeff:
                    _accumulate(out, _shift(m1, m2), coeff)
        return out

    def classical_mul(self, a, b):
        self._own(a, b)
        return AlgebraElement(self, self._classical_terms(a.terms, b.terms))

    def star_monomials(self, m1, m2):
        key = (m1, m2)
        cached = self._star_cache.get(key)
        if cached is not None:
            return cached
        out = {}
        for (left, right), c in self.F_inv.items():
            acted_left = self.act_monomial(left, m1)
            if not acted_left:
                continue
            acted_right = self.act_monomial(right, m2)
            if not acted_right:
                continue
            for m, d in self._classical_terms(acted_left, acted_right).items():
                _accumulate(out, m, c * d)
        self._star_cache[key] = out
        return out

    def star(self, a, b):
        self._own(a, b)
        if self.trivial:
            return AlgebraElement(self, self._classical_terms(a.terms, b.terms))
        out = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                coeff = c1 * c2
                if not coeff:
                    continue
                for m, d in self.star_monomials(m1, m2).items():
                    _accumulate(out, m, coeff * d)
        return AlgebraElement(self, out)

    def braided_flip(self, a, b):
        """[(c, R-bar^alpha |> b, R-bar_alpha |> a)]: the braiding of a (x) b."""
        self._own(a, b)
        return act_legwise(self.R_inv, b, a, self.act, self.act)

    def basis_samples(self, bound):
        if self.kind == POLYNOMIAL:
            monos = [
                e for e in product(range(bound + 1), repeat=self.dim) if sum(e) <= bound
            ]
        else:
            monos = list(product(range(-bound, bound + 1), repeat=self.dim))
        return sorted(monos)

    def check_commuting_actions(self, bound):
        for a in range(self.generators):
            for b in range(a + 1, self.generators):
                za, zb = self.symmetry[a], self.symmetry[b]
                for mono in self.basis_samples(bound):
                    one = {mono: Series.one(self.order)}
                    ab = za.apply_terms(zb.apply_terms(one))
                    ba = zb.apply_terms(za.apply_terms(one))
                    if ab != ba:
                        raise InvarianceError(
                            f"symmetry generators Z[{a + 1}] and Z[{b + 1}] do not "
                            f"commute on {format_monomial(self.kind, mono)}"
                        )


def classical_mul(a, b):
    return a.algebra.classical_mul(a, b)


def star(a, b):
    if a.algebra is not b.algebra:
        raise ContextMismatchError("star product of elements from different algebras")
    return a.algebra.star(a, b)


def check_braided_commutativity(a, b):
    """a * b - sum (R-bar^alpha |> b) * (R-bar_alpha |> a); zero when braided commutative."""
    algebra = a.algebra
    residual = algebra.star(a, b)
    for coeff, x, y in algebra.braided_flip(a, b):
        residual = residual - algebra.star(x, y).scale(coeff)
    return residual


def format_monomial(kind, mono):
    if not any(mono):
        return "1"
    if kind == TORUS:
        return "U[" + ",".join(str(k) for k in mono) + "]"
    parts = []
    for j, e in enumerate(mono):
        if e == 1:
            parts.append(f"x{j + 1}")
        elif e:
            parts.append(f"x{j + 1}^{e}")
    return "*".join(parts)


def _format_magnitude(value):
    """(negative, text) for a nonzero Gaussian rational; text None means 1."""
    if not value.im:
        negative = value.re < 0
        magnitude = abs(value.re)
        return negative, (None if magnitude == 1 else str(magnitude))
    if not value.re:
        negative = value.im < 0
        magnitude = abs(value.im)
        return negative, ("i" if magnitude == 1 else f"{magnitude}*i")
    sign = "+" if value.im > 0 else "-"
    imag = abs(value.im)
    imag_text = "i" if imag == 1 else f"{imag}*i"
    return False, f"({value.re} {sign} {imag_text})"


def format_element(a):
    """Canonical text of an element in the expression grammar."""
    kind = a.algebra.kind
    flat = []
    for mono, series in a.terms.items():
        for degree, coeff in series.terms():
            weight = sum(abs(e) for e in mono)
            flat.append(((degree, -weight, tuple(-e for e in mono)), degree, mono, coeff))
    if not flat:
        return "0"
    flat.sort(key=lambda item: item[0])
    pieces = []
    for position, (_, degree, mono, coeff) in enumerate(flat):
        factors = []
        if degree == 1:
            factors.append("h")
        elif degree:
            factors.append(f"h^{degree}")
        if any(mono):
            factors.append(format_monomial(kind, mono))
        negative, magnitude = _format_magnitude(coeff)
        if magnitude is None:
            body = "*".join(factors) if factors else "1"
        else:
            body = "*".join([magnitude] + factors)
        if position == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)
