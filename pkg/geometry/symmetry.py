"""
Triangular Hopf algebra engine for abelian twists.

Symmetry words are commutative monomials in the generators Z_1..Z_m of an
abelian Lie algebra. Operator tensors are Series-weighted sums of pure
tensors of words; the twist F, its inverse and the R-matrix live here.
"""

import logging
from dataclasses import dataclass
from itertools import product
from math import comb, factorial

from .exceptions import OrderMismatchError, SpecError
from .scalars import GaussianRational, Series

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class SymmetryWord:
    exponents: tuple

    @classmethod
    def unit(cls, generators):
        return cls((0,) * generators)

    @classmethod
    def generator(cls, index, generators):
        exponents = [0] * generators
        exponents[index] = 1
        return cls(tuple(exponents))

    @property
    def degree(self):
        return sum(self.exponents)

    @property
    def is_unit(self):
        return not any(self.exponents)

    def __mul__(self, other):
        return SymmetryWord(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def letters(self):
        """Generator indices with multiplicity, e.g. Z_1^2 Z_3 -> (0, 0, 2)."""
        return tuple(a for a, k in enumerate(self.exponents) for _ in range(k))

    def coproduct(self):
        """Multinomial expansion of the primitive coproduct: [(left, right, int)]."""
        ranges = [range(k + 1) for k in self.exponents]
        terms = []
        for split in product(*ranges):
            weight = 1
            for k, j in zip(self.exponents, split):
                weight *= comb(k, j)
            left = SymmetryWord(tuple(split))
            right = SymmetryWord(tuple(k - j for k, j in zip(self.exponents, split)))
            terms.append((left, right, weight))
        return terms

    def antipode(self):
        """S(Z^k) = (-1)^|k| Z^k, returned as (sign, word)."""
        return (-1) ** self.degree, self

    def __str__(self):
        if self.is_unit:
            return "1"
        parts = []
        for a, k in enumerate(self.exponents):
            if k == 1:
                parts.append(f"Z{a + 1}")
            elif k:
                parts.append(f"Z{a + 1}^{k}")
        return "*".join(parts)


@dataclass(frozen=True)
class TwistPair:
    left: int
    right: int
    coefficient: GaussianRational


@dataclass(frozen=True)
class TwistSpec:
    """F^-1 = exp(h * sum c Z_a (x) Z_b) with 0-based generator indices."""

    generators: int
    pairs: tuple = ()

    def validate(self):
        for pair in self.pairs:
            for index in (pair.left, pair.right):
                if not 0 <= index < self.generators:
                    raise SpecError(
                        f"twist references generator Z[{index + 1}] but only "
                        f"{self.generators} generators are declared"
                    )

    @property
    def is_trivial(self):
        return not any(pair.coefficient for pair in self.pairs)


class OperatorTensor:
    """Finite sum of Series-weighted pure tensors word (x) word."""

    __slots__ = ("generators", "order", "_terms")

    def __init__(self, terms, generators, order):
        self.generators = generators
        self.order = order
        clean = {}
        for key, coeff in terms.items():
            if coeff.order != order:
                raise OrderMismatchError("operator tensor mixes truncation orders")
            if coeff:
                clean[key] = coeff
        self._terms = dict(sorted(clean.items()))

    @classmethod
    def identity(cls, generators, order):
        unit = SymmetryWord.unit(generators)
        return cls({(unit, unit): Series.one(order)}, generators, order)

    @classmethod
    def exponential(cls, pairs, generators, order, scale=1):
        """exp(h * scale * sum c Z_a (x) Z_b) truncated at h^order."""
        exponent = {}
        for pair in pairs:
            key = (
                SymmetryWord.generator(pair.left, generators),
                SymmetryWord.generator(pair.right, generators),
            )
            weight = Series.monomial(pair.coefficient * scale, 1, order)
            exponent[key] = exponent.get(key, Series.zero(order)) + weight
        generator = cls(exponent, generators, order)
        result = cls.identity(generators, order)
        power = cls.identity(generators, order)
        for k in range(1, order + 1):
            power = power * generator
            if not power:
                break
            result = result + power.scale(GaussianRational(1) / factorial(k))
        return result

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, OperatorTensor):
            return NotImplemented
        return self.order == other.order and self._terms == other._terms

    def __repr__(self):
        body = " + ".join(
            f"{coeff.to_text()}*({left})x({right})"
            for (left, right), coeff in self._terms.items()
        )
        return f"OperatorTensor({body or 0})"

    def _check(self, other):
        if self.order != other.order or self.generators != other.generators:
            raise OrderMismatchError("operator tensors live in different contexts")

    def __add__(self, other):
        self._check(other)
        terms = dict(self._terms)
        for key, coeff in other.items():
            terms[key] = terms[key] + coeff if key in terms else coeff
        return OperatorTensor(terms, self.generators, self.order)

    def __neg__(self):
        return OperatorTensor(
            {key: -coeff for key, coeff in self.items()}, self.generators, self.order
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Leg-wise product; legs of an abelian algebra commute."""
        self._check(other)
        terms = {}
        for (l1, r1), c1 in self.items():
            for (l2, r2), c2 in other.items():
                coeff = c1 * c2
                if not coeff:
                    continue
                key = (l1 * l2, r1 * r2)
                terms[key] = terms[key] + coeff if key in terms else coeff
        return OperatorTensor(terms, self.generators, self.order)

    def scale(self, value):
        return OperatorTensor(
            {key: coeff.scale(value) for key, coeff in self.items()},
            self.generators,
            self.order,
        )

    def flip(self):
        return OperatorTensor(
            {(right, left): coeff for (left, right), coeff in self.items()},
            self.generators,
            self.order,
        )

    def is_identity(self):
        return self == OperatorTensor.identity(self.generators, self.order)

    def degree_part(self, degree):
        """Coefficients of h^degree as a map (left, right) -> GaussianRational."""
        return {
            key: coeff.coeffs[degree]
            for key, coeff in self.items()
            if coeff.coeffs[degree]
        }


def build_twist(spec, order):
    """Return (F, F_inv) for the abelian twist described by spec."""
    if order < 0:
        raise ValueError("truncation order must be non-negative")
    spec.validate()
    f_inv = OperatorTensor.exponential(spec.pairs, spec.generators, order, scale=1)
    f = OperatorTensor.exponential(spec.pairs, spec.generators, order, scale=-1)
    logger.debug("twist built: %d terms in F^-1 at order %d", len(f_inv), order)
    return f, f_inv


def build_r_matrix(f, f_inv):
    """R = flip(F) F^-1 and R^-1 = flip(R) (triangular)."""
    r = f.flip() * f_inv
    return r, r.flip()


def act_legwise(tensor, x, y, act_left, act_right):
    """[(coeff, word_L |> x, word_R |> y)] over the terms of tensor.

    Terms whose acted legs are falsy (zero) are dropped.
    """
    out = []
    for (left, right), coeff in tensor.items():
        acted_x = act_left(left, x)
        if not acted_x:
            continue
        acted_y = act_right(right, y)
        if not acted_y:
            continue
        out.append((coeff, acted_x, acted_y))
    return out


def adjoint_coefficients(word, cop=False):
    """Legs of Delta(word)(id (x) S), or of (S^-1 (x) id)Delta^cop(word) when cop.

    h |> L = h_(1) |> o L o S(h_(2)) |>; the ^cop variant acts as
    h_(2) |> o L o S^-1(h_(1)) |>. On primitive words S^-1 = S.
    """
    out = []
    for left, right, weight in word.coproduct():
        if cop:
            left, right = right, left
            sign, _ = left.antipode()
        else:
            sign, _ = right.antipode()
        out.append((left, right, GaussianRational(sign * weight)))
    return sorted(out, key=lambda term: (term[0], term[1]))


def adjoint_operator_terms(word, cop=False):
    """[(after, before, coeff)] so that (word |> L)(s) = sum coeff after|>L(before|>s)."""
    if cop:
        return [(right, left, c) for left, right, c in adjoint_coefficients(word, cop=True)]
    return list(adjoint_coefficients(word))


def _three_leg_mul(a, b):
    out = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            coeff = ca * cb
            if not coeff:
                continue
            key = tuple(x * y for x, y in zip(ka, kb))
            out[key] = out[key] + coeff if key in out else coeff
    return {k: v for k, v in out.items() if v}


def cocycle_residual(f):
    """(F (x) 1)(Delta (x) id)F - (1 (x) F)(id (x) Delta)F as a three-leg map."""
    unit = SymmetryWord.unit(f.generators)
    f_left = {(l, r, unit): c for (l, r), c in f.items()}
    f_right = {(unit, l, r): c for (l, r), c in f.items()}
    delta_left = {}
    delta_right = {}
    for (l, r), c in f.items():
        for a, b, weight in l.coproduct():
            key = (a, b, r)
            term = c.scale(weight)
            delta_left[key] = delta_left[key] + term if key in delta_left else term
        for a, b, weight in r.coproduct():
            key = (l, a, b)
            term = c.scale(weight)
            delta_right[key] = delta_right[key] + term if key in delta_right else term
    lhs = _three_leg_mul(f_left, delta_left)
    rhs = _three_leg_mul(f_right, delta_right)
    residual = {}
    for key in set(lhs) | set(rhs):
        diff = lhs.get(key, Series.zero(f.order)) - rhs.get(key, Series.zero(f.order))
        if diff:
            residual[key] = diff
    return residual


def normalization_residual(f):
    """(eps (x) id)F - 1 and (id (x) eps)F - 1 as maps word -> Series."""
    unit = SymmetryWord.unit(f.generators)
    residual = {}
    for side in ("left", "right"):
        collapsed = {}
        for (l, r), c in f.items():
            killed, kept = (l, r) if side == "left" else (r, l)
            if killed.is_unit:
                collapsed[kept] = collapsed[kept] + c if kept in collapsed else c
        collapsed[unit] = collapsed.get(unit, Series.zero(f.order)) - Series.one(f.order)
        for word, c in collapsed.items():
            if c:
                residual[(side, word)] = c
    return residual


