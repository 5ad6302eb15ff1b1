"""
Exact scalars of the engine.

GaussianRational is the coefficient field Q(i); Series is a power series in
the deformation parameter h truncated at a fixed order N. Every value is
immutable and all arithmetic is exact.
"""

from fractions import Fraction

from .exceptions import NonUnitError, OrderMismatchError


def _fraction(value):
    if type(value) is Fraction:
        return value
    return Fraction(value)


class GaussianRational:
    """re + im*i with both parts exact rationals."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _fraction(re)
        self.im = _fraction(im)

    @classmethod
    def coerce(cls, value):
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, str):
            return cls.from_text(value)
        raise TypeError(f"cannot use {type(value).__name__} as a Gaussian rational")

    @classmethod
    def from_text(cls, text):
        """Parse "p/q", "p/q+r/s i", "r/s i" or "i"."""
        compact = text.replace(" ", "")
        if not compact:
            raise ValueError("empty Gaussian rational")
        try:
            if not compact.endswith("i"):
                return cls(Fraction(compact))
            body = compact[:-1]
            split = max(body.rfind("+"), body.rfind("-"))
            if split > 0:
                real, imag = body[:split], body[split:]
            else:
                real, imag = "0", body
            if imag in ("", "+", "-"):
                imag += "1"
            return cls(Fraction(real), Fraction(imag))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"invalid Gaussian rational {text!r}") from exc

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im} i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)} i"

    def __repr__(self):
        return f"GaussianRational({str(self)!r})"

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return not self.im and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            return GaussianRational(self.re + other, self.im)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            return GaussianRational(self.re - other, self.im)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            if not isinstance(other, (int, Fraction)):
                return NotImplemented
            return GaussianRational(self.re * other, self.im * other)
        if not self.im and not other.im:
            return GaussianRational(self.re * other.re)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self):
        norm = self.re * self.re + self.im * self.im
        if not norm:
            raise NonUnitError("division by zero Gaussian rational")
        return GaussianRational(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I_UNIT = GaussianRational(0, 1)


class Series:
    """Power series c_0 + c_1 h + ... + c_N h^N over Gaussian rationals."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs, order):
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        values = [GaussianRational.coerce(c) for c in list(coeffs)[: order + 1]]
        values.extend([ZERO] * (order + 1 - len(values)))
        self.order = order
        self.coeffs = tuple(values)

    @classmethod
    def _raw(cls, coeffs, order):
        series = cls.__new__(cls)
        series.order = order
        series.coeffs = coeffs
        return series

    @classmethod
    def zero(cls, order):
        return cls._raw((ZERO,) * (order + 1), order)

    @classmethod
    def one(cls, order):
        return cls.constant(ONE, order)

    @classmethod
    def constant(cls, value, order):
        return cls._raw((GaussianRational.coerce(value),) + (ZERO,) * order, order)

    @classmethod
    def monomial(cls, value, degree, order):
        """value * h^degree, silently zero past the truncation order."""
        coeffs = [ZERO] * (order + 1)
        if degree <= order:
            coeffs[degree] = GaussianRational.coerce(value)
        return cls._raw(tuple(coeffs), order)

    @classmethod
    def from_text(cls, pairs, order):
        """Inverse of to_text: a list of [degree, coefficient-string]."""
        coeffs = [ZERO] * (order + 1)
        for degree, text in pairs:
            if degree > order:
                raise OrderMismatchError(f"degree {degree} exceeds order {order}")
            coeffs[degree] = GaussianRational.from_text(text)
        return cls._raw(tuple(coeffs), order)

    def to_text(self):
        return [[k, str(c)] for k, c in enumerate(self.coeffs) if c]

    def terms(self):
        return [(k, c) for k, c in enumerate(self.coeffs) if c]

    def __repr__(self):
        return f"Series({self.to_text()!r}, order={self.order})"

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def _check(self, other):
        if self.order != other.order:
            raise OrderMismatchError(
                f"series of order {self.order} combined with order {other.order}"
            )

    def __neg__(self):
        return Series._raw(tuple(-c for c in self.coeffs), self.order)

    def __add__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        self._check(other)
        return Series._raw(
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.order
        )

    def __sub__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        self._check(other)
        return Series._raw(
            tuple(a - b for a, b in zip(self.coeffs, other.coeffs)), self.order
        )

    def __mul__(self, other):
        if isinstance(other, (GaussianRational, int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Series):
            return NotImplemented
        self._check(other)
        out = [ZERO] * (self.order + 1)
        left = self.terms()
        right = other.terms()
        for i, a in left:
            for j, b in right:
                if i + j > self.order:
                    break
                out[i + j] = out[i + j] + a * b
        return Series._raw(tuple(out), self.order)

    def __rmul__(self, other):
        if isinstance(other, (GaussianRational, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, value):
        value = GaussianRational.coerce(value)
        return Series._raw(tuple(c * value for c in self.coeffs), self.order)

    def shift(self, degree):
        """Multiply by h^degree."""
        if degree == 0:
            return self
        coeffs = (ZERO,) * degree + self.coeffs[: max(self.order + 1 - degree, 0)]
        return Series._raw(coeffs[: self.order + 1], self.order)

    def valuation(self):
        """Lowest degree with a nonzero coefficient, None for zero."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def is_unit(self):
        return bool(self.coeffs[0])

    def is_constant(self):
        return not any(self.coeffs[1:])

    def invert(self):
        """Inverse through the geometric series of the positive-degree part."""
        if not self.is_unit():
            raise NonUnitError(f"series {self.to_text()} is not a unit")
        head = self.coeffs[0].inverse()
        tail = Series._raw((ZERO,) + self.coeffs[1:], self.order).scale(head)
        result = Series.one(self.order)
        power = Series.one(self.order)
        for _ in range(self.order):
            power = power * (-tail)
            if not power:
                break
            result = result + power
        return result.scale(head)

