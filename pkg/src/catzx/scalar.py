# Exact scalars in Z[w, 1/sqrt(2)] with w = exp(i*pi/4)
import math
from dataclasses import dataclass, field
from typing import Tuple

import pyparsing as pp

Coeffs = Tuple[int, int, int, int]

_ZERO: Coeffs = (0, 0, 0, 0)
# sqrt(2) = w - w^3
_SQRT2: Coeffs = (0, 1, 0, -1)


def _mul_coeffs(x: Coeffs, y: Coeffs) -> Coeffs:
    """Product of two degree-3 polynomials in w, reduced with w^4 = -1."""
    out = [0, 0, 0, 0]
    for i, a in enumerate(x):
        if a == 0:
            continue
        for j, b in enumerate(y):
            if b == 0:
                continue
            k = i + j
            if k < 4:
                out[k] += a * b
            else:
                out[k - 4] -= a * b
    return (out[0], out[1], out[2], out[3])


def _canonical(coeffs: Coeffs, half_power: int) -> Tuple[Coeffs, int]:
    if not any(coeffs):
        return _ZERO, 0
    while all(c % 2 == 0 for c in coeffs):
        coeffs = (coeffs[0] // 2, coeffs[1] // 2, coeffs[2] // 2, coeffs[3] // 2)
        half_power += 2
    # at most one factor of sqrt(2) is left once no factor of 2 divides the coefficients
    scaled = _mul_coeffs(coeffs, _SQRT2)
    if all(c % 2 == 0 for c in scaled):
        coeffs = (scaled[0] // 2, scaled[1] // 2, scaled[2] // 2, scaled[3] // 2)
        half_power += 1
    return coeffs, half_power


@dataclass(frozen=True)
class ExactScalar:
    """The value 2^(half_power/2) * (a + b*w + c*w^2 + d*w^3).

    Instances are always canonical: the coefficient vector is not divisible by
    sqrt(2) and zero is ((0, 0, 0, 0), 0), so equal values compare equal field by field.
    """

    coeffs: Coeffs = _ZERO
    half_power: int = 0
    is_zero: bool = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        coeffs, half_power = _canonical(tuple(int(c) for c in self.coeffs), int(self.half_power))  # type: ignore[arg-type]
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "half_power", half_power)
        object.__setattr__(self, "is_zero", coeffs == _ZERO)

    @classmethod
    def zero(cls) -> "ExactScalar":
        return cls(_ZERO, 0)

    @classmethod
    def one(cls) -> "ExactScalar":
        return cls((1, 0, 0, 0), 0)

    @classmethod
    def from_int(cls, n: int) -> "ExactScalar":
        return cls((n, 0, 0, 0), 0)

    @classmethod
    def from_phase(cls, k: int) -> "ExactScalar":
        """w^k for k taken mod 8."""
        k %= 8
        coeffs = [0, 0, 0, 0]
        if k < 4:
            coeffs[k] = 1
        else:
            coeffs[k - 4] = -1
        return cls((coeffs[0], coeffs[1], coeffs[2], coeffs[3]), 0)

    @classmethod
    def sqrt2_power(cls, n: int) -> "ExactScalar":
        """2^(n/2)."""
        return cls((1, 0, 0, 0), n)

    def scale_sqrt2(self, n: int) -> "ExactScalar":
        """Multiply by 2^(n/2) without a full ring product."""
        if self.is_zero or n == 0:
            return self
        return ExactScalar(self.coeffs, self.half_power + n)

    def __mul__(self, other: "ExactScalar") -> "ExactScalar":
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return ExactScalar.zero()
        return ExactScalar(_mul_coeffs(self.coeffs, other.coeffs), self.half_power + other.half_power)

    def __add__(self, other: "ExactScalar") -> "ExactScalar":
        if not isinstance(other, ExactScalar):
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        a, pa = self.coeffs, self.half_power
        b, pb = other.coeffs, other.half_power
        if (pa - pb) % 2:
            # absorb one sqrt(2) into the operand with the larger exponent
            if pa > pb:
                a, pa = _mul_coeffs(a, _SQRT2), pa - 1
            else:
                b, pb = _mul_coeffs(b, _SQRT2), pb - 1
        p = min(pa, pb)
        fa = 2 ** ((pa - p) // 2)
        fb = 2 ** ((pb - p) // 2)
        total = (a[0] * fa + b[0] * fb, a[1] * fa + b[1] * fb, a[2] * fa + b[2] * fb, a[3] * fa + b[3] * fb)
        return ExactScalar(total, p)

    def __neg__(self) -> "ExactScalar":
        a, b, c, d = self.coeffs
        return ExactScalar((-a, -b, -c, -d), self.half_power)

    def __sub__(self, other: "ExactScalar") -> "ExactScalar":
        return self + (-other)

    def conjugate(self) -> "ExactScalar":
        a, b, c, d = self.coeffs
        # conj(w^k) = w^(8-k) = -w^(4-k)
        return ExactScalar((a, -d, -c, -b), self.half_power)

    def to_complex(self) -> complex:
        a, b, c, d = self.coeffs
        r = math.sqrt(0.5)
        real = a + (b - d) * r
        imag = c + (b + d) * r
        scale = 2.0 ** (self.half_power / 2)
        return complex(real * scale, imag * scale)

    def __str__(self) -> str:
        a, b, c, d = self.coeffs
        return f"2^({self.half_power}/2) * ({a} + {b}*w + {c}*w^2 + {d}*w^3)"

    @classmethod
    def parse(cls, text: str) -> "ExactScalar":
        """Inverse of ``str``; raises ValueError on malformed input."""
        try:
            result = _SCALAR_TEXT.parse_string(text, parse_all=True)
        except pp.ParseBaseException as e:
            raise ValueError(f"Malformed scalar '{text}': {e}") from e
        return cls((result["a"], result["b"], result["c"], result["d"]), result["p"])


def scalar_from_phase(k: int) -> ExactScalar:
    return ExactScalar.from_phase(k)


def scalar_mul(x: ExactScalar, y: ExactScalar) -> ExactScalar:
    return x * y


def scalar_add(x: ExactScalar, y: ExactScalar) -> ExactScalar:
    return x + y


def scalar_to_complex(x: ExactScalar) -> complex:
    return x.to_complex()


_INT = pp.pyparsing_common.signed_integer
_SCALAR_TEXT = (
    pp.Suppress("2^(") + _INT("p") + pp.Suppress("/2)") + pp.Suppress("*") + pp.Suppress("(")
    + _INT("a") + pp.Suppress("+")
    + _INT("b") + pp.Suppress("*w") + pp.Suppress("+")
    + _INT("c") + pp.Suppress("*w^2") + pp.Suppress("+")
    + _INT("d") + pp.Suppress("*w^3")
    + pp.Suppress(")")
)
