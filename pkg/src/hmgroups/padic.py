"""Truncated p-adic integers and p-adic rationals at explicit precision.

A :class:`PAdicInt` is an element of Z_p known modulo p^N, stored as the
residue in ``[0, p^N)``.  Binary operations truncate to the smaller of the
two precisions, which is exactly the projection Z/p^M -> Z/p^N of the
inverse system.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .errors import (
    DigitOutOfRange,
    LevelOutOfRange,
    MalformedText,
    NotAUnit,
    NotPrime,
    PrimeMismatch,
)

__all__ = [
    "AtLeastPrecision",
    "PAdicInt",
    "PAdicRational",
    "PrecisionPolicy",
    "add",
    "format_padic",
    "invert",
    "is_prime",
    "mul",
    "negate",
    "parse_padic",
    "reduce",
    "sub",
    "valuation",
]

# Bases making Miller-Rabin deterministic below 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@lru_cache(maxsize=1024)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _check_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise NotPrime(f"{p!r} is not a prime")


@dataclass(frozen=True)
class AtLeastPrecision:
    """Valuation of a residue that is zero at the tracked precision."""

    bound: int

    def __str__(self) -> str:
        return f">={self.bound}"


@dataclass(frozen=True)
class PrecisionPolicy:
    working_precision: int
    guard_digits: int = 0

    def __post_init__(self):
        if self.working_precision < 1:
            raise LevelOutOfRange("working_precision must be >= 1")
        if self.guard_digits < 0:
            raise LevelOutOfRange("guard_digits must be >= 0")

    @classmethod
    def for_series(cls, p: int, n: int) -> "PrecisionPolicy":
        # worst denominator valuation in log/exp partial sums is about log_p(n)
        return cls(n, int(math.log(max(n, 1), p)) + 2)

    @property
    def total(self) -> int:
        return self.working_precision + self.guard_digits


@dataclass(frozen=True, eq=False)
class PAdicInt:
    prime: int
    precision: int
    residue: int

    def __post_init__(self):
        _check_prime(self.prime)
        if not isinstance(self.precision, int) or self.precision < 1:
            raise LevelOutOfRange(f"precision must be a positive integer, got {self.precision!r}")
        if not 0 <= self.residue < self.prime ** self.precision:
            raise DigitOutOfRange(
                f"residue {self.residue} outside [0, {self.prime}^{self.precision})")

    @classmethod
    def of(cls, value: int, prime: int, precision: int) -> "PAdicInt":
        """Build from any integer, reducing modulo p^N."""
        _check_prime(prime)
        if precision < 1:
            raise LevelOutOfRange(f"precision must be >= 1, got {precision}")
        return cls(prime, precision, value % prime ** precision)

    @property
    def modulus(self) -> int:
        return self.prime ** self.precision

    def digits(self) -> list[int]:
        """Little-endian base-p digits, exactly ``precision`` of them."""
        out, r = [], self.residue
        for _ in range(self.precision):
            r, d = divmod(r, self.prime)
            out.append(d)
        return out

    def is_unit(self) -> bool:
        return self.residue % self.prime != 0

    def is_zero(self) -> bool:
        return self.residue == 0

    def with_residue(self, value: int) -> "PAdicInt":
        return PAdicInt(self.prime, self.precision, value % self.modulus)

    def _coerce(self, other) -> "PAdicInt":
        if isinstance(other, PAdicInt):
            if other.prime != self.prime:
                raise PrimeMismatch(f"primes differ: {self.prime} vs {other.prime}")
            return other
        if isinstance(other, int):
            return PAdicInt.of(other, self.prime, self.precision)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self.residue == other % self.modulus
        if not isinstance(other, PAdicInt) or other.prime != self.prime:
            return NotImplemented
        m = self.prime ** min(self.precision, other.precision)
        return self.residue % m == other.residue % m

    def __hash__(self) -> int:
        # equality is checked at the common precision, so only the prime is safe to hash
        return hash(("PAdicInt", self.prime))

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(self._coerce(other), self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return negate(self)

    def __pow__(self, e: int):
        if e < 0:
            return invert(self) ** (-e)
        return self.with_residue(pow(self.residue, e, self.modulus))

    def __repr__(self) -> str:
        return f"PAdicInt({self.prime}:{self.precision}:{self.residue})"

    def __str__(self) -> str:
        return f"{self.prime}:{self.precision}:{self.residue}"


Number = Union[PAdicInt, int]

_TEXT_RE = re.compile(r"^\s*(\d+)\s*:\s*(\d+)\s*:\s*(.+?)\s*$")


def parse_padic(text: str) -> PAdicInt:
    """Parse ``p:N:[d0,...,d_{N-1}]`` (little-endian digits) or ``p:N:<decimal>``.

    The decimal form may be negative and is reduced modulo p^N, so ``2:4:-5``
    is 11.  The bracketed digit form needs exactly N digits in ``[0, p)``.
    """
    m = _TEXT_RE.match(text)
    if not m:
        raise MalformedText(f"expected '<p>:<N>:<digits or residue>', got {text!r}")
    p, n, body = int(m.group(1)), int(m.group(2)), m.group(3)
    _check_prime(p)
    if n < 1:
        raise MalformedText(f"precision must be >= 1 in {text!r}")
    if body.startswith("[") or "," in body:
        inner = body[1:-1] if body.startswith("[") and body.endswith("]") else body
        if body.startswith("[") != body.endswith("]"):
            raise MalformedText(f"unbalanced brackets in {text!r}")
        parts = [s.strip() for s in inner.split(",")]
        if any(not s.isdigit() for s in parts):
            raise MalformedText(f"digits must be non-negative integers in {text!r}")
        digits = [int(s) for s in parts]
        if len(digits) != n:
            raise MalformedText(f"expected {n} digits, got {len(digits)} in {text!r}")
        bad = [d for d in digits if d >= p]
        if bad:
            raise DigitOutOfRange(f"digit {bad[0]} not in [0, {p}) in {text!r}")
        return PAdicInt(p, n, sum(d * p ** i for i, d in enumerate(digits)))
    try:
        value = int(body)
    except ValueError:
        raise MalformedText(f"residue is not a decimal integer in {text!r}") from None
    return PAdicInt.of(value, p, n)


def format_padic(a: PAdicInt, digits: bool = True) -> str:
    if digits:
        return f"{a.prime}:{a.precision}:[{','.join(map(str, a.digits()))}]"
    return str(a)


def _pair(a: PAdicInt, b: Number) -> tuple[PAdicInt, int, int]:
    if isinstance(b, int):
        return a, b, a.precision
    if a.prime != b.prime:
        raise PrimeMismatch(f"primes differ: {a.prime} vs {b.prime}")
    return a, b.residue, min(a.precision, b.precision)


def add(a: PAdicInt, b: Number) -> PAdicInt:
    a, r, n = _pair(a, b)
    return PAdicInt.of(a.residue + r, a.prime, n)


def sub(a: PAdicInt, b: Number) -> PAdicInt:
    a, r, n = _pair(a, b)
    return PAdicInt.of(a.residue - r, a.prime, n)


def mul(a: PAdicInt, b: Number) -> PAdicInt:
    a, r, n = _pair(a, b)
    return PAdicInt.of(a.residue * r, a.prime, n)


def negate(a: PAdicInt) -> PAdicInt:
    return a.with_residue(-a.residue)


def invert(a: PAdicInt) -> PAdicInt:
    if not a.is_unit():
        raise NotAUnit(f"{a} is divisible by {a.prime}, so it lies in pZ_p and has no inverse")
    return a.with_residue(pow(a.residue, -1, a.modulus))


def valuation(a: PAdicInt) -> Union[int, AtLeastPrecision]:
    if a.residue == 0:
        return AtLeastPrecision(a.precision)
    r, m = a.residue, 0
    while r % a.prime == 0:
        r //= a.prime
        m += 1
    return m


def reduce(a: PAdicInt, k: int) -> PAdicInt:
    if not 1 <= k <= a.precision:
        raise LevelOutOfRange(f"level {k} outside [1, {a.precision}]")
    return PAdicInt(a.prime, k, a.residue % a.prime ** k)


@dataclass(frozen=True, eq=False)
class PAdicRational:
    """An element p^v * u of Q_p, with u a unit known to ``u.precision`` digits.

    Only the operations needed by the affine group Q_p x| Q_p^* are offered.
    Addition tracks absolute precision and collapses to the canonical zero
    when the sum vanishes at the precision available.
    """

    prime: int
    valuation: int = 0
    unit: PAdicInt | None = None

    def __post_init__(self):
        _check_prime(self.prime)
        if self.unit is not None:
            if self.unit.prime != self.prime:
                raise PrimeMismatch("unit prime differs from rational prime")
            if not self.unit.is_unit():
                raise NotAUnit(f"unit part {self.unit} is divisible by {self.prime}")

    @property
    def is_zero(self) -> bool:
        return self.unit is None

    @classmethod
    def zero(cls, prime: int) -> "PAdicRational":
        return cls(prime)

    @classmethod
    def from_padic(cls, a: PAdicInt) -> "PAdicRational":
        v = valuation(a)
        if isinstance(v, AtLeastPrecision):
            return cls.zero(a.prime)
        if v == 0:
            return cls(a.prime, 0, a)
        return cls(a.prime, v, PAdicInt(a.prime, a.precision - v, a.residue // a.prime ** v))

    @classmethod
    def from_fraction(cls, num: int, den: int, prime: int, precision: int) -> "PAdicRational":
        """num/den with ``precision`` digits of relative precision."""
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if num == 0:
            return cls.zero(prime)
        v = 0
        while num % prime == 0:
            num //= prime
            v += 1
        while den % prime == 0:
            den //= prime
            v -= 1
        m = prime ** precision
        return cls(prime, v, PAdicInt(prime, precision, num * pow(den, -1, m) % m))

    @property
    def absolute_precision(self) -> float:
        if self.unit is None:
            return math.inf
        return self.valuation + self.unit.precision

    def _check(self, other: "PAdicRational"):
        if other.prime != self.prime:
            raise PrimeMismatch(f"primes differ: {self.prime} vs {other.prime}")

    def __mul__(self, other: "PAdicRational") -> "PAdicRational":
        self._check(other)
        if self.is_zero or other.is_zero:
            return PAdicRational.zero(self.prime)
        return PAdicRational(self.prime, self.valuation + other.valuation, self.unit * other.unit)

    def inverse(self) -> "PAdicRational":
        if self.is_zero:
            raise NotAUnit("zero has no inverse in Q_p")
        return PAdicRational(self.prime, -self.valuation, invert(self.unit))

    def __neg__(self) -> "PAdicRational":
        if self.is_zero:
            return self
        return PAdicRational(self.prime, self.valuation, negate(self.unit))

    def __add__(self, other: "PAdicRational") -> "PAdicRational":
        self._check(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        a, b = (self, other) if self.valuation <= other.valuation else (other, self)
        rel = min(a.absolute_precision, b.absolute_precision) - a.valuation
        m = self.prime ** rel
        s = (a.unit.residue + self.prime ** (b.valuation - a.valuation) * b.unit.residue) % m
        if s == 0:
            return PAdicRational.zero(self.prime)
        return PAdicRational.from_padic(PAdicInt(self.prime, rel, s)).shift(a.valuation)

    def __sub__(self, other: "PAdicRational") -> "PAdicRational":
        return self + (-other)

    def shift(self, k: int) -> "PAdicRational":
        """Multiply by p^k."""
        if self.is_zero:
            return self
        return PAdicRational(self.prime, self.valuation + k, self.unit)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PAdicRational) or other.prime != self.prime:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        return self.valuation == other.valuation and self.unit == other.unit

    def __hash__(self) -> int:
        return hash(("PAdicRational", self.prime))

    def __str__(self) -> str:
        if self.is_zero:
            return f"{self.prime}:0"
        return f"{self.prime}^{self.valuation}*{self.unit}"

    __repr__ = __str__
