"""Structure of the unit group Z_p^* = F_p x C_p.

F_p is the torsion subgroup (the (p-1)-th roots of unity, or {1, -1} when
p = 2) and C_p the principal units, 1 + pZ_p (1 + 4Z_2 when p = 2).  The
closed subgroups of C_p are the layers

    C_p^{p^n} = 1 + p^{n+1} Z_p        (odd p)
    C_2^{2^n} = 1 + 2^{n+2} Z_2

so the layer of a principal unit v is read off from v_p(v - 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import InvalidElement, LevelOutOfRange, NotAUnit, NotPrincipal, PrimeMismatch, ValuationTooSmall
from .padic import AtLeastPrecision, PAdicInt, PrecisionPolicy, invert, valuation

INFINITY = math.inf

Layer = Union[int, float]


def torsion_order(p: int) -> int:
    """|F_p|: p - 1 for odd p, 2 for p = 2."""
    return 2 if p == 2 else p - 1


def principal_shift(p: int) -> int:
    """v_p(g - 1) for a generator g of C_p: 1 for odd p, 2 for p = 2."""
    return 2 if p == 2 else 1


def canonical_generator(p: int, n: int, precision: int) -> PAdicInt:
    """The topological generator 1 + p^{n+1} (1 + 2^{n+2}) of C_p^{p^n}."""
    return PAdicInt.of(1 + p ** (n + principal_shift(p)), p, precision)


def is_principal(v: PAdicInt) -> bool:
    p = v.prime
    if p == 2:
        if v.precision < 2:
            raise LevelOutOfRange("principal units of Z_2 need precision >= 2 to be recognised")
        return v.residue % 4 == 1
    return v.residue % p == 1


def _require_principal(v: PAdicInt) -> None:
    if not v.is_unit():
        raise NotAUnit(f"{v} is not a unit")
    if not is_principal(v):
        modulus = 4 if v.prime == 2 else v.prime
        raise NotPrincipal(f"{v} is not 1 mod {modulus}, so its Teichmuller part is non-trivial")


def teichmuller(a: PAdicInt) -> PAdicInt:
    """The root of unity in Z_p^* congruent to ``a`` mod p (mod 4 for p = 2)."""
    if not a.is_unit():
        raise NotAUnit(f"{a} is divisible by {a.prime}")
    p, m = a.prime, a.modulus
    if p == 2:
        return a.with_residue(1 if a.precision < 2 or a.residue % 4 == 1 else -1)
    # a^{p^k} is stable mod p^{k+1}
    x = a.residue
    for _ in range(a.precision):
        x = pow(x, p, m)
    return a.with_residue(x)


@dataclass(frozen=True)
class UnitDecomposition:
    torsion_part: PAdicInt
    principal_part: PAdicInt

    def recombine(self) -> PAdicInt:
        return self.torsion_part * self.principal_part


def decompose(u: PAdicInt) -> UnitDecomposition:
    w = teichmuller(u)
    return UnitDecomposition(w, invert(w) * u)


def layer(v: PAdicInt) -> Layer:
    """The n with v in C_p^{p^n} minus C_p^{p^{n+1}}; ``INFINITY`` if v = 1 at precision."""
    _require_principal(v)
    m = valuation(v - 1)
    if isinstance(m, AtLeastPrecision):
        return INFINITY
    return m - principal_shift(v.prime)


def unit_power(v: PAdicInt, y: Union[PAdicInt, int]) -> PAdicInt:
    """v^y for a principal unit v and a p-adic exponent y.

    v^y mod p^M only depends on y mod p^{M - n - s} (n the layer of v, s the
    principal shift), so the result carries every digit that y determines,
    capped at the precision of v.
    """
    _require_principal(v)
    if isinstance(y, int):
        return v.with_residue(pow(v.residue, y, v.modulus))
    if y.prime != v.prime:
        raise PrimeMismatch(f"primes differ: {v.prime} vs {y.prime}")
    n = layer(v)
    if n == INFINITY:
        return v.with_residue(1)
    prec = min(v.precision, y.precision + principal_shift(v.prime) + int(n))
    m = v.prime ** prec
    return PAdicInt(v.prime, prec, pow(v.residue, y.residue, m))


def unit_log(base: PAdicInt, w: PAdicInt) -> PAdicInt:
    """The exponent y with base^y = w, solved one base-p digit at a time.

    ``base`` must be a principal unit of finite layer n and ``w`` must lie in
    the closed subgroup it generates (layer >= n).  The answer is exact modulo
    p^{M - n - s}, where M is the common precision.
    """
    _require_principal(base)
    _require_principal(w)
    if base.prime != w.prime:
        raise PrimeMismatch(f"primes differ: {base.prime} vs {w.prime}")
    p = base.prime
    n = layer(base)
    if n == INFINITY:
        raise InvalidElement(f"{base} is 1 at working precision and generates nothing")
    s = principal_shift(p)
    prec = min(base.precision, w.precision)
    digits = prec - int(n) - s
    if digits < 1:
        raise LevelOutOfRange(f"precision {prec} too small to resolve exponents of a layer-{n} base")
    m = p ** prec
    lw = layer(PAdicInt(p, prec, w.residue % m))
    if lw < n:
        raise InvalidElement(f"{w} has layer {lw} < {n}, so it is not a power of {base}")
    y = 0
    r = w.residue % m
    b_j = base.residue % m  # base^{p^j}
    inv_base = pow(base.residue, -1, m)
    for j in range(digits):
        shift = p ** (int(n) + j + s)
        # (1 + a p^e)^d = 1 + d a p^e mod p^{e+1} for e >= 1 (e >= 2 when p = 2)
        d = ((r - 1) // shift) * pow((b_j - 1) // shift, -1, p) % p
        if d:
            y += d * p ** j
            r = r * pow(inv_base, d * p ** j, m) % m
        b_j = pow(b_j, p, m)
    if r != 1:  # pragma: no cover - guarded by the layer check above
        raise InvalidElement(f"{w} is not a power of {base}")
    return PAdicInt(p, digits, y)


def principal_root(w: PAdicInt, n: int) -> PAdicInt:
    """A principal unit r with r^{p^n} = w, for w in C_p^{p^n}.

    Realises the inclusion of 1 + p^{n+1}Z_p into (1 + pZ_p)^{p^n}; r is exact
    modulo p^{M - n}.
    """
    p = w.prime
    g = canonical_generator(p, 0, w.precision)
    y = unit_log(g, w)
    if y.residue % p ** n:
        raise InvalidElement(f"{w} lies outside layer {n}")
    y_root = y.residue // p ** n
    prec = w.precision - n
    return PAdicInt(p, prec, pow(g.residue, y_root, p ** prec))


def _series_policy(p: int, n: int, guard_digits: int | None) -> PrecisionPolicy:
    if guard_digits is None:
        return PrecisionPolicy.for_series(p, n)
    return PrecisionPolicy(n, guard_digits)


def plog(v: PAdicInt, guard_digits: int | None = None) -> PAdicInt:
    """p-adic logarithm log(1 + z) = sum (-1)^{k+1} z^k / k on C_p."""
    _require_principal(v)
    p, n = v.prime, v.precision
    z = (v.residue - 1) % v.modulus
    if z == 0:
        return v.with_residue(0)
    vz = valuation(v.with_residue(z))
    policy = _series_policy(p, n, guard_digits)
    big = p ** policy.total
    out = v.modulus
    total = 0
    zk = 1
    k = 0
    while True:
        k += 1
        if k * vz - math.log(k, p) >= n:
            break
        zk = zk * z % big
        e, kk = 0, k
        while kk % p == 0:
            kk //= p
            e += 1
        if e > policy.guard_digits:
            raise LevelOutOfRange(f"guard digits {policy.guard_digits} too few for term {k}")
        term = (zk // p ** e) * pow(kk, -1, out)
        total += term if k % 2 else -term
    return v.with_residue(total)


def pexp(z: PAdicInt) -> PAdicInt:
    """p-adic exponential sum z^k / k! for v_p(z) >= 1 (>= 2 when p = 2)."""
    p, n = z.prime, z.precision
    vz = valuation(z)
    if isinstance(vz, AtLeastPrecision):
        return z.with_residue(1)
    if vz < principal_shift(p):
        raise ValuationTooSmall(f"exp converges only on p^{principal_shift(p)}Z_p; v_p({z}) = {vz}")
    out = z.modulus
    total = 1
    fact_e, fact_unit = 0, 1
    k = 0
    while True:
        k += 1
        kk = k
        while kk % p == 0:
            kk //= p
            fact_e += 1
        fact_unit *= kk
        # v_p(k!) <= (k-1)/(p-1), and the bound grows with k
        if k * vz - (k - 1) / (p - 1) >= n:
            break
        zk = pow(z.residue, k, p ** (n + fact_e))
        total += (zk // p ** fact_e) * pow(fact_unit, -1, out)
    return z.with_residue(total)
