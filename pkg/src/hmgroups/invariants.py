"""Derived subgroups, abelianizations and isomorphism classification.

For G = X x|_a Y with Y abelian, G' = A x| {e} where A is generated by the
elements x - a(y, x).  All families here have X = Z_p, so A = p^m Z_p for
an exponent m read off from the units 1 - a(y):

    M(p, n):  m = n + 1 (odd p), n + 2 (p = 2)
    T(n):     m = 1
    K(p, d):  m = 0 for odd p and d > 1, m = 1 for K(2, 2), trivial for d = 1

The quotient is (Z_p / p^m) x Y, whose torsion part is the invariant used
to tell the families apart.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .errors import UnsupportedDescriptor
from .groups import (
    AffineL,
    Element,
    GenericFiniteAction,
    GenericPAdicAction,
    GroupDescriptor,
    K,
    M,
    T,
    torsion_generator,
)
from .padic import PAdicInt, reduce
from .units import INFINITY, decompose, layer, unit_log, unit_power

Evaluator = Callable[[Element], Element]


@dataclass(frozen=True)
class DerivedDescription:
    """G' = p^exponent Z_p x| {1}; an infinite exponent means G' is trivial."""

    exponent: Union[int, float]

    @property
    def is_trivial(self) -> bool:
        return self.exponent == INFINITY

    def contains(self, x: PAdicInt) -> bool:
        if self.is_trivial:
            return x.residue == 0
        if self.exponent >= x.precision:
            return x.residue == 0
        return x.residue % x.prime ** self.exponent == 0

    def to_dict(self) -> dict:
        return {"derived_exponent": None if self.is_trivial else self.exponent}


@dataclass(frozen=True)
class AbelianizationInvariant:
    torsion_order: int
    free_layer: Optional[int]
    presentation: str
    torsion_factors: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "abelianization_torsion": self.torsion_order,
            "free_layer": self.free_layer,
            "presentation": self.presentation,
            "torsion_factors": list(self.torsion_factors),
        }


@dataclass(frozen=True)
class ClassificationResult:
    """Canonical isomorphism type of a generic action and the isomorphism to it."""

    kind: str
    group: GroupDescriptor
    source: GroupDescriptor
    iso: Evaluator = field(repr=False, compare=False)
    inverse: Evaluator = field(repr=False, compare=False)
    generator: Optional[PAdicInt] = None

    @property
    def parameter(self) -> int:
        g = self.group
        if isinstance(g, K):
            return g.d
        return g.n

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "parameter": self.parameter,
            "prime": self.group.prime,
            "descriptor": self.group.text(),
        }
        if isinstance(self.group, (M, T)):
            out["n"] = self.group.n
        else:
            out["d"] = self.group.d
        if self.generator is not None:
            out["acting_generator"] = str(self.generator)
        return out


@dataclass(frozen=True)
class Verdict:
    isomorphic: bool
    certificate: Optional[str] = None
    values: tuple = ()
    witness: Optional[Evaluator] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "verdict": "isomorphic" if self.isomorphic else "non-isomorphic",
            "certificate": self.certificate,
            "values": list(self.values),
        }


ABELIANIZATION_TORSION = "abelianization torsion"
INDEX2_TORSION = "index-2 subgroup abelianization torsion"
TORSION_EXISTENCE = "torsion existence"
TORSION_ORDER = "|t(G)|"
PRIME = "prime"


# ----------------------------------------------------------- classification


def classify_action(p: int, u: PAdicInt) -> ClassificationResult:
    """Identify Z_p x|_a Z_p, a(y, x) = f(y) x with f(1) = u, as M(p, n) or T(n).

    Write u = w v with w in F_p and v principal.  If w = 1 the map
    (x, y) -> (x, v^y) is an isomorphism onto M(p, layer v).  If p = 2 and
    w = -1, (x, y) -> (x, v^y) lands in T(layer v): for odd y the unit v^y sits
    in the bottom layer, where beta flips the sign back to f(y) = -v^y.
    """
    src = GenericPAdicAction(p, u)
    v = decompose(u).principal_part
    n = int(layer(v))
    target: GroupDescriptor = T(n) if src.sign == -1 else M(p, n)

    def iso(g: Element) -> Element:
        return Element(target, g.x, unit_power(v, g.y))

    def inverse(h: Element) -> Element:
        return Element(src, h.x, unit_log(v, h.y))

    return ClassificationResult(target.tag, target, src, iso, inverse, v)


def classify_finite_action(p: int, t: PAdicInt, d: int) -> ClassificationResult:
    """Identify Z_p x| Z/d, j acting by t^j, with K(p, d) via (a, j) -> (a, t^j)."""
    src = GenericFiniteAction(p, t, d)
    target = K(p, d)

    def iso(g: Element) -> Element:
        return Element(target, g.x, t ** g.y)

    def inverse(h: Element) -> Element:
        acc = h.y.with_residue(1)
        for j in range(d):
            if acc == h.y:
                return Element(src, h.x, j)
            acc = acc * t
        raise UnsupportedDescriptor(f"{h.y} is not a power of {t}")

    return ClassificationResult("Zp" if d == 1 else "K", target, src, iso, inverse, t)


def canonical(d: GroupDescriptor) -> GroupDescriptor:
    if isinstance(d, GenericPAdicAction):
        return classify_action(d.prime, d.u).group
    if isinstance(d, GenericFiniteAction):
        return K(d.prime, d.d)
    if isinstance(d, AffineL):
        raise UnsupportedDescriptor(
            "L = Q_p x| Q_p^* has derived subgroup Q_p x| {1}, not of the form p^m Z_p")
    return d


# ------------------------------------------------------------ derived groups


def derived_subgroup(d: GroupDescriptor) -> DerivedDescription:
    d = canonical(d)
    if isinstance(d, M):
        return DerivedDescription(d.n + (2 if d.prime == 2 else 1))
    if isinstance(d, T):
        return DerivedDescription(1)
    if d.d == 1:
        return DerivedDescription(INFINITY)
    # 1 - t is a unit for a nontrivial Teichmuller t when p is odd; 1 - (-1) = 2
    return DerivedDescription(1 if d.prime == 2 else 0)


def abelianization(d: GroupDescriptor) -> AbelianizationInvariant:
    d = canonical(d)
    p = d.prime
    if isinstance(d, M):
        m = derived_subgroup(d).exponent
        return AbelianizationInvariant(p ** m, d.n, f"Z({p}^{m}) x C_{p}^({p}^{d.n})", (p ** m,))
    if isinstance(d, T):
        return AbelianizationInvariant(2, d.n, f"Z(2) x C_2^(2^{d.n})", (2,))
    if d.d == 1:
        return AbelianizationInvariant(1, 0, f"Z_{p}")
    if p == 2:
        return AbelianizationInvariant(4, None, "Z(2) x Z(2)", (2, 2))
    return AbelianizationInvariant(d.d, None, f"Z({d.d})", (d.d,))


def psi(g: Element) -> tuple[PAdicInt, PAdicInt]:
    """The abelianization map of M(p, n): (x, y) -> (x mod p^m, y), p^m Z_p = M'."""
    if not isinstance(g.group, M):
        raise UnsupportedDescriptor(f"psi is defined on M(p, n), not {g.group}")
    m = derived_subgroup(g.group).exponent
    return reduce(g.x, min(m, g.x.precision)), g.y


def psi_mul(a: tuple[PAdicInt, PAdicInt], b: tuple[PAdicInt, PAdicInt]) -> tuple[PAdicInt, PAdicInt]:
    """Group law of Z(p^m) x C_p^{p^n}."""
    return a[0] + b[0], a[1] * b[1]


def index2_torsion(d: T) -> int:
    """Abelianization torsion of the canonical index-2 subgroup M(2, n+1) of T(n)."""
    return abelianization(M(2, d.n + 1)).torsion_order


# ---------------------------------------------------------------- verdicts


def _has_torsion(d: GroupDescriptor) -> bool:
    return isinstance(d, K) and d.d > 1


def _identity_witness(c1: GroupDescriptor, d1: GroupDescriptor, d2: GroupDescriptor) -> Evaluator:
    steps: list[Evaluator] = []
    if isinstance(d1, GenericPAdicAction):
        steps.append(classify_action(d1.prime, d1.u).iso)
    elif isinstance(d1, GenericFiniteAction):
        steps.append(classify_finite_action(d1.prime, d1.t, d1.d).iso)
    if isinstance(d2, GenericPAdicAction):
        steps.append(classify_action(d2.prime, d2.u).inverse)
    elif isinstance(d2, GenericFiniteAction):
        steps.append(classify_finite_action(d2.prime, d2.t, d2.d).inverse)

    def witness(g: Element) -> Element:
        for step in steps:
            g = step(g)
        return g

    return witness


def distinguish(d1: GroupDescriptor, d2: GroupDescriptor) -> Verdict:
    """Decide isomorphism between two groups of the classified families.

    The invariants are tried in a fixed order, so the certificate is
    deterministic: prime, existence of torsion, torsion of G/G', and for two
    T's the torsion of M(2, n+1)/M(2, n+1)', which is 2^{n+3}.
    """
    c1, c2 = canonical(d1), canonical(d2)
    if c1.prime != c2.prime:
        return Verdict(False, PRIME, (c1.prime, c2.prime))
    t1, t2 = _has_torsion(c1), _has_torsion(c2)
    if t1 != t2:
        return Verdict(False, TORSION_EXISTENCE, (t1, t2))
    a1, a2 = abelianization(c1), abelianization(c2)
    if a1.torsion_order != a2.torsion_order:
        return Verdict(False, ABELIANIZATION_TORSION, (a1.torsion_order, a2.torsion_order))
    if a1.torsion_factors != a2.torsion_factors:
        # same order, different shape: Z(2) x Z(2) against Z(4)
        return Verdict(False, ABELIANIZATION_TORSION, (a1.presentation, a2.presentation))
    if isinstance(c1, T) and isinstance(c2, T) and c1.n != c2.n:
        return Verdict(False, INDEX2_TORSION, (index2_torsion(c1), index2_torsion(c2)))
    if isinstance(c1, K) and isinstance(c2, K) and c1.d != c2.d:
        return Verdict(False, TORSION_ORDER, (c1.d, c2.d))
    if c1 == c2:
        return Verdict(True, None, (), _identity_witness(c1, d1, d2))
    raise UnsupportedDescriptor(f"no invariant separates {c1} and {c2}")  # pragma: no cover


def faithful_action_unit(p: int, u: PAdicInt, a: PAdicInt) -> PAdicInt:
    """f(a) for the encoded homomorphism with f(1) = u."""
    return GenericPAdicAction(p, u).f(a)


def canonical_unit(d: GroupDescriptor, precision: int) -> PAdicInt:
    """A unit u = f(1) whose generic action is isomorphic to ``d`` (M or T)."""
    if isinstance(d, M):
        return PAdicInt.of(1 + d.prime ** (d.n + (2 if d.prime == 2 else 1)), d.prime, precision)
    if isinstance(d, T):
        return PAdicInt.of(-(1 + 2 ** (d.n + 2)), 2, precision)
    raise UnsupportedDescriptor(f"{d} is not a Z_p-action family")


def canonical_torsion(d: K, precision: int) -> PAdicInt:
    return torsion_generator(d.prime, d.d, precision)


__all__ = [
    "AbelianizationInvariant",
    "ClassificationResult",
    "DerivedDescription",
    "Verdict",
    "abelianization",
    "canonical",
    "canonical_unit",
    "classify_action",
    "classify_finite_action",
    "derived_subgroup",
    "distinguish",
    "index2_torsion",
    "psi",
    "psi_mul",
]
