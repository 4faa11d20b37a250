"""Finite quotients of the group families, for brute-force checks.

The level-k model of Z_p x| Y is (Z/p^k) x| (Y/Y_k) where Y_k is the
congruence subgroup acting trivially mod p^k: the layer-(n+k) subgroup for
M(p, n) and T(n), p^k Z_p for a generic Z_p-action, nothing for finite
acting groups.  Elements are indexed by ``x * Y + j`` with x in [0, p^k) and
j the index of the acting coordinate, so the lexicographic order on (x, j)
is the integer order on indices.

Multiplication is computed from the rule, not from a table, so models far
larger than anything we enumerate are still usable for closures of small
subgroups.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InvalidHandle, TooLarge, UnsupportedDescriptor
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
from .invariants import derived_subgroup
from .padic import PAdicInt
from .units import INFINITY, canonical_generator, unit_log

MAX_MODEL_ORDER = 10 ** 6
MAX_ENUMERATION_ORDER = 10 ** 4
# above this the all-pairs commutator sweep is replaced by the normal closure
# of commutators of generators
PAIRWISE_COMMUTATOR_LIMIT = 4096


@dataclass(frozen=True)
class SubgroupHandle:
    """A subgroup of a model as a sorted tuple of element indices."""

    elements: tuple[int, ...]
    generators: tuple[int, ...] = field(default=(), compare=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def mask(self, order: int) -> np.ndarray:
        m = np.zeros(order, dtype=bool)
        m[list(self.elements)] = True
        return m

    def __contains__(self, idx: int) -> bool:
        i = np.searchsorted(self.elements, idx)
        return i < len(self.elements) and self.elements[i] == idx


@dataclass(frozen=True)
class FiniteModel:
    descriptor: GroupDescriptor
    level: int
    modulus: int  # p^k, the size of the x-part
    y_order: int
    multipliers: tuple[int, ...]  # unit by which index j acts, mod p^k

    @property
    def prime(self) -> int:
        return self.descriptor.prime

    @property
    def order(self) -> int:
        return self.modulus * self.y_order

    @property
    def identity(self) -> int:
        return 0

    @cached_property
    def _mult(self) -> np.ndarray:
        return np.array(self.multipliers, dtype=np.int64)

    @property
    def generators(self) -> tuple[int, ...]:
        """(1, e) and (0, j=1), or just (1, e) when the acting quotient is trivial."""
        gens = [self.index(1 % self.modulus, 0)]
        if self.y_order > 1:
            gens.append(self.index(0, 1))
        return tuple(g for g in gens if g != 0) or (0,)

    def index(self, x: int, j: int) -> int:
        return (x % self.modulus) * self.y_order + j % self.y_order

    def coords(self, idx: int) -> tuple[int, int]:
        return divmod(idx, self.y_order)

    # ---------------------------------------------------------- arithmetic

    def mul(self, a: int, b: int) -> int:
        xa, ja = divmod(a, self.y_order)
        xb, jb = divmod(b, self.y_order)
        return ((xa + self.multipliers[ja] * xb) % self.modulus) * self.y_order + (ja + jb) % self.y_order

    def inv(self, a: int) -> int:
        x, j = divmod(a, self.y_order)
        ji = -j % self.y_order
        return ((-self.multipliers[ji] * x) % self.modulus) * self.y_order + ji

    def commutator(self, a: int, b: int) -> int:
        return self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))

    def vmul(self, a, b) -> np.ndarray:
        """Elementwise product of index arrays (either side may be a scalar)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        xa, ja = np.divmod(a, self.y_order)
        xb, jb = np.divmod(b, self.y_order)
        x = (xa + self._mult[ja] * xb) % self.modulus
        return x * self.y_order + (ja + jb) % self.y_order

    def vinv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        x, j = np.divmod(a, self.y_order)
        ji = -j % self.y_order
        return ((-self._mult[ji] * x) % self.modulus) * self.y_order + ji

    def vcommutator(self, a, b) -> np.ndarray:
        return self.vmul(self.vmul(a, b), self.vmul(self.vinv(a), self.vinv(b)))

    # -------------------------------------------------- reduction from Z_p

    def reduce_element(self, g: Element) -> int:
        """Image of an element of the profinite group in this model."""
        d = self.descriptor
        if g.group != d:
            raise UnsupportedDescriptor(f"element of {g.group} reduced into a model of {d}")
        p = self.prime
        x = g.x.residue
        if isinstance(d, (M, T)):
            gen = canonical_generator(p, d.n, g.y.precision)
            j = unit_log(gen, g.y).residue
        elif isinstance(d, K):
            t = torsion_generator(p, d.d, g.y.precision)
            acc, j = t.with_residue(1), 0
            while acc != g.y:
                acc, j = acc * t, j + 1
        elif isinstance(d, GenericPAdicAction):
            j = g.y.residue
        else:
            j = g.y
        return self.index(x, j)

    def lift(self, idx: int, precision: int) -> Element:
        """The canonical representative in the profinite group of a model element."""
        d = self.descriptor
        x, j = self.coords(idx)
        p = self.prime
        xp = PAdicInt.of(x, p, precision)
        if isinstance(d, (M, T)):
            y = canonical_generator(p, d.n, precision) ** j
        elif isinstance(d, K):
            y = torsion_generator(p, d.d, precision) ** j
        elif isinstance(d, GenericPAdicAction):
            y = PAdicInt.of(j, p, precision)
        else:
            y = j
        return Element(d, xp, y)

    def project(self, idx: int, coarser: "FiniteModel") -> int:
        """The quotient map from this level to a lower one."""
        x, j = self.coords(idx)
        return coarser.index(x, j)

    # ------------------------------------------------------------- closures

    def closure(self, gens: Iterable[int], start: Optional[np.ndarray] = None) -> np.ndarray:
        """Boolean mask of the subgroup generated by ``gens`` (and ``start``, if given)."""
        gens = [int(g) for g in gens]
        mask = np.zeros(self.order, dtype=bool) if start is None else start.copy()
        mask[0] = True
        frontier = np.flatnonzero(mask)
        while frontier.size and gens:
            fresh = np.unique(np.concatenate([self.vmul(frontier, g) for g in gens]))
            fresh = fresh[~mask[fresh]]
            mask[fresh] = True
            frontier = fresh
        return mask

    def closure_set(self, gens: Iterable[int]) -> set[int]:
        """Sparse closure for models too large for a dense mask."""
        gens = [int(g) for g in gens]
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for g in gens:
                    c = self.mul(a, g)
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
            frontier = nxt
        return seen

    def normal_closure_set(self, gens: Iterable[int]) -> set[int]:
        """Smallest normal subgroup containing ``gens``, as a set of indices."""
        conj = [(s, self.inv(s)) for s in self.generators]
        h = {0}
        used: list[int] = []
        pending = [int(g) for g in gens]
        while pending:
            g = pending.pop()
            if g in h:
                continue
            used.append(g)
            # h is closed under the earlier generators, so re-expanding it
            # by right multiplication reaches the join with g
            frontier = list(h)
            while frontier:
                nxt = []
                for a in frontier:
                    for u in used:
                        c = self.mul(a, u)
                        if c not in h:
                            h.add(c)
                            nxt.append(c)
                frontier = nxt
            if not pending:
                pending = [c for s, si in conj for a in h
                           if (c := self.mul(self.mul(s, a), si)) not in h][:1]
        return h

    def handle(self, mask_or_set, generators: Sequence[int] = ()) -> SubgroupHandle:
        if isinstance(mask_or_set, np.ndarray):
            elems = tuple(int(i) for i in np.flatnonzero(mask_or_set))
        else:
            elems = tuple(sorted(int(i) for i in mask_or_set))
        return SubgroupHandle(elems, tuple(int(g) for g in generators))

    def is_subgroup(self, h: SubgroupHandle) -> bool:
        if not h.elements or h.elements[0] != 0:
            return False
        arr = np.array(h.elements, dtype=np.int64)
        mask = h.mask(self.order)
        prods = self.vmul(arr[:, None], arr[None, :])
        return bool(mask[prods].all() and mask[self.vinv(arr)].all())

    def is_normal(self, h: SubgroupHandle) -> bool:
        arr = np.array(h.elements, dtype=np.int64)
        mask = h.mask(self.order)
        for s in self.generators:
            conj = self.vmul(self.vmul(s, arr), self.inv(s))
            if not mask[conj].all():
                return False
        return True

    def element_orders(self) -> np.ndarray:
        """Order of every element, by stepping all powers in parallel."""
        if self.order > MAX_MODEL_ORDER:
            raise TooLarge(f"model order {self.order} exceeds {MAX_MODEL_ORDER}")
        elems = np.arange(self.order, dtype=np.int64)
        orders = np.zeros(self.order, dtype=np.int64)
        orders[0] = 1
        cur = elems.copy()
        step = 1
        while (orders == 0).any():
            cur = self.vmul(cur, elems)
            step += 1
            hit = (cur == 0) & (orders == 0)
            orders[hit] = step
        return orders

    def to_dict(self) -> dict:
        return {
            "descriptor": self.descriptor.text(),
            "level": self.level,
            "order": self.order,
            "x_modulus": self.modulus,
            "y_order": self.y_order,
            "generators": [list(self.coords(g)) for g in self.generators],
        }


# ------------------------------------------------------------------ building


def _multipliers(d: GroupDescriptor, k: int, y_order: int) -> list[int]:
    p = d.prime
    P = p ** k
    prec = max(k, 2) + 2
    if isinstance(d, (M, T)):
        g = canonical_generator(p, d.n, prec).residue % P
        sign = -1 if isinstance(d, T) else 1
        return [(sign ** j) * pow(g, j, P) % P for j in range(y_order)]
    if isinstance(d, K):
        t = torsion_generator(p, d.d, k).residue
        return [pow(t, j, P) for j in range(y_order)]
    if isinstance(d, GenericFiniteAction):
        t = d.t.residue % P
        return [pow(t, j, P) for j in range(y_order)]
    assert isinstance(d, GenericPAdicAction)
    if d.u.precision < k:
        raise UnsupportedDescriptor(f"u is known to {d.u.precision} digits, level {k} needs more")
    return [d.f(j).residue % P for j in range(y_order)]


def build_model(d: GroupDescriptor, k: int, max_order: Optional[int] = MAX_MODEL_ORDER) -> FiniteModel:
    """The canonical level-k quotient of ``d``.

    ``max_order=None`` lifts the size cap; such models support closures of
    small subgroups but not exhaustive sweeps.
    """
    if isinstance(d, AffineL):
        raise UnsupportedDescriptor("Q_p x| Q_p^* is not compact and has no canonical finite quotients")
    if k < 1:
        raise TooLarge(f"level must be >= 1, got {k}")
    p = d.prime
    P = p ** k
    if isinstance(d, (K, GenericFiniteAction)):
        y_order = d.d
    else:
        y_order = P
    order = P * y_order
    if max_order is not None and order > max_order:
        raise TooLarge(f"level-{k} model of {d.text()} has order {order} > {max_order}")
    mult = _multipliers(d, k, y_order)
    # the action descends only if index y_order acts trivially mod p^k
    if _multipliers(d, k, y_order + 1)[y_order] != 1 % P:
        raise UnsupportedDescriptor(f"action of {d.text()} does not descend to level {k}")
    return FiniteModel(d, k, P, y_order, tuple(mult))


# ---------------------------------------------------------------- subgroups


def _check_enumerable(m: FiniteModel) -> None:
    if m.order > MAX_ENUMERATION_ORDER:
        raise TooLarge(f"model order {m.order} exceeds enumeration bound {MAX_ENUMERATION_ORDER}")


def cyclic_subgroups(m: FiniteModel) -> list[SubgroupHandle]:
    _check_enumerable(m)
    out = [SubgroupHandle((0,))]
    done = np.zeros(m.order, dtype=bool)
    done[0] = True
    for g in range(1, m.order):
        if done[g]:
            continue
        powers = [g]
        while powers[-1] != 0:
            powers.append(m.mul(powers[-1], g))
        n = len(powers)
        # g^j generates the same subgroup exactly when gcd(j, n) = 1
        for j in range(1, n + 1):
            if math.gcd(j, n) == 1:
                done[powers[j - 1]] = True
        out.append(SubgroupHandle(tuple(sorted(powers)), (g,)))
    return sorted(out, key=lambda h: (h.order, h.elements))


def enumerate_subgroups(m: FiniteModel) -> list[SubgroupHandle]:
    """All subgroups, by joining cyclic subgroups until nothing new appears."""
    _check_enumerable(m)
    cyclic = cyclic_subgroups(m)
    found: dict[bytes, SubgroupHandle] = {}
    masks: dict[bytes, np.ndarray] = {}
    queue = []
    for c in cyclic:
        mask = c.mask(m.order)
        key = np.packbits(mask).tobytes()
        found[key] = c
        masks[key] = mask
        queue.append(key)
    cyc_gens = [c.generators[0] for c in cyclic if c.generators]
    while queue:
        key = queue.pop()
        h, hmask = found[key], masks[key]
        for g in cyc_gens:
            if hmask[g]:
                continue
            jmask = m.closure(list(h.generators) + [g], start=hmask)
            jkey = np.packbits(jmask).tobytes()
            if jkey not in found:
                found[jkey] = m.handle(jmask, tuple(h.generators) + (g,))
                masks[jkey] = jmask
                queue.append(jkey)
    return sorted(found.values(), key=lambda h: (h.order, h.elements))


def brute_force_subgroups(m: FiniteModel) -> list[SubgroupHandle]:
    """Every subset containing the identity that is closed under products; order <= 12 only."""
    if m.order > 12:
        raise TooLarge("subset enumeration is for models of order <= 12")
    out = []
    others = list(range(1, m.order))
    for bits in range(1 << len(others)):
        elems = (0,) + tuple(others[i] for i in range(len(others)) if bits >> i & 1)
        s = set(elems)
        if all(m.mul(a, b) in s for a in elems for b in elems):
            out.append(SubgroupHandle(elems))
    return sorted(out, key=lambda h: (h.order, h.elements))


# ----------------------------------------------------------------- analysis


def derived_closure(m: FiniteModel, method: str = "auto") -> set[int]:
    """The commutator subgroup, computed from the group law alone.

    ``pairs`` closes the set of all commutators [a, b]; ``generators`` takes
    the normal closure of commutators of the two model generators, which is
    the same subgroup and scales to models we cannot sweep.
    """
    if method == "auto":
        method = "pairs" if m.order <= PAIRWISE_COMMUTATOR_LIMIT else "generators"
    if method == "pairs":
        if m.order > MAX_ENUMERATION_ORDER:
            raise TooLarge(f"all-pairs sweep needs order <= {MAX_ENUMERATION_ORDER}")
        elems = np.arange(m.order, dtype=np.int64)
        comms = np.zeros(m.order, dtype=bool)
        for a in range(m.order):
            comms[m.vcommutator(a, elems)] = True
        gens: list[int] = []
        mask = np.zeros(m.order, dtype=bool)
        mask[0] = True
        for c in np.flatnonzero(comms):
            if not mask[c]:
                gens.append(int(c))
                mask = m.closure(gens, start=mask)
        return set(int(i) for i in np.flatnonzero(mask))
    if method == "generators":
        gens = m.generators
        comms = {m.commutator(a, b) for a in gens for b in gens}
        return m.normal_closure_set(comms)
    raise ValueError(f"unknown method {method!r}")


def center(m: FiniteModel) -> SubgroupHandle:
    """Elements commuting with both generators, hence with everything."""
    elems = np.arange(m.order, dtype=np.int64)
    keep = np.ones(m.order, dtype=bool)
    for s in m.generators:
        keep &= m.vmul(elems, s) == m.vmul(s, elems)
    return m.handle(keep)


@dataclass(frozen=True)
class Analysis:
    center: SubgroupHandle
    derived: SubgroupHandle
    normals: list[SubgroupHandle]
    subgroups: list[SubgroupHandle]
    torsion_profile: dict[int, int]
    notes: tuple[str, ...] = ()

    def to_dict(self, m: FiniteModel) -> dict:
        return {
            "order": m.order,
            "center": [list(m.coords(i)) for i in self.center.elements],
            "derived": [list(m.coords(i)) for i in self.derived.elements],
            "normal_subgroups": len(self.normals),
            "subgroups": len(self.subgroups),
            "torsion_histogram": {str(k): v for k, v in sorted(self.torsion_profile.items())},
            "notes": list(self.notes),
        }


_ANALYSES: dict[FiniteModel, Analysis] = {}


def analyze(m: FiniteModel) -> Analysis:
    _check_enumerable(m)
    if m in _ANALYSES:
        return _ANALYSES[m]
    z = center(m)
    der = m.handle(derived_closure(m, "pairs"))
    subs = enumerate_subgroups(m)
    normals = [h for h in subs if m.is_normal(h)]
    profile = dict(sorted(Counter(int(o) for o in m.element_orders()).items()))
    notes = []
    if z.order > 1 and not m.descriptor.is_abelian:
        notes.append("center: finite-level artifact, asymptotic: trivial")
    out = Analysis(z, der, normals, subs, profile, tuple(notes))
    _ANALYSES[m] = out
    return out


def is_essential(m: FiniteModel, h: SubgroupHandle) -> bool:
    """Whether h meets every nontrivial normal subgroup of m nontrivially."""
    if not m.is_subgroup(h):
        raise InvalidHandle("handle is not a subgroup of the model")
    hmask = h.mask(m.order)
    for n in analyze(m).normals:
        if n.order > 1 and hmask[list(n.elements)].sum() < 2:
            return False
    return True


def closed_form_derived(m: FiniteModel) -> set[int]:
    """Level-k image of p^e Z_p x| {1}, with e from the closed-form derived subgroup."""
    e = derived_subgroup(m.descriptor).exponent
    if e == INFINITY or e >= m.level:
        return {0}
    step = m.prime ** e
    return {m.index(x, 0) for x in range(0, m.modulus, step)}


def crosscheck_derived(d: GroupDescriptor, k: int, max_order: Optional[int] = MAX_MODEL_ORDER,
                       method: str = "auto") -> bool:
    m = build_model(d, k, max_order=max_order)
    return derived_closure(m, method) == closed_form_derived(m)


def quotient_orders(m: FiniteModel, normal: set[int], elements: Iterable[int]) -> dict[int, int]:
    """Order of g N in m / N for each g, found by stepping powers until they fall in N."""
    out = {}
    for g in elements:
        acc, k = g, 1
        while acc not in normal:
            acc = m.mul(acc, g)
            k += 1
        out[g] = k
    return out


def abelianized_torsion(m: FiniteModel, derived: Optional[set[int]] = None) -> int:
    """Largest order in m/m' of the image of Z/p^k x| {1}.

    This is the level-k shadow of the torsion subgroup of G/G' = (Z_p/A) x Y;
    the Y factor, free in the limit, is finite at every level and is left out.
    """
    if derived is None:
        derived = derived_closure(m)
    orders = quotient_orders(m, derived, (m.index(x, 0) for x in range(m.modulus)))
    return max(orders.values())


__all__ = [
    "Analysis",
    "FiniteModel",
    "SubgroupHandle",
    "abelianized_torsion",
    "analyze",
    "brute_force_subgroups",
    "build_model",
    "center",
    "closed_form_derived",
    "crosscheck_derived",
    "cyclic_subgroups",
    "derived_closure",
    "enumerate_subgroups",
    "is_essential",
]
