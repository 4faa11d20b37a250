import random

import numpy as np
import pytest

from hmgroups.errors import InvalidHandle, TooLarge, UnsupportedDescriptor
from hmgroups.groups import (
    AffineL,
    Element,
    GenericFiniteAction,
    GenericPAdicAction,
    K,
    M,
    T,
    mul,
    torsion_generator,
)
from hmgroups.lab import (
    SubgroupHandle,
    abelianized_torsion,
    analyze,
    brute_force_subgroups,
    build_model,
    center,
    closed_form_derived,
    crosscheck_derived,
    cyclic_subgroups,
    derived_closure,
    enumerate_subgroups,
    is_essential,
)
from hmgroups.padic import PAdicInt
from hmgroups.units import teichmuller


def is_abelian_subgroup(m, h):
    arr = np.array(h.elements, dtype=np.int64)
    return bool((m.vmul(arr[:, None], arr[None, :]) == m.vmul(arr[None, :], arr[:, None])).all())


# ------------------------------------------------------------------- build


def test_build_k32_is_s3():
    m = build_model(K(3, 2), 1)
    assert m.order == 6
    assert m.mul(m.index(1, 0), m.index(0, 1)) != m.mul(m.index(0, 1), m.index(1, 0))
    orders = sorted(int(o) for o in m.element_orders())
    assert orders == [1, 2, 2, 2, 3, 3]


@pytest.mark.parametrize("p, k", [(2, 3), (3, 2), (5, 2), (7, 1)])
def test_build_trivial_action_is_cyclic(p, k):
    m = build_model(K(p, 1), k)
    assert m.order == p ** k
    assert int(m.element_orders().max()) == p ** k


def test_build_m20_level2_closed():
    m = build_model(M(2, 0), 2)
    assert m.order == 16
    whole = SubgroupHandle(tuple(range(16)))
    assert m.is_subgroup(whole)


@pytest.mark.parametrize("d, k, order", [
    (M(3, 1), 2, 81), (T(1), 3, 64), (K(5, 4), 2, 100),
    (GenericPAdicAction(5, PAdicInt.of(6, 5, 10)), 2, 625),
    (GenericFiniteAction(7, teichmuller(PAdicInt.of(3, 7, 8)), 6), 1, 42),
])
def test_model_orders_and_closure(d, k, order):
    m = build_model(d, k)
    assert m.order == order
    elems = np.arange(m.order, dtype=np.int64)
    for a in range(m.order):
        prods = m.vmul(a, elems)
        assert len(np.unique(prods)) == m.order
    assert all(m.mul(a, m.inv(a)) == 0 for a in range(m.order))


def test_build_errors():
    with pytest.raises(UnsupportedDescriptor):
        build_model(AffineL(3), 1)
    with pytest.raises(TooLarge):
        build_model(M(5, 0), 5)
    with pytest.raises(TooLarge):
        enumerate_subgroups(build_model(M(5, 0), 3))
    with pytest.raises(UnsupportedDescriptor):
        build_model(GenericPAdicAction(5, PAdicInt.of(6, 5, 2)), 3)


@pytest.mark.parametrize("d, k", [
    (M(5, 0), 2), (M(2, 1), 3), (T(0), 3), (T(2), 2), (K(5, 4), 2), (K(2, 2), 3),
    (GenericPAdicAction(2, PAdicInt.of(-5, 2, 20)), 3),
    (GenericFiniteAction(5, teichmuller(PAdicInt.of(2, 5, 20)), 4), 2),
])
def test_reduction_is_a_homomorphism(d, k):
    m = build_model(d, k)
    rng = random.Random(k)
    prec = 20
    p = d.prime
    for _ in range(40):
        a, b = (m.lift(rng.randrange(m.order), prec) for _ in range(2))
        # perturb the x-part so the lift is not the canonical one
        a = Element(d, a.x + PAdicInt.of(p ** k * rng.randrange(p ** prec), p, prec), a.y)
        assert m.reduce_element(mul(a, b)) == m.mul(m.reduce_element(a), m.reduce_element(b))


@pytest.mark.parametrize("d, k", [(M(3, 0), 3), (T(1), 3), (K(5, 2), 3), (M(2, 0), 4)])
def test_level_projection_is_a_homomorphism(d, k):
    hi, lo = build_model(d, k + 1), build_model(d, k)
    rng = random.Random(0)
    for _ in range(200):
        a, b = rng.randrange(hi.order), rng.randrange(hi.order)
        assert hi.project(hi.mul(a, b), lo) == lo.mul(hi.project(a, lo), hi.project(b, lo))


# ------------------------------------------------------------- enumeration


def test_enumerate_examples():
    assert len(enumerate_subgroups(build_model(K(3, 1), 2))) == 3
    assert len(enumerate_subgroups(build_model(K(3, 2), 1))) == 6
    assert len(enumerate_subgroups(build_model(K(2, 2), 1))) == 5


SMALL = [
    (K(3, 2), 1), (K(2, 2), 1), (K(2, 2), 2), (K(5, 2), 1), (K(3, 1), 2), (K(2, 1), 3),
    (M(2, 0), 1), (T(0), 1), (M(3, 0), 1), (GenericFiniteAction(5, PAdicInt.of(-1, 5, 4), 2), 1),
]


@pytest.mark.parametrize("d, k", SMALL, ids=lambda v: str(v))
def test_enumeration_matches_subset_oracle(d, k):
    m = build_model(d, k)
    assert m.order <= 12
    assert enumerate_subgroups(m) == brute_force_subgroups(m)


@pytest.mark.parametrize("d, k", [(K(3, 2), 2), (M(3, 0), 2), (T(0), 3), (K(5, 4), 1)])
def test_enumerated_handles_are_subgroups_and_distinct(d, k):
    m = build_model(d, k)
    subs = enumerate_subgroups(m)
    assert len({h.elements for h in subs}) == len(subs)
    assert all(m.is_subgroup(h) for h in subs)
    # every cyclic subgroup appears
    keys = {h.elements for h in subs}
    assert all(c.elements in keys for c in cyclic_subgroups(m))
    # the order of every subgroup divides the group order
    assert all(m.order % h.order == 0 for h in subs)


# ---------------------------------------------------------------- analysis


def test_analyze_examples():
    a = analyze(build_model(K(3, 2), 1))
    assert a.center.order == 1
    assert a.derived.order == 3
    m = build_model(K(3, 2), 2)
    a = analyze(m)
    assert set(a.derived.elements) == {m.index(x, 0) for x in range(9)}
    # at k = 1 the model is abelian since -1 = 1 mod 2
    assert analyze(build_model(K(2, 2), 1)).center.order == 4
    for k in (2, 3, 4, 5):
        m = build_model(K(2, 2), k)
        a = analyze(m)
        assert a.center.elements == (0, m.index(2 ** (k - 1), 0))
        assert "asymptotic: trivial" in a.notes[0]


def test_analyze_serializes():
    m = build_model(K(3, 2), 1)
    doc = analyze(m).to_dict(m)
    assert doc["order"] == 6 and doc["derived"] == [[0, 0], [1, 0], [2, 0]]
    assert doc["torsion_histogram"] == {"1": 1, "2": 3, "3": 2}
    assert doc["subgroups"] == 6 and doc["normal_subgroups"] == 3


def test_center_matches_brute_force():
    for d, k in [(K(3, 2), 2), (M(2, 0), 2), (T(0), 3), (K(5, 4), 1)]:
        m = build_model(d, k)
        brute = {a for a in range(m.order)
                 if all(m.mul(a, b) == m.mul(b, a) for b in range(m.order))}
        assert set(center(m).elements) == brute


def test_essential_examples():
    m = build_model(K(3, 2), 2)
    whole = m.handle(set(range(m.order)))
    assert is_essential(m, whole)
    h = m.handle(m.closure([m.index(0, 1)]), [m.index(0, 1)])
    assert h.order == 2
    assert not is_essential(m, h)
    with pytest.raises(InvalidHandle):
        is_essential(m, SubgroupHandle((0, m.index(1, 0))))


@pytest.mark.parametrize("p, k", [(2, 4), (3, 3), (5, 2), (7, 2)])
def test_every_subgroup_of_a_cyclic_model_is_essential(p, k):
    m = build_model(K(p, 1), k)
    subs = enumerate_subgroups(m)
    assert len(subs) == k + 1
    assert all(is_essential(m, h) for h in subs if h.order > 1)


GRID = [(K(3, 2), 1), (K(3, 2), 2), (K(5, 4), 1), (K(2, 2), 2), (K(2, 2), 3),
        (M(3, 0), 2), (M(2, 0), 2), (T(0), 2), (T(1), 3), (K(7, 3), 1)]


@pytest.mark.parametrize("d, k", GRID, ids=lambda v: str(v))
def test_nonabelian_subgroups_meet_derived(d, k):
    m = build_model(d, k)
    a = analyze(m)
    der = a.derived.mask(m.order)
    for h in a.subgroups:
        if not is_abelian_subgroup(m, h):
            assert der[list(h.elements)].sum() >= 2


@pytest.mark.parametrize("p, d, k", [(3, 2, 3), (5, 2, 2), (5, 4, 2), (7, 3, 2), (2, 2, 4), (13, 4, 1)])
def test_k_torsion_profile(p, d, k):
    m = build_model(K(p, d), k)
    orders = m.element_orders()
    bound = d * (2 if p == 2 else 1)
    for idx in range(m.order):
        x, j = m.coords(idx)
        if j != 0:
            assert bound % int(orders[idx]) == 0


@pytest.mark.parametrize("d", [M(3, 0), T(0), K(5, 2), M(2, 0)])
def test_level_coherence(d):
    for k in (1, 2, 3):
        hi, lo = build_model(d, k + 1), build_model(d, k)
        if hi.order > 4096:
            break
        assert {hi.project(i, lo) for i in derived_closure(hi)} == derived_closure(lo)
        assert {hi.project(i, lo) for i in center(hi).elements} <= set(center(lo).elements)


# --------------------------------------------------------------- crosscheck


def test_crosscheck_examples():
    assert crosscheck_derived(M(5, 0), 3)
    m = build_model(M(5, 0), 3)
    assert closed_form_derived(m) == {m.index(x, 0) for x in range(0, 125, 5)}
    assert crosscheck_derived(T(0), 4)
    m = build_model(T(0), 4)
    assert derived_closure(m) == {m.index(x, 0) for x in range(0, 16, 2)}
    for p in (2, 3, 5):
        assert crosscheck_derived(K(p, 1), 3)


CROSS = ([M(p, n) for p in (2, 3, 5) for n in range(3)] + [T(n) for n in range(3)]
         + [K(3, 2), K(5, 2), K(5, 4), K(2, 2), K(7, 3), K(7, 6), K(2, 1)])


@pytest.mark.parametrize("d", CROSS, ids=str)
def test_crosscheck_grid(d):
    for k in range(1, 6):
        try:
            m = build_model(d, k)
        except TooLarge:
            break
        assert derived_closure(m) == closed_form_derived(m), k


@pytest.mark.parametrize("d, k", [(M(3, 0), 2), (T(1), 3), (K(5, 4), 2), (M(2, 1), 3), (K(2, 2), 4)])
def test_derived_methods_agree(d, k):
    m = build_model(d, k)
    assert derived_closure(m, "pairs") == derived_closure(m, "generators")
    with pytest.raises(ValueError):
        derived_closure(m, "bogus")


@pytest.mark.parametrize("d, k, expected", [
    (M(3, 0), 3, 3), (M(3, 1), 2, 9), (M(2, 0), 3, 4), (M(2, 1), 2, 4), (T(1), 3, 2), (K(5, 4), 2, 1),
])
def test_abelianized_torsion(d, k, expected):
    assert abelianized_torsion(build_model(d, k)) == expected


def test_torsion_generator_matches_model_multiplier():
    m = build_model(K(5, 4), 2)
    assert m.multipliers[1] == torsion_generator(5, 4, 2).residue
