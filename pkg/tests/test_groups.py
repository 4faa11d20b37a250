import random
import zlib

import pytest
from hypothesis import given, settings, strategies as st

from hmgroups.errors import (
    DescriptorMismatch,
    InvalidElement,
    MalformedText,
    NotAUnit,
    NotContinuousAction,
    NotFaithful,
    NotTorsion,
    OrderMismatch,
    UnsupportedDescriptor,
)
from hmgroups.groups import (
    AffineL,
    Element,
    GenericFiniteAction,
    GenericPAdicAction,
    InfiniteToPrecision,
    K,
    M,
    T,
    commutator,
    conjugate,
    element_order,
    format_element,
    identity,
    inv,
    is_central,
    is_identity,
    mul,
    parse_descriptor,
    parse_element,
    torsion_generator,
    validate_action,
)
from hmgroups.invariants import derived_subgroup
from hmgroups.padic import PAdicInt, PAdicRational
from hmgroups.units import teichmuller

PREC = 20


def P(p, v, n=PREC):
    return PAdicInt.of(v, p, n)


def random_y(d, rng, prec=PREC):
    p = d.prime
    if isinstance(d, K):
        return torsion_generator(p, d.d, prec) ** rng.randrange(d.d)
    if isinstance(d, (M, T)):
        s = 2 if p == 2 else 1
        return P(p, 1 + p ** (d.n + s) * rng.randrange(p ** prec), prec)
    if isinstance(d, GenericPAdicAction):
        return P(p, rng.randrange(p ** prec), prec)
    if isinstance(d, GenericFiniteAction):
        return rng.randrange(d.d)
    num = rng.randrange(1, 10 ** 6)
    return PAdicRational.from_fraction(num, rng.randrange(1, 1000), p, prec)


def random_element(d, rng, prec=PREC):
    if isinstance(d, AffineL):
        x = PAdicRational.from_fraction(rng.randrange(-10 ** 6, 10 ** 6) or 1,
                                        rng.randrange(1, 1000), d.prime, prec)
        return Element(d, x, random_y(d, rng, prec))
    return Element(d, P(d.prime, rng.randrange(d.prime ** prec), prec), random_y(d, rng, prec))


FAMILIES = [
    K(3, 2), K(5, 4), K(7, 3), K(13, 6), K(2, 2), K(5, 1),
    M(3, 0), M(5, 1), M(2, 0), M(2, 2),
    T(0), T(1), T(3),
    GenericPAdicAction(5, P(5, 6)), GenericPAdicAction(2, P(2, -5)), GenericPAdicAction(3, P(3, 28)),
    GenericFiniteAction(5, teichmuller(P(5, 2)), 4), GenericFiniteAction(2, P(2, -1), 2),
    AffineL(3),
]
IDS = [d.text() for d in FAMILIES]


# ---------------------------------------------------------------- examples


def test_mul_examples():
    t0 = T(0)
    assert mul(Element(t0, P(2, 1), P(2, 1)), Element(t0, P(2, 0), P(2, 5))) == \
        Element(t0, P(2, 1), P(2, 5))
    m = M(5, 0)
    g = mul(Element(m, P(5, 0), P(5, 6)), Element(m, P(5, 1), P(5, 1)))
    assert (g.x.residue, g.y.residue) == (6, 6)


def test_commutator_examples():
    m = M(5, 0)
    c = commutator(Element(m, P(5, 1, 3), P(5, 1, 3)), Element(m, P(5, 0, 3), P(5, 6, 3)))
    assert (c.x.residue, c.y.residue) == (120, 1)
    t0 = T(0)
    c = commutator(Element(t0, P(2, 1), P(2, 1)), Element(t0, P(2, 0), P(2, 5)))
    assert (c.x.residue, c.y.residue) == (6, 1)
    a, b = Element(m, P(5, 3), P(5, 1)), Element(m, P(5, 17), P(5, 1))
    assert is_identity(commutator(a, b))


@pytest.mark.parametrize("d", FAMILIES, ids=IDS)
def test_identity_is_neutral(d):
    rng = random.Random(7)
    g = random_element(d, rng)
    e = identity(d, PREC)
    assert mul(e, g) == g and mul(g, e) == g


def test_element_order_examples():
    assert element_order(identity(M(5, 0))) == 1
    k22 = K(2, 2)
    for x in (0, 1, 6, 2 ** 19):
        assert element_order(Element(k22, P(2, x), P(2, -1))) == 2
    w = teichmuller(P(5, 2))
    assert element_order(Element(K(5, 4), P(5, 3), w)) == 4
    assert element_order(Element(M(5, 0), P(5, 1), P(5, 1))) is InfiniteToPrecision
    assert element_order(Element(M(5, 0), P(5, 0), P(5, 6))) is InfiniteToPrecision


def test_is_central_examples():
    assert is_central(identity(M(5, 0)))
    assert not is_central(Element(M(5, 0), P(5, 0), P(5, 6)))
    rng = random.Random(3)
    for _ in range(20):
        assert is_central(random_element(K(7, 1), rng))
    assert not is_central(Element(K(3, 2), P(3, 0), P(3, -1)))
    assert not is_central(Element(T(1), P(2, 1), P(2, 1)))
    # the finite-precision artifact of K(2, 2): (2^{N-1}, 1) commutes with everything
    assert is_central(Element(K(2, 2), P(2, 2 ** (PREC - 1)), P(2, 1)))
    L = AffineL(5)
    one = PAdicRational.from_fraction(1, 1, 5, PREC)
    assert is_central(Element(L, PAdicRational.zero(5), one))
    assert not is_central(Element(L, one, one))


# ------------------------------------------------------------------ axioms


@pytest.mark.parametrize("d", FAMILIES, ids=IDS)
def test_group_axioms(d):
    rng = random.Random(zlib.crc32(d.text().encode()))
    for _ in range(30):
        a, b, c = (random_element(d, rng) for _ in range(3))
        assert mul(mul(a, b), c) == mul(a, mul(b, c))
        assert is_identity(mul(a, inv(a)))
        assert is_identity(mul(inv(a), a))
        assert inv(inv(a)) == a


@pytest.mark.parametrize("d", [f for f in FAMILIES if not isinstance(f, AffineL)], ids=str)
def test_translation_subgroup_is_normal(d):
    rng = random.Random(11)
    for _ in range(20):
        g = random_element(d, rng)
        x = P(d.prime, rng.randrange(d.prime ** PREC))
        h = Element(d, x, d.y_identity(PREC))
        c = conjugate(g, h)
        assert d.y_is_identity(c.y)
        assert c.x == d.act(g.y, PREC) * x


@pytest.mark.parametrize("d", [f for f in FAMILIES if not isinstance(f, AffineL)], ids=str)
def test_nonabelian_witness_lies_in_derived_subgroup(d):
    der = derived_subgroup(d)
    a = Element(d, P(d.prime, 1), d.y_identity(PREC))
    b = Element(d, P(d.prime, 0), d.generator_y(PREC))
    c = commutator(a, b)
    assert d.y_is_identity(c.y)
    assert der.contains(c.x)
    assert is_identity(c) == d.is_abelian
    rng = random.Random(5)
    for _ in range(20):
        c = commutator(random_element(d, rng), random_element(d, rng))
        assert d.y_is_identity(c.y) and der.contains(c.x)


@pytest.mark.parametrize("d", FAMILIES, ids=IDS)
def test_element_order_is_conjugation_invariant(d):
    rng = random.Random(19)
    for _ in range(10):
        g, h = random_element(d, rng), random_element(d, rng)
        assert element_order(conjugate(h, g)) == element_order(g)


@pytest.mark.parametrize("p, d", [(3, 2), (5, 2), (5, 4), (7, 3), (7, 6), (13, 4)])
def test_torsion_of_k(p, d):
    rng = random.Random(p * d)
    grp = K(p, d)
    for _ in range(20):
        g = random_element(grp, rng)
        if g.y.residue == 1:
            want = 1 if g.x.residue == 0 else InfiniteToPrecision
        else:
            want = next(j for j in range(1, d + 1) if (g.y ** j).residue == 1)
        assert element_order(g) == want


# ------------------------------------------------------------------- checks


def test_membership_checked_at_construction():
    with pytest.raises(InvalidElement):
        Element(M(5, 1), P(5, 0), P(5, 6))       # layer 0 < 1
    with pytest.raises(InvalidElement):
        Element(T(0), P(2, 0), P(2, 3))          # not principal
    with pytest.raises(InvalidElement):
        Element(K(5, 2), P(5, 0), teichmuller(P(5, 2)))  # order 4, not 2
    with pytest.raises(InvalidElement):
        Element(K(5, 4), P(5, 0), P(5, 2))       # not a root of unity
    with pytest.raises(InvalidElement):
        Element(GenericFiniteAction(2, P(2, -1), 2), P(2, 0), 2)
    with pytest.raises(DescriptorMismatch):
        mul(identity(M(5, 0)), identity(M(5, 1)))


def test_descriptor_preconditions():
    with pytest.raises(UnsupportedDescriptor):
        K(5, 3)
    with pytest.raises(UnsupportedDescriptor):
        K(2, 3)
    with pytest.raises(UnsupportedDescriptor):
        T(1, prime=3)
    with pytest.raises(UnsupportedDescriptor):
        M(5, -1)


def test_validate_action_examples():
    assert validate_action(5, P(5, 6)).sign == 1
    with pytest.raises(NotContinuousAction):
        validate_action(5, P(5, 2))
    with pytest.raises(NotFaithful):
        validate_action(2, P(2, -1))
    with pytest.raises(NotFaithful):
        validate_action(7, P(7, 1))
    with pytest.raises(NotAUnit):
        validate_action(5, P(5, 10))
    assert validate_action(2, P(2, -5)).sign == -1


def test_finite_action_checks():
    assert GenericFiniteAction(5, teichmuller(P(5, 2)), 4).d == 4
    with pytest.raises(OrderMismatch):
        GenericFiniteAction(5, teichmuller(P(5, 2)), 8)
    with pytest.raises(NotTorsion):
        GenericFiniteAction(5, teichmuller(P(5, 2)), 3)
    with pytest.raises(NotTorsion):
        GenericFiniteAction(5, P(5, 6), 4)
    with pytest.raises(NotTorsion):
        GenericFiniteAction(2, P(2, 1 + 2 ** 7, 8), 2)


def test_generic_action_f_is_a_homomorphism():
    rng = random.Random(2)
    for u in (P(5, 6), P(2, -5), P(2, 3), P(3, 10)):
        d = GenericPAdicAction(u.prime, u)
        assert d.f(1) == u
        for _ in range(20):
            a, b = (P(u.prime, rng.randrange(u.prime ** PREC)) for _ in range(2))
            assert d.f(a + b) == d.f(a) * d.f(b)


# ------------------------------------------------------------------ affine


def test_affine_group_operations():
    L = AffineL(5)
    g = parse_element(L, "(5:4:3e-2, 5:4:2e1)")
    h = parse_element(L, "(5:4:1, 5:4:7)")
    gh = mul(g, h)
    # x = 3/25 + 10 * 1, y = 10 * 7
    assert gh.x == PAdicRational.from_fraction(3 + 250, 25, 5, 4)
    assert gh.y == PAdicRational.from_fraction(70, 1, 5, 4)
    assert is_identity(mul(g, inv(g)))
    c = commutator(g, h)
    assert c.group.y_is_identity(c.y)
    assert element_order(Element(L, PAdicRational.zero(5), PAdicRational.from_fraction(-1, 1, 5, 8))) == 2


# ------------------------------------------------------------------ codecs


@pytest.mark.parametrize("text, expected", [
    ("K:5:4", K(5, 4)), ("M:3:2", M(3, 2)), ("T:1", T(1)), ("L:7", AffineL(7)),
    ("A:5:6:10", GenericPAdicAction(5, PAdicInt.of(6, 5, 10))),
    ("F:2:-1:2:8", GenericFiniteAction(2, PAdicInt.of(-1, 2, 8), 2)),
])
def test_parse_descriptor(text, expected):
    d = parse_descriptor(text)
    assert d == expected
    assert parse_descriptor(d.text(), 64) == d


@pytest.mark.parametrize("text", ["Q:5:1", "M:5", "M:5:x", "T:1:2", ""])
def test_parse_descriptor_malformed(text):
    with pytest.raises(MalformedText):
        parse_descriptor(text)


def test_parse_element_malformed():
    with pytest.raises(MalformedText):
        parse_element(M(5, 0), "5:3:1, 5:3:6")
    with pytest.raises(MalformedText):
        parse_element(GenericFiniteAction(2, P(2, -1), 2), "(2:4:1, 2:4:1)")


@settings(max_examples=50)
@given(st.sampled_from([d for d in FAMILIES]), st.integers(0, 2 ** 32))
def test_element_codec_round_trip(d, seed):
    g = random_element(d, random.Random(seed))
    back = parse_element(d, format_element(g))
    assert back == g
    assert format_element(back) == format_element(g)
