from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hdlab.groupalg import (
    BASIS, FOURIER, ClassicalStructure, FiniteAbelianGroup, PhaseFunction, antipode,
    character, fourier_transform, frobenius_product, hopf_check, inverse_fourier_transform,
    spider, symmetry_witness,
)
from hdlab.tensor import approx_eq

Z2, Z3 = FiniteAbelianGroup.cyclic(2), FiniteAbelianGroup.cyclic(3)
Z2xZ2 = FiniteAbelianGroup((2, 2))
SMALL_GROUPS = [FiniteAbelianGroup.parse(s) for s in
                ("Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6", "Z2xZ3")]


def test_parse_group_specs():
    assert FiniteAbelianGroup.parse("z2XZ3").factors == (2, 3)
    assert FiniteAbelianGroup.parse("Z2xZ2").spec == "Z2xZ2"
    for bad in ("", "Z", "Z0", "2", "Z2x", "Y2"):
        with pytest.raises(ValueError):
            FiniteAbelianGroup.parse(bad)


@pytest.mark.parametrize("g", SMALL_GROUPS, ids=str)
def test_group_axioms(g):
    e = g.identity
    assert e == (0,) * len(g.factors)
    assert len(g.elements) == g.order
    assert list(g.elements) == sorted(g.elements)
    for x in g.elements:
        assert g.multiply(x, g.inverse(x)) == e
        assert g.multiply(x, e) == x


def test_element_order_and_inverse_pairs():
    z4 = FiniteAbelianGroup.cyclic(4)
    assert [z4.element_order(g) for g in z4.elements] == [1, 4, 2, 4]
    assert z4.inverse_pairs() == [((1,), (3,)), ((2,), (2,))]
    assert len(Z2xZ2.inverse_pairs()) == 3


def test_characters():
    assert character(Z2, (1,), (1,)) == pytest.approx(-1)
    assert character(Z3, (1,), (1,)) == pytest.approx(cmath.exp(2j * math.pi / 3))


def test_character_orthogonality_on_klein_group():
    for chi in Z2xZ2.elements:
        for psi in Z2xZ2.elements:
            s = sum(character(Z2xZ2, chi, g) * character(Z2xZ2, psi, g).conjugate()
                    for g in Z2xZ2.elements)
            assert abs(s - 4 * (chi == psi)) < 1e-12


@pytest.mark.parametrize("g", SMALL_GROUPS, ids=str)
def test_characters_multiplicative(g):
    for chi in g.elements:
        for x in g.elements:
            for y in g.elements:
                lhs = g.character(chi, g.multiply(x, y))
                assert abs(lhs - g.character(chi, x) * g.character(chi, y)) < 1e-12


@pytest.mark.parametrize("g", SMALL_GROUPS, ids=str)
def test_fourier_matrix_unitary(g):
    f = g.fourier_matrix
    assert approx_eq(f @ f.conj().T, np.eye(g.order), 1e-12)


def test_spider_examples():
    assert np.array_equal(spider(ClassicalStructure(Z2), 1, 1), np.eye(2))
    cap = spider(ClassicalStructure(Z2), 2, 0)
    assert np.array_equal(cap.reshape(-1), [1, 0, 0, 1])


def test_pi_phased_effects():
    pi = PhaseFunction(Z2, (0.0, math.pi))
    white = spider(ClassicalStructure(Z2), 1, 0, pi)
    assert approx_eq(white, [1, -1], 1e-15)
    assert abs(white @ np.array([1, 1])) < 1e-15
    black = ClassicalStructure(Z2, FOURIER)
    unit = spider(black, 0, 1)
    # black pi dot: pi effect after the black unit is the scalar 1 + e^{i pi}
    assert abs(spider(black, 1, 0, pi) @ unit) < 1e-15


@pytest.mark.parametrize("g", [g for g in SMALL_GROUPS if g.order <= 6], ids=str)
@pytest.mark.parametrize("flavor", [BASIS, FOURIER])
def test_spider_fusion(g, flavor):
    s = ClassicalStructure(g, flavor)
    for m in range(1, 4):
        for n in range(1, 4):
            if g.order ** (m + n) > 50_000:
                continue
            lhs = np.tensordot(spider(s, 1, n), spider(s, m, 1), axes=([n], [0]))
            assert approx_eq(lhs, spider(s, m, n), 1e-12)


@given(st.lists(st.floats(-math.pi, math.pi), min_size=3, max_size=3),
       st.lists(st.floats(-math.pi, math.pi), min_size=3, max_size=3))
def test_phased_spider_fusion_adds_phases(a, b):
    s = ClassicalStructure(Z3)
    psi, phi = PhaseFunction(Z3, a), PhaseFunction(Z3, b)
    lhs = np.tensordot(spider(s, 1, 2, psi), spider(s, 2, 1, phi), axes=([2], [0]))
    assert approx_eq(lhs, spider(s, 2, 2, frobenius_product(psi, phi)), 1e-12)


def test_spider_needs_a_leg():
    with pytest.raises(ValueError):
        spider(ClassicalStructure(Z2), 0, 0)


def test_antipode_examples():
    assert np.array_equal(antipode(ClassicalStructure(Z2)), np.eye(2))
    s3 = antipode(ClassicalStructure(Z3))
    assert np.array_equal(s3, np.eye(3)[[0, 2, 1]])
    s = antipode(ClassicalStructure(FiniteAbelianGroup((2, 4))))
    assert np.array_equal(s @ s, np.eye(8))
    assert np.array_equal(s, s.T)
    with pytest.raises(ValueError):
        antipode(ClassicalStructure(Z2, FOURIER))


@pytest.mark.parametrize("g", SMALL_GROUPS, ids=str)
def test_hopf_law_holds_with_scalar(g):
    res = hopf_check(ClassicalStructure(g))
    assert res
    assert res.scalar == pytest.approx(1 / math.sqrt(g.order))


def test_hopf_law_fails_with_corrupted_antipode():
    assert not hopf_check(ClassicalStructure(Z3), antipode_matrix=np.eye(3))


def test_frobenius_product_examples():
    psi = PhaseFunction(Z3, (0.1, 0.2, -0.4))
    assert frobenius_product(psi, PhaseFunction.trivial(Z3)) == psi
    unit = frobenius_product(psi, psi.conjugate())
    assert np.allclose(unit.values, 1)
    q = frobenius_product(PhaseFunction(Z2, (0, math.pi / 4)),
                          PhaseFunction(Z2, (0, math.pi / 4)))
    assert q.angles == pytest.approx((0, math.pi / 2))
    with pytest.raises(ValueError):
        frobenius_product(psi, PhaseFunction.trivial(Z2))


@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4))
def test_frobenius_product_preserves_symmetry(raw):
    z4 = FiniteAbelianGroup.cyclic(4)
    sym = PhaseFunction(z4, (raw[0], raw[1], raw[2], raw[1]))
    other = PhaseFunction(z4, (raw[3], raw[2], raw[0], raw[2]))
    assert frobenius_product(sym, other).is_symmetric(1e-12)


def test_fourier_transform_examples():
    assert np.array_equal(fourier_transform(Z2, np.zeros(2)), np.zeros(2))
    assert np.allclose(fourier_transform(Z2, [1, 0]), [1, 1])
    g = FiniteAbelianGroup((2, 3))
    rng = np.random.default_rng(5)
    f = rng.normal(size=6) + 1j * rng.normal(size=6)
    assert approx_eq(inverse_fourier_transform(g, fourier_transform(g, f)), f, 1e-12)


def test_fourier_transform_matches_double_sum():
    g = FiniteAbelianGroup((2, 3))
    f = np.arange(6) + 1j
    oracle = [sum(g.character(chi, k) * f[i] for i, k in enumerate(g.elements))
              for chi in g.elements]
    assert approx_eq(fourier_transform(g, f), oracle, 1e-12)


@given(st.lists(st.floats(-math.pi, math.pi), min_size=5, max_size=5), st.booleans())
def test_symmetric_flag_iff_fourier_witness_vanishes(raw, symmetric):
    z5 = FiniteAbelianGroup.cyclic(5)
    if symmetric:
        raw = [raw[0], raw[1], raw[2], raw[2], raw[1]]
    psi = PhaseFunction(z5, raw)
    flat = np.max(np.abs(symmetry_witness(psi))) < 1e-9
    assert flat == psi.is_symmetric(1e-9 / 5)


def test_phase_function_validation():
    with pytest.raises(ValueError):
        PhaseFunction(Z3, (0.0, 1.0))
    psi = PhaseFunction.from_map(Z3, lambda k: 0.5 * k[0])
    assert psi[(2,)] == pytest.approx(cmath.exp(1j))
    assert np.allclose(np.abs(psi.values), 1)
