from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hdlab import hypercube as hc
from hdlab.cpm import CPMap, choi_from_transfer, double, min_eigenvalue
from hdlab.groupalg import FiniteAbelianGroup, PhaseFunction
from hdlab.tensor import approx_eq

from conftest import crandn

seeds = st.integers(0, 2**32 - 1)
Z2, Z3 = FiniteAbelianGroup.cyclic(2), FiniteAbelianGroup.cyclic(3)
GROUPS = [FiniteAbelianGroup.parse(s) for s in ("Z2", "Z3", "Z4", "Z2xZ2", "Z6")]
H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def support(d):
    eye = np.eye(d)
    return np.einsum("ac,bd->abcd", eye, eye)


def random_unitary(rng, d):
    q, _ = np.linalg.qr(crandn(rng, d, d))
    return q


# -- realizations and denotation ----------------------------------------------

def test_identity_realization_denotes_identity():
    f = hc.dh_denote(hc.DHRealization(CPMap.identity(3)))
    assert np.array_equal(f.matrix, np.eye(81))


def test_copy_state_with_bridge_is_quantum_plus():
    psi = np.eye(2).reshape(4, 1) / math.sqrt(2)       # sum_h |hh> / sqrt 2 on H (x) B
    t = hc.state_from_realization(hc.DHRealization(CPMap((psi,)), 2))
    assert approx_eq(t, support(2) / 4, 1e-15)
    # half the embedded |+>: the bridge keeps only the a=c, b=d support
    assert approx_eq(t, hc.embed_quantum(np.array([1, 1]) / math.sqrt(2)) / 2, 1e-15)


def test_uniform_plus_from_trivial_bridge():
    plus = np.array([[1], [1]]) / math.sqrt(2)
    t = hc.state_from_realization(hc.DHRealization(CPMap((plus,))))
    assert approx_eq(t, hc.uniform_plus(2), 1e-15)
    assert np.allclose(t, 0.25)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_hypdec_and_dec_realizations_reproduce_closed_forms(d):
    hyp = hc.hypdec_map(d)
    assert approx_eq(hc.dh_denote(hc.hypdec_realization(d)).tensor, hyp.tensor, 1e-12)
    assert np.array_equal(np.diag(hyp.matrix).reshape((d,) * 4), support(d))
    dec = hc.dec_map(d)
    assert approx_eq(hc.dh_denote(hc.dec_realization(d)).tensor, dec.tensor, 1e-12)
    rng = np.random.default_rng(d)
    t = hc.random_state(rng, d)
    out = dec(t)
    for idx in np.ndindex(*(d,) * 4):
        expected = t[(idx[0],) * 4] if len(set(idx)) == 1 else 0
        assert abs(out[idx] - expected) < 1e-15


def test_asymmetric_bridge_rejected():
    with pytest.raises(ValueError, match="asymmetric"):
        hc.DHRealization(hc.copy_map(3), 3, hc.shift_bridge(Z3, (1,)))


def test_realization_dimension_checks():
    with pytest.raises(ValueError):
        hc.DHRealization(CPMap.identity(3), 2)
    with pytest.raises(ValueError):
        hc.compose(hc.identity(2), hc.identity(3))


# -- discarding, dec, hypdec ------------------------------------------------------

def test_discard_examples():
    zero = np.zeros((2,) * 4)
    zero[0, 0, 0, 0] = 1
    assert hc.dh_discard(2)(zero) == 1
    assert hc.dh_discard(2)(hc.uniform_plus(2)) == pytest.approx(1)
    rng = np.random.default_rng(0)
    assert hc.dh_is_causal(hc.fld(random_unitary(rng, 3)))


def test_hypdec_on_uniform_plus():
    out = hc.hypdec_map(2)(hc.uniform_plus(2))
    assert approx_eq(out, support(2) / 4, 0)
    assert approx_eq(hc.extract_quantum(out), np.full((2, 2), 0.25), 0)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_projector_algebra(d):
    hyp, dec = hc.hypdec_map(d), hc.dec_map(d)
    for p in (hyp, dec):
        assert np.array_equal((p @ p).tensor, p.tensor)
    assert np.array_equal((dec @ hyp).tensor, dec.tensor)
    assert np.array_equal((hyp @ dec).tensor, dec.tensor)


def test_hypdec_subcausal_on_uniform_plus():
    disc = hc.dh_discard(2)
    plus = hc.uniform_plus(2)
    assert disc(hc.hypdec_map(2)(plus)) == pytest.approx(0.5)
    assert not hc.dh_is_causal(hc.hypdec_map(2))


def test_discard_after_hypdec_is_diagonal_sum(rng):
    t = hc.random_state(rng, 3)
    direct = sum(t[a, a, a, a] for a in range(3))
    assert abs(hc.dh_discard(3)(hc.hypdec_map(3)(t)) - direct) < 1e-14


# -- completion ---------------------------------------------------------------------

def test_qubit_completion_is_d1():
    comp, d1 = hc.hypdec_completion(Z2), hc.shifted_bridge_map(Z2, (1,))
    assert np.array_equal(comp.tensor, d1.tensor)
    plus = hc.uniform_plus(2)
    disc = hc.dh_discard(2)
    assert disc(d1(plus)) == pytest.approx(0.5)
    assert disc(hc.hypdec_map(2)(plus)) + disc(d1(plus)) == pytest.approx(1)


def test_qubit_completion_bridge_is_pauli_x():
    r = hc.qubit_completion_realization()
    assert approx_eq(r.bridge_matrix, [[0, 1], [1, 0]], 1e-15)


@pytest.mark.parametrize("g", GROUPS, ids=str)
def test_shift_by_identity_is_hypdec(g):
    assert np.array_equal(hc.shifted_bridge_map(g, g.identity).tensor, hc.hypdec_map(g).tensor)


@pytest.mark.parametrize("g", GROUPS, ids=str)
def test_completion_certified_and_normalising(g):
    comp = hc.hypdec_completion(g)
    assert hc.certificate_residual(comp) < 1e-12
    assert hc.causality_residual(hc.add(hc.hypdec_map(g), comp)) < 1e-12


def test_z3_completion_on_random_states():
    disc = hc.dh_discard(3)
    hyp, d1, d2 = hc.hypdec_map(Z3), hc.shifted_bridge_map(Z3, (1,)), hc.shifted_bridge_map(Z3, (2,))
    for i in range(100):
        t = hc.random_state(np.random.default_rng(i), 3)
        assert abs(disc(hyp(t)) + disc(d1(t)) + disc(d2(t)) - disc(t)) < 1e-10


def test_non_self_inverse_shift_is_uncertified():
    assert hc.shifted_bridge_map(Z3, (1,)).certificate is None
    assert hc.certificate_residual(hc.shifted_bridge_map(Z3, (1,))) == math.inf
    assert hc.shifted_bridge_map(Z2, (1,)).certificate is not None


def test_trivial_group_has_no_completion():
    with pytest.raises(ValueError):
        hc.hypdec_completion(FiniteAbelianGroup.cyclic(1))


# -- POVM and UHfB ---------------------------------------------------------------------

def test_uniform_plus_outcomes():
    probs = hc.outcome_probabilities(hc.uniform_plus(2))
    assert [n for n, _ in probs] == ["0", "1", "UHfB"]
    assert [p for _, p in probs] == pytest.approx([0.25, 0.25, 0.5], abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_povm_complete_sums_to_discard(d):
    effects = hc.povm_complete(d)
    total = sum(e.tensor for e in effects)
    assert np.array_equal(total, hc.dh_discard(d).tensor)
    disc_after = hc.effect_after(hc.dh_discard(d), hc.hypdec_map(d)).tensor
    assert np.array_equal(hc.uhfb_effect(d).tensor, hc.dh_discard(d).tensor - disc_after)


@given(seeds, st.integers(2, 4))
def test_embedded_states_never_give_uhfb(seed, d):
    psi = crandn(np.random.default_rng(seed), d)
    t = hc.embed_quantum(psi / np.linalg.norm(psi))
    assert abs(hc.uhfb_effect(d)(t)) < 1e-12
    assert abs(hc.dh_discard(d)(t) - 1) < 1e-12


# -- quantum sector -------------------------------------------------------------------

@given(seeds, st.integers(2, 4))
def test_embed_extract_round_trip(seed, d):
    psi = crandn(np.random.default_rng(seed), d)
    psi /= np.linalg.norm(psi)
    assert approx_eq(hc.extract_quantum(hc.embed_quantum(psi)), np.outer(psi, psi.conj()), 1e-12)


def test_embed_plus():
    t = hc.embed_quantum(np.array([1, 1]) / math.sqrt(2))
    assert approx_eq(t, support(2) / 2, 1e-15)


def test_embed_mixture_is_affine(rng):
    a, b = crandn(rng, 3), crandn(rng, 3)
    a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
    mixed = hc.embed_quantum([(0.3, a), (0.7, b)])
    assert approx_eq(mixed, 0.3 * hc.embed_quantum(a) + 0.7 * hc.embed_quantum(b), 1e-15)
    rho = 0.3 * np.outer(a, a.conj()) + 0.7 * np.outer(b, b.conj())
    assert approx_eq(hc.extract_quantum(mixed), rho, 1e-12)


def test_extract_rejects_non_hypdec_state():
    with pytest.raises(ValueError, match="hyper-decoherence"):
        hc.extract_quantum(hc.uniform_plus(2))


def test_fld_schur_square_law(rng):
    s = crandn(rng, 3, 3)
    assert approx_eq(hc.quantum_action(hc.fld(s)), double(s * s).reshape(9, 9), 1e-12)
    theta = 0.4
    q = hc.quantum_action(hc.fld(np.diag([1, np.exp(1j * theta)])))
    assert approx_eq(q, double(np.diag([1, np.exp(2j * theta)])).reshape(4, 4), 1e-15)


def test_quantum_action_of_certified_maps_is_cp():
    for i in range(60):
        rng = np.random.default_rng(i)
        d = 2 + i % 3
        f = hc.random_map(rng, d)
        assert min_eigenvalue(choi_from_transfer(hc.quantum_action(f), d, d)) >= -1e-9


def test_quantum_action_functorial_through_hypdec(rng):
    f, g = hc.random_map(rng, 2), hc.random_map(rng, 2)
    lhs = hc.quantum_action(f @ hc.hypdec_map(2) @ g)
    assert approx_eq(lhs, hc.quantum_action(f) @ hc.quantum_action(g), 1e-12)


def test_quantum_action_not_functorial_without_hypdec():
    # the Hadamard leaves the quantum sector: fld(H) fld(H) = identity but
    # each factor squares entries
    f = hc.fld(H)
    assert approx_eq(hc.quantum_action(f @ f), np.eye(4), 1e-12)
    assert not approx_eq(hc.quantum_action(f) @ hc.quantum_action(f), np.eye(4), 1e-3)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_sandwiched_map_determined_by_quantum_action(d):
    f = hc.random_map(np.random.default_rng(d), d)
    hyp = hc.hypdec_map(d)
    lifted = hc.lift_quantum(hc.quantum_action(f), d, d)
    assert approx_eq((hyp @ f @ hyp).tensor, lifted.tensor, 1e-12)


# -- folded maps and phases -------------------------------------------------------------

def test_fld_examples(rng):
    assert np.array_equal(hc.fld(np.eye(2)).tensor, hc.identity(2).tensor)
    phases = rng.uniform(-3, 3, size=3)
    assert approx_eq(hc.fld(np.diag(np.exp(1j * phases))).tensor,
                     hc.doubled_phase_gate(3, phases).tensor, 0)
    assert hc.certificate_residual(hc.fld(crandn(rng, 2, 3))) < 1e-12


def test_doubled_phase_gate_examples():
    assert np.array_equal(hc.doubled_phase_gate(Z2, (0.0, 0.0)).tensor, hc.identity(2).tensor)
    gate = hc.doubled_phase_gate(Z2, (0.0, math.pi / 2))
    assert approx_eq((hc.dec_map(2) @ gate).tensor, hc.dec_map(2).tensor, 1e-15)
    cmp = approx_eq((hc.hypdec_map(2) @ gate).tensor, hc.hypdec_map(2).tensor, 1e-9)
    assert not cmp and cmp.residual == pytest.approx(2)
    assert hc.dh_is_causal(gate)
    with pytest.raises(ValueError):
        hc.doubled_phase_gate(3, (0.0, 1.0))


def test_doubled_phase_multiplier_closed_form(rng):
    phi = rng.uniform(-3, 3, size=3)
    diag = np.diag(hc.doubled_phase_gate(3, phi).matrix).reshape((3,) * 4)
    for a, b, c, d in np.ndindex(3, 3, 3, 3):
        assert abs(diag[a, b, c, d] - np.exp(1j * (phi[a] - phi[b] + phi[c] - phi[d]))) < 1e-14


def test_gadget_examples():
    assert approx_eq(hc.phase_gadget(0.0).tensor, hc.identity(2).tensor, 1e-15)
    q = math.pi / 4
    assert approx_eq((hc.phase_gadget(q) @ hc.phase_gadget(q)).tensor,
                     hc.phase_gadget(2 * q).tensor, 1e-12)
    hyp = hc.hypdec_map(2)
    for alpha in np.arange(0.1, 3.15, 0.3):
        g = hc.phase_gadget(alpha)
        assert approx_eq((hyp @ g).tensor, hyp.tensor, 1e-12)
        assert approx_eq((hc.dec_map(2) @ g).tensor, hc.dec_map(2).tensor, 1e-12)
        assert approx_eq((hc.phase_gadget(-alpha) @ g).tensor, hc.identity(2).tensor, 1e-12)
        assert hc.dh_is_causal(g)
        assert hc.certificate_residual(g) < 1e-12


@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi),
       st.floats(-math.pi, math.pi))
def test_gadgets_commute_with_doubled_phases(alpha, p0, p1):
    g, p = hc.phase_gadget(alpha), hc.doubled_phase_gate(2, (p0, p1))
    assert approx_eq((g @ p).tensor, (p @ g).tensor, 1e-12)


def test_bridge_phase_examples():
    assert np.array_equal(hc.bridge_phase_map(Z3, PhaseFunction.trivial(Z3)).tensor,
                          hc.identity(3).tensor)
    for alpha in (0.3, 1.2, 2.9):
        b = hc.bridge_phase_map(Z2, PhaseFunction(Z2, (0.0, alpha)))
        assert approx_eq(b.tensor, hc.phase_gadget(alpha).tensor, 1e-12)
    sym = hc.bridge_phase_map(Z3, PhaseFunction(Z3, (0.0, 0.7, 0.7)))
    hyp = hc.hypdec_map(3)
    assert approx_eq((hyp @ sym).tensor, hyp.tensor, 1e-12)
    with pytest.raises(hc.AsymmetricPhaseError) as err:
        hc.bridge_phase_map(Z3, PhaseFunction(Z3, (0.0, 0.7, 0.9)))
    assert err.value.witness >= 1e-6


def test_bridge_phase_multiplier_closed_form():
    psi = PhaseFunction(Z3, (0.2, 0.7, 0.7))
    diag = np.diag(hc.bridge_phase_map(Z3, psi).matrix).reshape((3,) * 4)
    v = psi.values
    for a, b, c, d in np.ndindex(3, 3, 3, 3):
        expected = v[(c - a) % 3] * np.conj(v[(d - b) % 3])
        assert abs(diag[a, b, c, d] - expected) < 1e-14


@pytest.mark.parametrize("g", [FiniteAbelianGroup.parse(s) for s in ("Z3", "Z4", "Z2xZ2")], ids=str)
def test_bridge_phase_group_laws(g):
    rng = np.random.default_rng(g.order)
    inv = g.inverse_permutation

    def sym():
        raw = rng.uniform(-3, 3, size=g.order)
        return PhaseFunction(g, tuple(raw[min(i, inv[i])] for i in range(g.order)))

    from hdlab.groupalg import frobenius_product
    psi, phi = sym(), sym()
    bp = hc.bridge_phase_map(g, psi)
    assert hc.dh_is_causal(bp, 1e-12)
    assert hc.certificate_residual(bp) < 1e-12
    assert approx_eq((bp @ hc.bridge_phase_map(g, phi)).tensor,
                     hc.bridge_phase_map(g, frobenius_product(psi, phi)).tensor, 1e-12)
    assert approx_eq((hc.bridge_phase_map(g, psi.conjugate()) @ bp).tensor,
                     hc.identity(g.order).tensor, 1e-12)
    for q in (hc.dec_map(g), hc.hypdec_map(g)):
        assert approx_eq((q @ bp).tensor, q.tensor, 1e-12)


def test_m_matrix_closed_forms():
    assert approx_eq(hc.m_matrix(0), np.full((2, 2), 1 / math.sqrt(2)), 1e-15)
    assert approx_eq(hc.m_matrix(math.pi), np.array([[1, -1], [-1, 1]]) / math.sqrt(2), 1e-15)
    for alpha in (0.3, 1.0, 2.5):
        x = np.exp(1j * alpha)
        assert approx_eq(hc.m_matrix(alpha), np.array([[1, x], [x, 1]]) / math.sqrt(2), 1e-15)


@pytest.mark.parametrize("alpha", [0.3, 1.0, 2.5])
def test_bridge_expansion_matches_gadget_up_to_scalar(alpha):
    r = hc.symmetric_sqrt(hc.m_matrix(alpha))
    assert approx_eq(r @ r, hc.m_matrix(alpha), 1e-14)
    assert approx_eq(r, r.T, 0)
    cmp = approx_eq(hc.bridge_expand(r).tensor, hc.phase_gadget(alpha).tensor, 1e-9, mode="scalar")
    assert cmp and cmp.scalar == pytest.approx(0.5)


def test_symmetric_sqrt_rejects_non_diagonal():
    with pytest.raises(ValueError, match="diagonal"):
        hc.symmetric_sqrt(np.array([[1, 0], [0.5, 1]]))


# -- sums and scalars ----------------------------------------------------------------

def test_add_and_scale(rng):
    f, g = hc.random_map(rng, 2), hc.random_map(rng, 2)
    assert approx_eq(hc.add(f, hc.scale(g, 0)).tensor, f.tensor, 0)
    s = hc.scale(f, 2.5)
    assert hc.certificate_residual(s) < 1e-12
    assert hc.certificate_residual(hc.add(f, g)) < 1e-12
    with pytest.raises(ValueError, match="nonnegative"):
        hc.scale(f, -1)
    with pytest.raises(ValueError):
        hc.add(f, hc.identity(3))


@pytest.mark.parametrize("d", [2, 3])
def test_composite_certificates(d, rng):
    f, g = hc.random_map(rng, d), hc.random_map(rng, d)
    assert hc.certificate_residual(f @ g) < 1e-12
    assert hc.certificate_residual(f @ hc.hypdec_completion(d)) < 1e-12


# -- random states --------------------------------------------------------------------

@pytest.mark.parametrize("d", [2, 3, 4])
def test_random_state_invariants(d):
    disc, hyp, uhfb = hc.dh_discard(d), hc.hypdec_map(d), hc.uhfb_effect(d)
    worst_gap = math.inf
    for i in range(500):
        t = hc.random_state(np.random.default_rng(i), d)
        assert hc.state_symmetry_residual(t) < 1e-12
        m_min, n_neg = hc.realizable_state_diagnostics(t)
        assert m_min >= -1e-9 and n_neg >= -1e-9
        assert abs(disc(t) - 1) < 1e-12
        gap = (disc(t) - disc(hyp(t))).real
        worst_gap = min(worst_gap, gap)
        assert abs(gap - uhfb(t).real) < 1e-12
        assert min_eigenvalue(hc.extract_quantum(hyp(t))) >= -1e-9
    assert worst_gap >= -1e-9


def test_zero_gap_iff_quantum_support(rng):
    disc, hyp = hc.dh_discard(3), hc.hypdec_map(3)
    a, b = crandn(rng, 3), crandn(rng, 3)
    t = hc.embed_quantum([(0.5, a / np.linalg.norm(a)), (0.5, b / np.linalg.norm(b))])
    assert abs(disc(t) - disc(hyp(t))) < 1e-12
    assert hc.hypdec_residual(t) < 1e-12
    s = hc.random_state(rng, 3)
    assert (disc(s) - disc(hyp(s))).real > 1e-9 and hc.hypdec_residual(s) > 1e-9
