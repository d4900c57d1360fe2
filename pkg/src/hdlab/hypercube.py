"""Density hypercubes.

States are rank-4 tensors ``T[a, b, c, d]``: ``a, c`` are ket indices and
``b, d`` bra indices, copy 1 is ``(a, b)`` and copy 2 is ``(c, d)``. Maps are
rank-8 tensors ``N[a, b, c, d, a', b', c', d']`` (outputs first), applied by
contracting the primed axes with a state.

A map is backed by a *certificate* when it is a (sum of) realization(s): one
CP map ``H -> K (x) B`` used on both copies, with the two ket-side ``B``
outputs joined by a symmetric bridge effect ``W`` and the two bra-side
outputs joined by ``conj(W)``. The plain bridge is the white two-legged
spider, ``W = identity``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .cpm import CPMap, min_eigenvalue
from .groupalg import (
    BASIS, FOURIER, ClassicalStructure, FiniteAbelianGroup, PhaseFunction,
    check_same_group, spider, symmetry_witness,
)
from .tensor import DEFAULT_TOL, approx_eq

BRIDGE_SYMMETRY_TOL = 1e-12


def _group(structure) -> FiniteAbelianGroup:
    if isinstance(structure, ClassicalStructure):
        if structure.flavor != BASIS:
            raise ValueError("expected the group-element (white) structure")
        return structure.group
    if isinstance(structure, FiniteAbelianGroup):
        return structure
    return FiniteAbelianGroup.cyclic(int(structure))


def _dim(structure) -> int:
    if isinstance(structure, (int, np.integer)):
        return int(structure)
    return _group(structure).order


# -- realizations -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DHRealization:
    """CP map ``phi: H -> K (x) B`` (output index ``(k, beta)`` row-major) and a
    symmetric bridge effect on ``B (x) B``.

    ``bridge=None`` is the plain white bridge (identity matrix).
    """

    phi: CPMap
    bridge_dim: int = 1
    bridge: np.ndarray | None = None

    def __post_init__(self):
        if self.bridge_dim < 1 or self.phi.d_out % self.bridge_dim:
            raise ValueError(
                f"output dimension {self.phi.d_out} is not K x {self.bridge_dim}")
        if self.bridge is not None:
            w = np.array(self.bridge, dtype=complex)
            if w.shape != (self.bridge_dim, self.bridge_dim):
                raise ValueError(f"bridge of shape {w.shape} on a "
                                 f"{self.bridge_dim}-dimensional environment")
            if np.max(np.abs(w - w.T)) > BRIDGE_SYMMETRY_TOL:
                raise ValueError("asymmetric bridge dressing")
            w.setflags(write=False)
            object.__setattr__(self, "bridge", w)

    @property
    def d_in(self) -> int:
        return self.phi.d_in

    @property
    def d_out(self) -> int:
        return self.phi.d_out // self.bridge_dim

    @property
    def bridge_matrix(self) -> np.ndarray:
        if self.bridge is None:
            return np.eye(self.bridge_dim, dtype=complex)
        return self.bridge

    def kraus_array(self) -> np.ndarray:
        """Kraus operators as ``(m, d_out, bridge_dim, d_in)``."""
        return self.phi.stack.reshape(-1, self.d_out, self.bridge_dim, self.d_in)

    def scaled(self, s: float) -> "DHRealization":
        """Realization whose denotation is ``s`` times this one (``s >= 0``)."""
        f = s ** 0.25
        return DHRealization(CPMap(tuple(f * k for k in self.phi.kraus)),
                             self.bridge_dim, self.bridge)

    def then(self, other: "DHRealization") -> "DHRealization":
        """``other`` after ``self``: Kraus products and a tensored bridge."""
        if other.d_in != self.d_out:
            raise ValueError("dimension mismatch in realization composition")
        g, f = self.kraus_array(), other.kraus_array()
        kraus = np.einsum("naxj,mjyi->nmaxyi", f, g)
        nf, ng = f.shape[0], g.shape[0]
        bdim = other.bridge_dim * self.bridge_dim
        kraus = kraus.reshape(nf * ng, other.d_out * bdim, self.d_in)
        bridge = None
        if self.bridge is not None or other.bridge is not None:
            bridge = np.kron(other.bridge_matrix, self.bridge_matrix)
        return DHRealization(CPMap(tuple(kraus)), bdim, bridge)


def _denote_tensor(r: DHRealization) -> np.ndarray:
    k = r.kraus_array()
    half = np.einsum("maxi,mbuj->axbuij", k, k.conj())
    w = r.bridge_matrix
    if r.bridge is None:
        return np.einsum("axbuij,cxdukl->abcdijkl", half, half, optimize=True)
    return np.einsum("xy,uv,axbuij,cydvkl->abcdijkl", w, w.conj(), half, half,
                     optimize=True)


@dataclass(frozen=True, eq=False)
class DHMap:
    """Rank-8 denotation plus an optional certificate (tuple of realizations
    whose denotations sum to ``tensor``)."""

    tensor: np.ndarray
    certificate: tuple[DHRealization, ...] | None = None

    def __post_init__(self):
        t = np.array(self.tensor, dtype=complex)
        if t.ndim != 8 or len(set(t.shape[:4])) != 1 or len(set(t.shape[4:])) != 1:
            raise ValueError(f"not a density-hypercube map tensor: {t.shape}")
        t.setflags(write=False)
        object.__setattr__(self, "tensor", t)
        if self.certificate is not None:
            object.__setattr__(self, "certificate", tuple(self.certificate))

    @property
    def d_out(self) -> int:
        return self.tensor.shape[0]

    @property
    def d_in(self) -> int:
        return self.tensor.shape[4]

    @property
    def matrix(self) -> np.ndarray:
        return self.tensor.reshape(self.d_out ** 4, self.d_in ** 4)

    def apply(self, state) -> np.ndarray:
        state = np.asarray(state, dtype=complex)
        if state.shape != (self.d_in,) * 4:
            raise ValueError(f"state of shape {state.shape} for a map on "
                             f"dimension {self.d_in}")
        return (self.matrix @ state.reshape(-1)).reshape((self.d_out,) * 4)

    def __call__(self, state) -> np.ndarray:
        return self.apply(state)

    def __matmul__(self, other: "DHMap") -> "DHMap":
        return compose(self, other)


def dh_denote(r: DHRealization | Iterable[DHRealization]) -> DHMap:
    """Denotation of a realization, or of a sum of realizations."""
    rs = (r,) if isinstance(r, DHRealization) else tuple(r)
    if not rs:
        raise ValueError("empty sum of realizations")
    t = _denote_tensor(rs[0])
    for extra in rs[1:]:
        if (extra.d_in, extra.d_out) != (rs[0].d_in, rs[0].d_out):
            raise ValueError("dimension mismatch in sum of realizations")
        t = t + _denote_tensor(extra)
    return DHMap(t, rs)


def certificate_residual(f: DHMap) -> float:
    """max |dh_denote(certificate) - tensor|; ``inf`` when uncertified."""
    if f.certificate is None:
        return math.inf
    return approx_eq(dh_denote(f.certificate).tensor, f.tensor).residual


def compose(f: DHMap, g: DHMap) -> DHMap:
    """``f`` after ``g``."""
    if f.d_in != g.d_out:
        raise ValueError(f"cannot compose: {f.d_in} != {g.d_out}")
    t = (f.matrix @ g.matrix).reshape((f.d_out,) * 4 + (g.d_in,) * 4)
    cert = None
    if f.certificate is not None and g.certificate is not None:
        cert = tuple(rg.then(rf) for rf in f.certificate for rg in g.certificate)
    return DHMap(t, cert)


def add(f: DHMap, g: DHMap) -> DHMap:
    if (f.d_in, f.d_out) != (g.d_in, g.d_out):
        raise ValueError("cannot add maps of different dimensions")
    cert = None
    if f.certificate is not None and g.certificate is not None:
        cert = f.certificate + g.certificate
    return DHMap(f.tensor + g.tensor, cert)


def scale(f: DHMap, s: float) -> DHMap:
    s = float(s)
    if s < 0:
        raise ValueError("density-hypercube scalars are nonnegative")
    cert = None
    if f.certificate is not None:
        cert = tuple(r.scaled(s) for r in f.certificate)
    return DHMap(s * f.tensor, cert)


def diagonal_map(multiplier, certificate=None) -> DHMap:
    """Map acting as ``T -> multiplier * T`` entrywise."""
    m = np.asarray(multiplier, dtype=complex)
    d = m.shape[0]
    if m.shape != (d,) * 4:
        raise ValueError("multiplier must be a rank-4 cube")
    mat = np.diag(m.reshape(-1))
    return DHMap(mat.reshape((d,) * 8), certificate)


def identity(d: int) -> DHMap:
    r = DHRealization(CPMap.identity(d))
    return DHMap(np.eye(d ** 4, dtype=complex).reshape((d,) * 8), (r,))


def fld(f) -> DHMap:
    """Folded pure map f (x) f* (x) f (x) f*, certified with a trivial bridge."""
    f = np.asarray(f, dtype=complex)
    t = np.einsum("ae,bf,cg,dh->abcdefgh", f, f.conj(), f, f.conj())
    return DHMap(t, (DHRealization(CPMap((f,))),))


# -- discarding, effects ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DHEffect:
    """Rank-4 effect; ``e(T)`` is the full contraction with ``T``."""

    tensor: np.ndarray
    name: str = ""

    def __call__(self, state) -> complex:
        return complex(np.sum(self.tensor * np.asarray(state)))

    def __add__(self, other: "DHEffect") -> "DHEffect":
        return DHEffect(self.tensor + other.tensor)


def dh_discard(d: int) -> DHEffect:
    """Trace of each doubled half: ``T -> sum_{a,c} T[a, a, c, c]``."""
    eye = np.eye(d, dtype=complex)
    return DHEffect(np.einsum("ab,cd->abcd", eye, eye), "discard")


def effect_after(e: DHEffect, f: DHMap) -> DHEffect:
    """The effect ``e . f`` on the input of ``f``."""
    t = np.tensordot(e.tensor, f.tensor, axes=([0, 1, 2, 3], [0, 1, 2, 3]))
    return DHEffect(t)


def causality_residual(f: DHMap) -> float:
    return approx_eq(effect_after(dh_discard(f.d_out), f).tensor,
                     dh_discard(f.d_in).tensor).residual


def dh_is_causal(f: DHMap, tol: float = DEFAULT_TOL) -> bool:
    return causality_residual(f) <= tol


def uhfb_effect(d: int) -> DHEffect:
    """``T -> sum_{a != c} T[a, a, c, c]``: discard minus discard after hypdec."""
    t = dh_discard(d).tensor.copy()
    for k in range(d):
        t[k, k, k, k] = 0.0
    return DHEffect(t, "UHfB")


def povm_complete(d) -> list[DHEffect]:
    """Computational-basis outcomes ``T[k, k, k, k]`` followed by the UHfB."""
    d = _dim(d)
    effects = []
    for k in range(d):
        t = np.zeros((d,) * 4, dtype=complex)
        t[k, k, k, k] = 1.0
        effects.append(DHEffect(t, str(k)))
    effects.append(uhfb_effect(d))
    return effects


def outcome_probabilities(state) -> list[tuple[str, float]]:
    state = np.asarray(state, dtype=complex)
    return [(e.name, e(state).real) for e in povm_complete(state.shape[0])]


# -- decoherence and hyper-decoherence ----------------------------------------

def copy_map(d: int) -> CPMap:
    """White copy ``|a> -> |a>|a>`` as a CP map ``H -> H (x) B`` with ``B = H``."""
    k = np.zeros((d, d, d), dtype=complex)
    for a in range(d):
        k[a, a, a] = 1.0
    return CPMap((k.reshape(d * d, d),))


def hypdec_realization(d: int) -> DHRealization:
    return DHRealization(copy_map(d), d)


def dec_realization(d: int) -> DHRealization:
    ops = []
    for m in range(d):
        k = np.zeros((d, d, d), dtype=complex)
        k[m, m, m] = 1.0
        ops.append(k.reshape(d * d, d))
    return DHRealization(CPMap(tuple(ops)), d)


def hypdec_map(structure) -> DHMap:
    """``T[a, b, c, d] -> [a = c][b = d] T[a, b, c, d]``."""
    d = _dim(structure)
    eye = np.eye(d)
    mult = np.einsum("ac,bd->abcd", eye, eye)
    return diagonal_map(mult, (hypdec_realization(d),))


def dec_map(structure) -> DHMap:
    """``T[a, b, c, d] -> [a = b = c = d] T[a, a, a, a]``."""
    d = _dim(structure)
    mult = np.zeros((d,) * 4)
    for a in range(d):
        mult[a, a, a, a] = 1.0
    return diagonal_map(mult, (dec_realization(d),))


def shift_bridge(group: FiniteAbelianGroup, k) -> np.ndarray:
    """``W[b1, b2] = [b2 = b1 k]``; symmetric exactly when ``k`` is self-inverse."""
    d = group.order
    w = np.zeros((d, d), dtype=complex)
    for g in group.elements:
        w[group.index(g), group.index(group.multiply(g, k))] = 1.0
    return w


def _shift_multiplier(group: FiniteAbelianGroup, ks: Iterable) -> np.ndarray:
    d = group.order
    mult = np.zeros((d,) * 4)
    for k in ks:
        w = shift_bridge(group, k).real
        mult += np.einsum("ac,bd->abcd", w, w)
    return mult


def _pair_realization(group: FiniteAbelianGroup, k, kbar) -> DHRealization:
    """Realization of ``D_k + D_kbar`` for a non-self-inverse ``k``.

    A control qubit rides along the bridge environment: each copy emits a
    control value ``j`` (summed per copy), and the bridge links control 0 on
    one copy to control 1 on the other with the shifts ``k`` / ``kbar``.
    """
    d = group.order
    ops = []
    for j in range(2):
        kr = np.zeros((d, d, 2, d), dtype=complex)
        for a in range(d):
            kr[a, a, j, a] = 1.0
        ops.append(kr.reshape(d * d * 2, d))
    w = np.zeros((d, 2, d, 2), dtype=complex)
    w[:, 0, :, 1] = shift_bridge(group, k)
    w[:, 1, :, 0] = shift_bridge(group, kbar)
    return DHRealization(CPMap(tuple(ops)), 2 * d, w.reshape(2 * d, 2 * d))


def qubit_completion_realization() -> DHRealization:
    """The qubit completion: plain copy map with two black pi/2 phases on the
    bridge legs (their product on the bridge is Pauli X)."""
    z2 = FiniteAbelianGroup.cyclic(2)
    r = spider(ClassicalStructure(z2, FOURIER), 1, 1,
               PhaseFunction(z2, (0.0, math.pi / 2)))
    return DHRealization(copy_map(2), 2, r.T @ r)


def shifted_bridge_map(structure, k) -> DHMap:
    """``D_k: T -> T[a, b, c, d] [c = a k][d = b k]``.

    Certified only for self-inverse ``k`` (otherwise ``D_k`` alone breaks the
    copy-swap symmetry of the theory).
    """
    group = _group(structure)
    k = group.reduce(k)
    cert = None
    if group.inverse(k) == k:
        cert = (DHRealization(copy_map(group.order), group.order,
                              shift_bridge(group, k)),)
    return diagonal_map(_shift_multiplier(group, [k]), cert)


def completion_realizations(structure) -> tuple[DHRealization, ...]:
    group = _group(structure)
    if group.factors == (2,):
        return (qubit_completion_realization(),)
    out = []
    for k, kbar in group.inverse_pairs():
        if k == kbar:
            out.append(DHRealization(copy_map(group.order), group.order,
                                     shift_bridge(group, k)))
        else:
            out.append(_pair_realization(group, k, kbar))
    return tuple(out)


def hypdec_completion(structure) -> DHMap:
    """``sum_{k != e} D_k``; hypdec plus this map is causal."""
    group = _group(structure)
    ks = [k for k in group.elements if k != group.identity]
    if not ks:
        raise ValueError("the trivial group has no completion summands")
    return diagonal_map(_shift_multiplier(group, ks), completion_realizations(group))


# -- quantum sector -----------------------------------------------------------

def embed_quantum(state) -> np.ndarray:
    """Embed a pure state (amplitude vector) or a mixture given as
    ``[(weight, amplitudes), ...]`` into the quantum sector."""
    if isinstance(state, (list, tuple)) and state and isinstance(state[0], tuple):
        return sum(float(p) * embed_quantum(np.asarray(v)) for p, v in state)
    psi = np.asarray(state, dtype=complex)
    if psi.ndim != 1:
        raise ValueError("pure states are amplitude vectors")
    s = np.sqrt(psi)
    t = np.einsum("a,b,c,d->abcd", s, s.conj(), s, s.conj())
    d = psi.size
    eye = np.eye(d)
    return t * np.einsum("ac,bd->abcd", eye, eye)


def hypdec_residual(state) -> float:
    t = np.asarray(state, dtype=complex)
    d = t.shape[0]
    eye = np.eye(d)
    return float(np.max(np.abs(t - t * np.einsum("ac,bd->abcd", eye, eye))))


def extract_quantum(state, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``rho[a, b] = T[a, b, a, b]`` for hyper-decohered ``T``."""
    t = np.asarray(state, dtype=complex)
    if hypdec_residual(t) > tol:
        raise ValueError("state is not invariant under hyper-decoherence")
    return np.einsum("abab->ab", t).copy()


def quantum_action(f: DHMap) -> np.ndarray:
    """Transfer matrix ``Q[(a, b), (a', b')] = N[a, b, a, b, a', b', a', b']``."""
    q = np.einsum("ababcdcd->abcd", f.tensor)
    return q.reshape(f.d_out ** 2, f.d_in ** 2)


def lift_quantum(q, d_in: int, d_out: int) -> DHMap:
    """The map on the hyper-decohered sector whose quantum action is ``q``."""
    q = np.asarray(q, dtype=complex).reshape(d_out, d_out, d_in, d_in)
    eo, ei = np.eye(d_out), np.eye(d_in)
    t = np.einsum("abij,ac,bd,ik,jl->abcdijkl", q, eo, eo, ei, ei)
    return DHMap(t)


# -- phases -------------------------------------------------------------------

def doubled_phase_gate(structure, phi: PhaseFunction | Sequence[float]) -> DHMap:
    """Folded diag(e^{i phi}): ``T -> e^{i(phi_a - phi_b + phi_c - phi_d)} T``."""
    angles = phi.angles if isinstance(phi, PhaseFunction) else tuple(phi)
    d = _dim(structure)
    if len(angles) != d:
        raise ValueError(f"{len(angles)} phases for dimension {d}")
    return fld(np.diag(np.exp(1j * np.asarray(angles, dtype=float))))


def m_matrix(alpha: float) -> np.ndarray:
    """sqrt(2) e^{i alpha/2} diag(cos(alpha/2), -i sin(alpha/2)) in the X basis,
    returned in the Z basis."""
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    diag = math.sqrt(2) * np.exp(0.5j * alpha) * np.array(
        [math.cos(alpha / 2), -1j * math.sin(alpha / 2)])
    return h @ np.diag(diag) @ h.conj().T


X_BASIS = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def symmetric_sqrt(m, basis=X_BASIS, tol: float = 1e-10) -> np.ndarray:
    """Principal square root of a matrix diagonal in ``basis`` (columns).

    For a real orthogonal ``basis`` the root is self-transpose.
    """
    m = np.asarray(m, dtype=complex)
    b = np.asarray(basis, dtype=complex)
    diag = b.conj().T @ m @ b
    off = diag - np.diag(np.diag(diag))
    if np.max(np.abs(off)) > tol:
        raise ValueError("matrix is not diagonal in the given basis")
    return b @ np.diag(np.sqrt(np.diag(diag))) @ b.conj().T


def bridge_expand(r) -> DHMap:
    """Copy map with ``r`` on both bridge legs (white bridge in between)."""
    r = np.asarray(r, dtype=complex)
    d = r.shape[0]
    k = np.zeros((d, d, d), dtype=complex)
    for a in range(d):
        k[a, :, a] = r[:, a]
    return dh_denote(DHRealization(CPMap((k.reshape(d * d, d),)), d))


def phase_gadget(alpha: float) -> DHMap:
    """Qubit gadget ``T -> e^{i alpha([a != c] - [b != d])} T``."""
    neq = 1.0 - np.eye(2)
    mult = np.exp(1j * alpha * (neq[:, None, :, None] - neq[None, :, None, :]))
    # bridge_expand(sqrt M(alpha)) denotes gadget(alpha) / 2
    cert = tuple(r.scaled(2.0) for r in
                 bridge_expand(symmetric_sqrt(m_matrix(alpha))).certificate)
    return diagonal_map(mult, cert)


def bridge_phase_multiplier(psi: PhaseFunction) -> np.ndarray:
    g = psi.group
    d = g.order
    w = np.empty((d, d), dtype=complex)
    for a in g.elements:
        for c in g.elements:
            w[g.index(a), g.index(c)] = psi[g.multiply(g.inverse(a), c)]
    return np.einsum("ac,bd->abcd", w, w.conj()), w


def bridge_phase_map(structure, psi: PhaseFunction, tol: float = 1e-10) -> DHMap:
    """``T -> psi(a^-1 c) conj(psi(b^-1 d)) T`` for symmetric ``psi``."""
    group = check_same_group(_group(structure), psi.group)
    if not psi.is_symmetric(tol):
        witness = float(np.max(np.abs(symmetry_witness(psi))))
        raise AsymmetricPhaseError(
            f"theta_k != theta_(k^-1); Fourier witness max |f_hat| = {witness:.3g}",
            witness)
    mult, w = bridge_phase_multiplier(psi)
    w = (w + w.T) / 2
    cert = (DHRealization(copy_map(group.order), group.order, w),)
    return diagonal_map(mult, cert)


class AsymmetricPhaseError(ValueError):
    def __init__(self, message: str, witness: float):
        super().__init__(message)
        self.witness = witness


# -- states -------------------------------------------------------------------

def state_symmetry_residual(state) -> float:
    """max over the Hermitian and copy-swap symmetries of a state."""
    t = np.asarray(state, dtype=complex)
    herm = np.max(np.abs(t.conj() - t.transpose(1, 0, 3, 2)))
    swap = np.max(np.abs(t - t.transpose(2, 3, 0, 1)))
    return float(max(herm, swap))


def realizable_state_diagnostics(state) -> tuple[float, float]:
    """(min eigenvalue of ``T[a, b, a, b]``, most negative of ``T[a, a, c, c]``).

    Both are nonnegative (to rounding) on realizable states.
    """
    t = np.asarray(state, dtype=complex)
    m = np.einsum("abab->ab", t)
    n = np.einsum("aacc->ac", t)
    neg = min(float(np.min(n.real)), 0.0) - float(np.max(np.abs(n.imag)))
    return min_eigenvalue(m), neg


def state_realization(amplitudes) -> DHRealization:
    """State realization from amplitudes ``v[a, e, beta]`` on H (x) E (x) B:
    ``E`` is discarded on each copy, ``B`` is bridged."""
    v = np.asarray(amplitudes, dtype=complex)
    d, e, b = v.shape
    ops = tuple(v[:, m, :].reshape(d * b, 1) for m in range(e))
    return DHRealization(CPMap(ops), b)


def state_from_realization(r: DHRealization) -> np.ndarray:
    if r.d_in != 1:
        raise ValueError("a state realization has a trivial input")
    return dh_denote(r).tensor.reshape((r.d_out,) * 4)


def random_state(rng: np.random.Generator, d: int) -> np.ndarray:
    """Realizable state from a complex-Gaussian vector on H (x) E (x) B
    (``dim E = dim B = d``), rescaled so that discarding gives 1."""
    v = rng.normal(size=(d, d, d)) + 1j * rng.normal(size=(d, d, d))
    t = state_from_realization(state_realization(v))
    return t / dh_discard(d)(t).real


def random_realization(rng: np.random.Generator, d: int, n_kraus: int = 2,
                       bridge_dim: int | None = None) -> DHRealization:
    from .cpm import random_kraus
    b = d if bridge_dim is None else bridge_dim
    return DHRealization(random_kraus(rng, d, d * b, n_kraus), b)


def random_map(rng: np.random.Generator, d: int) -> DHMap:
    return dh_denote(random_realization(rng, d))


def uniform_plus(d: int = 2) -> np.ndarray:
    """The post-quantum plus: folded |+>, every entry ``1/d^2``."""
    return np.full((d,) * 4, 1.0 / d ** 2, dtype=complex)
