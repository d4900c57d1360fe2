"""Double dilation and double mixing.

States use the same ``S[i, j, k, l]`` (ket, bra, ket, bra) layout as density
hypercubes and maps the same rank-8 layout. A realization is a CP map
``H -> K (x) C``; double dilation caps the ``C`` outputs crosswise (copy-1
ket with copy-2 bra and vice versa), double mixing joins all four with one
white spider.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .cpm import CPMap

INVERTIBILITY_TOL = 1e-8
RANK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DDRealization:
    """CP map ``phi: H -> K (x) C`` with output index ``(k, gamma)`` row-major."""

    phi: CPMap
    env_dim: int = 1

    def __post_init__(self):
        if self.env_dim < 1 or self.phi.d_out % self.env_dim:
            raise ValueError(
                f"output dimension {self.phi.d_out} is not K x {self.env_dim}")

    @property
    def d_in(self) -> int:
        return self.phi.d_in

    @property
    def d_out(self) -> int:
        return self.phi.d_out // self.env_dim

    def kraus_array(self) -> np.ndarray:
        return self.phi.stack.reshape(-1, self.d_out, self.env_dim, self.d_in)

    def dephased(self) -> "DDRealization":
        """Same map followed by white dephasing of ``C``."""
        k = self.kraus_array()
        ops = []
        for op in k:
            for g in range(self.env_dim):
                proj = np.zeros_like(op)
                proj[:, g, :] = op[:, g, :]
                ops.append(proj.reshape(self.phi.d_out, self.d_in))
        return type(self)(CPMap(tuple(ops)), self.env_dim)


class DMRealization(DDRealization):
    """Realization whose environment is joined by a four-legged white spider."""


def _half(r: DDRealization) -> np.ndarray:
    """``half[a, r, b, s, a', b'] = sum_m K_m[a, r, a'] conj(K_m[b, s, b'])``."""
    k = r.kraus_array()
    return np.einsum("marx,mbsy->arbsxy", k, k.conj())


def dd_denote(r: DDRealization) -> np.ndarray:
    h = _half(r)
    return np.einsum("arbsxy,csdrzw->abcdxyzw", h, h, optimize=True)


def dm_denote(r: DDRealization) -> np.ndarray:
    h = _half(r)
    return np.einsum("arbrxy,crdrzw->abcdxyzw", h, h, optimize=True)


def apply_map(n, state) -> np.ndarray:
    n = np.asarray(n, dtype=complex)
    d_out, d_in = n.shape[0], n.shape[4]
    return (n.reshape(d_out ** 4, d_in ** 4) @ np.asarray(state).reshape(-1)
            ).reshape((d_out,) * 4)


def dd_state_from_tripartite(c) -> np.ndarray:
    """S[i,j,k,l] = sum_{pqrs} c[i,p,r] c*[j,p,s] c[k,q,s] c*[l,q,r]."""
    c = np.asarray(c, dtype=complex)
    if c.ndim != 3:
        raise ValueError("expected amplitudes on A (x) B (x) C")
    return np.einsum("ipr,jps,kqs,lqr->ijkl", c, c.conj(), c, c.conj(),
                     optimize=True)


def tripartite_realization(c) -> DDRealization:
    """State realization: ``B`` discarded per copy, ``C`` capped crosswise."""
    c = np.asarray(c, dtype=complex)
    a, b, e = c.shape
    ops = tuple(c[:, p, :].reshape(a * e, 1) for p in range(b))
    return DDRealization(CPMap(ops), e)


def dd_state_symmetry_residual(state) -> float:
    s = np.asarray(state, dtype=complex)
    herm = np.max(np.abs(s.conj() - s.transpose(1, 0, 3, 2)))
    swap = np.max(np.abs(s - s.transpose(2, 3, 0, 1)))
    return float(max(herm, swap))


def dd_discard(state) -> float:
    return float(np.einsum("iikk->", np.asarray(state)).real)


def dd_dec(d: int) -> np.ndarray:
    """``S -> [i = j = k = l] S[i, i, i, i]`` as a rank-8 map."""
    n = np.zeros((d,) * 8, dtype=complex)
    for i in range(d):
        n[(i,) * 8] = 1.0
    return n


def candidate_hypdec(state) -> np.ndarray:
    """out[i, j] = S[i, j, j, i]."""
    return np.einsum("ijji->ij", np.asarray(state, dtype=complex)).copy()


def folded_unitary(u) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    return np.einsum("ae,bf,cg,dh->abcdefgh", u, u.conj(), u, u.conj())


def level2_choi(n) -> np.ndarray:
    """Reshuffle a DD map into its outer-level Choi matrix.

    A DD map is ``sum_{r,s} L_rs (x) conj(L_rs)`` with copy 2 read bra-first,
    so ``C[(a,b,a',b'), (d,c,d',c')] = N[a,b,c,d,a',b',c',d']`` is psd with
    rank equal to the number of independent ``L_rs``.
    """
    n = np.asarray(n, dtype=complex)
    d_out, d_in = n.shape[0], n.shape[4]
    size = d_out ** 2 * d_in ** 2
    return n.transpose(0, 1, 4, 5, 3, 2, 7, 6).reshape(size, size)


def _rank(values: np.ndarray, tol: float) -> tuple[int, float]:
    """Numerical rank and the ratio of the second to the first value."""
    values = np.sort(np.abs(values))[::-1]
    if values[0] == 0:
        return 0, 0.0
    return int(np.sum(values > tol * values[0])), float(
        values[1] / values[0] if values.size > 1 else 0.0)


class InvertibilityProbe(NamedTuple):
    invertible: bool
    smallest_singular_value: float
    condition_number: float
    outer_kraus_rank: int
    inner_kraus_rank: int
    rank_witness: float
    invertible_in_theory: bool


def invertibility_probe(n, tol: float = INVERTIBILITY_TOL) -> InvertibilityProbe:
    """Linear invertibility of a square DD/DM map plus the Kraus-rank test.

    ``invertible`` only reports the smallest singular value against ``tol``.
    ``invertible_in_theory`` further requires the inverse to stay inside the
    theory: one outer Kraus operator, itself a single-Kraus CP map.
    ``rank_witness`` is the second-to-first eigenvalue ratio at the level
    where the rank first exceeds one (0 when both ranks are one).
    """
    n = np.asarray(n, dtype=complex)
    if n.ndim != 8 or n.shape[:4] != n.shape[4:]:
        raise ValueError(f"not a square map tensor: {n.shape}")
    d = n.shape[0]
    sv = np.linalg.svd(n.reshape(d ** 4, d ** 4), compute_uv=False)
    smin = float(sv[-1])
    cond = float(sv[0] / smin) if smin > 0 else float("inf")
    choi = level2_choi(n)
    w, v = np.linalg.eigh((choi + choi.conj().T) / 2)
    outer, witness = _rank(w, RANK_TOL)
    inner = 0
    if outer == 1:
        top = (v[:, -1] * np.sqrt(max(w[-1], 0.0))).reshape(d, d, d, d)
        inner_choi = top.transpose(0, 2, 1, 3).reshape(d * d, d * d)
        inner, witness = _rank(np.linalg.svd(inner_choi, compute_uv=False), RANK_TOL)
        if inner == 1:
            witness = 0.0
    return InvertibilityProbe(
        smin > tol, smin, cond, outer, inner, witness,
        smin > tol and outer == 1 and inner == 1)


def random_tripartite(rng: np.random.Generator, dims=(2, 2, 2)) -> np.ndarray:
    return rng.normal(size=dims) + 1j * rng.normal(size=dims)


def random_dd_state(rng: np.random.Generator, d: int) -> np.ndarray:
    """Tripartite-built state on ``d``-dimensional systems, discard 1."""
    s = dd_state_from_tripartite(random_tripartite(rng, (d, d, d)))
    return s / dd_discard(s)


def random_env_realization(rng: np.random.Generator, d: int, n_kraus: int,
                           env_dim: int, mixing: bool = False) -> DDRealization:
    shape = (n_kraus, d * env_dim, d)
    k = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    cls = DMRealization if mixing else DDRealization
    return cls(CPMap(tuple(k)), env_dim)
