"""One level of the CPM construction: doubling pure maps, Kraus-form CP maps,
Choi/transfer views and partial traces.

Matrices act as ``out x in``. Transfer matrices are indexed
``L[(a, b), (a', b')] = sum_m K_m[a, a'] conj(K_m[b, b'])`` so that
``vec(K rho K^dag) = L vec(rho)`` with row-major ``vec``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

PSD_TOL = 1e-9
KRAUS_CLAMP = 1e-12


def double(f) -> np.ndarray:
    """f (x) conj(f) with axis order (out, out*, in, in*)."""
    f = np.asarray(f, dtype=complex)
    return np.einsum("ac,bd->abcd", f, f.conj())


def min_eigenvalue(m) -> float:
    m = np.asarray(m, dtype=complex)
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])


def is_psd(m, tol: float = PSD_TOL) -> bool:
    return min_eigenvalue(m) >= -tol


@dataclass(frozen=True)
class CPMap:
    """Completely positive map in Kraus form, ``d_in -> d_out``."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not ops:
            raise ValueError("a CP map needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(k.shape != shape for k in ops):
            raise ValueError("Kraus operators must be matrices of one shape")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

    @classmethod
    def from_unitary(cls, u) -> "CPMap":
        return cls((np.asarray(u, dtype=complex),))

    @classmethod
    def identity(cls, d: int) -> "CPMap":
        return cls((np.eye(d, dtype=complex),))

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]

    @cached_property
    def stack(self) -> np.ndarray:
        """Kraus operators as one ``(m, d_out, d_in)`` array."""
        return np.stack(self.kraus)

    @cached_property
    def transfer(self) -> np.ndarray:
        k = self.stack
        t = np.einsum("mac,mbd->abcd", k, k.conj())
        return t.reshape(self.d_out ** 2, self.d_in ** 2)

    @cached_property
    def choi(self) -> np.ndarray:
        return choi_from_transfer(self.transfer, self.d_in, self.d_out)

    def apply(self, rho) -> np.ndarray:
        return cp_apply(self, rho)


def choi_from_transfer(transfer, d_in: int, d_out: int) -> np.ndarray:
    """Choi matrix C[(a', a), (b', b)] = L[(a, b), (a', b')]."""
    t = np.asarray(transfer, dtype=complex).reshape(d_out, d_out, d_in, d_in)
    return t.transpose(2, 0, 3, 1).reshape(d_in * d_out, d_in * d_out)


def transfer_from_choi(choi, d_in: int, d_out: int) -> np.ndarray:
    c = np.asarray(choi, dtype=complex).reshape(d_in, d_out, d_in, d_out)
    return c.transpose(1, 3, 0, 2).reshape(d_out ** 2, d_in ** 2)


def kraus_from_choi(choi, d_in: int, d_out: int,
                    clamp: float = KRAUS_CLAMP) -> CPMap:
    """Kraus operators from the eigendecomposition of a psd Choi matrix.

    Eigenvalues below ``clamp`` are treated as zero.
    """
    c = np.asarray(choi, dtype=complex)
    w, v = np.linalg.eigh((c + c.conj().T) / 2)
    ops = []
    for lam, vec in zip(w[::-1], v.T[::-1]):
        if lam <= clamp:
            break
        ops.append(np.sqrt(lam) * vec.reshape(d_in, d_out).T)
    if not ops:
        ops.append(np.zeros((d_out, d_in), dtype=complex))
    return CPMap(tuple(ops))


def _check_rho(rho, d: int, tol: float) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} density matrix, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T), initial=0.0) > tol:
        raise ValueError("density matrix is not Hermitian")
    return rho


def cp_apply(phi: CPMap, rho, tol: float = PSD_TOL) -> np.ndarray:
    """sum_m K_m rho K_m^dag."""
    rho = _check_rho(rho, phi.d_in, tol)
    k = phi.stack
    return np.einsum("mab,bc,mdc->ad", k, rho, k.conj())


def apply_transfer(transfer, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    out = np.asarray(transfer) @ rho.reshape(-1)
    d_out = int(round(np.sqrt(out.size)))
    return out.reshape(d_out, d_out)


class ChoiReport(NamedTuple):
    choi: np.ndarray
    is_cp: bool
    is_trace_preserving: bool


def choi_and_check(phi, d_in: int | None = None, d_out: int | None = None,
                   tol: float = PSD_TOL) -> ChoiReport:
    """Choi matrix plus CP and TP verdicts.

    ``phi`` is a :class:`CPMap` or a raw transfer matrix (square maps only
    unless ``d_in``/``d_out`` are given).
    """
    if isinstance(phi, CPMap):
        transfer, d_in, d_out = phi.transfer, phi.d_in, phi.d_out
    else:
        transfer = np.asarray(phi, dtype=complex)
        if d_in is None or d_out is None:
            d_in = d_out = int(round(np.sqrt(transfer.shape[1])))
    choi = choi_from_transfer(transfer, d_in, d_out)
    hermitian = np.max(np.abs(choi - choi.conj().T), initial=0.0) <= tol
    cp = bool(hermitian and is_psd(choi, tol))
    # trace preservation: sum_a L[(a, a), (a', b')] = delta_{a' b'}
    t = transfer.reshape(d_out, d_out, d_in, d_in)
    traced = np.einsum("aacd->cd", t)
    tp = bool(np.max(np.abs(traced - np.eye(d_in)), initial=0.0) <= tol)
    return ChoiReport(choi, cp, tp)


def partial_trace(rho, dims: Sequence[int], traced: int | Sequence[int]) -> np.ndarray:
    """Trace out the subsystems listed in ``traced`` (indices into ``dims``)."""
    dims = [int(d) for d in dims]
    rho = np.asarray(rho, dtype=complex)
    n = int(np.prod(dims))
    if rho.shape != (n, n):
        raise ValueError(f"state of shape {rho.shape} does not factor as {dims}")
    traced = {traced} if isinstance(traced, (int, np.integer)) else set(traced)
    if not traced <= set(range(len(dims))):
        raise ValueError(f"no subsystem {sorted(traced - set(range(len(dims))))}")
    k = len(dims)
    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows = list(letters[:k])
    cols = list(letters[k:2 * k])
    for i in traced:
        cols[i] = rows[i]
    kept = [i for i in range(k) if i not in traced]
    out = "".join(rows[i] for i in kept) + "".join(cols[i] for i in kept)
    m = int(np.prod([dims[i] for i in kept]))
    return np.einsum("".join(rows) + "".join(cols) + "->" + out, t).reshape(m, m)


def random_kraus(rng: np.random.Generator, d_in: int, d_out: int, n: int,
                 trace_preserving: bool = True) -> CPMap:
    """Complex-Gaussian Kraus operators, optionally rescaled to be TP."""
    k = rng.normal(size=(n, d_out, d_in)) + 1j * rng.normal(size=(n, d_out, d_in))
    if trace_preserving:
        s = np.einsum("mab,mac->bc", k.conj(), k)
        w, v = np.linalg.eigh(s)
        k = k @ (v @ np.diag(w ** -0.5) @ v.conj().T)
    return CPMap(tuple(k))
