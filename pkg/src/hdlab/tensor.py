"""Dense complex tensors.

Every diagram in the library denotes into a plain ``numpy.ndarray`` of
dtype ``complex128``, laid out row-major (last index fastest). The helpers
here add the validation the rest of the package relies on: explicit
contraction pairs, permute-and-reshape, adjoints over an input/output split,
and tolerance comparisons (optionally up to a positive scalar).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


def as_tensor(data) -> np.ndarray:
    """Return ``data`` as a C-contiguous complex128 array."""
    return np.ascontiguousarray(data, dtype=np.complex128)


def contract(t1, t2, pairs: Sequence[tuple[int, int]]) -> np.ndarray:
    """Sum over paired axes of ``t1`` and ``t2``.

    The result carries the unpaired axes of ``t1`` followed by the unpaired
    axes of ``t2``, each group in its original order.
    """
    t1, t2 = as_tensor(t1), as_tensor(t2)
    axes1 = [int(p[0]) for p in pairs]
    axes2 = [int(p[1]) for p in pairs]
    if len(set(axes1)) != len(axes1) or len(set(axes2)) != len(axes2):
        raise ValueError(f"axis paired twice in {list(pairs)}")
    for a, b in zip(axes1, axes2):
        if not (0 <= a < t1.ndim and 0 <= b < t2.ndim):
            raise ValueError(f"axis pair ({a}, {b}) out of range")
        if t1.shape[a] != t2.shape[b]:
            raise ValueError(
                f"dimension mismatch on pair ({a}, {b}): "
                f"{t1.shape[a]} != {t2.shape[b]}"
            )
    return np.tensordot(t1, t2, axes=(axes1, axes2))


def rearrange(t, perm: Sequence[int] | None = None,
              shape: Sequence[int] | None = None) -> np.ndarray:
    """Permute axes, then optionally merge/split them into ``shape``.

    Merging is row-major flattening, so ``rearrange(m, shape=(d*d,))``
    followed by ``rearrange(v, shape=(d, d))`` round-trips.
    """
    t = as_tensor(t)
    if perm is not None:
        perm = [int(p) for p in perm]
        if sorted(perm) != list(range(t.ndim)):
            raise ValueError(f"{perm} is not a permutation of {t.ndim} axes")
        t = t.transpose(perm)
    if shape is not None:
        shape = tuple(int(s) for s in shape)
        if any(s <= 0 for s in shape) or int(np.prod(shape)) != t.size:
            raise ValueError(f"cannot regroup shape {t.shape} into {shape}")
        t = t.reshape(shape)
    return np.ascontiguousarray(t)


def conjugate(t) -> np.ndarray:
    return as_tensor(t).conj()


def _split(t: np.ndarray, n_out: int | None) -> int:
    if n_out is None:
        if t.ndim % 2:
            raise ValueError(
                f"rank-{t.ndim} tensor needs an explicit output/input split")
        return t.ndim // 2
    if not 0 <= n_out <= t.ndim:
        raise ValueError(f"bad output/input split {n_out} for rank {t.ndim}")
    return n_out


def transpose(t, n_out: int | None = None) -> np.ndarray:
    """Swap the output group (first ``n_out`` axes) with the input group."""
    t = as_tensor(t)
    k = _split(t, n_out)
    perm = list(range(k, t.ndim)) + list(range(k))
    return np.ascontiguousarray(t.transpose(perm))


def dagger(t, n_out: int | None = None) -> np.ndarray:
    return transpose(t, n_out).conj()


class AdjointViews(NamedTuple):
    conjugate: np.ndarray
    transpose: np.ndarray
    dagger: np.ndarray


def adjoint_views(t, n_out: int | None = None) -> AdjointViews:
    return AdjointViews(conjugate(t), transpose(t, n_out), dagger(t, n_out))


def frobenius_norm(t) -> float:
    return float(np.sqrt(np.sum(np.abs(as_tensor(t)) ** 2)))


@dataclass(frozen=True)
class Comparison:
    """Outcome of :func:`approx_eq`; truthy when the comparison holds.

    ``scalar`` is the fitted positive factor ``s`` with ``t1 ~ s * t2`` in
    scalar mode, and ``1.0`` in exact mode.
    """

    ok: bool
    residual: float
    scalar: float = 1.0

    def __bool__(self) -> bool:
        return self.ok


def approx_eq(t1, t2, tol: float = DEFAULT_TOL, mode: str = "exact") -> Comparison:
    """Compare two tensors entrywise.

    ``mode="exact"`` checks ``max |t1 - t2| <= tol``. ``mode="scalar"`` first
    fits the real ``s`` minimising ``||t1 - s t2||`` and requires ``s > 0``.
    """
    t1, t2 = as_tensor(t1), as_tensor(t2)
    if t1.shape != t2.shape:
        raise ValueError(f"shape mismatch: {t1.shape} vs {t2.shape}")
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    if mode == "exact":
        residual = float(np.max(np.abs(t1 - t2), initial=0.0))
        return Comparison(residual <= tol, residual)
    if mode != "scalar":
        raise ValueError(f"unknown comparison mode {mode!r}")
    norm2 = float(np.vdot(t2, t2).real)
    if norm2 == 0.0:
        residual = float(np.max(np.abs(t1), initial=0.0))
        return Comparison(False, residual, 0.0)
    s = float(np.vdot(t2, t1).real) / norm2
    residual = float(np.max(np.abs(t1 - s * t2), initial=0.0))
    return Comparison(s > 0 and residual <= tol, residual, s)
