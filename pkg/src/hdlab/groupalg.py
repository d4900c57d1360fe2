"""Finite abelian groups and the spiders built on their group algebras.

The group-element basis of C[G] carries the white (``"basis"``) classical
structure; the normalised character vectors carry the black
(``"fourier"``) one. Characters are labelled by group elements through the
canonical self-duality, so both bases share one enumeration order.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .tensor import approx_eq

Element = tuple[int, ...]

BASIS = "basis"
FOURIER = "fourier"

_FACTOR = re.compile(r"z(\d+)")


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Product of cyclic groups Z_{n1} x ... x Z_{nm}.

    Elements are tuples reduced modulo the factor orders and are enumerated
    lexicographically; that order is the index order of every tensor axis
    over C[G].
    """

    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(n) for n in self.factors)
        if not factors or any(n < 1 for n in factors):
            raise ValueError(f"invalid cyclic factors {self.factors}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteAbelianGroup":
        return cls((n,))

    @classmethod
    def parse(cls, spec: str) -> "FiniteAbelianGroup":
        """Parse ``"Z2"``, ``"z2xZ3"`` and the like (case-insensitive)."""
        parts = spec.strip().lower().split("x")
        factors = []
        for part in parts:
            m = _FACTOR.fullmatch(part.strip())
            if m is None or int(m.group(1)) < 1:
                raise ValueError(f"malformed group spec {spec!r}")
            factors.append(int(m.group(1)))
        return cls(tuple(factors))

    @property
    def spec(self) -> str:
        return "x".join(f"Z{n}" for n in self.factors)

    def __str__(self) -> str:
        return self.spec

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    @cached_property
    def elements(self) -> tuple[Element, ...]:
        return tuple(itertools.product(*(range(n) for n in self.factors)))

    @cached_property
    def _index(self) -> dict[Element, int]:
        return {g: i for i, g in enumerate(self.elements)}

    def index(self, g: Sequence[int]) -> int:
        return self._index[self.reduce(g)]

    def reduce(self, g: Sequence[int]) -> Element:
        if len(g) != len(self.factors):
            raise ValueError(f"element {tuple(g)} does not belong to {self.spec}")
        return tuple(int(x) % n for x, n in zip(g, self.factors))

    @property
    def identity(self) -> Element:
        return (0,) * len(self.factors)

    def multiply(self, g: Sequence[int], h: Sequence[int]) -> Element:
        return self.reduce([a + b for a, b in zip(self.reduce(g), self.reduce(h))])

    def inverse(self, g: Sequence[int]) -> Element:
        return self.reduce([-a for a in self.reduce(g)])

    def element_order(self, g: Sequence[int]) -> int:
        g = self.reduce(g)
        return math.lcm(*(n // math.gcd(a, n) for a, n in zip(g, self.factors)))

    def character(self, chi: Sequence[int], g: Sequence[int]) -> complex:
        """chi(g) = prod_j exp(2 pi i chi_j g_j / n_j)."""
        chi, g = self.reduce(chi), self.reduce(g)
        turns = sum(c * x / n for c, x, n in zip(chi, g, self.factors))
        return complex(np.exp(2j * np.pi * turns))

    @cached_property
    def character_table(self) -> np.ndarray:
        """``table[i, j] = chi_i(g_j)`` in element enumeration order."""
        els = np.array(self.elements, dtype=float).reshape(self.order, -1)
        n = np.array(self.factors, dtype=float)
        phase = (els / n) @ els.T
        return np.exp(2j * np.pi * phase)

    @cached_property
    def fourier_matrix(self) -> np.ndarray:
        """Unitary with row ``i`` the normalised character vector of chi_i."""
        return self.character_table / np.sqrt(self.order)

    @cached_property
    def inverse_permutation(self) -> np.ndarray:
        return np.array([self.index(self.inverse(g)) for g in self.elements])

    @cached_property
    def multiplication_table(self) -> np.ndarray:
        return np.array([[self.index(self.multiply(g, h)) for h in self.elements]
                         for g in self.elements])

    def inverse_pairs(self) -> list[tuple[Element, Element]]:
        """Non-identity elements grouped into ``{k, k^-1}`` classes."""
        seen, pairs = set(), []
        for k in self.elements:
            if k == self.identity or k in seen:
                continue
            kbar = self.inverse(k)
            seen.update((k, kbar))
            pairs.append((k, kbar))
        return pairs


def check_same_group(*groups: FiniteAbelianGroup) -> FiniteAbelianGroup:
    first = groups[0]
    for g in groups[1:]:
        if g != first:
            raise ValueError(f"mismatched groups {first.spec} and {g.spec}")
    return first


def character(group: FiniteAbelianGroup, chi, g) -> complex:
    return group.character(chi, g)


@dataclass(frozen=True)
class ClassicalStructure:
    group: FiniteAbelianGroup
    flavor: str = BASIS

    def __post_init__(self):
        if self.flavor not in (BASIS, FOURIER):
            raise ValueError(f"unknown flavor {self.flavor!r}")

    @property
    def dim(self) -> int:
        return self.group.order

    @property
    def basis(self) -> np.ndarray:
        """Columns are the classical states, in element order."""
        if self.flavor == BASIS:
            return np.eye(self.dim, dtype=complex)
        return self.group.fourier_matrix.T.copy()

    def dual(self) -> "ClassicalStructure":
        return ClassicalStructure(self.group, FOURIER if self.flavor == BASIS else BASIS)


@dataclass(frozen=True)
class PhaseFunction:
    """Angles theta_k (radians), one per group element."""

    group: FiniteAbelianGroup
    angles: tuple[float, ...]

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        if len(angles) != self.group.order:
            raise ValueError(
                f"{len(angles)} angles for a group of order {self.group.order}")
        object.__setattr__(self, "angles", angles)

    @classmethod
    def trivial(cls, group: FiniteAbelianGroup) -> "PhaseFunction":
        return cls(group, (0.0,) * group.order)

    @classmethod
    def from_map(cls, group: FiniteAbelianGroup,
                 theta: Callable[[Element], float]) -> "PhaseFunction":
        return cls(group, tuple(theta(g) for g in group.elements))

    @property
    def values(self) -> np.ndarray:
        """Unimodular psi_k = exp(i theta_k)."""
        return np.exp(1j * np.asarray(self.angles))

    def __getitem__(self, g) -> complex:
        return complex(self.values[self.group.index(g)])

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        psi = self.values
        return bool(np.max(np.abs(psi - psi[self.group.inverse_permutation])) <= tol)

    def conjugate(self) -> "PhaseFunction":
        return PhaseFunction(self.group, tuple(-a for a in self.angles))


def frobenius_product(psi: PhaseFunction, phi: PhaseFunction) -> PhaseFunction:
    """Pointwise product psi_k phi_k, i.e. angles added modulo 2 pi."""
    group = check_same_group(psi.group, phi.group)
    return PhaseFunction(group, tuple(
        math.remainder(a + b, 2 * math.pi) for a, b in zip(psi.angles, phi.angles)))


def fourier_transform(group: FiniteAbelianGroup, f) -> np.ndarray:
    """f_hat(chi) = sum_k chi(k) f(k), both indexed in element order."""
    f = np.asarray(f, dtype=complex)
    if f.shape != (group.order,):
        raise ValueError(f"expected {group.order} values, got shape {f.shape}")
    return group.character_table @ f


def inverse_fourier_transform(group: FiniteAbelianGroup, fhat) -> np.ndarray:
    fhat = np.asarray(fhat, dtype=complex)
    return group.character_table.conj().T @ fhat / group.order


def symmetry_witness(psi: PhaseFunction) -> np.ndarray:
    """Fourier transform of psi_k - psi_{k^-1}; identically zero iff symmetric."""
    vals = psi.values
    return fourier_transform(psi.group, vals - vals[psi.group.inverse_permutation])


def spider(structure: ClassicalStructure, legs_in: int, legs_out: int,
           phase: PhaseFunction | None = None) -> np.ndarray:
    """Unnormalised spider sum_k e^{i theta_k} |k>^(x n) <k|^(x m).

    Output legs come first in the axis order, then input legs. The classical
    states |k> are those of ``structure`` (characters for the black flavor)
    and the input legs carry their conjugates.
    """
    if legs_in < 0 or legs_out < 0 or legs_in + legs_out < 1:
        raise ValueError("a spider needs at least one leg")
    d = structure.dim
    weights = np.ones(d, dtype=complex) if phase is None else phase.values
    if phase is not None:
        check_same_group(phase.group, structure.group)
    if structure.flavor == BASIS:
        out = np.zeros((d,) * (legs_in + legs_out), dtype=complex)
        for k in range(d):
            out[(k,) * (legs_in + legs_out)] = weights[k]
        return out
    kets = structure.basis
    out = np.zeros((d,) * (legs_in + legs_out), dtype=complex)
    for k in range(d):
        factors = [kets[:, k]] * legs_out + [kets[:, k].conj()] * legs_in
        term = factors[0]
        for v in factors[1:]:
            term = np.multiply.outer(term, v)
        out += weights[k] * term
    return out


def antipode(structure: ClassicalStructure) -> np.ndarray:
    """Permutation matrix |g> -> |g^-1> on the group-element basis."""
    if structure.flavor != BASIS:
        raise ValueError("the antipode is defined on the group-element structure")
    d = structure.dim
    out = np.zeros((d, d), dtype=complex)
    out[structure.group.inverse_permutation, np.arange(d)] = 1.0
    return out


@dataclass(frozen=True)
class HopfResult:
    ok: bool
    residual: float
    scalar: float

    def __bool__(self) -> bool:
        return self.ok


def hopf_check(structure: ClassicalStructure, antipode_matrix=None,
               tol: float = 1e-12) -> HopfResult:
    """Black multiply . (id x antipode) . white copy  ~  |e><white counit|.

    Compared up to one positive scalar, which is returned (1/sqrt(d) for the
    unnormalised spiders used here). ``antipode_matrix`` overrides the
    antipode so corrupted versions can be probed.
    """
    white = ClassicalStructure(structure.group, BASIS)
    black = white.dual()
    s = antipode(white) if antipode_matrix is None else np.asarray(antipode_matrix)
    d = white.dim
    copy = spider(white, 1, 2)                # [o1, o2, i]
    mult = spider(black, 2, 1)                # [o, i1, i2]
    twisted = np.einsum("xi,abi->axb", s, copy)  # antipode on second copy output
    lhs = np.einsum("oxy,xyi->oi", mult, twisted)
    e = np.zeros(d, dtype=complex)
    e[white.group.index(white.group.identity)] = 1.0
    rhs = np.outer(e, spider(white, 1, 0))
    cmp = approx_eq(lhs, rhs, tol, mode="scalar")
    return HopfResult(cmp.ok, cmp.residual, cmp.scalar)


def phase_state(psi: PhaseFunction) -> np.ndarray:
    """sum_k e^{i theta_k} |k> in the group-element basis."""
    return psi.values.copy()


def groups_from_specs(specs: Iterable[str]) -> list[FiniteAbelianGroup]:
    return [FiniteAbelianGroup.parse(s) for s in specs]
