"""Complex linear algebra on truncated level bases.

Operators live on a basis indexed by a uniformly spaced ladder of "levels"
(weights of the compact rotation generator) times a small fiber (the spinor
index).  Everything is dense; the optional ``shift_degree`` tag records that
an operator only connects level n to level n + k, which lets tests reason
about band structure cheaply.  Truncation simply drops states beyond the
cutoff, so identities that hold on the infinite ladder are checked through
an interior projector that masks the contaminated boundary levels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "BasisDescriptor",
    "TruncatedOperator",
    "AntilinearOperator",
    "InteriorProjector",
    "commutator",
    "anticommutator",
    "adjoint",
    "op_norm",
    "frobenius_norm",
    "interior_residual",
    "bch_terms",
    "antilinear_conjugate",
]


class BasisMismatchError(ValueError):
    """Raised when two operands live on different bases."""


@dataclass(frozen=True)
class BasisDescriptor:
    """An ordered ladder of levels with a fiber attached to each level.

    ``levels`` must be strictly increasing with spacing 1 and symmetric about
    zero (all half-odd integers for the spinor basis, all integers for the
    scalar weight lattices of the representation module).
    """

    levels: tuple[float, ...]
    fiber_dim: int = 2

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        if lv.size < 2:
            raise ValueError("need at least two levels")
        if self.fiber_dim < 1:
            raise ValueError("fiber_dim must be positive")
        if not np.allclose(np.diff(lv), 1.0, atol=1e-12):
            raise ValueError("levels must be uniformly spaced with spacing 1")
        if not np.allclose(lv + lv[::-1], 0.0, atol=1e-12):
            raise ValueError("levels must be symmetric about 0")

    @classmethod
    def spinor(cls, nmax: int) -> "BasisDescriptor":
        """Half-integer levels n with |n| <= nmax - 1/2 and a 2-dim fiber."""
        if nmax < 1:
            raise ValueError("nmax must be a positive integer")
        lv = tuple(float(x) for x in np.arange(-nmax + 0.5, nmax + 0.5))
        return cls(levels=lv, fiber_dim=2)

    @classmethod
    def weight_lattice(cls, nmax: int, lattice: str = "half_integer") -> "BasisDescriptor":
        """Scalar (1-dim fiber) ladder on the integer or half-integer lattice."""
        if nmax < 1:
            raise ValueError("nmax must be a positive integer")
        if lattice == "half_integer":
            lv = tuple(float(x) for x in np.arange(-nmax + 0.5, nmax + 0.5))
        elif lattice == "integer":
            lv = tuple(float(x) for x in np.arange(-float(nmax), nmax + 1.0))
        else:
            raise ValueError(f"unknown lattice {lattice!r}")
        return cls(levels=lv, fiber_dim=1)

    @property
    def nlevels(self) -> int:
        return len(self.levels)

    @property
    def dim(self) -> int:
        return self.fiber_dim * len(self.levels)

    @property
    def nmax(self) -> int:
        """Number of positive levels (equals the spinor-basis cutoff)."""
        return sum(1 for n in self.levels if n > 0)

    @property
    def max_level(self) -> float:
        return self.levels[-1]

    def level_index(self, n: float) -> int:
        i = int(round(n - self.levels[0]))
        if not (0 <= i < len(self.levels)) or abs(self.levels[i] - n) > 1e-9:
            raise KeyError(f"level {n} not in basis")
        return i

    def index(self, n: float, sigma: int = 0) -> int:
        """Flat index of |n, sigma>; storage is level-major, fiber-minor."""
        if not (0 <= sigma < self.fiber_dim):
            raise KeyError(f"fiber index {sigma} out of range")
        return self.level_index(n) * self.fiber_dim + sigma

    def level_slice(self, n: float) -> slice:
        i = self.level_index(n) * self.fiber_dim
        return slice(i, i + self.fiber_dim)


def _frozen_matrix(mat: np.ndarray, dim: int) -> np.ndarray:
    out = np.array(mat, dtype=complex)
    if out.shape != (dim, dim):
        raise ValueError(f"matrix shape {out.shape} does not match basis dim {dim}")
    out.setflags(write=False)
    return out


def _merge_shift(a: int | None, b: int | None) -> int | None:
    return a if a == b else None


@dataclass(frozen=True)
class TruncatedOperator:
    """A dense complex matrix on a :class:`BasisDescriptor`.

    ``shift_degree = k`` asserts that the operator maps level n to level n+k
    only; it is advisory metadata validated at construction, never a storage
    format.
    """

    basis: BasisDescriptor
    mat: np.ndarray
    shift_degree: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "mat", _frozen_matrix(self.mat, self.basis.dim))
        if self.shift_degree is not None:
            off = self._off_band_max(self.shift_degree)
            if off > 0.0:
                raise ValueError(
                    f"operator has entries off the declared shift band k={self.shift_degree}"
                )

    def _off_band_max(self, k: int) -> float:
        b = self.basis
        li = np.repeat(np.arange(b.nlevels), b.fiber_dim)
        off_band = (li[:, None] - li[None, :]) != k
        if not off_band.any():
            return 0.0
        return float(np.abs(self.mat[off_band]).max())

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, basis: BasisDescriptor) -> "TruncatedOperator":
        return cls(basis, np.zeros((basis.dim, basis.dim), dtype=complex), shift_degree=0)

    @classmethod
    def identity(cls, basis: BasisDescriptor) -> "TruncatedOperator":
        return cls(basis, np.eye(basis.dim, dtype=complex), shift_degree=0)

    @classmethod
    def from_fiber(cls, basis: BasisDescriptor, fiber: np.ndarray) -> "TruncatedOperator":
        """Same fiber matrix at every level (level-scalar operator)."""
        mat = np.kron(np.eye(basis.nlevels), np.asarray(fiber, dtype=complex))
        return cls(basis, mat, shift_degree=0)

    @classmethod
    def from_level_diagonal(cls, basis: BasisDescriptor,
                            block: Callable[[float], np.ndarray]) -> "TruncatedOperator":
        """Level-diagonal operator with fiber block ``block(n)`` at level n."""
        d = basis.fiber_dim
        mat = np.zeros((basis.dim, basis.dim), dtype=complex)
        for n in basis.levels:
            s = basis.level_slice(n)
            mat[s, s] = np.asarray(block(n), dtype=complex).reshape(d, d)
        return cls(basis, mat, shift_degree=0)

    @classmethod
    def from_shift(cls, basis: BasisDescriptor, k: int,
                   block: Callable[[float], np.ndarray]) -> "TruncatedOperator":
        """Banded operator |n> -> |n+k> with fiber block ``block(n)``.

        Bands leaving the truncation window are dropped (the shift
        annihilates the outermost levels).
        """
        d = basis.fiber_dim
        mat = np.zeros((basis.dim, basis.dim), dtype=complex)
        for n in basis.levels:
            m = n + k
            if m < basis.levels[0] - 1e-9 or m > basis.levels[-1] + 1e-9:
                continue
            mat[basis.level_slice(m), basis.level_slice(n)] = \
                np.asarray(block(n), dtype=complex).reshape(d, d)
        return cls(basis, mat, shift_degree=k)

    # -- band access -------------------------------------------------------

    def band_block(self, n: float, k: int) -> np.ndarray:
        """The fiber block mapping level n to level n+k."""
        return self.mat[self.basis.level_slice(n + k), self.basis.level_slice(n)]

    # -- algebra -----------------------------------------------------------

    def _check(self, other: "TruncatedOperator"):
        if self.basis != other.basis:
            raise BasisMismatchError("operands live on different bases")

    def __add__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        self._check(other)
        return TruncatedOperator(self.basis, self.mat + other.mat,
                                 _merge_shift(self.shift_degree, other.shift_degree))

    def __sub__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        self._check(other)
        return TruncatedOperator(self.basis, self.mat - other.mat,
                                 _merge_shift(self.shift_degree, other.shift_degree))

    def __neg__(self) -> "TruncatedOperator":
        return TruncatedOperator(self.basis, -self.mat, self.shift_degree)

    def __mul__(self, scalar: complex) -> "TruncatedOperator":
        return TruncatedOperator(self.basis, self.mat * scalar, self.shift_degree)

    __rmul__ = __mul__

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        self._check(other)
        k = None
        if self.shift_degree is not None and other.shift_degree is not None:
            k = self.shift_degree + other.shift_degree
        return TruncatedOperator(self.basis, self.mat @ other.mat, k)

    def adjoint(self) -> "TruncatedOperator":
        k = None if self.shift_degree is None else -self.shift_degree
        return TruncatedOperator(self.basis, self.mat.conj().T, k)

    def power(self, p: int) -> "TruncatedOperator":
        """Integer power; negative p uses the adjoint (valid for unitaries)."""
        base = self if p >= 0 else self.adjoint()
        out = TruncatedOperator.identity(self.basis)
        for _ in range(abs(p)):
            out = out @ base
        return out

    def norm(self) -> float:
        return op_norm(self)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.mat @ np.asarray(v, dtype=complex)


def commutator(a: TruncatedOperator, b: TruncatedOperator) -> TruncatedOperator:
    """AB - BA."""
    return a @ b - b @ a


def anticommutator(a: TruncatedOperator, b: TruncatedOperator) -> TruncatedOperator:
    """AB + BA."""
    return a @ b + b @ a


def adjoint(a: TruncatedOperator) -> TruncatedOperator:
    return a.adjoint()


def op_norm(a: TruncatedOperator | np.ndarray) -> float:
    """Spectral norm (largest singular value)."""
    mat = a.mat if isinstance(a, TruncatedOperator) else np.asarray(a)
    if mat.size == 0:
        return 0.0
    return float(np.linalg.norm(mat, 2))


def frobenius_norm(a: TruncatedOperator | np.ndarray) -> float:
    mat = a.mat if isinstance(a, TruncatedOperator) else np.asarray(a)
    return float(np.linalg.norm(mat))


@dataclass(frozen=True)
class AntilinearOperator:
    """v -> mat @ conj(v); represents charge conjugation C and the real
    structure J of finite triples."""

    basis: BasisDescriptor
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", _frozen_matrix(self.mat, self.basis.dim))

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.mat @ np.conj(np.asarray(v, dtype=complex))

    def compose(self, other: "AntilinearOperator") -> TruncatedOperator:
        """self o other is linear with matrix M1 conj(M2)."""
        if self.basis != other.basis:
            raise BasisMismatchError("operands live on different bases")
        return TruncatedOperator(self.basis, self.mat @ np.conj(other.mat))

    def squared(self) -> TruncatedOperator:
        return self.compose(self)

    def after(self, a: TruncatedOperator) -> "AntilinearOperator":
        """self o a (antilinear), matrix M conj(A)."""
        if self.basis != a.basis:
            raise BasisMismatchError("operands live on different bases")
        return AntilinearOperator(self.basis, self.mat @ np.conj(a.mat))

    def before(self, a: TruncatedOperator) -> "AntilinearOperator":
        """a o self (antilinear), matrix A M."""
        if self.basis != a.basis:
            raise BasisMismatchError("operands live on different bases")
        return AntilinearOperator(self.basis, a.mat @ self.mat)


def antilinear_conjugate(c: AntilinearOperator, a: TruncatedOperator) -> TruncatedOperator:
    """The opposite-algebra element C a* C (a* the adjoint), a linear map.

    Composing the three maps gives the matrix M a^T conj(M).
    """
    if c.basis != a.basis:
        raise BasisMismatchError("operands live on different bases")
    return TruncatedOperator(c.basis, c.mat @ a.mat.T @ np.conj(c.mat))


@dataclass(frozen=True)
class InteriorProjector:
    """Orthogonal projector onto levels with |n| <= max_level - margin."""

    basis: BasisDescriptor
    margin: int = 0

    def __post_init__(self):
        if self.margin < 0:
            raise ValueError("margin must be nonnegative")
        if self.margin >= self.basis.nmax:
            raise ValueError(f"margin {self.margin} >= nmax {self.basis.nmax}")

    @property
    def kept_levels(self) -> tuple[float, ...]:
        cut = self.basis.max_level - self.margin
        return tuple(n for n in self.basis.levels if abs(n) <= cut + 1e-9)

    def diagonal(self) -> np.ndarray:
        cut = self.basis.max_level - self.margin
        keep = np.array([abs(n) <= cut + 1e-9 for n in self.basis.levels])
        return np.repeat(keep, self.basis.fiber_dim).astype(float)

    def operator(self) -> TruncatedOperator:
        return TruncatedOperator(self.basis, np.diag(self.diagonal()), shift_degree=0)

    def compress(self, a: TruncatedOperator | np.ndarray) -> np.ndarray:
        """P A P restricted to the kept rows/columns."""
        mat = a.mat if isinstance(a, TruncatedOperator) else np.asarray(a)
        keep = self.diagonal() > 0.5
        return mat[np.ix_(keep, keep)]


def interior_residual(a: TruncatedOperator, margin: int) -> float:
    """Spectral norm of P A P; asserts "A = 0 away from the cutoff"."""
    proj = InteriorProjector(a.basis, margin)
    return op_norm(proj.compress(a))


def interior_frobenius(a: TruncatedOperator, margin: int) -> float:
    proj = InteriorProjector(a.basis, margin)
    return float(np.linalg.norm(proj.compress(a)))


def bch_terms(generator: TruncatedOperator, f: TruncatedOperator,
              kmax: int) -> list[TruncatedOperator]:
    """Terms ad_G^k(f) / k! for k = 0..kmax.

    Term k is the k-th Taylor coefficient of e^{tG} f e^{-tG} at t = 0; with
    G the stored antihermitian generator iH this is the expansion of the
    evolved algebra element.
    """
    if kmax < 0:
        raise ValueError("kmax must be nonnegative")
    terms = [f]
    for k in range(1, kmax + 1):
        terms.append(commutator(generator, terms[-1]) * (1.0 / k))
    return terms
