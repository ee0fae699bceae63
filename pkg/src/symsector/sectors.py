"""Orthonormal bases, dimensions and projectors of the symmetry sectors.

Four sector kinds are supported: the full space, the symmetric (bosonic) and
antisymmetric (fermionic) subspaces under site permutations, and the momentum
subspaces of the one-site cyclic translation ``T`` with eigenvalue
``exp(i*theta)``, ``theta = 2*pi*k/n``.

Momentum basis vectors are built per translation orbit. For an orbit with
representative ``c`` (lexicographically smallest string) and exact period
``p`` the vector

    |c>_theta = sqrt(alpha_c) * sum_{j=0}^{n-1} exp(-i*theta*j) T^j |c>,
    alpha_c = p / n**2,

is non-zero exactly when ``theta * p`` is a multiple of ``2*pi``; it then has
``p`` entries of modulus ``1/sqrt(p)`` and satisfies ``T|c>_theta =
exp(i*theta)|c>_theta``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, SectorNonexistentError, SizeCapError
from .qudit import QuditGeometry, check_size, digits_array, encode_index, rotate_indices

DEFAULT_PROJECTOR_CAP = 4096


class SectorKind(enum.Enum):
    FULL = "full"
    SYMMETRIC = "sym"
    ANTISYMMETRIC = "antisym"
    MOMENTUM = "mom"

    @classmethod
    def parse(cls, value) -> "SectorKind":
        if isinstance(value, cls):
            return value
        aliases = {"+": "sym", "-": "antisym", "symmetric": "sym",
                   "antisymmetric": "antisym", "momentum": "mom"}
        value = aliases.get(str(value).lower(), str(value).lower())
        try:
            return cls(value)
        except ValueError:
            raise ConfigError(f"unknown sector kind {value!r}") from None


@dataclass(frozen=True)
class SectorSpec:
    """A sector label together with the geometry it lives in.

    ``k`` is only meaningful for momentum sectors and is reduced modulo ``n``.
    """

    kind: SectorKind
    geometry: QuditGeometry
    k: int = 0

    def __post_init__(self):
        kind = SectorKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is SectorKind.MOMENTUM:
            object.__setattr__(self, "k", int(self.k) % self.geometry.n)
        else:
            object.__setattr__(self, "k", 0)
        if kind is SectorKind.ANTISYMMETRIC and self.geometry.n > self.geometry.d:
            raise SectorNonexistentError(
                f"antisymmetric sector needs n <= d, got n={self.geometry.n}, d={self.geometry.d}")

    @classmethod
    def make(cls, kind, n: int, d: int, n_A: int, k: int = 0) -> "SectorSpec":
        return cls(SectorKind.parse(kind), QuditGeometry(n, d, n_A), k)

    @property
    def n(self) -> int:
        return self.geometry.n

    @property
    def d(self) -> int:
        return self.geometry.d

    @property
    def theta(self) -> float:
        return 2 * math.pi * self.k / self.geometry.n

    @property
    def label(self) -> str:
        if self.kind is SectorKind.MOMENTUM:
            return f"mom(k={self.k})"
        return self.kind.value

    def as_dict(self) -> dict:
        g = self.geometry
        out = {"kind": self.kind.value, "n": g.n, "d": g.d, "n_A": g.n_A}
        if self.kind is SectorKind.MOMENTUM:
            out["k"] = self.k
            out["theta"] = self.theta
        return out


# ---------------------------------------------------------------------------
# translation orbits


@dataclass(frozen=True)
class OrbitClass:
    """A translation orbit (necklace) of configurations."""

    representative: tuple
    index: int
    period: int
    n: int

    @property
    def alpha(self) -> float:
        """Normalisation ``alpha_c = p_c / n**2`` of the momentum vector built from this orbit."""
        return self.period / self.n**2

    def admits(self, k: int) -> bool:
        """Whether ``|c>_theta`` is non-zero for ``theta = 2*pi*k/n``."""
        return (k * self.period) % self.n == 0


@lru_cache(maxsize=32)
def _orbit_table(n: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    dim = check_size(n, d)
    idx = np.arange(dim, dtype=np.int64)
    rep = idx.copy()
    period = np.zeros(dim, dtype=np.int64)
    current = idx
    for j in range(1, n + 1):
        current = rotate_indices(current, n, d, 1)
        np.minimum(rep, current, out=rep)
        newly = (period == 0) & (current == idx)
        period[newly] = j
    is_rep = rep == idx
    reps, periods = idx[is_rep], period[is_rep]
    reps.flags.writeable = False
    periods.flags.writeable = False
    return reps, periods


def enumerate_orbits(n: int, d: int) -> list[OrbitClass]:
    """All translation orbits of ``d**n`` configurations, sorted by representative."""
    reps, periods = _orbit_table(n, d)
    return [OrbitClass(tuple(int(c) for c in digits), int(r), int(p), n)
            for r, p, digits in zip(reps, periods, digits_array(reps, n, d))]


# ---------------------------------------------------------------------------
# bases


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal basis of a sector stored as sparse rows (CSR layout).

    Element ``i`` has support ``indices[indptr[i]:indptr[i+1]]`` with matching
    ``coeffs``. Entries within an element are sorted by full-space index.
    """

    kind: SectorKind
    n: int
    d: int
    k: int
    indptr: np.ndarray
    indices: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        for name in ("indptr", "indices", "coeffs"):
            getattr(self, name).flags.writeable = False

    def __len__(self) -> int:
        return len(self.indptr) - 1

    @property
    def dimension(self) -> int:
        return len(self)

    @property
    def full_dim(self) -> int:
        return self.d**self.n

    @property
    def theta(self) -> float:
        return 2 * math.pi * self.k / self.n

    def element(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.coeffs[lo:hi]

    def __iter__(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        for i in range(len(self)):
            yield self.element(i)

    def dense_element(self, i: int) -> np.ndarray:
        out = np.zeros(self.full_dim, dtype=np.complex128)
        idx, c = self.element(i)
        out[idx] = c
        return out

    def to_sparse(self) -> sp.csr_matrix:
        """``(D, d**n)`` sparse matrix whose rows are the basis vectors."""
        return sp.csr_matrix((self.coeffs, self.indices, self.indptr),
                             shape=(len(self), self.full_dim))

    def dense_rows(self, start: int, stop: int) -> np.ndarray:
        """Basis vectors ``start..stop-1`` as a dense ``(stop-start, d**n)`` array."""
        out = np.zeros((stop - start, self.full_dim), dtype=np.complex128)
        lo, hi = self.indptr[start], self.indptr[stop]
        rows = np.repeat(np.arange(stop - start), np.diff(self.indptr[start:stop + 1]))
        out[rows, self.indices[lo:hi]] = self.coeffs[lo:hi]
        return out

    def expand(self, coords: np.ndarray) -> np.ndarray:
        """Full-space vector(s) ``sum_i coords[..., i] b_i``."""
        coords = np.asarray(coords, dtype=np.complex128)
        if self.kind is SectorKind.FULL:
            return coords.copy()
        mat = self.to_sparse()
        if coords.ndim == 1:
            return mat.T @ coords
        return np.asarray((mat.T @ coords.T).T)

    def coordinates(self, vector: np.ndarray) -> np.ndarray:
        """Inner products ``<b_i|vector>``."""
        return self.to_sparse().conj() @ np.asarray(vector, dtype=np.complex128)


def _from_rows(kind, n, d, k, rows_idx, rows_coeff) -> SubspaceBasis:
    indptr = np.zeros(len(rows_idx) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(r) for r in rows_idx])
    if rows_idx:
        indices = np.concatenate(rows_idx).astype(np.int64)
        coeffs = np.concatenate(rows_coeff).astype(np.complex128)
    else:
        indices = np.zeros(0, dtype=np.int64)
        coeffs = np.zeros(0, dtype=np.complex128)
    return SubspaceBasis(kind, n, d, k, indptr, indices, coeffs)


def _sort_within_rows(indptr, indices, coeffs):
    row = np.repeat(np.arange(len(indptr) - 1), np.diff(indptr))
    order = np.lexsort((indices, row))
    return indices[order], coeffs[order]


def full_basis(n: int, d: int) -> SubspaceBasis:
    dim = check_size(n, d)
    return SubspaceBasis(SectorKind.FULL, n, d, 0, np.arange(dim + 1, dtype=np.int64),
                         np.arange(dim, dtype=np.int64), np.ones(dim, dtype=np.complex128))


def momentum_basis(spec: SectorSpec) -> SubspaceBasis:
    """Basis of ``H_{T,theta}``: one vector per orbit whose period is compatible with ``k``."""
    if spec.kind is not SectorKind.MOMENTUM:
        raise ConfigError(f"momentum_basis needs a momentum sector, got {spec.kind}")
    return _momentum_basis(spec.n, spec.d, spec.k)


def _phase(m: int, n: int) -> complex:
    """``exp(2 pi i m / n)`` with exact zeros for quarter turns."""
    z = complex(np.exp(2j * math.pi * (m % n) / n))
    re = 0.0 if abs(z.real) < 1e-15 else z.real
    im = 0.0 if abs(z.imag) < 1e-15 else z.imag
    return complex(re, im)


@lru_cache(maxsize=32)
def _momentum_basis(n: int, d: int, k: int) -> SubspaceBasis:
    reps, periods = _orbit_table(n, d)
    keep = (k * periods) % n == 0
    reps, periods = reps[keep], periods[keep]
    indptr = np.zeros(len(reps) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(periods)
    indices = np.empty(indptr[-1], dtype=np.int64)
    coeffs = np.empty(indptr[-1], dtype=np.complex128)
    current = reps.copy()
    for j in range(int(periods.max(initial=0))):
        live = periods > j
        pos = indptr[:-1][live] + j
        indices[pos] = current[live]
        coeffs[pos] = _phase(-k * j, n) / np.sqrt(periods[live])
        current = rotate_indices(current, n, d, 1)
    indices, coeffs = _sort_within_rows(indptr, indices, coeffs)
    return SubspaceBasis(SectorKind.MOMENTUM, n, d, k, indptr, indices, coeffs)


@lru_cache(maxsize=32)
def symmetric_basis(n: int, d: int) -> SubspaceBasis:
    """Normalised uniform superpositions over each occupation-number class (Dicke states).

    Elements are ordered by their lexicographically smallest string
    ``0^{m_0} 1^{m_1} ... (d-1)^{m_{d-1}}``.
    """
    dim = check_size(n, d)
    digits = digits_array(np.arange(dim), n, d)
    counts = np.stack([(digits == level).sum(axis=1) for level in range(d)], axis=1)
    _, group = np.unique(counts, axis=0, return_inverse=True)
    group = group.reshape(-1)
    # np.unique sorts occupation tuples; reorder groups by first (smallest) index.
    first = np.full(group.max() + 1, dim, dtype=np.int64)
    np.minimum.at(first, group, np.arange(dim))
    rank = np.empty_like(first)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    row = rank[group]
    order = np.lexsort((np.arange(dim), row))
    sizes = np.bincount(row)
    indptr = np.zeros(len(sizes) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(sizes)
    coeffs = (1.0 / np.sqrt(sizes[row[order]])).astype(np.complex128)
    return SubspaceBasis(SectorKind.SYMMETRIC, n, d, 0, indptr, order.astype(np.int64), coeffs)


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=32)
def antisymmetric_basis(n: int, d: int) -> SubspaceBasis:
    """One Slater determinant per ``n``-subset of the ``d`` levels."""
    if n > d:
        raise SectorNonexistentError(f"antisymmetric sector needs n <= d, got n={n}, d={d}")
    check_size(n, d)
    perms = list(itertools.permutations(range(n)))
    signs = np.array([_perm_sign(p) for p in perms], dtype=np.float64)
    norm = 1.0 / math.sqrt(math.factorial(n))
    rows_idx, rows_coeff = [], []
    for levels in itertools.combinations(range(d), n):
        idx = np.array([encode_index([levels[p[i]] for i in range(n)], d) for p in perms],
                       dtype=np.int64)
        order = np.argsort(idx)
        rows_idx.append(idx[order])
        rows_coeff.append(signs[order] * norm)
    return _from_rows(SectorKind.ANTISYMMETRIC, n, d, 0, rows_idx, rows_coeff)


def sector_basis(spec: SectorSpec) -> SubspaceBasis:
    kind = spec.kind
    if kind is SectorKind.FULL:
        return full_basis(spec.n, spec.d)
    if kind is SectorKind.SYMMETRIC:
        return symmetric_basis(spec.n, spec.d)
    if kind is SectorKind.ANTISYMMETRIC:
        return antisymmetric_basis(spec.n, spec.d)
    return momentum_basis(spec)


# ---------------------------------------------------------------------------
# dimensions and projectors


def momentum_dimension(n: int, d: int, k: int) -> int:
    _, periods = _orbit_table(n, d)
    return int(np.count_nonzero((k % n) * periods % n == 0))


def permutation_dimension(n: int, d: int, sign: int) -> int:
    """``binom(n+d-1, d-1)`` for bosons (``sign=+1``), ``binom(d, n)`` for fermions."""
    if sign > 0:
        return math.comb(n + d - 1, d - 1)
    if n > d:
        raise SectorNonexistentError(f"antisymmetric sector needs n <= d, got n={n}, d={d}")
    return math.comb(d, n)


def sector_dimension(spec: SectorSpec) -> int:
    kind = spec.kind
    if kind is SectorKind.FULL:
        return spec.d**spec.n
    if kind is SectorKind.SYMMETRIC:
        return permutation_dimension(spec.n, spec.d, +1)
    if kind is SectorKind.ANTISYMMETRIC:
        return permutation_dimension(spec.n, spec.d, -1)
    return momentum_dimension(spec.n, spec.d, spec.k)


def projector(basis: SubspaceBasis, cap: Optional[int] = None) -> np.ndarray:
    """Dense ``Pi = sum_b |b><b|``; refuses above ``cap`` (default 4096) full-space dimensions."""
    cap = DEFAULT_PROJECTOR_CAP if cap is None else cap
    if basis.full_dim > cap:
        raise SizeCapError(
            f"dense projector of dimension {basis.full_dim} exceeds cap {cap}; use apply_projector")
    mat = basis.to_sparse()
    return (mat.T @ mat.conj()).toarray()


def apply_projector(basis: SubspaceBasis, vector: np.ndarray) -> np.ndarray:
    """``Pi @ vector`` without materialising ``Pi``."""
    return basis.expand(basis.coordinates(vector))
