"""Dense n-qudit states, basis-index arithmetic, site permutations and partial traces.

Computational basis strings ``c = c_1 ... c_n`` are encoded big-endian: site 1
is the most significant base-``d`` digit. The bipartition is always the
leading block ``A = sites 1..n_A``, so reshaping a state vector to
``(d**n_A, d**(n - n_A))`` puts subsystem A on the rows.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, EigensolverError, SizeCapError

DEFAULT_SIZE_CAP = 2**24
_INDEX_LIMIT = 2**62

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10


def size_cap() -> int:
    """Largest ``d**n`` any constructor will build (``SYMSECTOR_SIZE_CAP`` overrides)."""
    raw = os.environ.get("SYMSECTOR_SIZE_CAP")
    if raw is None:
        return DEFAULT_SIZE_CAP
    try:
        cap = int(float(raw))
    except ValueError:
        raise ConfigError(f"SYMSECTOR_SIZE_CAP must be an integer, got {raw!r}")
    if cap < 1:
        raise ConfigError("SYMSECTOR_SIZE_CAP must be positive")
    return cap


def check_size(n: int, d: int) -> int:
    """Return ``d**n`` or raise :class:`SizeCapError` if it is above the cap."""
    dim = d**n
    cap = size_cap()
    if dim > cap:
        raise SizeCapError(f"d**n = {d}**{n} = {dim} exceeds size cap {cap}")
    return dim


@dataclass(frozen=True)
class QuditGeometry:
    """Site count ``n``, local dimension ``d`` and size ``n_A`` of the leading block A."""

    n: int
    d: int
    n_A: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.n}")
        if int(self.d) != self.d or self.d < 2:
            raise ConfigError(f"d must be an integer >= 2, got {self.d}")
        if int(self.n_A) != self.n_A or not 1 <= self.n_A <= self.n - 1:
            raise ConfigError(f"n_A must satisfy 1 <= n_A <= n-1, got n_A={self.n_A}, n={self.n}")
        if self.d**self.n >= _INDEX_LIMIT:
            raise ConfigError(f"d**n = {self.d}**{self.n} overflows the 64-bit index type")

    @property
    def n_B(self) -> int:
        """Size of the complement block Ā."""
        return self.n - self.n_A

    @property
    def dim(self) -> int:
        return self.d**self.n

    @property
    def dim_A(self) -> int:
        return self.d**self.n_A

    @property
    def dim_B(self) -> int:
        return self.d**self.n_B


# ---------------------------------------------------------------------------
# index arithmetic


def encode_index(digits: Sequence[int], d: int, n: Optional[int] = None) -> int:
    """Map a base-``d`` digit string to its computational-basis index.

    >>> encode_index([1, 0, 1, 0], 2)
    10
    """
    digits = list(digits)
    if n is not None and len(digits) != n:
        raise ConfigError(f"expected {n} digits, got {len(digits)}")
    index = 0
    for c in digits:
        if int(c) != c or not 0 <= c < d:
            raise ConfigError(f"digit {c!r} out of range 0..{d - 1}")
        index = index * d + int(c)
    return index


def decode_index(index: int, n: int, d: int) -> tuple[int, ...]:
    """Inverse of :func:`encode_index`."""
    if not 0 <= index < d**n:
        raise ConfigError(f"index {index} out of range for d={d}, n={n}")
    digits = []
    for _ in range(n):
        index, c = divmod(index, d)
        digits.append(c)
    return tuple(reversed(digits))


def digits_array(indices, n: int, d: int) -> np.ndarray:
    """Vectorised decode: an ``(len(indices), n)`` array of digits, site 1 first."""
    indices = np.asarray(indices, dtype=np.int64)
    out = np.empty(indices.shape + (n,), dtype=np.int64)
    rest = indices.copy()
    for site in range(n - 1, -1, -1):
        out[..., site] = rest % d
        rest //= d
    return out


def rotate_string(digits: Sequence[int], k: int = 1) -> tuple[int, ...]:
    """Right cyclic rotation applied ``k`` times: ``c_1..c_n -> c_n c_1..c_{n-1}``."""
    digits = tuple(digits)
    if k < 0:
        raise ConfigError("rotation count must be non-negative")
    if not digits:
        return digits
    k %= len(digits)
    if k == 0:
        return digits
    return digits[-k:] + digits[:-k]


def rotate_indices(indices, n: int, d: int, k: int = 1) -> np.ndarray:
    """Vectorised :func:`rotate_string` acting on encoded indices."""
    out = np.asarray(indices, dtype=np.int64).copy()
    top = d ** (n - 1)
    for _ in range(k % n):
        out = (out % d) * top + out // d
    return out


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector in full-space form (length ``d**n``) or sector coordinates.

    In coordinate form ``basis`` references the :class:`~symsector.sectors.SubspaceBasis`
    whose elements the amplitudes multiply.
    """

    geometry: QuditGeometry
    amplitudes: np.ndarray
    basis: Optional[object] = field(default=None, repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1:
            raise ConfigError("amplitudes must be a 1-d vector")
        expected = len(self.basis) if self.basis is not None else self.geometry.dim
        if amps.shape[0] != expected:
            raise ConfigError(f"expected {expected} amplitudes, got {amps.shape[0]}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ConfigError(f"state is not normalised: |psi|^2 = {norm2!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def is_full(self) -> bool:
        return self.basis is None

    def full(self) -> "PureState":
        """Return the same state in full-space form."""
        if self.basis is None:
            return self
        return PureState(self.geometry, self.basis.expand(self.amplitudes))

    def with_geometry(self, geometry: QuditGeometry) -> "PureState":
        return PureState(geometry, self.amplitudes, self.basis)


def _require_full(state: PureState) -> np.ndarray:
    if not state.is_full:
        raise ConfigError("operation needs a full-space state; call state.full() first")
    return state.amplitudes


def basis_state(geometry: QuditGeometry, digits: Sequence[int]) -> PureState:
    amps = np.zeros(geometry.dim, dtype=np.complex128)
    amps[encode_index(digits, geometry.d, geometry.n)] = 1.0
    return PureState(geometry, amps)


def apply_translation(state: PureState, k: int = 1) -> PureState:
    """Apply ``u(T)^k`` where ``T`` shifts every qudit one site to the right."""
    amps = _require_full(state)
    g = state.geometry
    target = rotate_indices(np.arange(g.dim), g.n, g.d, k)
    out = np.empty_like(amps)
    out[target] = amps
    return PureState(g, out)


def apply_site_permutation(state: PureState, perm: Sequence[int]) -> PureState:
    """Move the qudit on site ``i`` to site ``perm[i-1]`` (sites and ``perm`` are 1-based).

    ``u(sigma) u(tau) = u(sigma o tau)``; the cyclic permutation ``i -> i+1``
    reproduces :func:`apply_translation` with ``k=1``.
    """
    amps = _require_full(state)
    g = state.geometry
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(1, g.n + 1)):
        raise ConfigError(f"{perm} is not a permutation of 1..{g.n}")
    tensor = amps.reshape((g.d,) * g.n)
    moved = np.moveaxis(tensor, list(range(g.n)), [p - 1 for p in perm])
    return PureState(g, np.ascontiguousarray(moved).reshape(-1))


# ---------------------------------------------------------------------------
# density operators


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semidefinite matrix (validated on construction)."""

    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConfigError(f"density operator must be square, got shape {m.shape}")
        if self.validate:
            if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
                raise ConfigError("matrix is not Hermitian")
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise ConfigError(f"trace {tr!r} differs from 1")
            if np.linalg.eigvalsh(m)[0] < -PSD_TOL:
                raise ConfigError("matrix has a negative eigenvalue")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.einsum("ij,ji->", self.matrix, self.matrix).real)


def _amplitude_matrix(state: PureState) -> np.ndarray:
    g = state.geometry
    return _require_full(state).reshape(g.dim_A, g.dim_B)


def partial_trace(state: PureState, keep: str = "A") -> DensityOperator:
    """Reduced state ``rho_A = tr_Ā |psi><psi|`` (or ``rho_Ā`` with ``keep="B"``)."""
    m = _amplitude_matrix(state)
    if keep == "A":
        rho = m @ m.conj().T
    elif keep == "B":
        rho = m.T @ m.conj()
    else:
        raise ConfigError(f"keep must be 'A' or 'B', got {keep!r}")
    return DensityOperator(rho)


def reduced_density_matrices(amplitudes: np.ndarray, geometry: QuditGeometry) -> np.ndarray:
    """Batched ``rho_A`` for a stack of full-space state vectors, shape ``(S, dA, dA)``."""
    m = np.asarray(amplitudes).reshape(-1, geometry.dim_A, geometry.dim_B)
    return m @ m.conj().transpose(0, 2, 1)


def hermitian_spectrum(rho) -> np.ndarray:
    """Eigenvalues in descending order with negative round-off clamped to zero."""
    matrix = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)
    try:
        eigs = np.linalg.eigvalsh(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(str(exc)) from exc
    eigs = np.clip(eigs[..., ::-1], 0.0, None)
    return eigs
