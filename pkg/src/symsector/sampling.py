"""Haar-random states inside a sector, reproducible per sample index.

Each sample owns a Philox4x64 stream keyed by the master seed whose counter's
top word is the sample index, so sample ``i`` is the same no matter how the
samples are split among workers. Coordinates are i.i.d. standard complex
Gaussians over the sector's orthonormal basis, then normalised; the result
is uniform on the unit sphere of the sector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError
from .qudit import PureState, QuditGeometry
from .sectors import SubspaceBasis

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    sample_index: int

    def __post_init__(self):
        if self.sample_index < 0:
            raise ConfigError("sample_index must be non-negative")

    def generator(self) -> np.random.Generator:
        counter = [0, 0, 0, self.sample_index & _MASK64]
        return np.random.Generator(np.random.Philox(key=self.master_seed & _MASK64,
                                                    counter=counter))


def gaussian_coordinates(dim: int, seed: SeedSpec) -> np.ndarray:
    """Normalised complex Gaussian vector of length ``dim`` drawn from ``seed``'s stream."""
    if dim < 1:
        raise ConfigError("cannot sample from an empty basis")
    rng = seed.generator()
    while True:
        z = rng.standard_normal(2 * dim)
        coords = z[:dim] + 1j * z[dim:]
        norm = np.linalg.norm(coords)
        if norm > 0.0:
            return coords / norm


def batch_coordinates(dim: int, master_seed: int, start: int, stop: int) -> np.ndarray:
    """Stack of :func:`gaussian_coordinates` for sample indices ``start..stop-1``."""
    out = np.empty((stop - start, dim), dtype=np.complex128)
    for row, index in enumerate(range(start, stop)):
        out[row] = gaussian_coordinates(dim, SeedSpec(master_seed, index))
    return out


def sample_sector_state(basis: SubspaceBasis, seed: SeedSpec,
                        geometry: Optional[QuditGeometry] = None,
                        expand: bool = True) -> PureState:
    """Draw one Haar-random state from the span of ``basis``.

    Args:
        basis: orthonormal sector basis.
        seed: (master seed, sample index) pair selecting the random stream.
        geometry: bipartition attached to the returned state; defaults to
            ``n_A = n // 2``.
        expand: return the full-space vector (default) or sector coordinates.
    """
    if len(basis) == 0:
        raise ConfigError("cannot sample from an empty basis")
    if geometry is None:
        geometry = QuditGeometry(basis.n, basis.d, max(1, basis.n // 2))
    elif (geometry.n, geometry.d) != (basis.n, basis.d):
        raise ConfigError("geometry does not match the basis")
    coords = gaussian_coordinates(len(basis), seed)
    if not expand:
        return PureState(geometry, coords, basis)
    return PureState(geometry, basis.expand(coords))
