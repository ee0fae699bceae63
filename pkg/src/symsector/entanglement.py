"""Rényi and von Neumann entropies of reduced states, and the rescaled variable ``s``.

All entropies are in nats. The rescaled entanglement ``s`` is defined through
``E_q = n_A log d + log(s) / (1 - q)``; for ``q = 2`` it equals
``d**n_A * tr(rho_A**2)`` and ``s = 1`` means maximal entanglement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .qudit import DensityOperator, hermitian_spectrum

ZERO_CLAMP = 1e-14
RANK_TOL = 1e-12
DEFAULT_HEAD = 4


def _spectrum(rho) -> np.ndarray:
    if isinstance(rho, DensityOperator) or np.ndim(rho) == 2:
        return hermitian_spectrum(rho)
    return np.asarray(rho, dtype=np.float64)


def renyi_from_spectrum(eigs: np.ndarray, q: float) -> np.ndarray:
    """Rényi-``q`` entropy of one spectrum or of a stack of spectra (last axis)."""
    if q < 0:
        raise ConfigError(f"Rényi index must be non-negative, got {q}")
    lam = np.where(np.asarray(eigs, dtype=np.float64) < ZERO_CLAMP, 0.0, eigs)
    if q == 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(lam > 0, lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)
        return -terms.sum(axis=-1) + 0.0
    if q == 0:
        return np.log(np.count_nonzero(lam > RANK_TOL, axis=-1))
    if math.isinf(q):
        return -np.log(lam.max(axis=-1))
    return np.log((lam**q).sum(axis=-1)) / (1.0 - q)


def renyi_entropy(rho, q: float) -> float:
    """``log(tr rho**q) / (1 - q)``; ``q=1`` von Neumann, ``q=0`` log-rank, ``q=inf`` min-entropy.

    ``rho`` may be a :class:`DensityOperator`, a Hermitian matrix, or an
    eigenvalue list.
    """
    return float(renyi_from_spectrum(_spectrum(rho), q))


def von_neumann_entropy(rho) -> float:
    return renyi_entropy(rho, 1)


def rescaled_s(entropy_q, q: float, n_A: int, d: int):
    """Invert ``E_q = n_A log d + log(s)/(1-q)``; works elementwise on arrays."""
    if q == 1:
        raise ConfigError("the rescaled entanglement s is undefined for q = 1")
    return np.exp((1.0 - q) * (np.asarray(entropy_q) - n_A * math.log(d)))


@dataclass(frozen=True)
class EntanglementRecord:
    E1: float
    Eq: float
    q: float
    s: float
    spectrum_head: tuple


def entanglement_record(rho, q: float, n_A: int, d: int, head: int = DEFAULT_HEAD) -> EntanglementRecord:
    eigs = _spectrum(rho)
    e1 = float(renyi_from_spectrum(eigs, 1))
    eq = float(renyi_from_spectrum(eigs, q))
    s = float(rescaled_s(eq, q, n_A, d)) if q != 1 else math.nan
    padded = np.zeros(head)
    padded[:min(head, len(eigs))] = eigs[:head]
    return EntanglementRecord(e1, eq, q, s, tuple(float(x) for x in padded))
