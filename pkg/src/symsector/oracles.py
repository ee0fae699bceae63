"""Brute-force references built straight from the defining symmetry equations.

Nothing here uses the orbit enumeration or basis constructors of
:mod:`symsector.sectors`: sector projectors are obtained as the joint null
space of ``U - lambda*I`` over the group generators (adjacent transpositions
or the one-site shift), via a dense SVD. Only usable for small ``d**n``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import SizeCapError
from .sectors import SectorKind

ORACLE_CAP = 1024
NULL_TOL = 1e-9


def _digits(n, d):
    idx = np.arange(d**n)
    return np.array([[(x // d ** (n - 1 - i)) % d for i in range(n)] for x in idx])


def _encode(digits, d):
    weights = d ** np.arange(digits.shape[1] - 1, -1, -1)
    return digits @ weights


def site_permutation_matrix(n: int, d: int, perm) -> np.ndarray:
    """Dense ``u(sigma)``: the qudit on site ``i`` moves to site ``perm[i]`` (0-based)."""
    digits = _digits(n, d)
    moved = np.empty_like(digits)
    moved[:, list(perm)] = digits
    out = np.zeros((d**n, d**n))
    out[_encode(moved, d), np.arange(d**n)] = 1.0
    return out


def shift_matrix(n: int, d: int) -> np.ndarray:
    return site_permutation_matrix(n, d, [(i + 1) % n for i in range(n)])


def eigenspace_projector(operators, eigenvalues) -> np.ndarray:
    """Projector onto ``{v : U v = lambda v for every (U, lambda)}``."""
    dim = operators[0].shape[0]
    if dim > ORACLE_CAP:
        raise SizeCapError(f"oracle dimension {dim} exceeds {ORACLE_CAP}")
    stacked = np.vstack([u - lam * np.eye(dim) for u, lam in zip(operators, eigenvalues)])
    _, sv, vh = np.linalg.svd(stacked)
    sv = np.concatenate([sv, np.zeros(dim - len(sv))])
    null = vh[sv < NULL_TOL * max(1.0, sv.max(initial=0.0))].conj().T
    return null @ null.conj().T


def brute_force_projector(kind, n: int, d: int, k: int = 0) -> np.ndarray:
    kind = SectorKind.parse(kind)
    if kind is SectorKind.FULL:
        return np.eye(d**n)
    if kind is SectorKind.MOMENTUM:
        return eigenspace_projector([shift_matrix(n, d)], [np.exp(2j * math.pi * k / n)])
    sign = 1.0 if kind is SectorKind.SYMMETRIC else -1.0
    swaps = []
    for i in range(n - 1):
        perm = list(range(n))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        swaps.append(site_permutation_matrix(n, d, perm))
    if not swaps:
        return np.eye(d**n)
    return eigenspace_projector(swaps, [sign] * len(swaps))


def projector_rank(p: np.ndarray) -> int:
    return int(np.linalg.matrix_rank(p, tol=1e-8))


def brute_force_omega(kind, n: int, d: int, n_A: int, k: int = 0) -> np.ndarray:
    """``tr_Ā Pi / tr Pi`` from the brute-force projector."""
    p = brute_force_projector(kind, n, d, k)
    dim_a, dim_b = d**n_A, d ** (n - n_A)
    reduced = np.einsum("ajbj->ab", p.reshape(dim_a, dim_b, dim_a, dim_b))
    return reduced / np.trace(p).real
