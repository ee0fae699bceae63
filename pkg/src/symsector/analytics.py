"""Averaged reduced states, effective dimensions and analytic entanglement bounds.

The averaged state of a sector ``G`` on block A is
``Omega_G^(A) = tr_Ā Pi_G / D_G``; random states of the sector concentrate
around it. Everything here is exact linear algebra or closed-form arithmetic;
no sampling.

Closed forms that only hold for prime ``n`` (the momentum diagonal, the purity
upper bound and the derived entropy floor) raise :class:`RegimeError` for
composite ``n`` rather than extrapolate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .entanglement import renyi_from_spectrum
from .errors import ConfigError, RegimeError, SectorNonexistentError
from .qudit import DensityOperator, digits_array, hermitian_spectrum
from .sectors import (SectorKind, SectorSpec, SubspaceBasis, permutation_dimension,
                      sector_basis, sector_dimension)

RANK_TOL = 1e-12
LEVY_DENOMINATOR = 18 * math.pi**3


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, math.isqrt(n) + 1))


def _require_prime(n: int, what: str):
    if not is_prime(n):
        raise RegimeError(f"{what} requires prime n, got n={n}")


# ---------------------------------------------------------------------------
# averaged states


@dataclass(frozen=True, eq=False)
class OmegaState:
    sector: SectorSpec
    side: str
    rho: DensityOperator
    spectrum: np.ndarray
    rank: int
    purity: float
    entropy: float

    @property
    def matrix(self) -> np.ndarray:
        return self.rho.matrix


def averaged_reduced_matrix(basis: SubspaceBasis, n_keep: int, keep: str = "A") -> np.ndarray:
    """``tr_{other} (sum_b |b><b|) / D`` by sparse contraction over basis elements.

    ``keep="A"`` keeps the leading ``n_keep`` sites; ``keep="B"`` keeps the
    trailing ``n - n_keep`` sites. The full-space projector is never formed.
    """
    d, n = basis.d, basis.n
    dim_front = d**n_keep
    dim_back = d ** (n - n_keep)
    row = np.repeat(np.arange(len(basis), dtype=np.int64), np.diff(basis.indptr))
    front, back = np.divmod(basis.indices, dim_back)
    if keep == "A":
        kept, traced, dim_kept, dim_traced = front, back, dim_front, dim_back
    elif keep == "B":
        kept, traced, dim_kept, dim_traced = back, front, dim_back, dim_front
    else:
        raise ConfigError(f"keep must be 'A' or 'B', got {keep!r}")
    _, column = np.unique(row * dim_traced + traced, return_inverse=True)
    column = column.reshape(-1)
    y = sp.csr_matrix((basis.coeffs, (kept, column)), shape=(dim_kept, int(column.max(initial=-1)) + 1))
    out = (y @ y.conj().T).toarray() / len(basis)
    return (out + out.conj().T) / 2


def _omega_state(spec: SectorSpec, keep: str) -> OmegaState:
    basis = sector_basis(spec)
    g = spec.geometry
    matrix = averaged_reduced_matrix(basis, g.n_A, keep)
    rho = DensityOperator(matrix)
    eigs = hermitian_spectrum(rho)
    return OmegaState(spec, keep, rho, eigs, int(np.count_nonzero(eigs > RANK_TOL)),
                      rho.purity(), float(renyi_from_spectrum(eigs, 1)))


@lru_cache(maxsize=64)
def omega_reduced(spec: SectorSpec) -> OmegaState:
    """Averaged reduced state ``Omega_G^(A)`` of the sector on block A (cached)."""
    return _omega_state(spec, "A")


@lru_cache(maxsize=64)
def omega_complement(spec: SectorSpec) -> OmegaState:
    """Averaged reduced state of the sector on the complement Ā (cached)."""
    return _omega_state(spec, "B")


def effective_dimension(spec: SectorSpec) -> float:
    """``D_eff^(Ā) = 1 / tr(Omega^(Ā))**2``."""
    return 1.0 / omega_complement(spec).purity


def permutation_omega(n_A: int, d: int, sign: int) -> np.ndarray:
    """Closed form ``Pi^(A)_{P,±} / D^(A)_{P,±}`` on ``n_A`` qudits."""
    from .sectors import antisymmetric_basis, projector, symmetric_basis
    basis = symmetric_basis(n_A, d) if sign > 0 else antisymmetric_basis(n_A, d)
    return projector(basis, cap=max(4096, d**n_A)) / len(basis)


def occupation_labels(n_A: int, d: int) -> np.ndarray:
    """Occupation-number tuple of each A configuration, shape ``(d**n_A, d)``."""
    digits = digits_array(np.arange(d**n_A), n_A, d)
    return np.stack([(digits == level).sum(axis=1) for level in range(d)], axis=1)


def occupation_blocks(matrix: np.ndarray, n_A: int, d: int) -> dict:
    """Split a block-A operator into its occupation-type diagonal blocks."""
    labels = occupation_labels(n_A, d)
    blocks = {}
    for key in sorted({tuple(int(x) for x in row) for row in labels}):
        idx = np.flatnonzero((labels == key).all(axis=1))
        blocks[key] = matrix[np.ix_(idx, idx)]
    return blocks


def cross_type_max(matrix: np.ndarray, n_A: int, d: int) -> float:
    """Largest modulus of an entry coupling two different occupation types."""
    labels = occupation_labels(n_A, d)
    same = (labels[:, None, :] == labels[None, :, :]).all(axis=2)
    return float(np.max(np.abs(matrix[~same]), initial=0.0))


# ---------------------------------------------------------------------------
# momentum closed forms


def m_theta(n: int, k: int) -> int:
    """Diagonal offset of uniform strings: ``n - 1`` at zero momentum, ``-1`` otherwise.

    At zero momentum a uniform prefix gains the uniform string itself (weight 1)
    and loses its share ``1/n`` of the orbit sum; at non-zero momentum uniform
    strings are absent from the sector altogether and only the ``1/n`` share
    is lost. Any other offset breaks ``tr Omega = 1``.
    """
    return n - 1 if k % n == 0 else -1


def prime_momentum_dimension(n: int, d: int, k: int) -> int:
    _require_prime(n, "the prime-n momentum dimension")
    base = (d**n - d) // n
    return base + d if k % n == 0 else base


def momentum_diagonal(n: int, d: int, n_A: int, k: int, a_A: Sequence[int]) -> float:
    """Diagonal entry ``<a_A|Omega_{T,theta}^(A)|a_A>`` for prime ``n``."""
    _require_prime(n, "the momentum diagonal formula")
    a_A = list(a_A)
    if len(a_A) != n_A or any(not 0 <= a < d for a in a_A):
        raise ConfigError(f"a_A must be {n_A} digits in 0..{d - 1}")
    dim = prime_momentum_dimension(n, d, k)
    numerator = d ** (n - n_A)
    if len(set(a_A)) == 1:
        numerator += m_theta(n, k)
    return numerator / (n * dim)


def offdiagonal_bound(dimension: int) -> float:
    if dimension < 1:
        raise ConfigError("sector dimension must be >= 1")
    return 1.0 / dimension


def multinomial(counts: Sequence[int]) -> int:
    out = math.factorial(sum(counts))
    for m in counts:
        out //= math.factorial(m)
    return out


def compositions(total: int, parts: int):
    """All ``parts``-tuples of non-negative integers summing to ``total``."""
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


def gamma_sum(n_A: int, d: int) -> int:
    """``sum over occupation types of M**2 - M`` with ``M`` the multinomial; exact integer."""
    total = 0
    for counts in compositions(n_A, d):
        m = multinomial(counts)
        total += m * m - m
    return total


def purity_upper_bound(n: int, d: int, n_A: int, k: int) -> float:
    """Upper bound on ``tr(Omega_{T,theta}^(A))**2`` for prime ``n``."""
    _require_prime(n, "the momentum purity bound")
    m = m_theta(n, k)
    n_B = n - n_A
    prefactor = 1.0 / (d**n_A * (1 + m * d ** (1 - n)) ** 2)
    inner = 1 + 2 * m / d ** (n - 1) + (m * m * d + n * n * gamma_sum(n_A, d)) / d ** (n + n_B)
    return prefactor * inner


class SBar(NamedTuple):
    exact: float
    asymptotic: float


def sbar_momentum(n: int, d: int, n_A: int, k: int) -> SBar:
    """Entropy floor of ``Omega_{T,theta}^(A)``: ``-log`` of the purity bound, plus its two-term expansion."""
    exact = -math.log(purity_upper_bound(n, d, n_A, k))
    asymptotic = n_A * math.log(d) - n * n / d ** (2 * n - 3 * n_A)
    return SBar(exact, asymptotic)


# ---------------------------------------------------------------------------
# concentration and continuity bounds


def eta0(x: float) -> float:
    """``-x log x`` on ``[0, 1/e]``, ``1/e`` beyond."""
    if x < 0:
        raise ConfigError(f"eta0 needs x >= 0, got {x}")
    if x == 0:
        return 0.0
    if x <= 1 / math.e:
        return -x * math.log(x)
    return 1 / math.e


def fannes_audenaert_bound(distance: float, dim: int) -> float:
    """``|S(rho) - S(sigma)| <= T log D + eta0(T)`` with ``T`` the full trace norm."""
    if distance < 0 or dim < 1:
        raise ConfigError("distance must be >= 0 and dim >= 1")
    return distance * math.log(dim) + eta0(distance)


def concentration_probability(dimension: int, eps: float) -> float:
    """Failure probability ``exp(-D eps**2 / (18 pi**3))``."""
    if eps <= 0:
        raise ConfigError("eps must be positive")
    return math.exp(-dimension * eps * eps / LEVY_DENOMINATOR)


@dataclass(frozen=True)
class ConcentrationParams:
    eps: float
    eps_prime: float
    D_eff: float
    R_bound: float
    prob_bound: float


@dataclass(frozen=True)
class Interval:
    """``|E - center| <= halfwidth`` except with probability ``failure_prob``."""

    center: float
    halfwidth: float
    failure_prob: float
    eps_prime: float
    informative: bool

    def as_dict(self) -> dict:
        return {"center": self.center, "halfwidth": self.halfwidth,
                "failure_prob": self.failure_prob, "eps_prime": self.eps_prime,
                "informative": self.informative}


def _r_bound(spec: SectorSpec) -> int:
    g = spec.geometry
    if spec.kind is SectorKind.SYMMETRIC:
        return permutation_dimension(g.n_A, g.d, +1)
    if spec.kind is SectorKind.ANTISYMMETRIC:
        return permutation_dimension(g.n_A, g.d, -1)
    return g.dim_A


def concentration_params(spec: SectorSpec, eps: float) -> ConcentrationParams:
    omega = omega_reduced(spec)
    d_eff = effective_dimension(spec)
    eps_prime = eps + math.sqrt(omega.rank / d_eff)
    return ConcentrationParams(eps, eps_prime, d_eff, _r_bound(spec),
                               concentration_probability(sector_dimension(spec), eps))


def prop1_interval(spec: SectorSpec, eps: float) -> Interval:
    """Concentration window of the entanglement entropy around ``S(Omega_G^(A))``."""
    params = concentration_params(spec, eps)
    center = omega_reduced(spec).entropy
    ceiling = math.log(params.R_bound) if params.R_bound > 1 else 0.0
    halfwidth = params.eps_prime * ceiling + eta0(params.eps_prime)
    informative = params.eps_prime < 1 and halfwidth < ceiling
    return Interval(center, halfwidth, params.prob_bound, params.eps_prime, informative)


def prop2_interval(n: int, d: int, n_A: int, eps: float, sign: int) -> Interval:
    """Window around ``log D^(A)_{P,±}`` for the (anti)symmetric sectors."""
    if eps <= 0:
        raise ConfigError("eps must be positive")
    n_B = n - n_A
    if sign < 0 and n > d:
        raise SectorNonexistentError(f"antisymmetric sector needs n <= d, got n={n}, d={d}")
    dim_a = permutation_dimension(n_A, d, sign)
    dim_b = permutation_dimension(n_B, d, sign)
    dim_total = permutation_dimension(n, d, sign)
    eps_prime = eps + math.sqrt(dim_a / dim_b)
    ceiling = math.log(dim_a)
    halfwidth = eps_prime * (ceiling - math.log(eps_prime))
    informative = eps_prime < 1 and halfwidth < ceiling
    return Interval(ceiling, halfwidth, concentration_probability(dim_total, eps),
                    eps_prime, informative)


class MomentumLowerBound(NamedTuple):
    lower_bound: float
    failure_prob: float
    eps_prime: float
    sbar: float
    informative: bool


def prop4_bound(n: int, d: int, n_A: int, k: int, eps: float,
                eps_prime: Optional[float] = None) -> MomentumLowerBound:
    """Lower bound on the entanglement entropy of a random momentum-sector state (prime ``n``).

    ``eps_prime`` defaults to the exact ``eps + sqrt(rank(Omega)/D_eff)``
    computed from the constructed sector.
    """
    _require_prime(n, "the momentum lower bound")
    if eps <= 0:
        raise ConfigError("eps must be positive")
    spec = SectorSpec.make(SectorKind.MOMENTUM, n, d, n_A, k)
    if eps_prime is None:
        eps_prime = concentration_params(spec, eps).eps_prime
    sbar = sbar_momentum(n, d, n_A, k).exact
    ceiling = n_A * math.log(d)
    halfwidth = eps_prime * (ceiling - math.log(eps_prime))
    informative = eps_prime < 1 and halfwidth < ceiling
    return MomentumLowerBound(sbar - halfwidth,
                              concentration_probability(sector_dimension(spec), eps),
                              eps_prime, sbar, informative)


def page_lower_bound(n: int, d: int, n_A: int) -> float:
    """``n_A log d - d**(2 n_A - n - 1)``, valid for ``n_A <= n - n_A``."""
    if n_A > n - n_A:
        raise RegimeError(f"bound needs n_A <= n - n_A, got n_A={n_A}, n={n}")
    return n_A * math.log(d) - float(d) ** (-n + 2 * n_A - 1)


def page_mean_entropy(dim_a: int, dim_b: int) -> float:
    """Exact Haar average of the entanglement entropy for a ``dim_a x dim_b`` bipartition."""
    m, big = sorted((dim_a, dim_b))
    harmonic = math.fsum(1.0 / j for j in range(big + 1, m * big + 1))
    return harmonic - (m - 1) / (2 * big)


def sector_mean_purity(spec: SectorSpec) -> float:
    """Exact Haar mean of ``tr rho_A**2`` over a sector: ``D/(D+1) (tr Omega_A**2 + tr Omega_Ā**2)``."""
    dim = sector_dimension(spec)
    return dim / (dim + 1) * (omega_reduced(spec).purity + omega_complement(spec).purity)


def omega_summary(spec: SectorSpec) -> dict:
    omega = omega_reduced(spec)
    return {"sector": spec.as_dict(), "D_G": sector_dimension(spec),
            "S_omega_nats": omega.entropy, "purity": omega.purity, "rank": omega.rank,
            "D_eff": effective_dimension(spec)}

