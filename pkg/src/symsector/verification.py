"""Self-checks behind ``symsector verify``.

Each check returns a :class:`Check` with a measured deviation; the suite
passes iff every check passes. Sizes are kept small enough for the dense
brute-force oracles.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import oracles
from .analytics import (cross_type_max, is_prime, momentum_diagonal, offdiagonal_bound,
                        omega_reduced, permutation_omega, purity_upper_bound)
from .errors import SectorNonexistentError
from .qudit import digits_array, encode_index, rotate_string
from .sectors import SectorSpec, enumerate_orbits, sector_basis, sector_dimension

FOUR_SITE_BASIS = {
    0: ["0000", "1000", "1100", "1010", "1110", "1111"],
    1: ["1000", "1100", "1110"],
    2: ["1000", "1100", "1010", "1110"],
    3: ["1000", "1100", "1110"],
}
FOUR_SITE_ZERO = {1: ["1010"], 3: ["1010"]}
ZERO_VECTOR_TOL = 1e-12


@dataclass
class Check:
    name: str
    passed: bool
    deviation: float
    detail: str = ""


def momentum_vector_from_string(config: str, n: int, d: int, k: int) -> np.ndarray:
    """``sum_j exp(-i theta j) T^j |c>`` normalised, or the zero vector when it vanishes."""
    theta = 2 * math.pi * k / n
    out = np.zeros(d**n, dtype=np.complex128)
    digits = tuple(int(c) for c in config)
    for j in range(n):
        out[encode_index(rotate_string(digits, j), d)] += np.exp(-1j * theta * j)
    norm = np.linalg.norm(out)
    return out / norm if norm > ZERO_VECTOR_TOL else np.zeros_like(out)


def check_four_site_basis() -> list[Check]:
    n, d = 4, 2
    checks = []
    dims = tuple(sector_dimension(SectorSpec.make("mom", n, d, 2, k)) for k in range(n))
    checks.append(Check("n4 basis/dimensions", dims == (6, 3, 4, 3), float(np.abs(
        np.subtract(dims, (6, 3, 4, 3))).max()), f"got {dims}"))
    for k, configs in FOUR_SITE_BASIS.items():
        basis = sector_basis(SectorSpec.make("mom", n, d, 2, k))
        ours = np.array([basis.dense_element(i) for i in range(len(basis))])
        expected = np.array([momentum_vector_from_string(c, n, d, k) for c in configs])
        # every listed vector matches exactly one element up to a global phase
        overlap = np.abs(expected.conj() @ ours.T)
        best = overlap.max(axis=1)
        deviation = float(np.abs(best - 1.0).max())
        ok = (overlap.shape[0] == overlap.shape[1] and deviation < 1e-12
              and len(set(np.argmax(overlap, axis=1))) == len(configs))
        checks.append(Check(f"n4 basis/basis k={k}", bool(ok), deviation))
    for k, configs in FOUR_SITE_ZERO.items():
        norms = [float(np.linalg.norm(momentum_vector_from_string(c, n, d, k))) for c in configs]
        checks.append(Check(f"n4 basis/zero vectors k={k}", max(norms) < ZERO_VECTOR_TOL, max(norms),
                            f"excluded {configs}"))
    return checks


def check_dimensions(max_n: int, max_d: int, cap: int = 256) -> list[Check]:
    checks = []
    for d in range(2, max_d + 1):
        for n in range(2, max_n + 1):
            if d**n > cap:
                break
            total = 0
            for kind, ks in (("full", [0]), ("sym", [0]), ("antisym", [0]), ("mom", range(n))):
                for k in ks:
                    rank = oracles.projector_rank(oracles.brute_force_projector(kind, n, d, k))
                    try:
                        dim = sector_dimension(SectorSpec.make(kind, n, d, 1, k))
                        built = len(sector_basis(SectorSpec.make(kind, n, d, 1, k)))
                    except SectorNonexistentError:
                        dim = built = 0
                    if kind == "mom":
                        total += dim
                    checks.append(Check(f"dims/{kind} n={n} d={d} k={k}",
                                        dim == rank == built, float(abs(dim - rank))))
            checks.append(Check(f"dims/momentum sum n={n} d={d}", total == d**n,
                                float(abs(total - d**n))))
    return checks


def check_permutation_omega(cases=None) -> list[Check]:
    if cases is None:
        cases = [(2, n) for n in (4, 6, 8)] + [(4, 3)]
    checks = []
    for d, n in cases:
        for kind, sign in (("sym", 1), ("antisym", -1)):
            if sign < 0 and n > d:
                continue
            for n_A in range(1, n):
                got = omega_reduced(SectorSpec.make(kind, n, d, n_A)).matrix
                dev = float(np.abs(got - permutation_omega(n_A, d, sign)).max())
                checks.append(Check(f"omega/{kind} d={d} n={n} n_A={n_A}", dev < 1e-10, dev))
    return checks


def check_momentum_omega(primes=(3, 5, 7), d: int = 2) -> list[Check]:
    checks = []
    for n in primes:
        if not is_prime(n):
            continue
        for n_A, k in itertools.product(range(1, n), range(n)):
            spec = SectorSpec.make("mom", n, d, n_A, k)
            omega = omega_reduced(spec).matrix
            tag = f"n={n} n_A={n_A} k={k}"
            formula = np.array([momentum_diagonal(n, d, n_A, k, digits)
                                for digits in digits_array(np.arange(d**n_A), n_A, d)])
            dev = float(np.abs(np.diag(omega).real - formula).max())
            checks.append(Check(f"momentum/diagonal {tag}", dev < 1e-12, dev))
            off = omega - np.diag(np.diag(omega))
            bound = offdiagonal_bound(sector_dimension(spec))
            worst = float(np.abs(off).max(initial=0.0))
            checks.append(Check(f"momentum/offdiagonal {tag}", worst <= bound + 1e-12,
                                worst - bound))
            cross = cross_type_max(omega, n_A, d)
            checks.append(Check(f"momentum/decomposition {tag}", cross < 1e-12, cross))
            purity = float(np.einsum("ij,ji->", omega, omega).real)
            ub = purity_upper_bound(n, d, n_A, k)
            checks.append(Check(f"momentum/purity bound {tag}", purity <= ub + 1e-12, purity - ub))
    return checks


def check_orbits(max_n: int) -> list[Check]:
    checks = []
    for n in range(2, max_n + 1):
        orbits = enumerate_orbits(n, 2)
        covered = sum(o.period for o in orbits)
        ok = covered == 2**n
        if is_prime(n):
            ok = ok and all(o.period == n and math.isclose(o.alpha, 1 / n)
                            for o in orbits if len(set(o.representative)) > 1)
        checks.append(Check(f"orbits/partition n={n}", ok, float(abs(covered - 2**n))))
    return checks


def run_verification(max_n: int = 8, max_d: int = 4) -> dict:
    checks = []
    checks += check_four_site_basis()
    checks += check_orbits(max_n)
    checks += check_dimensions(max_n, max_d)
    perm_cases = [(2, n) for n in (4, 6, 8) if n <= max_n]
    if max_d >= 4:
        perm_cases.append((4, 3))
    checks += check_permutation_omega(perm_cases)
    checks += check_momentum_omega(tuple(p for p in (3, 5, 7) if p <= max_n))
    passed = all(c.passed for c in checks)
    return {"passed": passed, "n_checks": len(checks),
            "n_failed": sum(not c.passed for c in checks),
            "checks": [asdict(c) for c in checks]}
