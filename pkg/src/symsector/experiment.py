"""Experiment configuration, parallel sampling runs, sample files and reports.

Sample files are comma-separated text with the header
``sample_index,E1_nats,Eq_nats,q,s,lam1,lam2,lam3,lam4`` and floats written
with 17 significant digits. Samples are computed in fixed-size chunks of
consecutive indices; workers only decide who computes a chunk, never what it
contains, so the file is byte-identical for any worker count.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Optional

import numpy as np

from . import __version__
from .analytics import (concentration_params, effective_dimension, is_prime, omega_reduced,
                        page_lower_bound, page_mean_entropy, prop1_interval, prop2_interval,
                        prop4_bound, purity_upper_bound, sbar_momentum)
from .distribution import PhaseBoundaries, analyse_samples
from .entanglement import DEFAULT_HEAD, renyi_from_spectrum, rescaled_s
from .errors import ConfigError, SampleFileError, SymsectorError
from .qudit import QuditGeometry, check_size, hermitian_spectrum, reduced_density_matrices
from .sampling import batch_coordinates
from .sectors import SectorKind, SectorSpec, sector_basis, sector_dimension

log = logging.getLogger(__name__)

SAMPLE_COLUMNS = ("sample_index", "E1_nats", "Eq_nats", "q", "s", "lam1", "lam2", "lam3", "lam4")
CHUNK_SIZE = 512


@dataclass
class ExperimentConfig:
    sector: str = "full"
    k: int = 0
    n: int = 10
    d: int = 2
    n_A: Optional[int] = None  # defaults to n // 2
    q: float = 2.0
    samples: int = 1000
    seed: int = 0
    bin_width: float = 0.001
    out: Optional[str] = None
    workers: int = 1
    units: str = "nats"

    @classmethod
    def from_sources(cls, file_values: Optional[dict] = None, overrides: Optional[dict] = None):
        """Merge a JSON config dict with command-line overrides (``None`` overrides are ignored)."""
        values = {}
        names = {f.name for f in fields(cls)}
        for source in (file_values or {}, overrides or {}):
            for key, value in source.items():
                key = {"na": "n_A", "nA": "n_A", "bin-width": "bin_width"}.get(key, key)
                if key not in names:
                    raise ConfigError(f"unknown config key {key!r}")
                if value is not None:
                    values[key] = value
        return cls(**values)

    def spec(self) -> SectorSpec:
        """Validate and return the sector; raises :class:`ConfigError` on any violation."""
        if self.n_A is None:
            self.n_A = max(1, int(self.n) // 2)
        for name in ("n", "d", "n_A", "k", "samples", "seed", "workers"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ConfigError(f"{name} must be an integer, got {value!r}")
        if self.samples < 0:
            raise ConfigError("samples must be non-negative")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.bin_width > 0:
            raise ConfigError("bin_width must be positive")
        if self.q < 0:
            raise ConfigError("q must be non-negative")
        if self.units not in ("nats", "bits"):
            raise ConfigError(f"units must be 'nats' or 'bits', got {self.units!r}")
        spec = SectorSpec.make(self.sector, int(self.n), int(self.d), int(self.n_A), int(self.k))
        check_size(spec.n, spec.d)
        return spec

    def as_dict(self) -> dict:
        return asdict(self)


def display(value: float, units: str) -> float:
    """Convert an entropy in nats for display."""
    return value / math.log(2) if units == "bits" else value


# ---------------------------------------------------------------------------
# sampling

_WORKER_STATE = {}


def _init_worker(basis, geometry, q, seed):
    _WORKER_STATE.update(basis=basis, geometry=geometry, q=q, seed=seed)


def _format_row(index, e1, eq, q, s, head) -> str:
    values = [f"{v:.17g}" for v in (e1, eq, q, s, *head)]
    return f"{index}," + ",".join(values)


def compute_chunk(basis, geometry: QuditGeometry, q: float, seed: int, start: int, stop: int) -> str:
    """Sample rows ``start..stop-1`` as CSV text (no header)."""
    coords = batch_coordinates(len(basis), seed, start, stop)
    states = basis.expand(coords)
    rhos = reduced_density_matrices(states, geometry)
    eigs = hermitian_spectrum(rhos)
    e1 = renyi_from_spectrum(eigs, 1)
    eq = renyi_from_spectrum(eigs, q)
    s = rescaled_s(eq, q, geometry.n_A, geometry.d) if q != 1 else np.full(len(eq), math.nan)
    head = np.zeros((len(eigs), DEFAULT_HEAD))
    width = min(DEFAULT_HEAD, eigs.shape[1])
    head[:, :width] = eigs[:, :width]
    rows = [_format_row(start + i, e1[i], eq[i], q, s[i], head[i]) for i in range(len(eigs))]
    return "".join(row + "\n" for row in rows)


def _worker_chunk(bounds) -> str:
    st = _WORKER_STATE
    return compute_chunk(st["basis"], st["geometry"], st["q"], st["seed"], *bounds)


def iter_chunks(total: int, chunk: int = CHUNK_SIZE):
    for start in range(0, total, chunk):
        yield start, min(start + chunk, total)


def generate_sample_text(config: ExperimentConfig):
    """Yield the sample file as text pieces in sample-index order."""
    spec = config.spec()
    basis = sector_basis(spec)
    geometry = spec.geometry
    yield ",".join(SAMPLE_COLUMNS) + "\n"
    chunks = list(iter_chunks(config.samples))
    if config.workers == 1 or len(chunks) <= 1:
        for start, stop in chunks:
            yield compute_chunk(basis, geometry, config.q, config.seed, start, stop)
        return
    with ProcessPoolExecutor(max_workers=config.workers, initializer=_init_worker,
                             initargs=(basis, geometry, config.q, config.seed)) as pool:
        yield from pool.map(_worker_chunk, chunks)


@dataclass
class RunRecord:
    config: dict
    version: str
    timestamp: str
    elapsed_seconds: float
    sector_dimension: int
    rows: int
    first_row_sha256: Optional[str]
    last_row_sha256: Optional[str]
    file_sha256: str


def run_sampling(config: ExperimentConfig, out: Optional[str] = None) -> RunRecord:
    """Write the sample file to ``out`` (or ``config.out``) plus ``<out>.run.json``."""
    spec = config.spec()
    path = out or config.out
    if not path:
        raise ConfigError("an output path is required")
    t0 = time.perf_counter()
    digest = hashlib.sha256()
    first = last = None
    rows = 0
    tmp = f"{path}.partial"
    with open(tmp, "w", newline="\n") as fh:
        for piece in generate_sample_text(config):
            fh.write(piece)
            digest.update(piece.encode())
            lines = piece.splitlines()
            if lines and lines[0].startswith("sample_index"):
                lines = lines[1:]
            if lines:
                first = first or lines[0]
                last = lines[-1]
                rows += len(lines)
    os.replace(tmp, path)
    sha = lambda line: None if line is None else hashlib.sha256(line.encode()).hexdigest()
    record = RunRecord(config.as_dict(), __version__,
                       datetime.datetime.now(datetime.timezone.utc).isoformat(),
                       time.perf_counter() - t0, sector_dimension(spec), rows,
                       sha(first), sha(last), digest.hexdigest())
    with open(f"{path}.run.json", "w") as fh:
        json.dump(asdict(record), fh, indent=2)
    log.info("wrote %d samples of %s to %s in %.2fs", rows, spec.label, path, record.elapsed_seconds)
    return record


def read_samples(path: str) -> dict:
    """Parse a sample file into column arrays; errors carry the offending line number."""
    try:
        fh = open(path)
    except OSError as exc:
        raise SampleFileError(f"cannot open {path}: {exc}") from exc
    with fh:
        header = fh.readline().rstrip("\n")
        if tuple(header.split(",")) != SAMPLE_COLUMNS:
            raise SampleFileError(f"unexpected header {header!r}", line=1)
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(SAMPLE_COLUMNS):
                raise SampleFileError(f"expected {len(SAMPLE_COLUMNS)} fields, got {len(parts)}",
                                      line=lineno)
            try:
                rows.append([float(x) for x in parts])
            except ValueError as exc:
                raise SampleFileError(str(exc), line=lineno) from exc
    data = np.array(rows, dtype=np.float64).reshape(-1, len(SAMPLE_COLUMNS))
    return {name: data[:, i] for i, name in enumerate(SAMPLE_COLUMNS)}


def run_analysis(sample_file: str, bin_width: float = 0.001, column: str = "s",
                 split_point: Optional[float] = None,
                 boundaries: PhaseBoundaries = PhaseBoundaries()):
    """Histogram and fit one column of a sample file; returns a :class:`FitReport`."""
    data = read_samples(sample_file)
    if column not in data or column == "sample_index":
        raise ConfigError(f"cannot analyse column {column!r}")
    values = data[column]
    if values.size < 2:
        raise SampleFileError(f"need at least 2 sample rows, found {values.size}")
    if not np.all(np.isfinite(values)):
        raise SampleFileError(f"column {column!r} contains non-finite values")
    report = analyse_samples(values, bin_width, split_point, boundaries)
    config = {"sample_file": os.path.abspath(sample_file), "column": column,
              "bin_width": bin_width, "split_point": split_point,
              "s1": boundaries.s1, "s2": boundaries.s2}
    sidecar = f"{sample_file}.run.json"
    if os.path.exists(sidecar):
        with open(sidecar) as fh:
            config["run"] = json.load(fh).get("config")
    report.config = config
    return report


# ---------------------------------------------------------------------------
# bounds


def _entry(fn):
    try:
        return fn()
    except SymsectorError as exc:
        return {"error": str(exc)}


def run_bounds(config: ExperimentConfig, eps: float) -> dict:
    """Every analytic bound applicable to the configured sector, as a JSON-ready dict.

    Formulas outside their regime appear as ``{"error": ...}`` entries.
    """
    spec = config.spec()
    g = spec.geometry
    out = {"config": spec.as_dict(), "eps": eps, "D_G": sector_dimension(spec)}
    omega = omega_reduced(spec)
    out.update(S_omega_nats=omega.entropy, purity=omega.purity, rank=omega.rank,
               D_eff=effective_dimension(spec))
    params = concentration_params(spec, eps)
    out["concentration"] = {"eps_prime": params.eps_prime, "R_bound": params.R_bound,
                            "failure_prob": params.prob_bound}
    out["page_lower_bound"] = _entry(lambda: page_lower_bound(g.n, g.d, g.n_A))
    out["page_mean_full_space"] = page_mean_entropy(g.dim_A, g.dim_B)
    out["prop1"] = prop1_interval(spec, eps).as_dict()
    if spec.kind in (SectorKind.SYMMETRIC, SectorKind.ANTISYMMETRIC):
        sign = 1 if spec.kind is SectorKind.SYMMETRIC else -1
        out["prop2"] = _entry(lambda: prop2_interval(g.n, g.d, g.n_A, eps, sign).as_dict())
    if spec.kind is SectorKind.MOMENTUM:
        out["purity_upper_bound"] = _entry(lambda: purity_upper_bound(g.n, g.d, g.n_A, spec.k))
        out["sbar"] = _entry(lambda: sbar_momentum(g.n, g.d, g.n_A, spec.k)._asdict())
        out["prop4"] = _entry(lambda: prop4_bound(g.n, g.d, g.n_A, spec.k, eps,
                                                  params.eps_prime)._asdict())
        out["prime_n"] = is_prime(g.n)
    return out
