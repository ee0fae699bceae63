"""``symsector`` command line.

Exit codes: 0 success, 1 runtime failure, 2 configuration rejected.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from .analytics import omega_summary, omega_reduced
from .distribution import PhaseBoundaries
from .errors import ConfigError, SizeCapError, SymsectorError
from .experiment import ExperimentConfig, run_analysis, run_bounds, run_sampling
from .qudit import decode_index
from .sectors import SectorSpec, SubspaceBasis, sector_basis, sector_dimension
from .verification import run_verification

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("symsector")


def format_basis(basis: SubspaceBasis, digits: int = 17) -> str:
    """One line per element: ``re im @ config`` terms separated by `` ; ``."""
    sep = "" if basis.d <= 10 else ","
    lines = []
    for idx, coeffs in basis:
        terms = []
        for i, c in zip(idx, coeffs):
            config = sep.join(str(x) for x in decode_index(int(i), basis.n, basis.d))
            terms.append(f"{c.real:.{digits}g} {c.imag:.{digits}g} @ {config}")
        lines.append(" ; ".join(terms))
    return "\n".join(lines) + ("\n" if lines else "")


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--sector", choices=["full", "sym", "antisym", "mom"])
    p.add_argument("--k", type=int, help="momentum index, theta = 2 pi k / n")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--na", type=int, dest="n_A", help="size of block A (leading sites)")
    p.add_argument("--q", type=float, help="Rényi index")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--bin-width", type=float, dest="bin_width")
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.add_argument("--units", choices=["nats", "bits"])


_CONFIG_KEYS = ("sector", "k", "n", "d", "n_A", "q", "samples", "seed", "bin_width",
                "workers", "out", "units")


def _config(args) -> ExperimentConfig:
    file_values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    overrides = {key: getattr(args, key, None) for key in _CONFIG_KEYS}
    config = ExperimentConfig.from_sources(file_values, overrides)
    config.spec()
    return config


def _emit(text: str, path=None):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, default=float) + "\n"


def cmd_sample(args) -> int:
    config = _config(args)
    if not config.out:
        raise ConfigError("sample needs --out")
    record = run_sampling(config)
    print(f"{record.rows} samples -> {config.out} (D_G={record.sector_dimension}, "
          f"{record.elapsed_seconds:.2f}s, sha256={record.file_sha256[:16]})")
    return EXIT_OK


def cmd_analyze(args) -> int:
    boundaries = PhaseBoundaries(args.s1, args.s2)
    report = run_analysis(args.sample_file, args.bin_width or 0.001, args.column,
                          args.split, boundaries)
    prefix = args.out or args.sample_file
    with open(f"{prefix}.hist.txt", "w") as fh:
        fh.write(report.histogram.to_text())
    _emit(report.to_json() + "\n", f"{prefix}.report.json")
    sys.stdout.write(report.to_json() + "\n")
    return EXIT_OK


def cmd_omega(args) -> int:
    spec = _config(args).spec()
    out = omega_summary(spec)
    out["spectrum"] = [float(x) for x in omega_reduced(spec).spectrum]
    if args.units == "bits":
        out["S_omega_bits"] = out["S_omega_nats"] / math.log(2)
    _emit(_json(out), args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    config = _config(args)
    _emit(_json(run_bounds(config, args.eps)), args.out)
    return EXIT_OK


def cmd_basis(args) -> int:
    spec = _config(args).spec()
    basis = sector_basis(spec)
    header = f"# {spec.label} n={spec.n} d={spec.d} D={len(basis)}\n"
    _emit(header + format_basis(basis), args.out)
    return EXIT_OK


def cmd_dims(args) -> int:
    config = _config(args)
    n, d = config.n, config.d
    out = {"n": n, "d": d, "full": d**n}
    out["sym"] = sector_dimension(SectorSpec.make("sym", n, d, 1))
    out["antisym"] = sector_dimension(SectorSpec.make("antisym", n, d, 1)) if n <= d else 0
    out["mom"] = [sector_dimension(SectorSpec.make("mom", n, d, 1, k)) for k in range(n)]
    out["mom_sum"] = sum(out["mom"])
    _emit(_json(out), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_verification(args.max_n, args.max_d)
    _emit(_json(report), args.out)
    for check in report["checks"]:
        if not check["passed"]:
            log.error("FAILED %s (deviation %.3g)", check["name"], check["deviation"])
    log.info("%d/%d checks passed", report["n_checks"] - report["n_failed"], report["n_checks"])
    return EXIT_OK if report["passed"] else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="symsector", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw Haar-random sector states and write a sample file")
    _add_config_flags(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("analyze", help="histogram, fits and phase counts of a sample file")
    p.add_argument("sample_file")
    p.add_argument("--bin-width", type=float, dest="bin_width")
    p.add_argument("--column", default="s", choices=["s", "E1_nats", "Eq_nats"])
    p.add_argument("--split", type=float, help="left/right split point (default: sample mean)")
    p.add_argument("--s1", type=float, default=1.25)
    p.add_argument("--s2", type=float, default=2.0)
    p.add_argument("--out", help="output prefix for .report.json and .hist.txt")
    p.set_defaults(func=cmd_analyze)

    for name, func, text in (("omega", cmd_omega, "averaged reduced state of a sector"),
                             ("basis", cmd_basis, "print a sector basis"),
                             ("dims", cmd_dims, "dimensions of every sector")):
        p = sub.add_parser(name, help=text)
        _add_config_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("bounds", help="all applicable analytic bounds as JSON")
    _add_config_flags(p)
    p.add_argument("--eps", type=float, default=0.1)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="run the built-in consistency checks")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--max-d", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ConfigError, SizeCapError) as exc:
        log.error("configuration rejected: %s", exc)
        return EXIT_CONFIG
    except (SymsectorError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
