"""Command-line entry point: ``szegolab --suite NAME [options]``.

Exit status is 0 when every case passes, 1 when a case fails and 2 for a
configuration error (unknown suite, unknown parameter, unreadable file).
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .measure_io import MeasureFileError, parse_measure_file, write_measure_file
from .precision import PrecisionContext, mp_str
from .suites import SUITES, ConfigError, SuiteConfig, emit_report, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _key_values(items, where: str) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"{where}: expected key=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    lines = []
    try:
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if line:
                    lines.append(line)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    return _key_values(lines, str(path))


_TOP_LEVEL = {"suite", "precision_bits", "grid", "seed", "out", "format"}


def build_config(args: argparse.Namespace) -> SuiteConfig:
    """Merge the config file and the flags; flags win."""
    file_vals = read_config_file(args.config) if args.config else {}
    top = {k: v for k, v in file_vals.items() if k in _TOP_LEVEL}
    params, tols = {}, {}
    for k, v in list(file_vals.items()) + list(_key_values(args.set or [], "--set").items()):
        if k in _TOP_LEVEL:
            top[k] = v
        elif k.startswith("tol."):
            tols[k[4:]] = v
        else:
            params[k] = v
    for name in ("suite", "precision_bits", "grid", "seed", "out", "format"):
        v = getattr(args, name)
        if v is not None:
            top[name] = v
    if "suite" not in top:
        raise ConfigError("no suite given; use --suite or a config file (see --list)")
    try:
        return SuiteConfig(
            suite=str(top["suite"]),
            precision_bits=int(top.get("precision_bits", 256)),
            grid=int(top.get("grid", SuiteConfig.__dataclass_fields__["grid"].default)),
            seed=int(top.get("seed", 0)),
            out=top.get("out"),
            format=str(top.get("format", "json")),
            params=params,
            tolerances=tols,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def _generate(family: str, args) -> int:
    from .constructions import ProNSpec, TailSequence, dyadic_root_measure, monotone_tail_measure, pron_pair, riesz_measure
    from .measures import Measure

    n = args.degree or 4
    makers = {
        "roots": lambda: Measure.roots_of_unity(n),
        "dyadic": lambda: dyadic_root_measure(TailSequence.geometric(Fraction(1, 2), 8), 8),
        "monotone": lambda: monotone_tail_measure(TailSequence.geometric(Fraction(1, 2), 32), n),
        "riesz": lambda: riesz_measure([Fraction(1, 2)] * (n + 1), [3 ** j for j in range(n + 1)]).measure,
        "pron": lambda: pron_pair(ProNSpec.scaled((4, 16)), check_bound=False).mu,
    }
    if family not in makers:
        print(f"error: unknown family {family!r}; choose from {', '.join(makers)}", file=sys.stderr)
        return EXIT_CONFIG
    mu = makers[family]()
    if args.out:
        write_measure_file(mu, args.out)
    else:
        import json

        from .measure_io import measure_to_dict

        print(json.dumps(measure_to_dict(mu), indent=2))
    return EXIT_OK


def _profile(path, args) -> int:
    from .szego import en_profile

    if args.degree is None:
        print("error: --profile needs --degree", file=sys.stderr)
        return EXIT_CONFIG
    mu = parse_measure_file(path)
    ctx = PrecisionContext(args.precision_bits or 256)
    rows = en_profile(mu, args.degree, ctx)
    print("n,e_n_squared,degenerate")
    for n, r in enumerate(rows):
        print(f"{n},{mp_str(r.e_n_squared, 30)},{str(r.degenerate).lower()}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="szegolab", description="Run verification suites for Szego minima.")
    p.add_argument("--suite", help="suite name (see --list)")
    p.add_argument("--config", help="key=value configuration file; flags override it")
    p.add_argument("--precision-bits", dest="precision_bits", type=int, help="mantissa bits (default 256)")
    p.add_argument("--grid", type=int, help="circle grid size for sup-norm and minimax computations")
    p.add_argument("--seed", type=int, help="seed for the random cases (default 0)")
    p.add_argument("--out", help="write the report (or generated measure) here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), help="report format (default json)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="suite parameter; prefix with 'tol.' for a tolerance; repeatable")
    p.add_argument("--list", action="store_true", help="list suites with their parameters and exit")
    p.add_argument("--generate", metavar="FAMILY", help="write a measure file for a built-in family")
    p.add_argument("--profile", metavar="FILE", help="print e_0^2 .. e_N^2 for a measure file")
    p.add_argument("--degree", type=int, help="degree for --profile and --generate")
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.list:
            for name, spec in SUITES.items():
                params = ", ".join(f"{k}={v}" for k, v in spec.params.items()) or "-"
                print(f"{name:16s} {spec.description}\n{'':16s} params: {params}")
            return EXIT_OK
        if args.generate:
            return _generate(args.generate, args)
        if args.profile:
            return _profile(args.profile, args)
        config = build_config(args)
    except (ConfigError, MeasureFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = run_suite(config)
    text = emit_report(report, config.format, config.out)
    if config.out is None:
        sys.stdout.write(text)
    s = report.summary
    print(f"{config.suite}: {s['passed']}/{s['cases']} passed", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
