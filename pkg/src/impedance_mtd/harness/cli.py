"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 configuration error, 4 data error.
Every failure also prints one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys

from ..errors import CapacityError, ConfigError, DataError, ImpedanceMtdError, UsageError
from .capture import capture
from .config import CampaignConfig
from .experiments import METHODS, attack_archive, report, sweep, sweep_csv

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_DATA = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_rates(text: str) -> list[int]:
    try:
        rates = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--rates must be comma-separated integers, got {text!r}") from None
    if not rates:
        raise UsageError("--rates is empty")
    return rates


def _parse_checkpoints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--checkpoints must be comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="impedance-mtd", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=None, help="override campaign_seed from the config")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("capture", help="run a capture campaign into an archive directory")
    c.add_argument("--config", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--workers", type=int, default=1)

    a = sub.add_parser("attack", help="attack an archive and write report files into it")
    a.add_argument("--in", dest="input", required=True)
    a.add_argument("--method", required=True, choices=METHODS)
    a.add_argument("--profile-split", type=float, default=0.9)
    a.add_argument("--k-points", type=int, default=20)
    a.add_argument("--checkpoints", default=None, help="comma-separated trace counts for progressive curves")

    s = sub.add_parser("sweep", help="capture and CIMA at several PR rates, joined with overhead")
    s.add_argument("--config", required=True)
    s.add_argument("--rates", required=True)
    s.add_argument("--grid-points", type=int, default=100)

    r = sub.add_parser("report", help="summarize an archive and its attack reports")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--format", choices=("csv", "json"), default="json")
    return p


def _config(path: str, seed: int | None) -> CampaignConfig:
    cfg = CampaignConfig.load(path)
    return cfg if seed is None else cfg.with_overrides(campaign_seed=seed)


def _run(args) -> None:
    if args.command == "capture":
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        arch = capture(_config(args.config, args.seed), args.out, workers=args.workers)
        print(json.dumps({"out": str(arch.path), "n_traces": arch.meta["n_traces"],
                          "traces_sha256": arch.meta["checksums"]["traces.bin"],
                          "pr_applications": arch.meta["pr_applications"]}))
    elif args.command == "attack":
        out = attack_archive(args.input, args.method, args.profile_split, args.k_points,
                             _parse_checkpoints(args.checkpoints))
        print(json.dumps(out))
    elif args.command == "sweep":
        rates = _parse_rates(args.rates)
        result = sweep(_config(args.config, args.seed), rates, args.grid_points)
        sys.stdout.write(sweep_csv(result))
        print(json.dumps({"trend": result["trend"]}), file=sys.stderr)
    elif args.command == "report":
        sys.stdout.write(report(args.input, args.format))
    else:
        raise UsageError("missing command: capture, attack, sweep or report")


def _fail(code: int, kind: str, exc: Exception) -> int:
    err = {"error": kind, "exit_code": code, "message": str(exc)}
    if isinstance(exc, ConfigError):
        err["path"] = exc.path
    print(json.dumps(err), file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _run(args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    except (ConfigError, CapacityError) as exc:
        return _fail(EXIT_CONFIG, "config", exc)
    except DataError as exc:
        return _fail(EXIT_DATA, "data", exc)
    except ImpedanceMtdError as exc:
        return _fail(EXIT_DATA, "data", exc)
    return EXIT_OK
