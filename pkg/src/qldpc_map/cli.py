"""Command line entry point: ``map run``, ``map gen`` and ``map sweep``.

Exit codes: 0 on success, 2 for configuration errors, 3 for input files
that fail to parse.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .benchgen import generate
from .circuit_io import emit_reports, format_rotation_list
from .errors import ConfigError, ParseError
from .pipeline import SWEEPS, PipelineConfig, load_config, run_pipeline, run_sensitivity

EXIT_OK, EXIT_CONFIG, EXIT_PARSE = 0, 2, 3


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _seeds(text: str):
    return int(text) if "," not in text else [int(t) for t in _csv_list(text)]


def _scalar(text: str):
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _key_values(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"expected KEY=VALUE, got {item!r}")
        out[key.strip()] = _scalar(value.strip())
    return out


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its entries")
    p.add_argument("--input", help="rotation list (ROT/MEAS) or gate circuit file")
    p.add_argument("--generator", metavar="KIND", help="use a generator instead of --input")
    p.add_argument("--gen-param", action="append", metavar="KEY=VALUE", help="generator parameter")
    p.add_argument("--topology", help="line:M|auto[:factories=..] or grid:RxC[:factories=..]")
    p.add_argument("--policies", type=_csv_list, help="comma separated policy ids")
    p.add_argument("--seeds", type=_seeds, help="seed count, or a comma separated seed list")
    p.add_argument("--mode", choices=("t", "rz"))
    p.add_argument("--capacity", type=int, help="logical qubits per module")
    p.add_argument("--error-rate", type=float, help="physical error rate preset (1e-4 or 1e-3)")
    p.add_argument("--cost-file", help="KEY=value cost table overrides")
    p.add_argument("--cost", action="append", metavar="KEY=VALUE", help="single cost table override")
    p.add_argument("--baseline", help="policy used as the comparison baseline")
    p.add_argument("--synthesis", help="stochastic[:SEED] or constant:COUNT")
    p.add_argument("--out", help="write output here instead of stdout")


def _config_from_args(args) -> PipelineConfig:
    data = {}
    if args.config:
        data = load_config(args.config).to_dict()
    if args.input:
        data["input"], data["generator"] = args.input, None
    if args.generator:
        data["generator"] = {"kind": args.generator, **_key_values(args.gen_param)}
        data["input"] = None
    for name in ("topology", "policies", "seeds", "mode", "capacity", "error_rate", "cost_file", "baseline"):
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    if args.cost:
        data["cost_overrides"] = {**data.get("cost_overrides", {}), **_key_values(args.cost)}
    if args.synthesis:
        mode, _, arg = args.synthesis.partition(":")
        if mode == "stochastic":
            data["synthesis"] = {"mode": mode, "seed": int(arg or 0)}
        elif mode == "constant":
            data["synthesis"] = {"mode": mode, "value": int(arg or 19)}
        else:
            raise ConfigError(f"unknown synthesis model {args.synthesis!r}")
    return PipelineConfig.from_dict(data)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    result = run_pipeline(_config_from_args(args))
    if args.format == "csv":
        _write(emit_reports(result.reports, "csv"), args.out)
    else:
        _write(result.to_json(), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = {"kind": args.kind, **_key_values(args.param)}
    try:
        circuit = generate(spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad generator settings: {exc}") from exc
    _write(format_rotation_list(circuit), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _config_from_args(args)
    values = [_scalar(v) for v in _csv_list(args.values)] if args.values else None
    series = run_sensitivity(cfg, args.sweep, values)
    doc = {"schema_version": 1, "config": cfg.to_dict(), "series": series}
    _write(json.dumps(doc, sort_keys=True, indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="map", description="Map rotation circuits onto code modules.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="map, route and cost a circuit under several policies")
    _add_run_options(run)
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.set_defaults(func=cmd_run)

    gen = sub.add_parser("gen", help="emit a generated benchmark as a rotation list")
    gen.add_argument("kind", choices=("clustered", "all_to_all", "random_ppr"))
    gen.add_argument("--param", action="append", metavar="KEY=VALUE",
                     help="generator argument, e.g. n=22 or width_distribution={\"2\":1,\"3\":1}")
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    sweep = sub.add_parser("sweep", help="sensitivity sweep over one knob")
    _add_run_options(sweep)
    sweep.add_argument("--sweep", required=True, choices=sorted(SWEEPS))
    sweep.add_argument("--values", help="comma separated sweep points")
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"map: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"map: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"map: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
