"""Command line entry point ``afsec``.

Exit codes: 0 on success, 2 for invalid arguments or configuration,
3 for file errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness
from .model import NetworkInstance, PowerConfig, Thresholds, sample_instance
from .p1 import solve_p1
from .p2 import solve_p2_sdr

EXIT_CONFIG = 2
EXIT_IO = 3


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="afsec", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    for name, help_ in (("snr-sweep", "destination rate versus source power"),
                        ("power-sweep", "total relay power versus source power")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", type=Path, help="key = value file; defaults used when omitted")
        sp.add_argument("--seed", type=int, help="base seed override")
        sp.add_argument("--n-instances", type=int, help="instance count override")
        sp.add_argument("--out", type=Path, help="CSV output path override")
        sp.add_argument("--verbose", action="store_true",
                        help="also write a per-instance log next to the CSV")

    sp = sub.add_parser("solve-p1", help="maximize destination SNR for one instance")
    sp.add_argument("--instance", type=Path, required=True)
    sp.add_argument("--gamma-e", type=_floats, required=True,
                    help="eavesdropper thresholds, one value or one per eavesdropper")
    sp.add_argument("--gamma-d", type=float, default=0.01,
                    help="destination threshold used for the secrecy rate")

    sp = sub.add_parser("solve-p2", help="minimize total relay power for one instance")
    sp.add_argument("--instance", type=Path, required=True)
    sp.add_argument("--gamma-d", type=float, required=True)
    sp.add_argument("--gamma-e", type=_floats, required=True)

    sp = sub.add_parser("sample", help="draw a random instance and write it as JSON")
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--P-s", type=float, default=1.0)
    sp.add_argument("--P-i", type=float, default=10.0)
    sp.add_argument("--sigma2", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path, required=True)
    return ap


def _sweep(args) -> int:
    cfg = harness.ExperimentConfig.from_file(args.config) if args.config else harness.ExperimentConfig()
    cfg = cfg.with_overrides(base_seed=args.seed, n_instances=args.n_instances,
                             output_path=str(args.out) if args.out else None)
    ilog = harness._InstanceLog() if args.verbose else None
    run = harness.run_snr_sweep if args.command == "snr-sweep" else harness.run_power_sweep
    records = run(cfg, instance_log=ilog)
    out = Path(cfg.output_path)
    harness.emit_csv(records, out)
    if ilog is not None:
        harness.emit_instance_log(ilog, out.with_suffix(".instances.csv"))
    print(f"wrote {len(records)} rows to {out}")
    return 0


def _thresholds(instance: NetworkInstance, gamma_d: float, gamma_e: list[float]) -> Thresholds:
    if len(gamma_e) == 1:
        return Thresholds.uniform(gamma_d, gamma_e[0], instance.K)
    if len(gamma_e) != instance.K:
        raise harness.ConfigError(f"need 1 or {instance.K} eavesdropper thresholds, got {len(gamma_e)}")
    return Thresholds(gamma_d, tuple(gamma_e))


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command in ("snr-sweep", "power-sweep"):
            return _sweep(args)
        if args.command == "sample":
            power = PowerConfig.uniform(args.M, args.P_s, args.P_i, args.sigma2)
            sample_instance(args.M, args.K, power, seed=args.seed).save(args.out)
            return 0
        instance = NetworkInstance.load(args.instance)
        th = _thresholds(instance, args.gamma_d, args.gamma_e)
        sol = solve_p1(instance, th) if args.command == "solve-p1" else solve_p2_sdr(instance, th)
        json.dump(sol.to_dict(), sys.stdout, indent=2, allow_nan=True)
        print()
        return 0
    except OSError as exc:
        print(f"afsec: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError, TypeError) as exc:
        # covers ConfigError and malformed instance files
        print(f"afsec: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
