"""Command-line entry point.

    kgdamp run --config run.cfg [--preset fig1_left] [--out results/]
    kgdamp verify semigroup|conservation|convergence
    kgdamp sweep --config run.cfg --axis dt --values 0.01,0.005

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure
(blow-up, I/O error, failed verification).
"""
import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, parse_config, render_config, validate
from .experiments import parse_sweep_values, run_experiment, sweep
from .integrators import SimulationError
from .verification import SUITES, verify

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_config(path, preset=None, out=None):
    text = Path(path).read_text(encoding="utf-8") if path else ""
    if preset:
        # command-line preset overrides the file's
        kept = [ln for ln in text.splitlines() if ln.split("=", 1)[0].strip() != "preset"]
        text = "\n".join(kept + [f"preset = {preset}"])
    cfg = parse_config(text)
    if out:
        cfg = replace(cfg, output_dir=out)
    return validate(cfg)


def build_parser():
    p = _Parser(prog="kgdamp", description="Strongly damped Klein-Gordon simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run one experiment")
    r.add_argument("--config", help="flat key=value config file")
    r.add_argument("--preset", help="fig1_left, fig1_right, fig2_left or fig2_right")
    r.add_argument("--out", help="output directory")

    v = sub.add_parser("verify", help="run a self-check suite")
    v.add_argument("suite", choices=sorted(SUITES))

    s = sub.add_parser("sweep", help="parameter sweep")
    s.add_argument("--config", required=True)
    s.add_argument("--axis", required=True)
    s.add_argument("--values", required=True, help="comma-separated list")
    s.add_argument("--out", help="output directory")
    s.add_argument("--workers", type=int, default=None)

    c = sub.add_parser("show-config", help="print the fully resolved config")
    c.add_argument("--config")
    c.add_argument("--preset")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            cfg = _load_config(args.config, args.preset, args.out)
            records = run_experiment(cfg)
            last = records[-1]
            print(f"wrote {len(records)} records to {cfg.output_dir}; "
                  f"t={last.t:g} E_n(psi)={last.e_psi:.6g} E_n(phi)={last.e_phi:.3e} Q_n={last.q:.6g}")
        elif args.command == "verify":
            ok, report = verify(args.suite)
            print(report)
            return EXIT_OK if ok else EXIT_RUNTIME
        elif args.command == "sweep":
            cfg = _load_config(args.config, out=args.out)
            values = parse_sweep_values(args.axis, args.values)
            rows = sweep(cfg, args.axis, values, max_workers=args.workers)
            failed = [r for r in rows if r["status"] != "ok"]
            print(f"sweep over {args.axis}: {len(rows) - len(failed)} ok, {len(failed)} failed; "
                  f"summary in {Path(cfg.output_dir) / 'summary.csv'}")
        elif args.command == "show-config":
            print(render_config(_load_config(args.config, args.preset)), end="")
    except (ConfigError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SimulationError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
