"""Command-line entry point: ``modsample <experiment> [options]``.

Exit status is 0 for a completed run, 1 for a configuration error and 2
when the output cannot be written.
"""

import argparse
import sys

from . import __version__, harness
from .errors import ModsampleError

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common(defaults):
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--trials", type=int, default=defaults.get("trials"),
                   help="number of trials (per cell for sweep)")
    p.add_argument("--seed", type=int, default=0, help="base seed; trial i uses seed+i")
    p.add_argument("--lambda", dest="lam", type=float, default=defaults.get("lam"),
                   help="folding threshold (default: experiment-specific)")
    p.add_argument("--beta-g", dest="beta_g", type=float, default=defaults.get("beta_g"),
                   help="amplitude bound, a multiple of 2*lambda")
    p.add_argument("--step", type=float, default=defaults.get("step"),
                   help="sampling step T (sweep: spacing of the T grid)")
    p.add_argument("--order", type=int, default=defaults.get("order"),
                   help="difference order N (sweep: largest N)")
    p.add_argument("--bits", type=int, default=defaults.get("bits"), help="quantizer bits")
    p.add_argument("--alpha", type=int, default=defaults.get("alpha"), help="noise exponent")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    return p


def build_parser():
    parser = _Parser(prog="modsample", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("noiseless", help="Monte-Carlo recovery from noiseless modulo samples",
                       parents=[_common({"trials": 1000, "step": harness.DEFAULT_STEP})])
    p.add_argument("--no-timing", action="store_true",
                   help="record runtime_ms as 0 so repeated runs export identical bytes")

    sub.add_parser("sweep", help="success rate over sampling step and difference order",
                   parents=[_common({"trials": 50, "lam": 0.2, "step": 0.01, "order": 5})])
    sub.add_parser("quantize", help="recovery from quantized modulo samples",
                   parents=[_common({"lam": 1.0, "beta_g": 14.0, "step": harness.DEFAULT_STEP,
                                     "order": 2, "bits": 3})])
    sub.add_parser("noise-theorem", help="bounded-noise recovery check",
                   parents=[_common({"trials": 100, "alpha": 1})])
    sub.add_parser("itoh", help="compare with first-order unwrapping",
                   parents=[_common({"lam": 809 / 3125, "step": harness.DEFAULT_STEP})])
    return parser


def _run(args):
    """Run the selected experiment; return (report, config, summary line)."""
    cmd = args.command
    if cmd == "noiseless":
        cfg = dict(trials=args.trials, seed0=args.seed, lam=args.lam, beta_g=args.beta_g,
                   step=args.step, order=args.order)
        report = harness.run_noiseless(timing=not args.no_timing, **cfg)
        ok = sum(r.success for r in report)
        return report, cfg, f"success {ok}/{len(report)}"
    if cmd == "sweep":
        steps = harness.default_sweep_steps(spacing=args.step)
        cfg = dict(trials_per_cell=args.trials, seed0=args.seed, lam=args.lam,
                   beta_g=args.beta_g, N_values=list(range(1, args.order + 1)))
        report = harness.run_sharpness_sweep(T_values=steps, **cfg)
        cfg["T_values"] = steps
        return report, cfg, f"{report.success_rate.size} cells, mean rate {report.success_rate.mean():.3f}"
    if cmd == "quantize":
        cfg = dict(seed=args.seed, bits=args.bits, lam=args.lam, beta_g=args.beta_g,
                   step=args.step, order=args.order)
        r = harness.run_quantization(**cfg)
        cfg["order"] = r.N
        return r, cfg, (f"mse recovered {r.mse_recovered:.4g}, measurement {r.mse_measurement:.4g}, "
                        f"direct {r.mse_direct:.4g}")
    if cmd == "noise-theorem":
        cfg = dict(alpha=args.alpha, trials=args.trials, seed0=args.seed, lam=args.lam,
                   beta_g=args.beta_g, step=args.step, order=args.order)
        r = harness.run_noise_theorem(**cfg)
        if r.records:
            cfg["step"] = r.records[0].T
        return r, cfg, f"violations {r.violations}/{r.trials}, max deviation {r.max_deviation:.3g}"
    if cmd == "itoh":
        cfg = dict(seed=args.seed, lam=args.lam, beta_g=args.beta_g, step=args.step,
                   order=args.order)
        r = harness.run_itoh_comparison(**cfg)
        cfg.update(beta_g=r.beta_g, order=r.N)
        return r, cfg, f"mse recover {r.mse_recover:.3g}, itoh {r.mse_itoh:.3g}"
    raise AssertionError(cmd)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        report, cfg, summary = _run(args)
        cfg = {"command": args.command,
               **{("lambda" if k == "lam" else k): v for k, v in cfg.items()}}
        if args.out is None:
            sys.stdout.write(harness.render(report, args.fmt, cfg))
        else:
            harness.export(report, args.fmt, args.out, cfg)
    except harness.ExportError as exc:
        print(f"modsample: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ModsampleError, ValueError) as exc:
        print(f"modsample: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{args.command}: {summary}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
