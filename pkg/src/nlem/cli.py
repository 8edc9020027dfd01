"""Command-line entry point: ``nlem <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 I/O or format error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .denoise import DenoiseParams, denoise_image
from .errors import NLEMError, PGMFormatError
from .geomedian import MedianSolverConfig
from .harness import ExperimentConfig, run_edge1d_experiment, run_table_experiment
from .image import read_pgm, write_pgm
from .metrics import psnr, ssim
from .synth import NoiseSpec, add_noise, estimate_sigma, make_checker, make_circles


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_denoise_flags(p):
    p.add_argument("--search", type=int, default=21, metavar="S")
    p.add_argument("--patch", type=int, default=7, metavar="k")
    p.add_argument("--lambda", dest="lam", type=float, default=10.0)
    p.add_argument("--knn", type=float, default=None,
                   help="keep this fraction of the largest weights")
    p.add_argument("--solver", choices=["weiszfeld", "irls"], default="irls")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true")
    parser = _Parser(prog="nlem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    p = add("synth", "generate a synthetic test image")
    p.add_argument("--kind", choices=["checker", "circles"], required=True)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--square", type=int, default=32)
    p.add_argument("--ring-width", type=int, default=16)
    p.add_argument("--out", required=True)

    p = add("addnoise", "add seeded Gaussian noise")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = add("denoise", "denoise a PGM image with NLM or NLEM")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", choices=["nlm", "nlem"], default="nlem")
    p.add_argument("--sigma", type=float, default=None,
                   help="noise std; estimated from the image when omitted")
    _add_denoise_flags(p)

    p = add("metrics", "print psnr,ssim of --test against --ref")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)

    p = add("experiment", "PSNR/SSIM sweep over noise levels")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--kind", choices=["checker", "circles"], default="checker")
    src.add_argument("--in", dest="inp")
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--square", type=int, default=32)
    p.add_argument("--ring-width", type=int, default=16)
    p.add_argument("--sigma", type=_floats, default=(10, 20, 30, 40, 50, 60, 70, 80, 90, 100),
                   help="comma-separated noise levels")
    p.add_argument("--method", default="nlm,nlem",
                   help="comma-separated subset of nlm,nlem,nlm-knn,nlem-knn")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", required=True)
    p.add_argument("--threshold", type=float, default=10.0)
    p.add_argument("--save-images", action="store_true")
    p.add_argument("--no-timing", action="store_true",
                   help="write nan for wall_time_s so the CSV is reproducible byte for byte")
    p.add_argument("--workers", type=int, default=1)
    _add_denoise_flags(p)

    p = add("edge1d", "1-D edge study: mean NLM and NLEM estimates")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma", type=float, default=0.2)
    p.add_argument("--offset", type=int, default=3)
    p.add_argument("--search", type=int, default=41, metavar="S")
    p.add_argument("--patch", type=int, default=3, metavar="k")
    p.add_argument("--lambda", dest="lam", type=float, default=10.0)
    p.add_argument("--solver", choices=["weiszfeld", "irls"], default="irls")
    return parser


def _run(args) -> None:
    if args.command == "synth":
        img = (make_checker(args.size, args.square) if args.kind == "checker"
               else make_circles(args.size, args.ring_width))
        write_pgm(img, args.out)
    elif args.command == "addnoise":
        write_pgm(add_noise(read_pgm(args.inp), NoiseSpec(args.sigma, args.seed)), args.out)
    elif args.command == "denoise":
        noisy = read_pgm(args.inp)
        sigma = args.sigma if args.sigma is not None else estimate_sigma(noisy)
        params = DenoiseParams(sigma=sigma, S=args.search, k=args.patch, lam=args.lam,
                               method=args.method, knn_fraction=args.knn or 1.0)
        out, diag = denoise_image(noisy, params, MedianSolverConfig(algorithm=args.solver))
        logging.info("sigma=%.3f mean_iters=%.3f nonconverged=%d",
                     sigma, diag.mean_iterations, diag.nonconverged)
        write_pgm(out, args.out)
    elif args.command == "metrics":
        ref, test = read_pgm(args.ref), read_pgm(args.test)
        print(f"{psnr(ref, test):.4f},{ssim(ref, test):.6f}")
    elif args.command == "experiment":
        cfg = ExperimentConfig(
            image=args.inp or args.kind, sigmas=args.sigma,
            methods=tuple(m for m in args.method.split(",") if m), trials=args.trials,
            master_seed=args.seed, S=args.search, k=args.patch, lam=args.lam,
            knn_fraction=args.knn if args.knn is not None else 0.5,
            solver=MedianSolverConfig(algorithm=args.solver), size=args.size,
            square=args.square, ring_width=args.ring_width, outdir=args.outdir,
            save_images=args.save_images, threshold=args.threshold,
            record_timing=not args.no_timing, workers=args.workers)
        report = run_table_experiment(cfg)
        sys.stdout.write(report.to_csv(cfg.record_timing))
    elif args.command == "edge1d":
        nlm, nlem = run_edge1d_experiment(
            trials=args.trials, seed=args.seed, sigma=args.sigma, offset=args.offset,
            S=args.search, k=args.patch, lam=args.lam,
            cfg=MedianSolverConfig(algorithm=args.solver))
        print("nlm,nlem")
        print(f"{nlm:.6f},{nlem:.6f}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _run(args)
    except (OSError, PGMFormatError) as exc:
        print(f"nlem: {exc}", file=sys.stderr)
        return 2
    except NLEMError as exc:
        print(f"nlem: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
