"""Checker at sigma=80: NLM, NLEM and their top-50%-weights variants."""

import argparse

from nlem.harness import ExperimentConfig, run_table_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sigma", type=float, default=80)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--knn", type=float, default=0.5)
    ap.add_argument("--outdir", default="runs/knn")
    args = ap.parse_args()
    report = run_table_experiment(ExperimentConfig(
        image="checker", sigmas=(args.sigma,), trials=args.trials, knn_fraction=args.knn,
        methods=("nlm", "nlem", "nlm-knn", "nlem-knn"), outdir=args.outdir))
    for row in report.rows:
        print(f"{row.method:9s} PSNR {row.psnr_mean:6.2f} +- {row.psnr_std:.2f}  "
              f"SSIM {row.ssim_mean:.4f}  {row.wall_time_s / args.trials:.1f}s/run")


if __name__ == "__main__":
    main()
