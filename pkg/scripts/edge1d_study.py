"""Mean NLM/NLEM estimates next to a noisy 1-D unit edge, over several offsets."""

import argparse

from nlem.harness import run_edge1d_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sigma", type=float, default=0.2)
    ap.add_argument("--offsets", default="1,2,3,4,5,8")
    args = ap.parse_args()
    print("offset,nlm,nlem")
    for off in map(int, args.offsets.split(",")):
        nlm, nlem = run_edge1d_experiment(trials=args.trials, seed=args.seed,
                                          sigma=args.sigma, offset=off)
        print(f"{off},{nlm:.4f},{nlem:.4f}")


if __name__ == "__main__":
    main()
