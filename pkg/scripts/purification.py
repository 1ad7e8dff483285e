#!/usr/bin/env python3
"""Condensate purification: sequential position measurements drive the
remaining cloud toward a condensate.  Reports the seed-averaged condensate
fraction as a function of the measured fraction."""

import argparse
import json

from ringtc.harness import config_from_dict, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--seeds", type=int, nargs="+", default=list(range(10)))
    ap.add_argument("--epsilons", type=float, nargs="+",
                    default=[0.05, 0.10, 0.15, 0.20])
    ap.add_argument("--gn", type=float, default=-15.0)
    ap.add_argument("--out", default="runs/purification")
    args = ap.parse_args()

    cfg = config_from_dict({
        "experiment": "measure-fraction",
        "n_particles": args.n,
        "seeds": args.seeds,
        "epsilons": args.epsilons,
        "gn": args.gn,
        "output_dir": args.out,
    })
    summary = run(cfg)
    print(json.dumps(summary, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
