#!/usr/bin/env python3
"""Deformation-time sweep: measure 20% of the particles, then track the
center-of-mass width until it reaches half the mean-field soliton width.

Compares the measured t_D(N) against the free-packet spreading estimate
(sqrt(N) scaling).  The N=40 points take a few minutes each.
"""

import argparse
import json

from ringtc.harness import config_from_dict, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-values", type=int, nargs="+", default=[20, 30, 40])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3])
    ap.add_argument("--epsilon", type=float, default=0.2)
    ap.add_argument("--gn", type=float, default=-15.0)
    ap.add_argument("--out", default="runs/deformation_sweep")
    args = ap.parse_args()

    cfg = config_from_dict({
        "experiment": "sweep-td",
        "n_values": args.n_values,
        "seeds": args.seeds,
        "epsilon": args.epsilon,
        "gn": args.gn,
        "output_dir": args.out,
    })
    summary = run(cfg)
    print(json.dumps(summary, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
