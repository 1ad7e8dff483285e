#!/usr/bin/env python3
"""Contrast-lifetime sweep: t_c versus particle number at fixed g0*(N-1).

Expect a linear trend; prints the fit and leaves per-N contrast tracks in
the output directory.  Takes tens of minutes for the default N list.
"""

import argparse
import json

from ringtc.harness import config_from_dict, run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-values", type=int, nargs="+",
                    default=[10, 15, 20, 25, 30])
    ap.add_argument("--gn", type=float, default=-15.0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="runs/lifetime_sweep")
    args = ap.parse_args()

    cfg = config_from_dict({
        "experiment": "sweep-tc",
        "n_values": args.n_values,
        "gn": args.gn,
        "max_workers": args.workers,
        "output_dir": args.out,
    })
    summary = run(cfg)
    print(json.dumps(summary, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
