#!/usr/bin/env python3
"""Calibration pilot for the spectral-gap acceptance tolerances.

Samples many G(n, m, d1, d2) graphs and reports the empirical distribution
of eta, eta_min_plus, the rank, the non-backtracking second modulus, and
the per-attempt simplicity rate.  The recorded quantiles back the 0.3 /
0.35 slacks used in the acceptance suite.
"""

import argparse
import json

import numpy as np

from bireg import graphgen as gg, spectra as sp
from bireg.numkernel import rng_substream


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=120)
    ap.add_argument("--m", type=int, default=280)
    ap.add_argument("--d1", type=int, default=7)
    ap.add_argument("--d2", type=int, default=3)
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20260810)
    ap.add_argument("--max-attempts", type=int, default=20000)
    args = ap.parse_args()

    etas, emins, ranks, lam2s, attempts = [], [], [], [], []
    for i in range(args.seeds):
        rng = rng_substream(args.seed, i)
        g = gg.sample_simple(args.n, args.m, args.d1, args.d2, rng,
                             args.max_attempts)
        spec = sp.adjacency_spectrum(g)
        nb = sp.spectrum_B_from_A(spec)
        etas.append(spec.eta)
        emins.append(spec.eta_min_plus)
        ranks.append(spec.rank_r)
        lam2s.append(nb.second_modulus())
        attempts.append(g.attempts)

    etas = np.array(etas)
    emins = np.array(emins, dtype=float)
    lam2s = np.array(lam2s)
    bulk = np.sqrt(args.d1 - 1) + np.sqrt(args.d2 - 1)
    gap_low = np.sqrt(args.d1 - 1) - np.sqrt(args.d2 - 1)
    nb_circle = ((args.d1 - 1) * (args.d2 - 1)) ** 0.25

    def q(x):
        return {p: float(np.quantile(x, p / 100))
                for p in (0, 1, 5, 50, 95, 99, 100)}

    out = {
        "config": vars(args),
        "bulk_edge": bulk,
        "eta_quantiles": q(etas),
        "eta_window_pm_0.3_rate": float(np.mean(np.abs(etas - bulk) <= 0.3)),
        "eta_min_plus_quantiles": q(emins),
        "eta_min_floor": gap_low - 0.3,
        "eta_min_rate": float(np.mean(emins >= gap_low - 0.3)),
        "rank_full_rate": float(np.mean(np.array(ranks) == min(args.n, args.m))),
        "nb_second_quantiles": q(lam2s),
        "nb_slack_0.35_rate": float(np.mean(lam2s <= nb_circle + 0.35)),
        "mean_attempts": float(np.mean(attempts)),
        "simplicity_rate": float(1.0 / np.mean(attempts)),
        "exp_minus_defect_mean": float(
            np.exp(-(args.d1 - 1) * (args.d2 - 1) / 2)
        ),
    }
    print(json.dumps(out, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
