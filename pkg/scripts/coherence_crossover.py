"""Decay rate of the interwell coherence <Psi_0|rho|Psi_1> versus Gamma/lambda."""
import argparse
from pathlib import Path

import numpy as np

from tripler import io
from tripler.dissipation import coherence_decay_rate
from tripler.wkb import geometry


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--f", type=float, default=1.5)
    p.add_argument("--lam", type=float, default=0.2)
    p.add_argument("--nmax", type=int, default=66)
    p.add_argument("--dt", type=float, default=2e-3)
    p.add_argument("--gammas", type=float, nargs="+", default=[0.004, 0.01, 0.02, 0.04])
    p.add_argument("--out", default="runs")
    a = p.parse_args()
    Q0 = geometry(a.f, a.lam).Q0
    rows = []
    for G in a.gammas:
        guess = 3 * G * Q0**2 / (2 * a.lam)
        rate = coherence_decay_rate(a.f, a.lam, G, a.nmax, T=1.5 / guess, dt=a.dt)
        rows.append([G, G / a.lam, rate, rate / guess])
        print(f"Gamma={G}: rate {rate:.4g}  rate/(3 Gamma Q0^2 / 2 lam) = {rate / guess:.3f}")
    r = np.array(rows)
    slope = np.polyfit(r[:, 1], r[:, 2], 1)[0]
    print(f"slope d(rate)/d(Gamma/lambda) = {slope:.3f}")
    Path(a.out).mkdir(parents=True, exist_ok=True)
    io.write_csv(Path(a.out) / "coherence_crossover.csv",
                 ["Gamma", "Gamma_over_lambda", "rate", "rate_over_estimate"], rows, vars(a))


if __name__ == "__main__":
    main()
