"""Gap and minimizing angle for the two- and three-level mixtures, at tau and at nearby times.

Shows how sensitive L and the minimizing alpha are to the evaluation time.
"""

import argparse

import numpy as np

from qbattery import cycle, ergo, measopt
from qbattery.model import battery_init, build_single_mode, charger_init


def scan(pops, delta, times, alpha_points=20001):
    m = build_single_mode(11, 1.0, g=1.0, delta=delta)
    rho_b = battery_init("truncated", 11, populations=pops).rho
    rho_a = charger_init("excited_level").rho
    tau, _ = cycle.find_tau(m, rho_b, rho_a)
    alphas = np.linspace(0.0, np.pi, alpha_points)
    for label, t in [("tau", tau)] + [(f"{x:g}pi", x * np.pi) for x in times]:
        ev = ergo.DaemonicEvaluator(cycle.joint_state(m, rho_b, rho_a, t), m)
        adv = ev(measopt.qubit_vectors(alphas, 0.0)) - ev.ergotropy
        i = int(np.argmin(adv))
        print(f"{str(pops):>18} delta={delta:<4} {label:>8} t={t / np.pi:.4f}pi "
              f"E={ev.ergotropy:.6f} L={adv[i]:.4e} alpha={measopt.fold_alpha(alphas[i]) / np.pi:.4f}pi")


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--times", default="1.45,1.455,1.46", help="extra evaluation times in units of pi")
    args = p.parse_args()
    times = [float(x) for x in args.times.split(",")]
    scan((0.9, 0.1), 0.1, [])
    for delta in (0.0, 0.1):
        scan((0.43, 0.42, 0.15), delta, times)


if __name__ == "__main__":
    main()
