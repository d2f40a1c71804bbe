"""Write every CLI table for the standard scenarios into one directory.

    python3 scripts/run_figures.py results/ [--fast]
"""

import argparse
import pathlib
import sys
import time

from qbattery import cli

RUNS = {
    "time_sweep_vacuum.csv": ["time-sweep"],
    "time_sweep_detuned.csv": ["time-sweep", "--delta", "0.1"],
    "beta_sweep.csv": ["beta-sweep"],
    "landscape_delta0.csv": ["landscape", "--r0-grid", "0.5:1:26", "--alpha-grid", "0:pi:73"],
    "landscape_delta01.csv": ["landscape", "--delta", "0.1", "--r0-grid", "0.5:1:26", "--alpha-grid", "0:pi:73"],
    "repeat_ground.csv": ["repeat-charge"],
    "repeat_ground_detuned.csv": ["repeat-charge", "--delta", "0.1"],
    "repeat_thermal.csv": ["repeat-charge", "--init", "thermal:2"],
    "repeat_trunc2.csv": ["repeat-charge", "--init", "trunc2:0.9", "--delta", "0.1"],
    "double_mode_ground.csv": ["double-mode", "--cycles", "8"],
    "double_mode_trunc2.csv": ["double-mode", "--cycles", "8", "--init", "trunc2:0.8"],
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("outdir", type=pathlib.Path)
    p.add_argument("--fast", action="store_true", help="coarser optimizer grid and time grid")
    p.add_argument("--workers", default="1")
    args = p.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    extra = ["--alpha-points", "37", "--gamma-points", "8"] if args.fast else []
    status = 0
    for name, argv in RUNS.items():
        t0 = time.perf_counter()
        full = argv + extra + ["--workers", args.workers, "--out", str(args.outdir / name)]
        if args.fast and argv[0] == "time-sweep":
            full += ["--tgrid", "0:2pi:101"]
        code = cli.main(full)
        status = status or code
        print(f"{name}: exit {code} in {time.perf_counter() - t0:.1f}s")
    sys.exit(status)


if __name__ == "__main__":
    main()
