"""Optional quick-look plots of the CSV tables (needs matplotlib; not used by the library).

    python3 scripts/plot_tables.py results/time_sweep_vacuum.csv [more.csv ...]
"""

import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def load(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head = rows[0]
    cols = {h: [] for h in head}
    for r in rows[1:]:
        for h, x in zip(head, r):
            cols[h].append({"true": 1.0, "false": 0.0}.get(x) if x in ("true", "false") else float(x))
    return head, cols


def plot(path):
    head, cols = load(path)
    x = head[0]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    if x == "r0":
        sc = ax.scatter(cols["r0"], cols["alpha"], c=cols["advantage"], s=8)
        fig.colorbar(sc, label="advantage")
        ax.set_ylabel("alpha")
    else:
        skip = {x, "gapless", "simultaneous"} | {h for h in head if h.startswith("pop_")}
        for h in head:
            if h not in skip:
                ax.plot(cols[x], cols[h], marker="." if x == "m" else None, label=h)
        ax.legend(fontsize=7)
    ax.set_xlabel(x)
    out = pathlib.Path(path).with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    for p in sys.argv[1:]:
        plot(p)
