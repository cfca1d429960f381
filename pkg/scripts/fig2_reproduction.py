"""Normalized eigenvalue curves of H H* for 0.2 m ULAs at D = 10 L, 60/100/300 GHz.

Writes spectra, plot data and report.json to --out; --plot also saves a PNG
(needs matplotlib).
"""

import argparse
from pathlib import Path

from losdof.experiments import emit_plotdata, load_scenario, run_scenario

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=ROOT / "configs" / "fig2.toml")
    ap.add_argument("--out", default="out/fig2")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()

    report = run_scenario(load_scenario(args.config), out_dir=args.out)
    paths = emit_plotdata(report)
    for rec in report.records:
        print(f"{rec['value'] / 1e9:6.0f} GHz  DOF={rec['closed_form_dof']:7.3f}  "
              f"count(0.5)={rec['empirical_dof']['0.5']:3d}  "
              f"plunge/DOF={rec['relative_plunge_width']:.3f}")

    if args.plot:
        import csv
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 3.5))
        for rec, path in zip(report.records, paths):
            with open(path) as fh:
                rows = list(csv.DictReader(fh))
            ax.plot([float(r["index_over_dof"]) for r in rows],
                    [float(r["eigenvalue_normalized"]) for r in rows],
                    label=f"{rec['value'] / 1e9:.0f} GHz")
        ax.set_xlim(0, 3)
        ax.set_xlabel("index / DOF")
        ax.set_ylabel("normalized eigenvalue")
        ax.legend()
        fig.tight_layout()
        fig.savefig(Path(args.out) / "fig2.png", dpi=150)


if __name__ == "__main__":
    main()
