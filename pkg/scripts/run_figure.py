"""Reproduce one of the bundled spectra and summarise its peaks.

    python3 scripts/run_figure.py fig3 [--out results/fig3] [--workers 1]
"""

import argparse
import logging
import time

from kerr_spectroscopy.artifacts import mhz
from kerr_spectroscopy.cli import load
from kerr_spectroscopy.pipeline import run


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("config", choices=["fig3", "fig4"])
    parser.add_argument("--out")
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    cfg = load(args.config)
    start = time.perf_counter()
    result, manifest = run(cfg, args.out, workers=args.workers)
    print(f"{result.spectrum.deltas.size} points in {time.perf_counter() - start:.0f} s")
    print(f"{'delta (MHz)':>12} {'P_e':>11}  assignment")
    for peak in result.peaks:
        label = " + ".join(peak.assigned) if peak.assigned else "-"
        print(f"{mhz(peak.delta):>12.4f} {peak.height:>11.4e}  {label}")
    print("transitions (MHz):", ", ".join(f"{t.label} {mhz(t.energy):.3f}" for t in result.table))
    print("diagnostics:", manifest.diagnostics)


if __name__ == "__main__":
    main()
