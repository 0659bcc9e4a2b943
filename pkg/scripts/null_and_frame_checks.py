"""Two control experiments on the strong-coupling parameters.

1. Without the four-body term (g = 0) mode 4 is never excited.
2. Shifting the rotating frame by (0, s, u, s - u) leaves peak positions alone.

    python3 scripts/null_and_frame_checks.py [--points 161]
"""

import argparse
import warnings

import numpy as np

from kerr_spectroscopy.analytic import transition_table
from kerr_spectroscopy.artifacts import mhz
from kerr_spectroscopy.cli import load
from kerr_spectroscopy.spectroscopy import SweepPlan, assign_peaks, detect_peaks, run_sweep

TWO_PI = 2 * np.pi


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=161)
    parser.add_argument("--shift", type=float, nargs=2, default=(3.0, -2.0), metavar=("S", "U"),
                        help="frame shifts in MHz")
    args = parser.parse_args()
    warnings.simplefilter("ignore")

    cfg = load("fig3")
    params, solver = cfg.system_params(), cfg.solver
    plan = SweepPlan(TWO_PI * -8, TWO_PI * 8, args.points, cfg.T)

    null = run_sweep(params.replace(g=0.0), plan, solver)
    print(f"g = 0: P_e spans [{null.p_e.min():.3e}, {null.p_e.max():.3e}]")

    s, u = args.shift
    shifted = params.replace(omega_rot=params.omega_rot + TWO_PI * np.array([0.0, s, u, s - u]))
    table = transition_table(params)
    for name, p in (("reference frame", params), (f"shifted by s={s}, u={u} MHz", shifted)):
        peaks = assign_peaks(detect_peaks(run_sweep(p, plan, solver)), table)
        print(f"{name}: " + ", ".join(f"{mhz(x):.3f}" for x in peaks.deltas) + " MHz")


if __name__ == "__main__":
    main()
