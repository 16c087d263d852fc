"""Participation equilibria with and without the AMM across curve slopes.

For each slope prints pi*, 2 gamma* r and P for both markets under the
chosen informed-fraction variant, plus the solver's iteration counts.  A
slope that pushes participation to zero can leave a neutral fixed point the
damped iteration only creeps toward; such rows are flagged.

    python scripts/equilibrium_sweep.py --phi 0.9 --delta 0.5 --variant renormalized
"""
import argparse

import numpy as np

from gmamm.equilibrium import SolverConfig, solve_equilibrium
from gmamm.model import ExtendedSecurityParams, ParticipationCurve, two_security_model


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--phi", type=float, default=0.9)
    ap.add_argument("--delta", type=float, nargs=2, default=(0.5, 0.5))
    ap.add_argument("--variant", choices=("paper", "renormalized"), default="paper")
    ap.add_argument("--slopes", type=float, nargs="+", default=list(np.round(np.arange(0.1, 1.01, 0.1), 2)))
    args = ap.parse_args()

    model = two_security_model(args.phi)
    cfg = SolverConfig(variant=args.variant)
    print(f"phi={args.phi} delta={tuple(args.delta)} variant={args.variant}")
    print(f"{'slope':>6} {'pi_amm':>10} {'pi_mm':>10} {'spread_amm':>11} {'spread_mm':>10} "
          f"{'P_amm':>8} {'P_mm':>8} {'iters':>9}")
    for slope in args.slopes:
        curve = ParticipationCurve("linear", slope=float(slope))
        params = [ExtendedSecurityParams(50.0, 1.0, d, curve, i) for i, d in enumerate(args.delta)]
        w = solve_equilibrium(params, model, True, cfg)
        wo = solve_equilibrium(params, model, False, cfg)
        sw, swo = w.spread(params), wo.spread(params)
        print(f"{slope:>6.2f} {w.pi[0]:>10.6f} {wo.pi[0]:>10.6f} {sw[0]:>11.6f} {swo[0]:>10.6f} "
              f"{w.transaction_probability[0]:>8.5f} {wo.transaction_probability[0]:>8.5f} "
              f"{w.iterations:>4}/{wo.iterations:<4}" + ("" if w.converged and wo.converged else "  not converged"))


if __name__ == "__main__":
    main()
