#!/usr/bin/env python3
"""Operator entanglement decay of U^n, plus the CUE trace-moment suite.

Runs the opent-curve experiment for CUE and COE and prints the means
against the n = 1 CUE closed form (d^2 - d_A^2 - d_B^2 + 1)/(d^2 - 1).
The second part estimates <|tr U^n|^2> and <|tr U^n|^4> for the CUE
and compares with the min-rule values min(n,d) and
2 min(n,d)^2 + min(2n,d) - 2 min(n,d), the ingredients of the
finite-n curve shape.

Usage:
    python3 scripts/reproduce_operator_entanglement.py --da 4 --db 5 --samples 20000
"""

import argparse

from entpower.closedform import cue_form_factor, cue_fourth_moment, op_ent_cue
from entpower.ensembles import EnsembleTag
from entpower.montecarlo import ExperimentConfig, ExperimentKind, StateMode, run_experiment


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--da", type=int, default=4)
    ap.add_argument("--db", type=int, default=5)
    ap.add_argument("--nmax", type=int, default=None, help="default 2*da*db")
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--parallelism", type=int, default=1)
    return ap.parse_args()


def main():
    args = parse_args()
    da, db, d = args.da, args.db, args.da * args.db
    n_max = args.nmax if args.nmax is not None else 2 * d

    def run(kind, ensemble, seed_offset, n=n_max):
        cfg = ExperimentConfig(kind=kind, ensemble=ensemble, state_mode=StateMode.NONE,
                               d_a=da, d_b=db, n_max=n, samples=args.samples,
                               master_seed=args.seed + seed_offset)
        return run_experiment(cfg, parallelism=args.parallelism)

    target = op_ent_cue(da, db)
    for label, ensemble, offset in [("CUE", EnsembleTag.CUE, 0), ("COE", EnsembleTag.COE, 1)]:
        table = run(ExperimentKind.OPENT_CURVE, ensemble, offset)
        print(f"\n{label} operator entanglement, d = {da} x {db}")
        print(f"  {'n':>3s} {'mean':>12s} {'stderr':>10s}")
        for row in table.rows:
            print(f"  {row.n:3d} {row.mean:12.7f} {row.stderr:10.2e}")
        if ensemble is EnsembleTag.CUE:
            row = table.row_for(1)
            dev = (row.mean - float(target)) / row.stderr
            print(f"  n=1 closed form {target} = {float(target):.7f} ({dev:+.2f} se)")

    ff = run(ExperimentKind.FORM_FACTOR, EnsembleTag.CUE, 2)
    fm = run(ExperimentKind.FOURTH_MOMENT, EnsembleTag.CUE, 3, n=min(n_max, d))
    print(f"\nCUE trace moments, d = {d}")
    print(f"  {'n':>3s} {'<|t|^2>':>10s} {'min(n,d)':>8s} {'<|t|^4>':>10s} {'rule':>6s}")
    for row2 in ff.rows:
        part = f"  {row2.n:3d} {row2.mean:10.4f} {cue_form_factor(row2.n, d):8d}"
        row4 = fm.row_for(row2.n) if row2.n <= min(n_max, d) else None
        if row4 is not None:
            part += f" {row4.mean:10.3f} {cue_fourth_moment(row4.n, d):6d}"
        print(part)


if __name__ == "__main__":
    main()
