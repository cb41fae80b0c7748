"""Replication study: BIC order selection for Burg AR fits and VAR fits,
plus the false-fail rate of the residual whiteness check.

    python scripts/order_selection.py --reps 100
"""
import argparse
from collections import Counter

import numpy as np

from lptime.simulate import ar_process, var_process
from lptime.spectrum import burg_fit, select_order
from lptime.var import fit_var, residual_diagnostics


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--n", type=int, default=10_000)
    args = ap.parse_args()

    for coefs in ((0.5,), (0.5, -0.3), (0.3, 0.0, 0.2)):
        counts = Counter(select_order(burg_fit(ar_process(coefs, args.n, r), 10))
                         for r in range(args.reps))
        print(f"AR{coefs}: selected orders {dict(sorted(counts.items()))}")

    A = 0.3 * np.eye(3)
    orders, passed, outside = Counter(), 0, []
    for r in range(args.reps):
        model = fit_var(var_process([A], args.n, 10_000 + r), max_order=4)
        orders[model.order] += 1
        rep = residual_diagnostics(model)
        passed += rep.passed
        outside.append(rep.fraction_outside)
    print(f"VAR(1) A=.3I: selected orders {dict(sorted(orders.items()))}")
    print(f"whiteness check passed {passed}/{args.reps}; mean share outside band {np.mean(outside):.2%}")


if __name__ == "__main__":
    main()
