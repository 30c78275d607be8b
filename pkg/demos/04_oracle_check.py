"""Checking the closed-form results against a brute-force pointer simulation.

The oracle puts both pointers on a position grid, applies the couplings
exactly and integrates the moments numerically. Every instance of the
standard suite should agree to near machine precision.
"""

from succmeter.oracle import compare_with_analytic, refinement_change, standard_suite

for inst in standard_suite():
    args = (inst["rho"], inst["a"], inst["b"], inst["meter1"], inst["meter2"])
    rep = compare_with_analytic(*args)
    print(f"{inst['name']:<28} max diff {rep['max_abs_diff']:.1e}  refinement {refinement_change(*args):.1e}")
