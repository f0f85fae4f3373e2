"""
Cross-checking the solvers
==========================

Three independent routes to the same box evolution: the mode series, a
Crank-Nicolson finite-difference solver and a time-sliced restricted
propagator.  The first two agree to high accuracy; the sliced propagator
converges slowly, with wall values shrinking as the slices get thinner.
"""

from qabsorb import checks

print(f"Crank-Nicolson survival vs closed two-level law: {checks.cn_survival_deviation(2001, 4e-5):.2e}")

dts = [4e-4, 2e-4, 1e-4]
errors, walls = checks.slice_study(4001, dts, t_end=0.02)
print("\n  dt        L2 error vs series   |psi| at the wall")
for dt, e, w in zip(dts, errors, walls):
    print(f"{dt:.1e}    {e:.3e}            {w:.3e}")

print()
for row in checks.run_oracle_checks(quick=True):
    print(f"{'PASS' if row.passed else 'FAIL'}  {row.check:28s} {row.value:.3e} (tol {row.tolerance:.0e})")
