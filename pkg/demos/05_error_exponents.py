"""
Error exponents by simulation
=============================

With ``T`` independent samples the ML test errs with probability that
decays like ``exp(-T * CI)``. Fitting ``-ln(pe) - ln(T)/2`` against ``T``
recovers the exponent; the ``ln(T)/2`` term removes the polynomial
prefactor that biases short-horizon fits.
"""

from treechernoff import CanonicalPair, canonical_covariances
from treechernoff.experiment import simulate_exponent

sigma1, sigma2 = canonical_covariances(CanonicalPair(0.5, 0.6))

for mode in ("full", "lt"):
    est = simulate_exponent(sigma1, sigma2, mode=mode, trials=20_000, seed=1)
    print(f"\n{mode} observation, reference CI = {est.ci_reference:.5f}")
    for t, errors, trials, pe, nl in est.rows():
        print(f"  T={t:4d}  errors={errors:6d}  pe={pe:.4g}")
    print(f"  slope = {est.slope:.5f} +- {est.slope_stderr:.5f}  (uncorrected {est.raw_slope:.5f})")
