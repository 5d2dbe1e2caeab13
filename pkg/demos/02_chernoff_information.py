"""
Chernoff information between two Gaussians
==========================================

For zero-mean Gaussians the Chernoff information is found by bisection on
the tilt ``lambda`` until the tilted distribution is equidistant, in KL
divergence, from both endpoints.
"""

from treechernoff import CanonicalPair, canonical_covariances, chernoff, kl, scalar_g

sigma1, sigma2 = canonical_covariances(CanonicalPair(0.5, 0.6))
res = chernoff(sigma1, sigma2)
print(f"CI = {res.value:.12g} at lambda* = {res.lambda_star:.9f} ({res.iterations} bisection steps)")
print(f"KL(S_lam || S1) = {res.kl_to_1:.12g}")
print(f"KL(S_lam || S2) = {res.kl_to_2:.12g}")

###############################################################################
# Chernoff information never exceeds either KL divergence between the
# endpoints, and is symmetric in its arguments.

print("KL(S1 || S2) =", kl(sigma1, sigma2))
print("KL(S2 || S1) =", kl(sigma2, sigma1))
print("swapped CI   =", chernoff(sigma2, sigma1).value)

###############################################################################
# In one dimension the value depends only on the variance ratio ``x`` and
# is written ``g(x)``, with ``g(x) = g(1/x)``.

for x in (1.001, 1.5, 2.0823, 10.0):
    print(f"g({x}) = {scalar_g(x):.6g}   g(1/{x}) = {scalar_g(1 / x):.6g}")
