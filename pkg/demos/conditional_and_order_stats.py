"""Condition on an exact point count and look at order statistics.

Conditioning a Poisson process on its count leaves i.i.d. locations, so
simulation with a fixed count needs no integration at all.  The k-th
smallest of m locations has a closed-form density in terms of the
location density and CDF; for a constant rate it is a Beta density.
"""

import numpy as np
import scipy.stats

from ippp import (
    Interval,
    RateModel,
    RngState,
    order_statistic_density,
    simulate_conditional,
)

model = RateModel.constant(3.0)
window = Interval(0.0, 1.0)

# exactly five points, whatever the rate level says
es = simulate_conditional(model, window, 5, RngState(seed=7))
print(f"conditioned on 5 points: {[round(p, 3) for p in es]}")

# middle order statistic (k=3 of m=5) against its predicted density
reps = 5_000
rng = RngState(seed=11)
medians = np.array(
    [simulate_conditional(model, window, 5, rng).points[2] for _ in range(reps)]
)

bins = np.linspace(0.0, 1.0, 11)
hist, _ = np.histogram(medians, bins=bins, density=True)
centers = 0.5 * (bins[:-1] + bins[1:])
predicted = order_statistic_density(model, window, 3, 5, centers)

print(f"\nmedian of 5 uniform points, {reps} replications:")
print("    x    empirical   predicted")
for x, h, p in zip(centers, hist, predicted):
    print(f"  {x:.2f}   {h:8.4f}   {p:8.4f}")

# with a constant rate the prediction is exactly a Beta(3, 3) density
beta = scipy.stats.beta(3, 3).pdf(centers)
print(f"\nmax |predicted - Beta(3,3)| on the grid: {np.max(np.abs(predicted - beta)):.2e}")
