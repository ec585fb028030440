"""Simulate a point process on a bounded window and check the count law.

The number of points on a window is Poisson with mean equal to the
integral of the rate over it, and given the count the locations are
i.i.d. with density proportional to the rate.
"""

import numpy as np

from ippp import Interval, RateModel, RngState, expected_count, sample_count, simulate_window

# a rate that ramps up linearly: r(x) = 1 + 0.5 x
model = RateModel.linear(1.0, 0.5)
window = Interval(0.0, 10.0)

mean = expected_count(model, window)
print(f"rate: {model.describe()}")
print(f"window: {window}, expected count = {mean:.6f}")

# one full realization
es = simulate_window(model, window, RngState(seed=42))
print(f"\none realization ({len(es)} points):")
print("  " + ", ".join(f"{p:.3f}" for p in es))

# the same seed reproduces it exactly
again = simulate_window(model, window, RngState(seed=42))
print(f"same seed reproduces it: {es == again}")

# counts over many runs follow the Poisson law
n = 20_000
counts = sample_count(model, window, RngState(seed=1), size=n)
print(f"\n{n} replications:")
print(f"  empirical mean  {counts.mean():.4f}   (Poisson mean  {mean:.4f})")
print(f"  empirical var   {counts.var(ddof=1):.4f}   (Poisson var   {mean:.4f})")

# points cluster where the rate is high: compare halves of the window
pts = np.concatenate(
    [simulate_window(model, window, RngState(seed=s)).points for s in range(500)]
)
left = np.mean(pts < 5.0)
print(f"\nfraction of points in the left half: {left:.3f}")
print(f"predicted from the rate integrals:    {expected_count(model, Interval(0.0, 5.0)) / mean:.3f}")
