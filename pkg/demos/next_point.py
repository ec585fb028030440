"""The n-th point above or below a known point, and its density.

Through the time change, the n-th point above an anchor sits an
Erlang(n, 1) mass away in cumulative-intensity units.  When the total
mass in that direction is finite the point may not exist; the sampler
reports that as None and the density integrates to the Erlang CDF of
the directional mass instead of 1.
"""

import numpy as np

from ippp import (
    Direction,
    NthPointQuery,
    RateModel,
    RngState,
    nth_point_density,
    nth_point_mass,
    sample_nth_point,
)

# unit rate: the n-th point above 0 is an Erlang(n, 1) variable
unit = RateModel.constant(1.0)
query = NthPointQuery(anchor=0.0, n=3, direction=Direction.ABOVE)

draws = sample_nth_point(unit, query, RngState(seed=5), size=50_000)
print(f"3rd point above 0 under a unit rate, 50000 draws:")
print(f"  mean {draws.mean():.4f}  (Erlang mean 3.0)")
print(f"  var  {draws.var(ddof=1):.4f}  (Erlang var  3.0)")

# the conditional density evaluated on a grid
xs = np.array([1.0, 2.0, 3.0, 5.0, 8.0])
dens = nth_point_density(unit, query, xs)
print("\n  x      density")
for x, g in zip(xs, dens):
    print(f"  {x:.1f}   {g:.6f}")

# a rate supported only on [0, 1] with total mass one half: beyond it
# there is simply nothing left to find
bump = RateModel.piecewise_constant([0.0, 1.0], [0.5])
first_above = NthPointQuery(anchor=0.0, n=1, direction=Direction.ABOVE)

mass = nth_point_mass(bump, first_above)
print(f"\nbump rate, P(a first point above 0 exists) = {mass:.6f}")
print(f"Erlang(1,1) CDF at mass 0.5:                {1.0 - np.exp(-0.5):.6f}")

hits = sample_nth_point(bump, first_above, RngState(seed=9), size=10_000)
print(f"fraction of draws that found a point:       {np.mean(np.isfinite(hits)):.4f}")

# from anchor 1 upward the mass is zero, so the answer is always None
beyond = NthPointQuery(anchor=1.0, n=1, direction=Direction.ABOVE)
print(f"first point above 1: {sample_nth_point(bump, beyond, RngState(seed=2))}")
