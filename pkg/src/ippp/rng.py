"""Seedable deterministic randomness and base variate generators.

The bit source is Philox 4x64 (counter based, 256-bit counter plus a
128-bit key built from the 64-bit seed and stream id), so identical
(seed, stream) pairs reproduce identical sequences on every platform and
distinct stream ids give independent streams.  All distribution
transforms are implemented here on top of the raw word stream rather
than delegated to numpy's Generator methods: the numeric path from words
to variates is then fixed by this file alone, which keeps golden values
stable across numpy versions.

Uniform draws consume one 64-bit word each, so a vectorized
``uniform01(size=n)`` consumes exactly the words of n scalar draws and
produces bitwise-equal values.  The same holds for ``exponential`` and
``erlang`` (lane major: each lane takes a contiguous block of words).
``poisson`` consumes a data-dependent number of words per lane; batched
draws interleave lanes by iteration, so a batch is deterministic for
(seed, stream, size) but is not word-for-word the same as a sequence of
scalar calls.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidMean, InvalidParameter, InvalidRate, InvalidShape

__all__ = ["RngState"]

_U64 = 2**64

# Above this mean, Poisson draws are split into equal chunks (Poisson
# additivity) so the product in Knuth's method stays away from underflow.
_POISSON_CHUNK = 30.0

_INV_2_53 = 2.0**-53


class RngState:
    """A deterministic random source identified by (seed, stream).

    Single-owner: not safe to share between threads.  Parallel work should
    derive one stream id per worker from a common seed.
    """

    def __init__(self, seed: int, stream: int = 0):
        for name, value in (("seed", seed), ("stream", stream)):
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise InvalidParameter(f"{name} must be an integer, got {value!r}")
            if not 0 <= int(value) < _U64:
                raise InvalidParameter(f"{name} must fit in 64 bits, got {value!r}")
        self.seed = int(seed)
        self.stream = int(stream)
        self._bits = np.random.Philox(
            key=np.array([self.seed, self.stream], dtype=np.uint64)
        )

    def __repr__(self):
        return f"RngState(seed={self.seed}, stream={self.stream})"

    # -- core draws ----------------------------------------------------------

    def _words(self, n: int):
        return self._bits.random_raw(n)

    def uniform01(self, size: int | None = None):
        """Uniform variates on [0, 1) with 53-bit precision.

        Scalar when ``size`` is None, else a 1-d array of length ``size``.
        """
        n = 1 if size is None else int(size)
        vals = (self._words(n) >> np.uint64(11)) * _INV_2_53
        return float(vals[0]) if size is None else vals

    def exponential(self, rate: float = 1.0, size: int | None = None):
        """Exponential variates via the inverse transform -log(1 - U)/rate."""
        rate = _check_rate(rate)
        n = 1 if size is None else int(size)
        u = self.uniform01(size=n)
        # log1p(-u) is -log(1-u) without cancellation for small u
        vals = -np.log1p(-u) / rate
        return float(vals[0]) if size is None else vals

    def erlang(self, shape: int, rate: float = 1.0, size: int | None = None):
        """Erlang variates: the sum of ``shape`` exponential(rate) draws.

        Each output lane consumes a contiguous block of ``shape`` words, so
        a scalar draw equals the sum of ``shape`` sequential exponentials.
        """
        if not isinstance(shape, (int, np.integer)) or isinstance(shape, bool):
            raise InvalidShape(f"shape must be an integer, got {shape!r}")
        if shape < 1:
            raise InvalidShape(f"shape must be >= 1, got {shape}")
        rate = _check_rate(rate)
        n = 1 if size is None else int(size)
        u = self.uniform01(size=n * int(shape)).reshape(n, int(shape))
        vals = np.add.reduce(-np.log1p(-u) / rate, axis=1)
        return float(vals[0]) if size is None else vals

    def poisson(self, mean: float, size: int | None = None):
        """Poisson counts by Knuth's product method.

        Means above 30 are split into ceil(mean/30) equal chunks whose
        draws are summed (Poisson additivity), keeping exp(-chunk) well
        away from underflow.
        """
        try:
            mean = float(mean)
        except (TypeError, ValueError):
            raise InvalidMean(f"mean must be a real number, got {mean!r}")
        if not math.isfinite(mean) or mean < 0:
            raise InvalidMean(f"mean must be finite and >= 0, got {mean!r}")
        n = 1 if size is None else int(size)
        counts = np.zeros(n, dtype=np.int64)
        if mean > 0:
            nchunks = int(math.ceil(mean / _POISSON_CHUNK))
            threshold = math.exp(-mean / nchunks)
            for _ in range(nchunks):
                counts += self._poisson_block(threshold, n)
        return int(counts[0]) if size is None else counts

    def _poisson_block(self, threshold: float, n: int):
        # Knuth: count multiplications needed to drive prod(U_i) below
        # exp(-mean).  Lanes that finish drop out of the active set.
        k = np.zeros(n, dtype=np.int64)
        prod = np.ones(n)
        active = np.arange(n)
        while active.size:
            prod[active] *= self.uniform01(size=active.size)
            k[active] += 1
            active = active[prod[active] > threshold]
        return k - 1


def _check_rate(rate) -> float:
    try:
        rate = float(rate)
    except (TypeError, ValueError):
        raise InvalidRate(f"rate must be a real number, got {rate!r}")
    if not math.isfinite(rate) or rate <= 0:
        raise InvalidRate(f"rate must be finite and > 0, got {rate!r}")
    return rate
