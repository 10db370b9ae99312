import pytest

from shotstego import camera


@pytest.fixture(scope="session")
def flat_pair_1m():
    """One million-pixel capture pair of a flat lambda=1e4 scene, shared by
    the statistics tests (the pair itself is deterministic in the seed)."""
    scene = camera.make_scene(1024, 1024, "flat", 10000)
    sensor = camera.SensorConfig(seed=57)
    return camera.capture_pair(scene, sensor)


def poisson_collision_oracle(lam: float, hi: int = 0) -> float:
    """Brute-force sum of squared Poisson probabilities, kept independent of
    the library implementation on purpose."""
    import math
    if lam == 0:
        return 1.0
    hi = hi or max(40, int(lam + 14 * math.sqrt(lam)))
    lo = max(0, int(lam - 14 * math.sqrt(lam)))
    total = 0.0
    # iterate in log space for numerical stability at large lam
    from math import exp, lgamma, log
    for k in range(lo, hi + 1):
        logp = -lam + k * log(lam) - lgamma(k + 1)
        total += exp(2 * logp)
    return total


@pytest.fixture(scope="session")
def collision_oracle():
    return poisson_collision_oracle
