import numpy as np
import pytest

import slotbandits as sb


@pytest.fixture(scope="session")
def pbm_3x2():
    """3 arms, 2 slots, examination probabilities (1.0, 0.5), means (0.9, 0.8, 0.6)."""
    return sb.factorized((1.0, 0.5), (0.9, 0.8, 0.6))


@pytest.fixture(scope="session")
def pos_2x2():
    """3 arms, 2 slots, independent per-slot means."""
    return sb.per_slot([[0.9, 0.5], [0.7, 0.6], [0.5, 0.3]])


def random_factorized(rng, num_arms=None, num_slots=None):
    """Random FACTORIZED instance with strictly decreasing exam probabilities
    and well-separated means (keeps every pairwise KL bounded away from 0)."""
    n = num_arms or int(rng.integers(3, 6))
    m = num_slots or int(rng.integers(2, min(n, 3) + 1))
    p = np.sort(rng.uniform(0.2, 1.0, size=m))[::-1]
    while np.min(-np.diff(p)) < 1e-3:
        p = np.sort(rng.uniform(0.2, 1.0, size=m))[::-1]
    mu = rng.uniform(0.05, 0.95, size=n)
    while np.min(np.abs(np.subtract.outer(mu, mu)[~np.eye(n, dtype=bool)])) < 0.02:
        mu = rng.uniform(0.05, 0.95, size=n)
    return sb.factorized(tuple(p), tuple(mu))


def random_per_slot(rng, num_arms=None, num_slots=None):
    n = num_arms or int(rng.integers(3, 6))
    m = num_slots or int(rng.integers(2, min(n, 3) + 1))
    theta = rng.uniform(0.05, 0.95, size=(n, m))
    return sb.per_slot(theta)
