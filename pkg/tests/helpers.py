"""Shared helpers for the test suite."""

import random

from poa_lab.mechanisms import StandardBid, standard_profile


def random_profile(rng: random.Random, n: int, k: int, scale: float = 1.0):
    bids = []
    for _ in range(n):
        vec = sorted((rng.uniform(0, scale) for _ in range(k)), reverse=True)
        bids.append(StandardBid(tuple(vec)))
    return standard_profile(k, *bids)
