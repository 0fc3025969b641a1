"""Seeded randomized sweeps backing the certification suite.

Every sweep derives one child generator per case from (seed, index), so
runs are reproducible case by case and safe to fan out over a thread pool.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from concurrent.futures import ThreadPoolExecutor

from .equilibria import (
    EQ_TOL,
    BidGrid,
    canonical_upa_profile,
    find_pure_nash,
    is_pure_nash,
    pne_standard_to_uniform,
)
from .mechanisms import (
    DISCRIMINATORY,
    STANDARD,
    UNIFORM,
    UNIFORM_IFACE,
    AuctionInstance,
    BidProfile,
    StandardBid,
    UniformBid,
    allocate,
    beta_minus_i,
    run_auction,
    social_welfare,
    tie_lexicographic,
)
from .smoothness import (
    expected_deviation_utility_exact,
    expected_deviation_utility_mc,
    template_margins_key_lemma,
    verify_key_lemma,
    verify_smoothness,
)
from .valuations import (
    flat_valuation,
    from_marginals,
    marginals,
    random_valuation,
)
from .welfare import enumerate_optimal, greedy_optimal_submodular, optimal_allocation


def case_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{index}")


def parallel_map(fn, items, degree: int = 1):
    if degree <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=degree) as pool:
        return list(pool.map(fn, items))


def random_instance(rng: random.Random, valuation_class: str, pricing: str,
                    n_max: int = 5, k_max: int = 8,
                    scale: float = 1.0) -> AuctionInstance:
    n = rng.randint(2, n_max)
    k = rng.randint(2, k_max)
    vals = tuple(
        random_valuation(valuation_class, k, scale, seed=rng.randrange(2 ** 31))
        for _ in range(n))
    return AuctionInstance(vals, k, pricing, tie_lexicographic())


def random_no_overbidding_profile(instance: AuctionInstance,
                                  rng: random.Random) -> BidProfile:
    """Non-increasing bids whose prefix sums never exceed the value curve."""
    bids = []
    for val in instance.valuations:
        vec = []
        acc = 0.0
        prev = math.inf
        for j in range(1, instance.k + 1):
            cap = min(prev, val.value(j) - acc)
            b = rng.random() * max(cap, 0.0)
            vec.append(b)
            acc += b
            prev = b
        bids.append(StandardBid(tuple(vec)))
    return BidProfile(tuple(bids), STANDARD, instance.k)


def random_no_overbidding_uniform_profile(instance: AuctionInstance,
                                          rng: random.Random) -> BidProfile:
    """Uniform (price, quantity) bids; price capped so no prefix overbids."""
    bids = []
    for val in instance.valuations:
        q = rng.randint(0, instance.k)
        if q == 0:
            bids.append(UniformBid(0.0, 0))
            continue
        cap = min(val.value(s) / s for s in range(1, q + 1))
        bids.append(UniformBid(rng.random() * cap, q))
    return BidProfile(tuple(bids), UNIFORM_IFACE, instance.k)


# ---------------------------------------------------------------------------
# Deviation-guarantee sweeps


@dataclass(frozen=True)
class SweepResult:
    cases: int
    min_margin: float
    worst_case: int

    @property
    def passed(self) -> bool:
        return self.min_margin >= -1e-9


def key_lemma_sweep(count: int, alphas, valuation_class: str, seed: int,
                    n_max: int = 5, k_max: int = 8,
                    parallelism: int = 1) -> SweepResult:
    """Minimum margin of the randomized-deviation guarantee over random cases.

    Each case alternates between the two pricing rules; the checked margin
    is the exact expected deviation utility minus the closed-form lower
    bound (per-unit-value form), together with the per-bidder template form
    whose lambda is halved for subadditive valuations.
    """

    def one(index: int) -> float:
        rng = case_rng(seed, index)
        pricing = DISCRIMINATORY if index % 2 == 0 else UNIFORM
        instance = random_instance(rng, valuation_class, pricing, n_max, k_max)
        profile = random_no_overbidding_profile(instance, rng)
        worst = math.inf
        for alpha in alphas:
            worst = min(worst, *verify_key_lemma(instance, profile, alpha))
            worst = min(worst, *template_margins_key_lemma(
                instance, profile, alpha, valuation_class))
        return worst

    margins = parallel_map(one, range(count), parallelism)
    worst_index = min(range(count), key=lambda i: margins[i])
    return SweepResult(count, margins[worst_index], worst_index)


def smoothness_sweep(count: int, alpha: float, kind: str,
                     valuation_class: str, seed: int, n_max: int = 5,
                     k_max: int = 8, parallelism: int = 1):
    """Certificate for the summed smoothness inequality over random cases.

    Weak certificates alternate between uniform-interface profiles (checked
    directly) and standard-interface profiles (checked through the
    uniformization transform).
    """
    pricing = DISCRIMINATORY if kind == "smooth" else UNIFORM

    def one(index: int):
        rng = case_rng(seed, index)
        instance = random_instance(rng, valuation_class, pricing, n_max, k_max)
        if kind == "weakly_smooth" and index % 2 == 0:
            profile = random_no_overbidding_uniform_profile(instance, rng)
        else:
            profile = random_no_overbidding_profile(instance, rng)
        return instance, profile

    cases = parallel_map(one, range(count), parallelism)
    return verify_smoothness(cases, alpha, kind, valuation_class)


# ---------------------------------------------------------------------------
# Oracle-agreement sweeps


def dp_vs_enumeration_sweep(count: int, seed: int, n_max: int = 4,
                            k_max: int = 6) -> int:
    """DP optimum must match exhaustive enumeration; returns cases checked."""
    for index in range(count):
        rng = case_rng(seed, index)
        cls = ("submodular", "subadditive", "general")[index % 3]
        instance = random_instance(rng, cls, DISCRIMINATORY, n_max, k_max)
        dp = optimal_allocation(instance.valuations, instance.k)
        brute = enumerate_optimal(instance.valuations, instance.k)
        if abs(dp.value - brute.value) > 1e-9:
            raise AssertionError(
                f"case {index}: DP {dp.value} != enumeration {brute.value}")
        if cls == "submodular":
            greedy = greedy_optimal_submodular(instance.valuations, instance.k)
            if abs(greedy.value - dp.value) > 1e-9:
                raise AssertionError(
                    f"case {index}: greedy {greedy.value} != DP {dp.value}")
    return count


def mc_vs_exact_sweep(count: int, seed: int, samples: int = 10 ** 5,
                      parallelism: int = 1) -> float:
    """Monte Carlo deviation utility must sit within 3 sigma of the quadrature.

    One designated comparison per case (the first bidder the benchmark
    allocates to), so exactly `count` independent z-scores are tested.
    Returns the largest |mc - exact| / stderr observed.
    """

    def one(index: int) -> float:
        rng = case_rng(seed, index)
        pricing = DISCRIMINATORY if index % 2 == 0 else UNIFORM
        instance = random_instance(rng, "submodular", pricing, 4, 6)
        profile = random_no_overbidding_profile(instance, rng)
        alpha = (0.5, 0.87, 1.0, 2.0)[index % 4]
        mc_seed = rng.randrange(2 ** 62)
        x_opt = optimal_allocation(instance.valuations, instance.k).allocation
        i = next(j for j in range(instance.n) if x_opt[j] >= 1)
        val = instance.valuations[i]
        beta = beta_minus_i(profile, i, instance.tie_break, instance.k)
        exact = expected_deviation_utility_exact(
            val, x_opt[i], beta, alpha, pricing)
        mean, stderr = expected_deviation_utility_mc(
            val, x_opt[i], beta, alpha, pricing, samples, seed=mc_seed)
        if stderr == 0.0:
            if abs(mean - exact) > 1e-9:
                raise AssertionError("zero-variance MC disagrees")
            return 0.0
        return abs(mean - exact) / stderr

    deviations = parallel_map(one, range(count), parallelism)
    worst = max(deviations)
    if worst > 3.0:
        raise AssertionError(f"MC estimate {worst:.2f} sigma from quadrature")
    return worst


# ---------------------------------------------------------------------------
# Equilibrium sweeps


@dataclass(frozen=True)
class EfficiencySweepResult:
    instances: int
    instances_with_pne: int
    equilibria: int
    min_welfare_slack: float

    @property
    def passed(self) -> bool:
        return self.min_welfare_slack >= -EQ_TOL


def pne_efficiency_sweep(count: int, seed: int, tick: float = 0.125,
                         max_bid: float = 1.0, k_values=(2, 3),
                         scale: float = 0.75,
                         parallelism: int = 1) -> EfficiencySweepResult:
    """Exhaustive pay-as-bid equilibrium search on tiny grids.

    Asserts the grid relaxation of first-price efficiency: every pure
    equilibrium found has welfare at least OPT - n*k*tick.  Valuations are
    scaled below max_bid so the deviation space is never truncated.
    """

    def one(index: int):
        rng = case_rng(seed, index)
        k = k_values[index % len(k_values)]
        vals = tuple(
            random_valuation("general", k, scale / k, seed=rng.randrange(2 ** 31))
            for _ in range(2))
        instance = AuctionInstance(vals, k, DISCRIMINATORY, tie_lexicographic())
        grid = BidGrid(tick, max_bid, STANDARD)
        result = find_pure_nash(instance, grid, mode="exhaustive")
        opt = optimal_allocation(vals, k).value
        slack = math.inf
        for profile in result.equilibria:
            out = allocate(profile, instance.tie_break)
            sw = social_welfare(vals, out.allocation)
            slack = min(slack, sw - (opt - 2 * k * tick))
        return len(result.equilibria), slack

    outcomes = parallel_map(one, range(count), parallelism)
    total_eq = sum(n for n, _ in outcomes)
    with_pne = sum(1 for n, _ in outcomes if n > 0)
    min_slack = min((s for _, s in outcomes if s != math.inf),
                    default=math.inf)
    return EfficiencySweepResult(count, with_pne, total_eq, min_slack)


# ---------------------------------------------------------------------------
# Canonical uniform-price equilibria and the interface conversion


def lemma1_equilibrium(rng: random.Random, winners_max: int = 3,
                       k_max: int = 4) -> tuple[AuctionInstance, BidProfile]:
    """Uniform-price equilibrium of the canonical undominated form.

    A few strong bidders absorb the k units at their marginal bids while k
    identical weak bidders all bid the same value d below every winning
    marginal; any demand reduction still faces price d, so the profile is a
    pure equilibrium.
    """
    k = rng.randint(2, k_max)
    winners = rng.randint(1, min(winners_max, k))
    vals = []
    for _ in range(winners):
        first = rng.uniform(0.9, 1.0)
        rest = sorted((rng.uniform(0.3, 0.8) for _ in range(k - 1)),
                      reverse=True)
        vals.append(from_marginals([first] + rest))
    pool = sorted((m for v in vals for m in marginals(v)), reverse=True)
    level = rng.uniform(0.05, 0.9 * pool[k - 1])
    vals += [flat_valuation(level, k) for _ in range(k)]
    instance = AuctionInstance(tuple(vals), k, UNIFORM, tie_lexicographic())
    x = greedy_optimal_submodular(instance.valuations, k).allocation
    profile = canonical_upa_profile(instance, x)
    return instance, profile


def lemma1_conversion_sweep(count: int, seed: int,
                            parallelism: int = 1) -> int:
    """Canonical equilibria convert to uniform bidding losing nothing.

    Checks, per case: the standard profile is a pure equilibrium under
    no-overbidding deviations; the conversion preserves allocation, price
    and welfare exactly; and the converted profile is itself an equilibrium.
    Returns the number of cases checked.
    """

    def one(index: int):
        rng = case_rng(seed, index)
        instance, profile = lemma1_equilibrium(rng)
        grid = BidGrid(1e-3, 2.0, STANDARD, no_overbidding=True)
        report = is_pure_nash(profile, instance, grid)
        if report.max_regret > EQ_TOL:
            raise AssertionError(
                f"case {index}: canonical profile has regret {report.max_regret}")
        converted = pne_standard_to_uniform(profile, instance)
        ugrid = replace(grid, interface="uniform")
        report_u = is_pure_nash(converted, instance, ugrid)
        if report_u.max_regret > EQ_TOL:
            raise AssertionError(
                f"case {index}: converted profile has regret {report_u.max_regret}")
        before = run_auction(profile, instance.tie_break, UNIFORM)
        after = run_auction(converted, instance.tie_break, UNIFORM)
        if before.allocation != after.allocation:
            raise AssertionError(f"case {index}: allocation changed")
        if before.uniform_price != after.uniform_price:
            raise AssertionError(f"case {index}: price changed")

    parallel_map(one, range(count), parallelism)
    return count


def proposition1_sweep(count: int, seed: int, eps_values=(0.1, 0.01),
                       parallelism: int = 1) -> int:
    """Random submodular instances through both tie-break constructions."""
    from .instances import verify_proposition1

    def one(index: int):
        rng = case_rng(seed, index)
        n = rng.randint(2, 4)
        k = rng.randint(2, 4)
        vals = tuple(
            random_valuation("submodular", k, 1.0, seed=rng.randrange(2 ** 31))
            for _ in range(n))
        instance = AuctionInstance(vals, k, DISCRIMINATORY, tie_lexicographic())
        checks = verify_proposition1(instance, eps_values)
        for c in checks:
            if not c.passed:
                raise AssertionError(f"case {index}: {c.name} failed ({c.value})")

    parallel_map(one, range(count), parallelism)
    return count
