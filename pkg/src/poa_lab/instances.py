"""Canned lower-bound instances, equilibrium constructions and verifiers."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .equilibria import (
    BayesianGame,
    BidGrid,
    Strategy,
    bayesian_poa,
    is_bayes_nash,
    is_epsilon_equilibrium,
    is_pure_nash,
    lemma5_structure,
    pure_strategy,
)
from .mechanisms import (
    DISCRIMINATORY,
    STANDARD,
    UNIFORM,
    UNIFORM_IFACE,
    AuctionInstance,
    BidProfile,
    StandardBid,
    TieBreakRule,
    UniformBid,
    allocate,
    run_auction,
    social_welfare,
    tie_break_presets,
    tie_explicit,
    tie_favor_bidder,
    tie_lexicographic,
    uniform_profile,
    zero_bid,
)
from .smoothness import theorem6_da_frontier, theorem6_upa_check
from .valuations import (
    Valuation,
    additive_valuation,
    flat_valuation,
    is_submodular,
    marginals,
)
from .welfare import optimal_allocation, poa_ratio


@dataclass(frozen=True)
class NamedInstance:
    """A concrete construction with its expected quantities.

    profiles carry role tags ("equilibrium" or "lower-bound-witness");
    provenance records where each expected number comes from.
    """

    id: str
    instance: AuctionInstance
    interface: str
    profiles: tuple[tuple[str, BidProfile], ...]
    expected: dict
    provenance: dict
    grid: BidGrid | None = None

    @property
    def n(self) -> int:
        return self.instance.n

    @property
    def k(self) -> int:
        return self.instance.k

    def profile(self, role: str) -> BidProfile:
        for tag, prof in self.profiles:
            if tag == role:
                return prof
        raise KeyError(f"no profile with role {role!r}")

    def to_json(self):
        return {
            "id": self.id,
            "instance": self.instance.to_json(),
            "interface": self.interface,
            "profiles": [{"role": tag, "profile": prof.to_json()}
                         for tag, prof in self.profiles],
            "expected": dict(self.expected),
            "provenance": dict(self.provenance),
            "grid": self.grid.to_json() if self.grid else None,
        }


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float | None = None
    detail: str = ""

    def to_json(self):
        return {"name": self.name, "passed": self.passed,
                "value": self.value, "detail": self.detail}


# ---------------------------------------------------------------------------
# Demand-reduction lower bound (uniform pricing)


def theorem4_instance(k: int, eps: float = 1e-6,
                      tick: float = 1e-3) -> NamedInstance:
    """n = k bidders; the top bidder's value jumps at the k-th unit.

    Everyone wins one unit at price zero in equilibrium while the optimum
    gives all k units to bidder 1, so the ratio tends to 2k/(k+1).
    """
    if k < 3:
        raise ValueError("needs k >= 3")
    if eps <= 0:
        raise ValueError("eps must be positive")
    v1 = Valuation((0.0,) + (1.0,) * (k - 1) + (2.0,))
    vals = (v1, flat_valuation(1.0 / k, k)) + tuple(
        flat_valuation(eps, k) for _ in range(k - 2))
    instance = AuctionInstance(vals, k, UNIFORM, tie_lexicographic())
    bids = (UniformBid(1.0, 1), UniformBid(1.0 / k, 1)) + tuple(
        UniformBid(eps, 1) for _ in range(k - 2))
    profile = uniform_profile(k, *bids)
    eq_welfare = 1.0 + 1.0 / k + (k - 2) * eps
    expected = {
        "opt_value": 2.0,
        "eq_welfare": eq_welfare,
        "poa": 2.0 / eq_welfare,
        "poa_limit": 2.0 * k / (k + 1),
        "max_regret": 0.0,
    }
    provenance = {"opt_value": "reference", "eq_welfare": "reference",
                  "poa": "derived", "poa_limit": "reference",
                  "max_regret": "reference"}
    grid = BidGrid(tick, 2.0, UNIFORM_IFACE, no_overbidding=True)
    return NamedInstance("theorem4", instance, UNIFORM_IFACE,
                         (("equilibrium", profile),), expected, provenance,
                         grid)


def verify_theorem4(k: int = 10, eps: float = 1e-6,
                    tick: float = 1e-3) -> list[CheckResult]:
    named = theorem4_instance(k, eps, tick)
    inst = named.instance
    opt = optimal_allocation(inst.valuations, k)
    checks = [
        CheckResult("opt_value", abs(opt.value - 2.0) <= 1e-9, opt.value),
        CheckResult("opt_all_to_bidder_1",
                    opt.allocation == (k,) + (0,) * (k - 1)),
    ]
    profile = named.profile("equilibrium")
    out = allocate(profile, inst.tie_break)
    sw = social_welfare(inst.valuations, out.allocation)
    checks.append(CheckResult(
        "eq_welfare", abs(sw - named.expected["eq_welfare"]) <= 1e-12, sw))
    report = is_pure_nash(profile, inst, named.grid)
    checks.append(CheckResult("pure_nash_regret",
                              report.max_regret <= 1e-9, report.max_regret))
    poa = poa_ratio(opt.value, sw)
    target = 2.0 * k / (k + 1) - 1e-4
    checks.append(CheckResult("poa_lower_bound", poa >= target, poa,
                              f"needs >= {target:.6f}"))
    return checks


# ---------------------------------------------------------------------------
# Pay-as-bid template frontier witness


def _theorem6_curve(k: int, mu: float) -> StandardBid:
    cutoff = k * (1.0 - math.exp(-1.0 / mu)) + 1.0
    values = []
    for j in range(1, k + 1):
        # bids are defined up to floor(cutoff); the proof's integer boundary
        # convention is absorbed by the O(1/k) slack it already carries
        if j <= cutoff:
            values.append(max(0.0, 1.0 - k / (math.exp(1.0 / mu) * (k - j + 1))))
        else:
            values.append(0.0)
    return StandardBid(tuple(values))


def theorem6_da_instance(k: int, mu: float = 1.0) -> NamedInstance:
    """Additive bidder against a worthless bidder with an equalizing bid curve.

    Not an equilibrium: a witness showing the deviation-guarantee template
    cannot certify anything better than e/(e-1) for pay-as-bid pricing.
    """
    if k < 2:
        raise ValueError("needs k >= 2")
    if mu <= 0:
        raise ValueError("mu must be positive")
    vals = (additive_valuation(1.0, k),
            Valuation((0.0,) * (k + 1)))
    instance = AuctionInstance(vals, k, DISCRIMINATORY, tie_favor_bidder(0))
    profile = BidProfile((zero_bid(k), _theorem6_curve(k, mu)), STANDARD, k)
    expected = {"opt_value": float(k),
                "b2_first": 1.0 - math.exp(-1.0 / mu)}
    provenance = {"opt_value": "reference", "b2_first": "derived"}
    return NamedInstance("theorem6-da", instance, STANDARD,
                         (("lower-bound-witness", profile),), expected,
                         provenance)


def verify_theorem6_da(k: int = 50, mu: float = 1.0) -> list[CheckResult]:
    named = theorem6_da_instance(k, mu)
    curve = named.profile("lower-bound-witness").vector(1)
    checks = [
        CheckResult("curve_first_value",
                    abs(curve[0] - named.expected["b2_first"]) <= 1e-12,
                    curve[0]),
        CheckResult("curve_non_increasing",
                    all(curve[j + 1] <= curve[j] for j in range(k - 1))),
    ]
    opt = optimal_allocation(named.instance.valuations, k)
    checks.append(CheckResult("opt_value", abs(opt.value - k) <= 1e-9,
                              opt.value))
    frontier = theorem6_da_frontier(named.instance,
                                    named.profile("lower-bound-witness"), mu)
    checks.append(CheckResult(
        "frontier_inequality", frontier["holds"], frontier["lhs"],
        f"bound {frontier['bound']:.6f}"))
    return checks


def theorem6_upa_instance() -> NamedInstance:
    """One unit, values (1, 1/2), both bid 1/2, ties favor the second bidder."""
    vals = (Valuation((0.0, 1.0)), Valuation((0.0, 0.5)))
    instance = AuctionInstance(vals, 1, UNIFORM, tie_favor_bidder(1))
    profile = uniform_profile(1, UniformBid(0.5, 1), UniformBid(0.5, 1))
    expected = {"opt_value": 1.0, "eq_welfare": 0.5, "winner_payment": 0.5,
                "sup_total_utility": 0.5}
    provenance = {k: "reference" for k in expected}
    return NamedInstance("theorem6-upa", instance, UNIFORM_IFACE,
                         (("lower-bound-witness", profile),), expected,
                         provenance)


def verify_theorem6_upa(tick: float = 1e-3) -> list[CheckResult]:
    named = theorem6_upa_instance()
    inst = named.instance
    out = run_auction(named.profile("lower-bound-witness"), inst.tie_break,
                      UNIFORM)
    checks = [
        CheckResult("bidder2_wins", out.allocation == (0, 1)),
        CheckResult("winner_payment", out.payments[1] == 0.5,
                    out.payments[1]),
        CheckResult("opt_to_bidder_1",
                    optimal_allocation(inst.valuations, 1).allocation == (1, 0)),
    ]
    scan = theorem6_upa_check(tick)
    checks.append(CheckResult("sup_total_utility_half", scan["exact_half"],
                              scan["total"], scan["frontier"]))
    return checks


# ---------------------------------------------------------------------------
# Discretized Bayesian example (pay-as-bid)


def appendix_c_bayesian(alpha: float = 0.0014,
                        tick: float = 1e-3) -> tuple[BayesianGame, Strategy]:
    """One unit, a known bidder against a two-type bidder, ticked bid space.

    The stated pure profile is a Bayes-Nash equilibrium whenever
    alpha <= 1.499 * tick, and its expected inefficiency exceeds 1.0004.
    """
    grid = BidGrid(tick, 1.0, STANDARD, no_overbidding=False)
    v1 = Valuation((0.0, 1.0))
    v21 = Valuation((0.0, 0.667))
    v22 = Valuation((0.0, 0.333))
    game = BayesianGame(
        1,
        ((v1,), (v21, v22)),
        ((1.0,), (alpha, 1.0 - alpha)),
        grid,
        tie_favor_bidder(0),
        DISCRIMINATORY,
    )
    lo = round(0.333 / tick)
    strat = pure_strategy((
        (StandardBid((grid.value(lo),)),),
        (StandardBid((grid.value(lo + 1),)), StandardBid((grid.value(lo),))),
    ))
    return game, strat


def verify_appendix_c(alpha: float = 0.0014,
                      tick: float = 1e-3) -> list[CheckResult]:
    game, strat = appendix_c_bayesian(alpha, tick)
    report = is_bayes_nash(game, strat)
    checks = [CheckResult("bne_regret", report.max_regret <= 1e-12,
                          report.max_regret)]
    expected_sw = 1.0 - 0.333 * alpha
    poa = bayesian_poa(game, strat)
    checks.append(CheckResult("bayesian_poa_window",
                              1.0004 <= poa <= 1.0005, poa))
    checks.append(CheckResult("poa_matches_formula",
                              abs(poa - 1.0 / expected_sw) <= 1e-9, poa))
    return checks


# ---------------------------------------------------------------------------
# Pure equilibria of the pay-as-bid auction (tie-break constructions)


def proposition1_pne(instance: AuctionInstance) -> tuple[BidProfile, TieBreakRule]:
    """All-equal bid profile at the k-th largest marginal, plus the
    tie-break rule allocating along a welfare-optimal assignment.

    Requires submodular valuations (so every allocated marginal covers the
    common bid) and a positive k-th marginal; see the loser-never-wins rule.
    """
    if instance.n < 2:
        raise ValueError("needs at least two bidders")
    if instance.pricing != DISCRIMINATORY:
        raise ValueError("construction applies to pay-as-bid pricing")
    for v in instance.valuations:
        if not is_submodular(v):
            raise ValueError("construction requires submodular valuations")
    k = instance.k
    merged = sorted((m for v in instance.valuations for m in marginals(v)),
                    reverse=True)
    d = merged[k - 1]
    if d <= 0.0:
        raise ValueError("k-th largest marginal must be positive")
    x = optimal_allocation(instance.valuations, k).allocation
    for i, units in enumerate(x):
        if units >= 1 and marginals(instance.valuations[i])[units - 1] < d - 1e-12:
            raise AssertionError("optimal allocation misses the bid level")
    profile = BidProfile(tuple(StandardBid((d,) * k) for _ in range(instance.n)),
                         STANDARD, k)
    order = [(i, j) for i in range(instance.n) for j in range(x[i])]
    return profile, tie_explicit(order)


def proposition1_epsilon_pne(instance: AuctionInstance,
                             eps: float) -> BidProfile:
    """Bump the all-equal profile by eps/k along the optimal allocation.

    The bumped bids are strictly highest, so no ties remain and the profile
    is an eps-equilibrium under every tie-break rule.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    profile, _ = proposition1_pne(instance)
    k = instance.k
    x = optimal_allocation(instance.valuations, k).allocation
    d = profile.vector(0)[0]
    bids = []
    for units in x:
        bids.append(StandardBid((d + eps / k,) * units + (d,) * (k - units)))
    return BidProfile(tuple(bids), STANDARD, k)


def default_proposition1_instance() -> AuctionInstance:
    """Two additive bidders; merged marginals (3, 3, 2, 2), bid level 3."""
    vals = (additive_valuation(3.0, 2), additive_valuation(2.0, 2))
    return AuctionInstance(vals, 2, DISCRIMINATORY, tie_lexicographic())


def verify_proposition1(instance: AuctionInstance | None = None,
                        eps_values=(0.1, 0.01),
                        tick: float = 1e-3) -> list[CheckResult]:
    if instance is None:
        instance = default_proposition1_instance()
    grid = BidGrid(tick, max(v.value(v.k) for v in instance.valuations) + 1.0,
                   STANDARD)
    profile, tie = proposition1_pne(instance)
    pinned = replace(instance, tie_break=tie)
    report = is_pure_nash(profile, pinned, grid)
    checks = [CheckResult("prop1_pne_regret", report.max_regret <= 1e-9,
                          report.max_regret)]
    structure = lemma5_structure(profile, pinned)
    checks.append(CheckResult("lemma5_winning_bids_equal_d",
                              structure["winning_bids_equal_d"]))
    checks.append(CheckResult("lemma5_winner_blocks",
                              structure["winner_blocks_cover_ld"]))
    checks.append(CheckResult("lemma5_loser_blocks",
                              structure["loser_blocks_at_most_ld"]))
    for eps in eps_values:
        bumped = proposition1_epsilon_pne(instance, eps)
        ok = all(
            is_epsilon_equilibrium(bumped, replace(instance, tie_break=tb),
                                   grid, eps)
            for tb in tie_break_presets(instance.n))
        checks.append(CheckResult(f"prop1_eps_{eps}", ok))
    return checks


# ---------------------------------------------------------------------------
# Registry


INSTANCE_DESCRIPTIONS = {
    "theorem4": "uniform-price demand-reduction equilibrium, PoA -> 2k/(k+1)",
    "theorem6-da": "pay-as-bid equalizing curve: template frontier witness",
    "theorem6-upa": "one-unit uniform-price witness: lambda <= (1+mu)/2",
    "appendix-c": "discretized Bayesian pay-as-bid example, BPoA >= 1.0004",
    "proposition1": "all-equal-bid pure equilibrium and its eps variant",
}


def list_instances() -> list[str]:
    return sorted(INSTANCE_DESCRIPTIONS)


def verify_named(instance_id: str, **params) -> list[CheckResult]:
    if instance_id == "theorem4":
        return verify_theorem4(**params)
    if instance_id == "theorem6-da":
        return verify_theorem6_da(**params)
    if instance_id == "theorem6-upa":
        return verify_theorem6_upa(**params)
    if instance_id == "appendix-c":
        return verify_appendix_c(**params)
    if instance_id == "proposition1":
        return verify_proposition1(**params)
    raise KeyError(f"unknown instance id {instance_id!r}")
