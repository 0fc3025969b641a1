"""Discretized strategy grids, best responses and equilibrium verification.

Best responses exploit the structure of the allocation rule: to win exactly
j units against fixed opposing bids, the cheapest standard bid is constant
at the lowest value that beats the j-th lowest opposing winning bid (every
non-constant bid winning j units dominates it slot-wise, and has pointwise
larger prefix sums, so the restriction is also exact under no-overbidding).
The candidate values are therefore the thresholds themselves (ties may be
resolved in the deviator's favor) and one grid tick above.  This closed form
is exact for bidder-level tie-break rules; a full enumeration over uniform
(and optionally standard) grid bids is available as a certifying fallback.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Sequence

from .mechanisms import (
    STANDARD,
    UNIFORM_IFACE,
    AuctionInstance,
    BidProfile,
    StandardBid,
    TieBreakRule,
    UniformBid,
    allocate,
    beta_minus_i,
    check_no_overbidding,
    run_auction,
    social_welfare,
)
from .valuations import Valuation, is_submodular, marginals
from .welfare import optimal_allocation

EQ_TOL = 1e-9


class SearchCapExceeded(RuntimeError):
    """Exhaustive profile enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class BidGrid:
    """Finite bid space: exact multiples of tick in [0, max_bid]."""

    tick: float
    max_bid: float
    interface: str = STANDARD
    no_overbidding: bool = False

    def __post_init__(self):
        if self.tick <= 0:
            raise ValueError("tick must be positive")
        if self.max_bid < self.tick:
            raise ValueError("max_bid must be at least one tick")
        if self.interface not in (STANDARD, UNIFORM_IFACE):
            raise ValueError(f"unknown interface {self.interface!r}")

    @property
    def npoints(self) -> int:
        return int(math.floor(self.max_bid / self.tick + 1e-9)) + 1

    def value(self, index: int) -> float:
        return index * self.tick

    def points(self) -> tuple[float, ...]:
        return tuple(i * self.tick for i in range(self.npoints))

    def contains(self, x: float, tol: float = 1e-12) -> bool:
        i = round(x / self.tick)
        return 0 <= i < self.npoints and abs(x - i * self.tick) <= tol

    def to_json(self):
        return {"tick": self.tick, "max_bid": self.max_bid,
                "interface": self.interface,
                "no_overbidding": self.no_overbidding}

    @staticmethod
    def from_json(data) -> "BidGrid":
        return BidGrid(float(data["tick"]), float(data["max_bid"]),
                       data.get("interface", STANDARD),
                       bool(data.get("no_overbidding", False)))


@dataclass(frozen=True)
class RegretEntry:
    bidder: int
    type_index: int
    current_utility: float
    best_utility: float
    regret: float
    best_bid: object = None


@dataclass(frozen=True)
class RegretReport:
    entries: tuple[RegretEntry, ...]

    @property
    def max_regret(self) -> float:
        return max(e.regret for e in self.entries)

    def is_equilibrium(self, tol: float = EQ_TOL) -> bool:
        return self.max_regret <= tol


@dataclass(frozen=True)
class BestResponse:
    bid: object
    utility: float
    units: int


# ---------------------------------------------------------------------------
# Best responses against fixed opposing bids


def best_response(instance: AuctionInstance, profile: BidProfile, i: int,
                  grid: BidGrid) -> BestResponse:
    """Best deviation of bidder i against the other bids in the profile.

    Scans target unit counts j = 0..k; for each, tries the cheapest constant
    bids derived from the opposing winning-bid thresholds (exact match, and
    one tick above).  Honors the grid's no-overbidding flag and max_bid.
    """
    val = instance.valuations[i]
    k = instance.k
    beta = beta_minus_i(profile, i, instance.tie_break, k)
    best = BestResponse(UniformBid(0.0, 0), 0.0, 0)
    cap = grid.max_bid + 1e-12
    for j in range(1, k + 1):
        threshold = beta[j - 1]
        seen = set()
        for c in (threshold, threshold + grid.tick):
            if c <= 0.0 or c > cap or c in seen:
                continue
            seen.add(c)
            cand = UniformBid(c, j)
            if grid.no_overbidding and not check_no_overbidding(
                    val, cand.expand(k)):
                continue
            dev = profile.replace(i, cand)
            out = run_auction(dev, instance.tie_break, instance.pricing)
            if out.allocation[i] != j:
                continue
            u = val.value(j) - out.payments[i]
            if u > best.utility:
                best = BestResponse(cand, u, j)
    return best


def deviation_bids(grid: BidGrid, k: int, val: Valuation | None = None,
                   include_standard: bool = False):
    """All uniform grid bids (and optionally all standard grid bids)."""
    bids = [UniformBid(0.0, 0)]
    for u in grid.points():
        if u <= 0:
            continue
        for q in range(1, k + 1):
            bids.append(UniformBid(u, q))
    if include_standard:
        if k > 4:
            raise SearchCapExceeded("standard-bid enumeration limited to k <= 4")
        for combo in itertools.combinations_with_replacement(
                sorted(grid.points(), reverse=True), k):
            bids.append(StandardBid(combo))
    if grid.no_overbidding and val is not None:
        bids = [b for b in bids
                if check_no_overbidding(
                    val, b.expand(k) if isinstance(b, UniformBid) else b)]
    return bids


def best_response_enumerated(instance: AuctionInstance, profile: BidProfile,
                             i: int, grid: BidGrid,
                             include_standard: bool = False) -> BestResponse:
    """Certifying fallback: scan every uniform (optionally standard) grid bid."""
    val = instance.valuations[i]
    best = BestResponse(UniformBid(0.0, 0), 0.0, 0)
    for cand in deviation_bids(grid, instance.k, val, include_standard):
        if profile.interface == UNIFORM_IFACE and isinstance(cand, StandardBid):
            continue
        dev = profile.replace(i, cand)
        out = run_auction(dev, instance.tie_break, instance.pricing)
        u = val.value(out.allocation[i]) - out.payments[i]
        if u > best.utility:
            best = BestResponse(cand, u, out.allocation[i])
    return best


# ---------------------------------------------------------------------------
# Pure Nash verification and search


def is_pure_nash(profile: BidProfile, instance: AuctionInstance,
                 grid: BidGrid) -> RegretReport:
    """Regret of every bidder against the closed-form deviation family."""
    out = run_auction(profile, instance.tie_break, instance.pricing)
    entries = []
    for i in range(instance.n):
        cur = instance.valuations[i].value(out.allocation[i]) - out.payments[i]
        br = best_response(instance, profile, i, grid)
        regret = max(0.0, max(br.utility, cur) - cur)
        entries.append(RegretEntry(i, 0, cur, max(br.utility, cur), regret,
                                   br.bid))
    return RegretReport(tuple(entries))


def is_epsilon_equilibrium(profile: BidProfile, instance: AuctionInstance,
                           grid: BidGrid, eps: float) -> bool:
    return is_pure_nash(profile, instance, grid).max_regret <= eps + EQ_TOL


def grid_bids_for(grid: BidGrid, k: int, val: Valuation | None = None):
    """Strategy space of one bidder on the grid, per the grid interface."""
    if grid.interface == UNIFORM_IFACE:
        bids = [UniformBid(0.0, 0)]
        for u in grid.points():
            if u <= 0:
                continue
            for q in range(1, k + 1):
                bids.append(UniformBid(u, q))
    else:
        bids = [StandardBid(combo) for combo in
                itertools.combinations_with_replacement(
                    sorted(grid.points(), reverse=True), k)]
    if grid.no_overbidding and val is not None:
        bids = [b for b in bids
                if check_no_overbidding(
                    val, b.expand(k) if isinstance(b, UniformBid) else b)]
    return bids


@dataclass(frozen=True)
class PNESearchResult:
    equilibria: tuple[BidProfile, ...]
    exhaustive: bool
    evaluated: int


def find_pure_nash(instance: AuctionInstance, grid: BidGrid,
                   mode: str = "exhaustive", cap: int = 10 ** 8,
                   seed: int = 0, starts: int = 20,
                   max_rounds: int = 200) -> PNESearchResult:
    """Search the grid profile space for pure Nash equilibria.

    "exhaustive" checks every profile (raises SearchCapExceeded beyond the
    cap); "best_response_dynamics" runs seeded best-response paths and
    reports reached fixed points, which may miss equilibria.
    """
    k = instance.k
    spaces = [grid_bids_for(grid, k, instance.valuations[i])
              for i in range(instance.n)]
    if mode == "exhaustive":
        total = math.prod(len(s) for s in spaces)
        if total > cap:
            raise SearchCapExceeded(
                f"{total} profiles exceed the cap of {cap}")
        br_memo: dict = {}
        found = []
        for combo in itertools.product(*spaces):
            profile = BidProfile(combo, grid.interface, k)
            out = run_auction(profile, instance.tie_break, instance.pricing)
            ok = True
            for i in range(instance.n):
                cur = (instance.valuations[i].value(out.allocation[i])
                       - out.payments[i])
                key = (i,) + tuple(combo[j] for j in range(instance.n) if j != i)
                br_util = br_memo.get(key)
                if br_util is None:
                    br_util = best_response(instance, profile, i, grid).utility
                    br_memo[key] = br_util
                if max(br_util, 0.0) - cur > EQ_TOL:
                    ok = False
                    break
            if ok:
                found.append(profile)
        return PNESearchResult(tuple(found), True, total)

    if mode == "best_response_dynamics":
        rng = random.Random(seed)
        seen = set()
        found = []
        evaluated = 0
        for _ in range(starts):
            combo = [rng.choice(s) for s in spaces]
            profile = BidProfile(tuple(combo), grid.interface, k)
            for _ in range(max_rounds):
                changed = False
                for i in range(instance.n):
                    cur_out = run_auction(profile, instance.tie_break,
                                          instance.pricing)
                    cur = (instance.valuations[i].value(cur_out.allocation[i])
                           - cur_out.payments[i])
                    br = best_response(instance, profile, i, grid)
                    evaluated += 1
                    if br.utility - cur > EQ_TOL:
                        profile = profile.replace(i, br.bid)
                        changed = True
                if not changed:
                    break
            report = is_pure_nash(profile, instance, grid)
            key = tuple(profile.vector(i) for i in range(instance.n))
            if report.is_equilibrium() and key not in seen:
                seen.add(key)
                found.append(profile)
        return PNESearchResult(tuple(found), False, evaluated)

    raise ValueError(f"unknown search mode {mode!r}")


# ---------------------------------------------------------------------------
# Bayesian games


@dataclass(frozen=True)
class BayesianGame:
    """Finite independent type sets with a common bid grid."""

    k: int
    types: tuple[tuple[Valuation, ...], ...]
    priors: tuple[tuple[float, ...], ...]
    grid: BidGrid
    tie_break: TieBreakRule
    pricing: str

    def __post_init__(self):
        if len(self.types) != len(self.priors):
            raise ValueError("types and priors lengths differ")
        for tset, pset in zip(self.types, self.priors):
            if len(tset) != len(pset) or not tset:
                raise ValueError("each bidder needs matching types and priors")
            if any(p < 0 for p in pset):
                raise ValueError("priors must be non-negative")
            if abs(sum(pset) - 1.0) > 1e-9:
                raise ValueError("priors must sum to 1")
            for v in tset:
                if v.k != self.k:
                    raise ValueError("type valuation k mismatch")

    @property
    def n(self) -> int:
        return len(self.types)

    def to_json(self):
        return {
            "k": self.k,
            "types": [[v.to_json() for v in tset] for tset in self.types],
            "priors": [list(p) for p in self.priors],
            "grid": self.grid.to_json(),
            "tie_break": self.tie_break.to_json(),
            "pricing": self.pricing,
        }

    @staticmethod
    def from_json(data) -> "BayesianGame":
        return BayesianGame(
            int(data["k"]),
            tuple(tuple(Valuation.from_json(v) for v in tset)
                  for tset in data["types"]),
            tuple(tuple(float(p) for p in pset) for pset in data["priors"]),
            BidGrid.from_json(data["grid"]),
            TieBreakRule.from_json(data["tie_break"]),
            data["pricing"],
        )


def _bid_from_json(data, k):
    if isinstance(data, dict):
        return UniformBid(float(data["price"]), int(data["quantity"]))
    return StandardBid(tuple(float(x) for x in data))


@dataclass(frozen=True)
class Strategy:
    """rules[i][t] is the mixed bid of bidder i's t-th type: ((bid, prob), ...)."""

    rules: tuple[tuple[tuple[tuple[object, float], ...], ...], ...]

    def validate(self, game: BayesianGame) -> None:
        if len(self.rules) != game.n:
            raise ValueError("strategy bidder count mismatch")
        for i, per_type in enumerate(self.rules):
            if len(per_type) != len(game.types[i]):
                raise ValueError("strategy type count mismatch")
            for t, mixed in enumerate(per_type):
                if abs(sum(p for _, p in mixed) - 1.0) > 1e-9:
                    raise ValueError("mixed strategy must sum to 1")
                for bid, _ in mixed:
                    vec = (bid.expand(game.k) if isinstance(bid, UniformBid)
                           else bid)
                    for x in vec.values:
                        if x > 0 and not game.grid.contains(x):
                            raise ValueError("bid support off the grid")
                    if game.grid.no_overbidding and not check_no_overbidding(
                            game.types[i][t], vec):
                        raise ValueError("support violates no-overbidding")

    def to_json(self):
        return [[[[b.to_json(), p] for b, p in mixed] for mixed in per_type]
                for per_type in self.rules]

    @staticmethod
    def from_json(data, k: int) -> "Strategy":
        return Strategy(tuple(
            tuple(tuple((_bid_from_json(b, k), float(p)) for b, p in mixed)
                  for mixed in per_type)
            for per_type in data))


def pure_strategy(bids_per_bidder) -> Strategy:
    """Point-mass strategy: bids_per_bidder[i][t] is a single bid."""
    return Strategy(tuple(
        tuple(((bid, 1.0),) for bid in per_type)
        for per_type in bids_per_bidder))


def _opposing_scenarios(game: BayesianGame, strat: Strategy, i: int):
    """All (others' bid vector dict, probability) pairs conditioned on i absent.

    Enumerates opposing type tuples under the product prior, then each
    combination of support bids; probabilities multiply exactly.
    """
    others = [j for j in range(game.n) if j != i]
    scenarios = []
    type_ranges = [range(len(game.types[j])) for j in others]
    for type_combo in itertools.product(*type_ranges):
        p_type = 1.0
        for j, t in zip(others, type_combo):
            p_type *= game.priors[j][t]
        if p_type == 0.0:
            continue
        mixes = [strat.rules[j][t] for j, t in zip(others, type_combo)]
        for bid_combo in itertools.product(*mixes):
            p = p_type
            bids = {}
            for j, (bid, pb) in zip(others, bid_combo):
                p *= pb
                bids[j] = bid
            if p == 0.0:
                continue
            scenarios.append((bids, p))
    return scenarios


def _expected_utility(game: BayesianGame, i: int, val: Valuation, my_bid,
                      scenarios) -> float:
    total = 0.0
    for bids, p in scenarios:
        entries = []
        for j in range(game.n):
            entries.append(my_bid if j == i else bids[j])
        profile = BidProfile(
            tuple(b.expand(game.k) if game.grid.interface == STANDARD
                  and isinstance(b, UniformBid) else b for b in entries),
            game.grid.interface, game.k)
        out = run_auction(profile, game.tie_break, game.pricing)
        total += p * (val.value(out.allocation[i]) - out.payments[i])
    return total


def is_bayes_nash(game: BayesianGame, strat: Strategy,
                  include_standard: bool = False) -> RegretReport:
    """Exact expected regret of every (bidder, type) against grid deviations.

    Expectations enumerate opposing type tuples and mixed supports exactly;
    deviations scan every uniform grid bid (plus all standard grid bids when
    include_standard is set, k <= 4).
    """
    strat.validate(game)
    entries = []
    for i in range(game.n):
        scenarios = _opposing_scenarios(game, strat, i)
        for t, val in enumerate(game.types[i]):
            cur = 0.0
            for my_bid, pm in strat.rules[i][t]:
                cur += pm * _expected_utility(game, i, val, my_bid, scenarios)
            best = cur
            best_bid = None
            for cand in deviation_bids(game.grid, game.k,
                                       val if game.grid.no_overbidding else None,
                                       include_standard):
                if game.grid.interface == UNIFORM_IFACE and isinstance(
                        cand, StandardBid):
                    continue
                u = _expected_utility(game, i, val, cand, scenarios)
                if u > best:
                    best = u
                    best_bid = cand
            entries.append(RegretEntry(i, t, cur, best,
                                       max(0.0, best - cur), best_bid))
    return RegretReport(tuple(entries))


def bayesian_poa(game: BayesianGame, strat: Strategy) -> float:
    """Expected optimal welfare over expected equilibrium welfare, exactly."""
    strat.validate(game)
    type_ranges = [range(len(ts)) for ts in game.types]
    e_opt = 0.0
    e_sw = 0.0
    for combo in itertools.product(*type_ranges):
        p_type = 1.0
        for i, t in enumerate(combo):
            p_type *= game.priors[i][t]
        if p_type == 0.0:
            continue
        vals = tuple(game.types[i][t] for i, t in enumerate(combo))
        e_opt += p_type * optimal_allocation(vals, game.k).value
        mixes = [strat.rules[i][t] for i, t in enumerate(combo)]
        for bid_combo in itertools.product(*mixes):
            p = p_type
            entries = []
            for bid, pb in bid_combo:
                p *= pb
                entries.append(bid)
            if p == 0.0:
                continue
            profile = BidProfile(
                tuple(b.expand(game.k) if game.grid.interface == STANDARD
                      and isinstance(b, UniformBid) else b for b in entries),
                game.grid.interface, game.k)
            out = allocate(profile, game.tie_break)
            e_sw += p * social_welfare(vals, out.allocation)
    if e_sw <= 0:
        raise ValueError("equilibrium welfare is not positive")
    return e_opt / e_sw


def singleton_game(instance: AuctionInstance, grid: BidGrid) -> BayesianGame:
    """Full-information wrapper: every bidder has one type."""
    return BayesianGame(
        instance.k,
        tuple((v,) for v in instance.valuations),
        tuple((1.0,) for _ in instance.valuations),
        grid, instance.tie_break, instance.pricing)


# ---------------------------------------------------------------------------
# Undominated strategies and the standard/uniform equilibrium conversion


def is_undominated_upa(val: Valuation, bid: StandardBid) -> bool:
    """Undominated uniform-price bidding for submodular bidders.

    Requires b(j) <= m(j) for every j and b(1) = v(1); bidding above a
    marginal value, or not bidding the first marginal truthfully, is weakly
    dominated.
    """
    if not is_submodular(val):
        raise ValueError("undominated characterization needs submodular valuations")
    m = marginals(val)
    if abs(bid.values[0] - val.value(1)) > 1e-12:
        return False
    return all(b <= mj + 1e-12 for b, mj in zip(bid.values, m))


def canonical_upa_profile(instance: AuctionInstance,
                          allocation: Sequence[int]) -> BidProfile:
    """Winners bid their marginals up to x_i then 0; losers bid (m(1), 0, ...)."""
    bids = []
    for val, x in zip(instance.valuations, allocation):
        m = marginals(val)
        if x >= 1:
            bids.append(StandardBid(tuple(m[:x]) + (0.0,) * (instance.k - x)))
        else:
            bids.append(StandardBid((m[0],) + (0.0,) * (instance.k - 1)))
    return BidProfile(tuple(bids), STANDARD, instance.k)


def pne_standard_to_uniform(profile: BidProfile,
                            instance: AuctionInstance) -> BidProfile:
    """Convert a canonical-form UPA equilibrium to uniform bidding.

    Winners map to (v_i(x_i)/x_i, x_i), losers to (m_i(1), 1).  Raises if
    the profile is not in canonical undominated form; asserts that price,
    allocation and welfare are preserved exactly.
    """
    if profile.interface != STANDARD:
        raise ValueError("conversion expects a standard-interface profile")
    out = allocate(profile, instance.tie_break)
    new_bids = []
    for i, val in enumerate(instance.valuations):
        vec = profile.vector(i)
        m = marginals(val)
        x = out.allocation[i]
        if x >= 1:
            for j in range(x):
                if abs(vec[j] - m[j]) > 1e-12:
                    raise ValueError("winner does not bid marginals on his prefix")
            if any(vec[j] != 0.0 for j in range(x, instance.k)):
                raise ValueError("winner bids past his allocation")
            new_bids.append(UniformBid(val.value(x) / x, x))
        else:
            if abs(vec[0] - m[0]) > 1e-12 or any(v != 0.0 for v in vec[1:]):
                raise ValueError("loser is not bidding (m(1), 0, ...)")
            new_bids.append(UniformBid(m[0], 1))
    converted = BidProfile(tuple(new_bids), UNIFORM_IFACE, instance.k)
    new_out = allocate(converted, instance.tie_break)
    if new_out.allocation != out.allocation:
        raise AssertionError("conversion changed the allocation")
    if new_out.uniform_price != out.uniform_price:
        raise AssertionError("conversion changed the uniform price")
    old_sw = social_welfare(instance.valuations, out.allocation)
    new_sw = social_welfare(instance.valuations, new_out.allocation)
    if old_sw != new_sw:
        raise AssertionError("conversion changed the welfare")
    return converted


def lemma5_structure(profile: BidProfile, instance: AuctionInstance,
                     tol: float = 1e-9) -> dict:
    """Structural properties of discriminatory pure equilibria.

    With d the highest losing bid: (a) every winning bid equals d; (b) the
    last ell marginal values of each winner cover ell*d; (c) any block of
    marginal values past the allocation is at most ell*d.
    """
    out = allocate(profile, instance.tie_break)
    vectors = profile.vectors()
    d = 0.0
    for i in range(instance.n):
        for j in range(out.allocation[i], instance.k):
            d = max(d, vectors[i][j])
    winning_equal = all(
        abs(vectors[i][j] - d) <= tol
        for i in range(instance.n) for j in range(out.allocation[i]))
    lower_ok = True
    upper_ok = True
    for i, val in enumerate(instance.valuations):
        m = marginals(val)
        x = out.allocation[i]
        for ell in range(1, x + 1):
            if ell * d > sum(m[x - ell:x]) + tol:
                lower_ok = False
        for ell in range(1, instance.k - x + 1):
            if sum(m[x:x + ell]) > ell * d + tol:
                upper_ok = False
    return {"d": d, "winning_bids_equal_d": winning_equal,
            "winner_blocks_cover_ld": lower_ok,
            "loser_blocks_at_most_ld": upper_ok}
