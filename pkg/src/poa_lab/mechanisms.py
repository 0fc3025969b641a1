"""The standard multi-unit auction: allocation, pricing rules and utilities.

k identical units are sold; every bidder submits k non-increasing marginal
bids (or a uniform (price, quantity) pair, which expands to such a vector).
The k highest marginal bids each win one unit, with an injected tie-break
rule ordering equal bids.  A marginal bid of exactly 0 never wins a unit.

Two pricing rules are supported: discriminatory (pay your winning bids) and
uniform (pay the highest losing bid per unit won).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .valuations import Valuation

DISCRIMINATORY = "discriminatory"
UNIFORM = "uniform"
PRICINGS = (DISCRIMINATORY, UNIFORM)

_BIG = 1 << 60


# ---------------------------------------------------------------------------
# Bids and profiles


@dataclass(frozen=True)
class StandardBid:
    """Vector of k non-negative non-increasing marginal bids."""

    values: tuple[float, ...]

    def __post_init__(self):
        for j, v in enumerate(self.values):
            if v < 0:
                raise ValueError("marginal bids must be non-negative")
            if j and v > self.values[j - 1]:
                raise ValueError("marginal bids must be non-increasing")

    @property
    def k(self) -> int:
        return len(self.values)

    def to_json(self):
        return list(self.values)


@dataclass(frozen=True)
class UniformBid:
    """A per-unit price together with a quantity cap q <= k."""

    price: float
    quantity: int

    def __post_init__(self):
        if self.price < 0:
            raise ValueError("price must be non-negative")
        if self.quantity < 0:
            raise ValueError("quantity must be non-negative")

    def expand(self, k: int) -> StandardBid:
        if self.quantity > k:
            raise ValueError("quantity exceeds number of units")
        q = self.quantity
        return StandardBid((self.price,) * q + (0.0,) * (k - q))

    def to_json(self):
        return {"price": self.price, "quantity": self.quantity}


def standard_bid(*values: float) -> StandardBid:
    return StandardBid(tuple(float(v) for v in values))


def zero_bid(k: int) -> StandardBid:
    return StandardBid((0.0,) * k)


STANDARD = "standard"
UNIFORM_IFACE = "uniform"


@dataclass(frozen=True)
class BidProfile:
    """One bid per bidder; interface is "standard" or "uniform"."""

    bids: tuple
    interface: str
    k: int

    def __post_init__(self):
        if self.interface not in (STANDARD, UNIFORM_IFACE):
            raise ValueError(f"unknown interface {self.interface!r}")
        for b in self.bids:
            if self.interface == UNIFORM_IFACE and not isinstance(b, UniformBid):
                raise ValueError("uniform-interface profile needs UniformBid entries")
            if self.interface == STANDARD and not isinstance(b, StandardBid):
                raise ValueError("standard-interface profile needs StandardBid entries")
            if isinstance(b, StandardBid) and b.k != self.k:
                raise ValueError("bid length does not match k")
            if isinstance(b, UniformBid) and b.quantity > self.k:
                raise ValueError("uniform quantity exceeds k")

    @property
    def n(self) -> int:
        return len(self.bids)

    def vector(self, i: int) -> tuple[float, ...]:
        """Bidder i's bid expanded to a full marginal-bid vector."""
        b = self.bids[i]
        if isinstance(b, UniformBid):
            return b.expand(self.k).values
        return b.values

    def vectors(self) -> list[tuple[float, ...]]:
        return [self.vector(i) for i in range(self.n)]

    def replace(self, i: int, bid) -> "BidProfile":
        if self.interface == STANDARD and isinstance(bid, UniformBid):
            bid = bid.expand(self.k)
        if self.interface == UNIFORM_IFACE and isinstance(bid, StandardBid):
            raise ValueError("cannot place a standard bid in a uniform profile")
        new = list(self.bids)
        new[i] = bid
        return BidProfile(tuple(new), self.interface, self.k)

    def to_json(self):
        return {
            "interface": self.interface,
            "k": self.k,
            "bids": [b.to_json() for b in self.bids],
        }

    @staticmethod
    def from_json(data) -> "BidProfile":
        iface = data["interface"]
        k = int(data["k"])
        if iface == UNIFORM_IFACE:
            bids = tuple(UniformBid(float(b["price"]), int(b["quantity"]))
                         for b in data["bids"])
        else:
            bids = tuple(StandardBid(tuple(float(x) for x in b))
                         for b in data["bids"])
        return BidProfile(bids, iface, k)


def standard_profile(k: int, *bids) -> BidProfile:
    return BidProfile(tuple(bids), STANDARD, k)


def uniform_profile(k: int, *bids) -> BidProfile:
    return BidProfile(tuple(bids), UNIFORM_IFACE, k)


# ---------------------------------------------------------------------------
# Tie-breaking


@dataclass(frozen=True)
class TieBreakRule:
    """Strict total order over (bidder, marginal-slot) pairs.

    Kinds: "lexicographic" orders by (bidder, slot); "favor_bidder" puts one
    bidder's slots ahead of everyone else's; "favor_last" reverses the bidder
    order; "explicit" ranks a given list of pairs first, the rest
    lexicographically after it.
    """

    kind: str
    bidder: int | None = None
    order: tuple[tuple[int, int], ...] | None = None
    _rank: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("lexicographic", "favor_bidder", "favor_last",
                             "explicit"):
            raise ValueError(f"unknown tie-break kind {self.kind!r}")
        if self.kind == "favor_bidder" and self.bidder is None:
            raise ValueError("favor_bidder needs a bidder index")
        if self.kind == "explicit":
            if not self.order:
                raise ValueError("explicit tie-break needs an order")
            if len(set(self.order)) != len(self.order):
                raise ValueError("explicit order has duplicate entries")
            object.__setattr__(self, "_rank",
                               {pair: r for r, pair in enumerate(self.order)})

    def priority(self, bidder: int, slot: int) -> tuple:
        if self.kind == "lexicographic":
            return (bidder, slot)
        if self.kind == "favor_bidder":
            return (0 if bidder == self.bidder else 1, bidder, slot)
        if self.kind == "favor_last":
            return (-bidder, slot)
        return (self._rank.get((bidder, slot), _BIG), bidder, slot)

    def to_json(self):
        out = {"kind": self.kind}
        if self.bidder is not None:
            out["bidder"] = self.bidder
        if self.order is not None:
            out["order"] = [list(p) for p in self.order]
        return out

    @staticmethod
    def from_json(data) -> "TieBreakRule":
        order = data.get("order")
        return TieBreakRule(
            data["kind"],
            bidder=data.get("bidder"),
            order=tuple((int(i), int(j)) for i, j in order) if order else None,
        )


def tie_lexicographic() -> TieBreakRule:
    return TieBreakRule("lexicographic")


def tie_favor_bidder(i: int) -> TieBreakRule:
    return TieBreakRule("favor_bidder", bidder=i)


def tie_favor_last() -> TieBreakRule:
    return TieBreakRule("favor_last")


def tie_explicit(pairs) -> TieBreakRule:
    return TieBreakRule("explicit", order=tuple((int(i), int(j)) for i, j in pairs))


def tie_break_presets(n: int) -> list[TieBreakRule]:
    presets = [tie_lexicographic()]
    presets += [tie_favor_bidder(i) for i in range(n)]
    presets.append(tie_favor_last())
    return presets


# ---------------------------------------------------------------------------
# Allocation and pricing


@dataclass(frozen=True)
class Outcome:
    """Allocation, winning-bid vector, uniform price and (optionally) payments.

    winning_bids lists the k winning bids sorted non-decreasing; when fewer
    than k positive bids exist the vector is padded with zeros at the front
    (an unfilled slot is a winning bid of 0).  uniform_price is the highest
    losing marginal bid.
    """

    allocation: tuple[int, ...]
    winning_bids: tuple[float, ...]
    uniform_price: float
    payments: tuple[float, ...] | None = None

    @property
    def units_sold(self) -> int:
        return sum(self.allocation)

    def to_json(self):
        out = {
            "allocation": list(self.allocation),
            "winning_bids": list(self.winning_bids),
            "uniform_price": self.uniform_price,
        }
        if self.payments is not None:
            out["payments"] = list(self.payments)
        return out


def _allocate_vectors(vectors: Sequence[Sequence[float]], k: int,
                      tie: TieBreakRule):
    """Core allocation on expanded bid vectors.

    Returns (allocation, beta, p, selected) where selected is the list of
    (value, bidder, slot) winning entries.  Zero bids never win.
    """
    entries = []
    for i, vec in enumerate(vectors):
        for j, v in enumerate(vec):
            if v > 0.0:
                entries.append((v, i, j))
    entries.sort(key=lambda e: (-e[0],) + tie.priority(e[1], e[2]))
    selected = entries[:k]
    x = [0] * len(vectors)
    for _, i, _ in selected:
        x[i] += 1
    values = sorted(e[0] for e in selected)
    beta = (0.0,) * (k - len(values)) + tuple(values)
    p = entries[k][0] if len(entries) > k else 0.0
    return tuple(x), beta, p, selected


def allocate(profile: BidProfile, tie: TieBreakRule, k: int | None = None) -> Outcome:
    """Run the allocation rule; payments are left unset."""
    if k is None:
        k = profile.k
    if k != profile.k:
        raise ValueError("k does not match profile")
    x, beta, p, _ = _allocate_vectors(profile.vectors(), k, tie)
    return Outcome(x, beta, p)


def price_discriminatory(profile: BidProfile, outcome: Outcome) -> tuple[float, ...]:
    """P_i = sum of bidder i's x_i highest marginal bids (his winning bids)."""
    pays = []
    for i in range(profile.n):
        vec = profile.vector(i)
        pays.append(sum(vec[: outcome.allocation[i]]))
    return tuple(pays)


def price_uniform(profile: BidProfile, outcome: Outcome,
                  variant: str = "highest_losing") -> tuple[float, ...]:
    """P_i = x_i * p with p the highest losing bid.

    variant "lowest_winning" charges the lowest winning bid instead; it is
    exposed for completeness and not used by any certification path.
    """
    if variant == "highest_losing":
        p = outcome.uniform_price
    elif variant == "lowest_winning":
        p = outcome.winning_bids[0] if outcome.units_sold == len(outcome.winning_bids) else 0.0
    else:
        raise ValueError(f"unknown uniform price variant {variant!r}")
    return tuple(x * p for x in outcome.allocation)


def run_auction(profile: BidProfile, tie: TieBreakRule, pricing: str,
                price_variant: str = "highest_losing") -> Outcome:
    out = allocate(profile, tie)
    if pricing == DISCRIMINATORY:
        pays = price_discriminatory(profile, out)
    elif pricing == UNIFORM:
        pays = price_uniform(profile, out, price_variant)
    else:
        raise ValueError(f"unknown pricing rule {pricing!r}")
    return Outcome(out.allocation, out.winning_bids, out.uniform_price, pays)


def utility(i: int, val: Valuation, profile: BidProfile, tie: TieBreakRule,
            pricing: str) -> float:
    out = run_auction(profile, tie, pricing)
    return val.value(out.allocation[i]) - out.payments[i]


def utilities(vals: Sequence[Valuation], profile: BidProfile,
              tie: TieBreakRule, pricing: str) -> tuple[float, ...]:
    out = run_auction(profile, tie, pricing)
    return tuple(v.value(x) - pay
                 for v, x, pay in zip(vals, out.allocation, out.payments))


def social_welfare(vals: Sequence[Valuation], allocation: Sequence[int]) -> float:
    if len(vals) != len(allocation):
        raise ValueError("valuations and allocation lengths differ")
    return sum(v.value(x) for v, x in zip(vals, allocation))


def check_no_overbidding(val: Valuation, bid: StandardBid) -> bool:
    """True iff every prefix sum of the bid is at most the value at that count."""
    if bid.k != val.k:
        raise ValueError("bid and valuation dimensions differ")
    acc = 0.0
    for s in range(1, bid.k + 1):
        acc += bid.values[s - 1]
        if acc > val.value(s) + 1e-12:
            return False
    return True


def beta_minus_i(profile: BidProfile, i: int, tie: TieBreakRule,
                 k: int | None = None) -> tuple[float, ...]:
    """Winning-bid vector of the auction run without bidder i.

    Sorted non-decreasing and zero-padded at the front to length k; entry j
    is the threshold bidder i must beat to win a j-th unit.
    """
    if k is None:
        k = profile.k
    vectors = [profile.vector(j) for j in range(profile.n) if j != i]
    _, beta, _, _ = _allocate_vectors(vectors, k, tie)
    return beta


def expand_uniform(bid: UniformBid, k: int) -> StandardBid:
    return bid.expand(k)


def uniformize_profile(profile: BidProfile, tie: TieBreakRule) -> BidProfile:
    """Replace every bid by (last winning bid, units won) as a uniform bid.

    Winners keep their allocation and their willingness-to-pay
    x_i * b_i(x_i); losing bids are zeroed out.  Bidders with no units map
    to the null bid (0, 0).
    """
    out = allocate(profile, tie)
    new_bids = []
    for i in range(profile.n):
        x = out.allocation[i]
        if x == 0:
            new_bids.append(UniformBid(0.0, 0))
        else:
            c = profile.vector(i)[x - 1]
            new_bids.append(UniformBid(c, x))
    return BidProfile(tuple(new_bids), UNIFORM_IFACE, profile.k)


@dataclass(frozen=True)
class AuctionInstance:
    """Valuation profile plus mechanism configuration."""

    valuations: tuple[Valuation, ...]
    k: int
    pricing: str
    tie_break: TieBreakRule

    def __post_init__(self):
        if self.pricing not in PRICINGS:
            raise ValueError(f"unknown pricing rule {self.pricing!r}")
        for v in self.valuations:
            if v.k != self.k:
                raise ValueError("valuation k does not match instance k")

    @property
    def n(self) -> int:
        return len(self.valuations)

    def to_json(self):
        return {
            "n": self.n,
            "k": self.k,
            "valuations": [v.to_json() for v in self.valuations],
            "pricing": self.pricing,
            "tie_break": self.tie_break.to_json(),
        }

    @staticmethod
    def from_json(data) -> "AuctionInstance":
        vals = tuple(Valuation.from_json(v) for v in data["valuations"])
        return AuctionInstance(vals, int(data["k"]), data["pricing"],
                               TieBreakRule.from_json(data["tie_break"]))
