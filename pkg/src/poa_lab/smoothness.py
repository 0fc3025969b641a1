"""Deviation-based welfare guarantees and their numerical certification.

The central object is a randomized uniform deviation: bid t * v(tau)/tau on
the first x_opt slots, with t drawn from density alpha/(1-t) on
[0, 1 - e^(-1/alpha)].  Its expected utility against fixed opposing bids has
a closed form (piecewise integration between the opposing winning-bid
thresholds), which is the exact evaluator used everywhere; Monte Carlo is a
cross-check only.  On top of it sit the deviation-guarantee inequality with
constants (lambda, mu), smoothness and weak-smoothness certificates, the
Lambert-W bound constants, and the two instances showing the template
cannot beat e/(e-1) (pay-as-bid) and 2 (uniform pricing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .mechanisms import (
    DISCRIMINATORY,
    STANDARD,
    UNIFORM,
    AuctionInstance,
    BidProfile,
    StandardBid,
    UniformBid,
    allocate,
    beta_minus_i,
    run_auction,
    tie_favor_bidder,
    uniform_profile,
    uniformize_profile,
    utilities,
)
from .valuations import Valuation, is_subadditive, is_submodular, tau, valuation
from .welfare import optimal_allocation

MARGIN_TOL = 1e-9


# ---------------------------------------------------------------------------
# Lambert W, lower branch


def lambert_w_minus1(x: float) -> float:
    """Lower branch of the Lambert W function: w <= -1 with w*e^w = x.

    Defined for -1/e <= x < 0.  Bracketed Halley iteration seeded with the
    branch-point series near -1/e and the asymptotic log expansion
    elsewhere; falls back to bisection until |w*e^w - x| <= 1e-12.
    """
    branch_min = -math.exp(-1.0)
    if x >= 0.0 or x < branch_min - 1e-15:
        raise ValueError("lambert_w_minus1 requires -1/e <= x < 0")
    if x <= branch_min:
        return -1.0
    q = 1.0 + math.e * x
    if q < 0.25:
        p = -math.sqrt(2.0 * q)
        w = -1.0 + p - p * p / 3.0 + 11.0 * p ** 3 / 72.0
        w = min(w, -1.0)
    else:
        lx = math.log(-x)
        w = lx - math.log(-lx)
    for _ in range(50):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= 1e-13:
            break
        fp = ew * (w + 1.0)
        fpp = ew * (w + 2.0)
        denom = fp - f * fpp / (2.0 * fp) if fp != 0.0 else 0.0
        if denom == 0.0:
            break
        step = f / denom
        w_new = w - step
        if w_new >= -1.0:
            w_new = (w - 1.0) / 2.0 if w > -1.0 else -1.0 - abs(step) / 2
        w = w_new
    if abs(w * math.exp(w) - x) > 1e-12:
        lo, hi = -2.0, -1.0
        while lo * math.exp(lo) < x:
            lo *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid * math.exp(mid) > x:
                lo = mid
            else:
                hi = mid
        w = 0.5 * (lo + hi)
    return w


def optimal_alpha(pricing: str) -> float:
    """Deviation scale minimizing the implied bound for each pricing rule."""
    if pricing == DISCRIMINATORY:
        return 1.0
    if pricing == UNIFORM:
        return -1.0 / (lambert_w_minus1(-math.exp(-2.0)) + 2.0)
    raise ValueError(f"unknown pricing rule {pricing!r}")


# ---------------------------------------------------------------------------
# Bound arithmetic and the bound table


def smooth_poa_bound(lam: float, mu: float) -> float:
    return max(1.0, mu) / lam


def weak_smooth_poa_bound(lam: float, mu1: float, mu2: float) -> float:
    return (mu2 + max(1.0, mu1)) / lam


def template_poa_bound(lam: float, mu: float, pricing: str) -> float:
    """PoA implied by a deviation guarantee with constants (lambda, mu)."""
    if pricing == DISCRIMINATORY:
        return max(1.0, mu) / lam
    if pricing == UNIFORM:
        return (mu + 1.0) / lam
    raise ValueError(f"unknown pricing rule {pricing!r}")


def sequential_smooth(lam: float, mu: float) -> tuple[float, float]:
    return lam, mu + 1.0


def sequential_weak(lam: float, mu1: float, mu2: float) -> tuple[float, float, float]:
    return lam, mu1 + 1.0, mu2


def guarantee_lambda(alpha: float, valuation_class: str) -> float:
    """lambda of the randomized deviation: alpha(1 - e^(-1/alpha)), halved
    for subadditive valuations (the per-unit value loses at most factor 2)."""
    lam = alpha * (1.0 - math.exp(-1.0 / alpha))
    if valuation_class == "subadditive":
        return lam / 2.0
    if valuation_class == "submodular":
        return lam
    raise ValueError(f"unknown valuation class {valuation_class!r}")


@dataclass(frozen=True)
class BoundRow:
    table: str
    mechanism: str
    valuation_class: str
    setting: str
    value: float

    def to_json(self):
        return {"table": self.table, "mechanism": self.mechanism,
                "valuation_class": self.valuation_class,
                "setting": self.setting, "value": self.value}


def bound_table() -> list[BoundRow]:
    """All PoA upper bounds, computed from the (lambda, mu) arithmetic."""
    a_da = optimal_alpha(DISCRIMINATORY)
    a_up = optimal_alpha(UNIFORM)
    lam_da = guarantee_lambda(a_da, "submodular")
    lam_up = guarantee_lambda(a_up, "submodular")
    rows = [
        BoundRow("poa", "discriminatory", "submodular", "standard|uniform",
                 smooth_poa_bound(lam_da, a_da)),
        BoundRow("poa", "discriminatory", "subadditive", "standard",
                 smooth_poa_bound(0.5, 1.0)),
        BoundRow("poa", "discriminatory", "subadditive", "uniform",
                 smooth_poa_bound(lam_da / 2.0, a_da)),
        BoundRow("poa", "uniform_price", "submodular", "standard|uniform",
                 weak_smooth_poa_bound(lam_up, 0.0, a_up)),
        BoundRow("poa", "uniform_price", "subadditive", "standard",
                 template_poa_bound(0.5, 1.0, UNIFORM)),
        BoundRow("poa", "uniform_price", "subadditive", "uniform",
                 weak_smooth_poa_bound(lam_up / 2.0, 0.0, a_up)),
    ]
    seq_da = sequential_smooth(lam_da, a_da)
    seq_da_sub = sequential_smooth(lam_da / 2.0, a_da)
    seq_up = sequential_weak(lam_up, 0.0, a_up)
    seq_up_sub = sequential_weak(lam_up / 2.0, 0.0, a_up)
    rows += [
        BoundRow("composition", "discriminatory", "submodular", "simultaneous",
                 smooth_poa_bound(lam_da, a_da)),
        BoundRow("composition", "discriminatory", "submodular", "sequential",
                 smooth_poa_bound(*seq_da)),
        BoundRow("composition", "discriminatory", "subadditive", "simultaneous",
                 smooth_poa_bound(lam_da / 2.0, a_da)),
        BoundRow("composition", "discriminatory", "subadditive", "sequential",
                 smooth_poa_bound(*seq_da_sub)),
        BoundRow("composition", "uniform_price", "submodular", "simultaneous",
                 weak_smooth_poa_bound(lam_up, 0.0, a_up)),
        BoundRow("composition", "uniform_price", "submodular", "sequential",
                 weak_smooth_poa_bound(*seq_up)),
        BoundRow("composition", "uniform_price", "subadditive", "simultaneous",
                 weak_smooth_poa_bound(lam_up / 2.0, 0.0, a_up)),
        BoundRow("composition", "uniform_price", "subadditive", "sequential",
                 weak_smooth_poa_bound(*seq_up_sub)),
    ]
    return rows


# ---------------------------------------------------------------------------
# The randomized uniform deviation and its exact expected utility


@dataclass(frozen=True)
class KeyLemmaDeviation:
    """Bid t*c on the first x_opt slots, t ~ alpha/(1-t) on [0, B]."""

    valuation: Valuation
    x_opt: int
    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not 0 <= self.x_opt <= self.valuation.k:
            raise ValueError("x_opt out of range")

    @property
    def tau_units(self) -> int:
        return tau(self.valuation, self.x_opt) if self.x_opt >= 1 else 1

    @property
    def per_unit(self) -> float:
        if self.x_opt == 0:
            return 0.0
        t = self.tau_units
        return self.valuation.value(t) / t

    @property
    def upper(self) -> float:
        return 1.0 - math.exp(-1.0 / self.alpha)

    def pdf(self, t: float) -> float:
        if not 0.0 <= t <= self.upper:
            return 0.0
        return self.alpha / (1.0 - t)

    def bid_at(self, t: float) -> UniformBid:
        return UniformBid(t * self.per_unit, self.x_opt)

    def sample_ts(self, samples: int, seed: int) -> np.ndarray:
        u = np.random.default_rng(seed).random(samples)
        return 1.0 - np.exp(-u / self.alpha)


def expected_deviation_utility_exact(val: Valuation, x_opt: int,
                                     beta_minus: Sequence[float],
                                     alpha: float, pricing: str) -> float:
    """Exact expectation of the deviator's utility, by piecewise quadrature.

    Between consecutive thresholds gamma_j = clamp(beta_j * tau/v(tau), 0, B)
    the deviation wins exactly j units.  Pay-as-bid charges t*j*v(tau)/tau;
    uniform pricing charges the same while the deviator still has losing
    bids of his own, and the displaced bid beta_j on the top segment where
    he wins his full quantity.
    """
    if x_opt == 0:
        return 0.0
    dev = KeyLemmaDeviation(val, x_opt, alpha)
    per_unit = dev.per_unit
    if per_unit <= 0.0:
        return 0.0
    upper = dev.upper
    gammas = [min(max(beta_minus[j - 1] / per_unit, 0.0), upper)
              for j in range(1, x_opt + 1)]
    gammas.append(upper)
    total = 0.0
    for j in range(1, x_opt + 1):
        a, b = gammas[j - 1], gammas[j]
        if b <= a:
            continue
        log_term = math.log((1.0 - a) / (1.0 - b))
        mass = alpha * log_term
        if pricing == UNIFORM and j == x_opt:
            total += (val.value(j) - j * beta_minus[j - 1]) * mass
        else:
            t_mass = alpha * (log_term - (b - a))
            total += val.value(j) * mass - j * per_unit * t_mass
    return total


def expected_deviation_utility_mc(val: Valuation, x_opt: int,
                                  beta_minus: Sequence[float], alpha: float,
                                  pricing: str, samples: int = 10 ** 6,
                                  seed: int = 0) -> tuple[float, float]:
    """Monte Carlo cross-check of the exact quadrature: (mean, stderr)."""
    if x_opt == 0:
        return 0.0, 0.0
    dev = KeyLemmaDeviation(val, x_opt, alpha)
    per_unit = dev.per_unit
    if per_unit <= 0.0:
        return 0.0, 0.0
    ts = dev.sample_ts(samples, seed)
    bids = ts * per_unit
    thresholds = np.asarray(beta_minus[:x_opt], dtype=float)
    won = np.searchsorted(thresholds, bids, side="left")
    gains = np.asarray(val.values, dtype=float)[won]
    if pricing == DISCRIMINATORY:
        pay = won * bids
    elif pricing == UNIFORM:
        price = np.where(won < x_opt, bids, thresholds[x_opt - 1])
        pay = won * price
    else:
        raise ValueError(f"unknown pricing rule {pricing!r}")
    util = gains - pay
    return float(util.mean()), float(util.std(ddof=1) / math.sqrt(samples))


def key_lemma_rhs(val: Valuation, x_opt: int, beta_minus: Sequence[float],
                  alpha: float) -> float:
    """alpha*(1 - e^(-1/alpha))*x_opt*v(tau)/tau - alpha*sum(beta_1..beta_x)."""
    if x_opt == 0:
        return 0.0
    dev = KeyLemmaDeviation(val, x_opt, alpha)
    return (alpha * dev.upper * x_opt * dev.per_unit
            - alpha * sum(beta_minus[:x_opt]))


def verify_key_lemma(instance: AuctionInstance, profile: BidProfile,
                     alpha: float) -> tuple[float, ...]:
    """Per-bidder margin (exact expected deviation utility) - (lower bound)."""
    x_opt = optimal_allocation(instance.valuations, instance.k).allocation
    margins = []
    for i, val in enumerate(instance.valuations):
        beta = beta_minus_i(profile, i, instance.tie_break, instance.k)
        lhs = expected_deviation_utility_exact(val, x_opt[i], beta, alpha,
                                               instance.pricing)
        rhs = key_lemma_rhs(val, x_opt[i], beta, alpha)
        margins.append(lhs - rhs)
    return tuple(margins)


# ---------------------------------------------------------------------------
# Smoothness certificates


@dataclass(frozen=True)
class SmoothnessCertificate:
    kind: str  # "smooth" | "weakly_smooth"
    lam: float
    alpha: float
    margin: float
    verified: bool
    instances: int
    mu: float | None = None
    mu1: float | None = None
    mu2: float | None = None

    @property
    def implied_poa(self) -> float:
        if self.kind == "smooth":
            return smooth_poa_bound(self.lam, self.mu)
        return weak_smooth_poa_bound(self.lam, self.mu1, self.mu2)

    def to_json(self):
        out = {"kind": self.kind, "lambda": self.lam, "alpha": self.alpha,
               "margin": self.margin, "verified": self.verified,
               "instances": self.instances, "implied_poa": self.implied_poa}
        if self.mu is not None:
            out["mu"] = self.mu
        if self.mu1 is not None:
            out["mu1"] = self.mu1
            out["mu2"] = self.mu2
        return out


def _willingness_to_pay(profile: BidProfile, allocation) -> float:
    total = 0.0
    for i in range(profile.n):
        x = allocation[i]
        if x >= 1:
            total += x * profile.vector(i)[x - 1]
    return total


def verify_smoothness(cases, alpha: float, kind: str,
                      valuation_class: str) -> SmoothnessCertificate:
    """Check the summed deviation guarantee on every (instance, profile) case.

    kind "smooth" (pay-as-bid): sum_i E[u_i(b'_i, b_-i)] >=
    lambda*OPT - alpha*sum_i P_i(b).  kind "weakly_smooth" (uniform price):
    the subtracted term is alpha * sum_i x_i(b)*b_i(x_i(b)); for
    uniform-interface profiles the deviations face the profile itself,
    while standard-interface profiles are first passed through the
    uniformization transform (which preserves allocation and
    willingness-to-pay) -- bidding against the raw standard profile, the
    deviation can be blocked by losing bids that the willingness-to-pay
    term does not see, and the inequality genuinely fails.  The deviation
    expectations are exact; the certificate carries the minimum margin.
    """
    lam = guarantee_lambda(alpha, valuation_class)
    predicate = is_submodular if valuation_class == "submodular" else is_subadditive
    min_margin = math.inf
    count = 0
    for instance, profile in cases:
        for v in instance.valuations:
            if not predicate(v):
                raise ValueError(
                    f"valuation not in declared class {valuation_class!r}")
        if kind == "smooth" and instance.pricing != DISCRIMINATORY:
            raise ValueError("smooth certificates apply to pay-as-bid pricing")
        if kind == "weakly_smooth" and instance.pricing != UNIFORM:
            raise ValueError("weak certificates apply to uniform pricing")
        opt = optimal_allocation(instance.valuations, instance.k)
        out = run_auction(profile, instance.tie_break, instance.pricing)
        opposing = profile
        if kind == "weakly_smooth" and profile.interface == STANDARD:
            opposing = uniformize_profile(profile, instance.tie_break)
        lhs = 0.0
        for i, val in enumerate(instance.valuations):
            beta = beta_minus_i(opposing, i, instance.tie_break, instance.k)
            lhs += expected_deviation_utility_exact(
                val, opt.allocation[i], beta, alpha, instance.pricing)
        if kind == "smooth":
            rhs = lam * opt.value - alpha * sum(out.payments)
        else:
            rhs = lam * opt.value - alpha * _willingness_to_pay(
                profile, out.allocation)
        min_margin = min(min_margin, lhs - rhs)
        count += 1
    if count == 0:
        raise ValueError("no cases supplied")
    if kind == "smooth":
        return SmoothnessCertificate("smooth", lam, alpha, min_margin,
                                     min_margin >= -MARGIN_TOL, count, mu=alpha)
    return SmoothnessCertificate("weakly_smooth", lam, alpha, min_margin,
                                 min_margin >= -MARGIN_TOL, count,
                                 mu1=0.0, mu2=alpha)


# ---------------------------------------------------------------------------
# Deviation guarantee checks (the proof-template inequality)


def verify_template_inequality(expected_utility: float, value_at_opt: float,
                               expected_beta_sum: float, lam: float,
                               mu: float) -> float:
    """Margin of E[u_i(b'_i, b_-i)] >= lam*v_i(x_i) - mu*E[sum_{j<=x_i} beta_j].

    The core arithmetic shared by every deviation family; positive margins
    certify a (lam, mu) pair, negative suprema exhibit impossibility
    frontiers.
    """
    return expected_utility - (lam * value_at_opt - mu * expected_beta_sum)


def template_margins_key_lemma(instance: AuctionInstance, opposing,
                               alpha: float,
                               valuation_class: str = "submodular"):
    """Per-bidder margins of E[u_i(b'_i, b_-i)] >= lambda*v_i(x_i) - mu*E[sum beta].

    opposing is a single BidProfile or a list of (BidProfile, prob) pairs;
    the deviation is the randomized uniform one, lambda the class constant,
    mu = alpha.
    """
    if isinstance(opposing, BidProfile):
        opposing = [(opposing, 1.0)]
    lam = guarantee_lambda(alpha, valuation_class)
    x_opt = optimal_allocation(instance.valuations, instance.k).allocation
    margins = []
    for i, val in enumerate(instance.valuations):
        lhs = 0.0
        exp_beta = 0.0
        for profile, prob in opposing:
            beta = beta_minus_i(profile, i, instance.tie_break, instance.k)
            lhs += prob * expected_deviation_utility_exact(
                val, x_opt[i], beta, alpha, instance.pricing)
            exp_beta += prob * sum(beta[: x_opt[i]])
        margins.append(verify_template_inequality(
            lhs, val.value(x_opt[i]), exp_beta, lam, alpha))
    return tuple(margins)


def feldman_tbeta(beta_prefix: Sequence[float], val: Valuation) -> tuple[int, ...]:
    """Largest block of top entries within the prefix whose sum exceeds the value.

    Returns 1-based indices into beta_prefix (ascending order assumed).  The
    choice is maximal by inclusion: for any larger size the sum of the
    largest entries already fails the test.
    """
    x = len(beta_prefix)
    for size in range(x, 0, -1):
        block = beta_prefix[x - size:]
        if sum(block) > val.value(size):
            return tuple(range(x - size + 1, x + 1))
    return ()


def feldman_bid(beta_vec: Sequence[float], x: int, variant: str,
                val: Valuation, tick: float = 0.0) -> StandardBid:
    """Deterministic part of the sampled deviation for one drawn beta vector.

    Keeps the x lowest opposing winning bids (zeroing the k-x highest); the
    uniform-price variant additionally zeroes the block found by
    feldman_tbeta so the remainder satisfies no-overbidding.  tick is added
    to the kept components to break ties in the deviator's favor.
    """
    k = len(beta_vec)
    kept = list(beta_vec[:x])
    if variant == UNIFORM:
        dropped = set(feldman_tbeta(kept, val))
        values = [0.0 if (j + 1) in dropped else kept[j] + tick
                  for j in range(x)]
    elif variant == DISCRIMINATORY:
        values = [b + tick for b in kept]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    values.sort(reverse=True)
    return StandardBid(tuple(values) + (0.0,) * (k - x))


def feldman_complement_ok(beta_vec: Sequence[float], x: int,
                          val: Valuation) -> bool:
    """The kept block of the uniform-price variant never overbids."""
    kept = beta_vec[:x]
    dropped = set(feldman_tbeta(kept, val))
    remaining = [kept[j] for j in range(x) if (j + 1) not in dropped]
    return sum(remaining) <= val.value(len(remaining)) + 1e-12


def feldman_support(dist, x: int, variant: str, val: Valuation,
                    tick: float = 0.0):
    """Explicit support of the sampled deviation: [(StandardBid, prob)]."""
    return [(feldman_bid(beta, x, variant, val, tick), prob)
            for beta, prob in dist]


def feldman_deviation(dist, x: int, variant: str, val: Valuation, rng,
                      tick: float = 0.0) -> StandardBid:
    """Draw one deviation bid: sample a top-k vector from dist and transform it."""
    r = rng.random()
    acc = 0.0
    beta = dist[-1][0]
    for vec, prob in dist:
        acc += prob
        if r <= acc:
            beta = vec
            break
    return feldman_bid(beta, x, variant, val, tick)


def template_margins_feldman(instance: AuctionInstance, opposing,
                             tick: float = 0.0):
    """Margins of the (1/2, 1) deviation guarantee under standard bidding.

    opposing is a list of (BidProfile, prob); the deviation resamples the
    opposing top-k distribution, and expectations enumerate both draws.
    """
    if isinstance(opposing, BidProfile):
        opposing = [(opposing, 1.0)]
    x_opt = optimal_allocation(instance.valuations, instance.k).allocation
    margins = []
    for i, val in enumerate(instance.valuations):
        betas = [(beta_minus_i(profile, i, instance.tie_break, instance.k), p)
                 for profile, p in opposing]
        x = x_opt[i]
        exp_beta = sum(p * sum(beta[:x]) for beta, p in betas)
        lhs = 0.0
        if x >= 1:
            support = feldman_support(
                [(beta, p) for beta, p in betas], x, instance.pricing, val,
                tick)
            for bid, p_bid in support:
                for (profile, p_opp) in opposing:
                    dev = profile.replace(i, bid)
                    out = run_auction(dev, instance.tie_break,
                                      instance.pricing)
                    lhs += p_bid * p_opp * (val.value(out.allocation[i])
                                            - out.payments[i])
        margins.append(verify_template_inequality(
            lhs, val.value(x), exp_beta, 0.5, 1.0))
    return tuple(margins)


# ---------------------------------------------------------------------------
# Lower-bound frontiers for the proof template


def theorem6_da_frontier(instance: AuctionInstance, profile: BidProfile,
                         mu: float, deviation_tick: float = 1e-6) -> dict:
    """Pay-as-bid impossibility margin on a witness profile.

    Scans the constant-vector deviation family (every positive bid value in
    the profile, one tick above each, and the near-zero bid, at every
    quantity) and checks
    sup sum_i u_i + mu * sum_j beta_j(b) <= mu(1 - e^(-1/mu) + (1/k)(1 - 1/e)) * OPT.
    """
    k = instance.k
    values = sorted({v for i in range(profile.n) for v in profile.vector(i)
                     if v > 0.0})
    candidates = [deviation_tick]
    for v in values:
        candidates += [v, v + deviation_tick]
    sups = []
    for i, val in enumerate(instance.valuations):
        best = 0.0
        for c in candidates:
            for q in range(1, k + 1):
                dev = profile.replace(i, UniformBid(c, q))
                out = run_auction(dev, instance.tie_break, instance.pricing)
                u = val.value(out.allocation[i]) - out.payments[i]
                best = max(best, u)
        sups.append(best)
    out = allocate(profile, instance.tie_break)
    sum_beta = sum(out.winning_bids)
    opt = optimal_allocation(instance.valuations, k).value
    lhs = sum(sups) + mu * sum_beta
    bound = mu * (1.0 - math.exp(-1.0 / mu)
                  + (1.0 / k) * (1.0 - math.exp(-1.0))) * opt
    return {"sup_utilities": tuple(sups), "sum_beta": sum_beta,
            "lhs": lhs, "bound": bound, "holds": lhs <= bound + 1e-6}


def theorem6_upa_check(tick: float = 1e-3) -> dict:
    """One-item uniform-price instance pinning lambda <= (1 + mu)/2.

    Valuations (1, 1/2), both bid 1/2, ties favor the second bidder.  An
    exhaustive no-overbidding grid scan of deviations gives total achievable
    utility exactly 1/2 while OPT = 1 and beta_1 = 1/2, so any certified
    (lambda, mu) must satisfy lambda <= (1 + mu)/2.
    """
    vals = (valuation(0, 1), valuation(0, 0.5))
    instance = AuctionInstance(vals, 1, UNIFORM, tie_favor_bidder(1))
    profile = uniform_profile(1, UniformBid(0.5, 1), UniformBid(0.5, 1))
    npoints = int(math.floor(1.0 / tick + 1e-9)) + 1
    sups = []
    for i, val in enumerate(vals):
        best = 0.0
        for idx in range(npoints):
            c = idx * tick
            if c > val.value(1) + 1e-12:
                continue
            dev = profile.replace(i, UniformBid(c, 1))
            u = utilities(vals, dev, instance.tie_break, UNIFORM)[i]
            best = max(best, u)
        sups.append(best)
    out = allocate(profile, instance.tie_break)
    total = sum(sups)
    return {
        "sup_utilities": tuple(sups),
        "total": total,
        "beta_1": out.winning_bids[0],
        "opt": optimal_allocation(vals, 1).value,
        "exact_half": total == 0.5,
        "frontier": "lambda <= (1 + mu)/2",
    }
