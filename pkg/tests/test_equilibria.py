
import pytest

from poa_lab.equilibria import (
    BayesianGame,
    BidGrid,
    SearchCapExceeded,
    Strategy,
    bayesian_poa,
    best_response,
    best_response_enumerated,
    canonical_upa_profile,
    find_pure_nash,
    is_bayes_nash,
    is_epsilon_equilibrium,
    is_pure_nash,
    is_undominated_upa,
    pne_standard_to_uniform,
    pure_strategy,
    singleton_game,
)
from poa_lab.instances import appendix_c_bayesian, theorem4_instance
from poa_lab.mechanisms import (
    AuctionInstance,
    StandardBid,
    UniformBid,
    allocate,
    check_no_overbidding,
    run_auction,
    social_welfare,
    standard_bid,
    standard_profile,
    tie_favor_bidder,
    tie_lexicographic,
    uniform_profile,
    zero_bid,
)
from poa_lab.sweeps import (
    case_rng,
    lemma1_equilibrium,
    random_instance,
    random_no_overbidding_profile,
)
from poa_lab.valuations import Valuation, marginals, random_valuation, valuation

from helpers import random_profile


def grid_snap_profile(prof, grid):
    bids = []
    for i in range(prof.n):
        vec = [round(v / grid.tick) * grid.tick for v in prof.vector(i)]
        vec = [min(vec[: j + 1]) for j in range(len(vec))]
        bids.append(StandardBid(tuple(vec)))
    return standard_profile(prof.k, *bids)


# -- grids -------------------------------------------------------------------


def test_grid_points():
    grid = BidGrid(0.25, 1.0)
    assert grid.points() == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert grid.contains(0.5)
    assert not grid.contains(0.3)
    assert not grid.contains(1.25)


def test_grid_validation():
    with pytest.raises(ValueError):
        BidGrid(0.0, 1.0)
    with pytest.raises(ValueError):
        BidGrid(0.5, 0.1)


# -- best responses ----------------------------------------------------------


def test_best_response_priced_out():
    vals = (valuation(0, 0.4), valuation(0, 1.0))
    inst = AuctionInstance(vals, 1, "discriminatory", tie_lexicographic())
    prof = standard_profile(1, zero_bid(1), standard_bid(1.0))
    br = best_response(inst, prof, 0, BidGrid(0.1, 1.0))
    assert br.units == 0
    assert br.utility == 0.0


def test_best_response_matches_enumeration():
    grid = BidGrid(0.125, 1.0)
    for idx in range(80):
        rng = case_rng(42, idx)
        k = rng.randint(1, 3)
        pricing = "discriminatory" if idx % 2 == 0 else "uniform"
        vals = tuple(random_valuation("general", k, 0.75 / k,
                                      seed=rng.randrange(2 ** 31))
                     for _ in range(2))
        inst = AuctionInstance(vals, k, pricing, tie_lexicographic())
        prof = grid_snap_profile(random_profile(rng, 2, k, 0.875), grid)
        for i in range(2):
            closed = best_response(inst, prof, i, grid)
            brute = best_response_enumerated(inst, prof, i, grid)
            assert closed.utility == pytest.approx(brute.utility, abs=1e-12)


def test_best_response_respects_no_overbidding():
    # a flat value of eps cannot afford two units above eps
    vals = (valuation(0, 0.5, 0.5), valuation(0, 0.5, 0.5))
    inst = AuctionInstance(vals, 2, "uniform", tie_lexicographic())
    prof = standard_profile(2, standard_bid(0.3, 0.3), standard_bid(0.3, 0.3))
    free = best_response(inst, prof, 0, BidGrid(0.01, 1.0))
    capped = best_response(inst, prof, 0,
                           BidGrid(0.01, 1.0, no_overbidding=True))
    assert free.units >= capped.units
    if capped.units:
        assert check_no_overbidding(vals[0], capped.bid.expand(2))


# -- pure Nash verification ---------------------------------------------------


def test_theorem4_profile_is_equilibrium():
    named = theorem4_instance(10, 1e-6)
    report = is_pure_nash(named.profile("equilibrium"), named.instance,
                          named.grid)
    assert report.max_regret == 0.0
    assert report.is_equilibrium()


def test_priced_out_loser_with_value_has_regret():
    vals = (valuation(0, 0.5), valuation(0, 0.9))
    inst = AuctionInstance(vals, 1, "discriminatory", tie_lexicographic())
    prof = standard_profile(1, standard_bid(0.5), zero_bid(1))
    report = is_pure_nash(prof, inst, BidGrid(0.05, 1.0))
    loser = report.entries[1]
    assert loser.regret > 0.3


def test_exact_pne_is_eps_equilibrium_for_all_eps():
    named = theorem4_instance(6, 1e-6)
    for eps in (0.0, 0.01, 0.5):
        assert is_epsilon_equilibrium(named.profile("equilibrium"),
                                      named.instance, named.grid, eps)


# -- search -------------------------------------------------------------------


def test_find_pure_nash_k1_example():
    inst = AuctionInstance((valuation(0, 1.0), valuation(0, 0.5)), 1,
                           "discriminatory", tie_favor_bidder(0))
    res = find_pure_nash(inst, BidGrid(0.25, 1.0))
    assert res.exhaustive
    found = {tuple(p.vector(i) for i in range(2)) for p in res.equilibria}
    assert ((0.5,), (0.5,)) in found
    for prof in res.equilibria:
        assert is_pure_nash(prof, inst, BidGrid(0.25, 1.0)).is_equilibrium()


def test_single_bidder_must_still_pay_a_tick():
    # with no competition the all-zero bid wins nothing (zero bids never
    # win), so bidding one tick on the best prefix is the equilibrium shape
    inst = AuctionInstance((valuation(0, 0.5, 0.8),), 2, "discriminatory",
                           tie_lexicographic())
    grid = BidGrid(0.1, 1.0)
    res = find_pure_nash(inst, grid)
    zero = standard_profile(2, zero_bid(2))
    assert zero not in res.equilibria
    report = is_pure_nash(zero, inst, grid)
    assert report.max_regret == pytest.approx(0.6)  # two units at one tick each
    best = max(social_welfare(inst.valuations,
                              allocate(p, inst.tie_break).allocation)
               for p in res.equilibria)
    assert best == 0.8


def test_find_pure_nash_cap():
    inst = AuctionInstance((valuation(0, 1, 1), valuation(0, 1, 1)), 2,
                           "discriminatory", tie_lexicographic())
    with pytest.raises(SearchCapExceeded):
        find_pure_nash(inst, BidGrid(0.001, 1.0), cap=100)


def test_dynamics_fixed_points_are_equilibria():
    inst = AuctionInstance((valuation(0, 1.0), valuation(0, 0.5)), 1,
                           "discriminatory", tie_favor_bidder(0))
    grid = BidGrid(0.25, 1.0)
    res = find_pure_nash(inst, grid, mode="best_response_dynamics", seed=5,
                         starts=10)
    assert not res.exhaustive
    exhaustive = set(find_pure_nash(inst, grid).equilibria)
    for prof in res.equilibria:
        assert prof in exhaustive


# -- Bayesian games -----------------------------------------------------------


def test_appendix_c_is_bayes_nash():
    game, strat = appendix_c_bayesian()
    report = is_bayes_nash(game, strat)
    assert report.max_regret <= 1e-12
    assert bayesian_poa(game, strat) == pytest.approx(1.000466, abs=1e-5)


def test_appendix_c_perturbed_has_regret():
    game, strat = appendix_c_bayesian()
    grid = game.grid
    lowered = pure_strategy((
        (StandardBid((grid.value(332),)),),
        (StandardBid((grid.value(334),)), StandardBid((grid.value(333),))),
    ))
    report = is_bayes_nash(game, lowered)
    assert report.max_regret > 1e-4


def test_singleton_game_reduces_to_pure_nash():
    for idx in range(25):
        rng = case_rng(7, idx)
        inst = random_instance(rng, "submodular", "uniform", 3, 3, scale=0.5)
        grid = BidGrid(0.125, 1.0, no_overbidding=True)
        prof = grid_snap_profile(random_no_overbidding_profile(inst, rng), grid)
        if not all(check_no_overbidding(inst.valuations[i], prof.bids[i])
                   for i in range(inst.n)):
            continue
        game = singleton_game(inst, grid)
        strat = pure_strategy(tuple((prof.bids[i],) for i in range(inst.n)))
        rep_b = is_bayes_nash(game, strat)
        rep_p = is_pure_nash(prof, inst, grid)
        assert rep_b.max_regret == pytest.approx(rep_p.max_regret, abs=1e-12)


def test_full_information_poa_reduces_to_ratio():
    inst = AuctionInstance((valuation(0, 1.0), valuation(0, 0.5)), 1,
                           "uniform", tie_favor_bidder(1))
    grid = BidGrid(0.25, 1.0)
    game = singleton_game(inst, grid)
    prof = uniform_profile(1, UniformBid(0.5, 1), UniformBid(0.5, 1))
    strat = pure_strategy(((prof.bids[0],), (prof.bids[1],)))
    assert bayesian_poa(game, strat) == pytest.approx(2.0)


def test_bayesian_poa_matches_manual_enumeration():
    grid = BidGrid(0.25, 1.0)
    v_hi, v_lo = valuation(0, 1.0), valuation(0, 0.5)
    game = BayesianGame(1, ((v_hi, v_lo), (v_lo,)), ((0.25, 0.75), (1.0,)),
                        grid, tie_lexicographic(), "discriminatory")
    bid = lambda x: StandardBid((x,))
    strat = Strategy(((((bid(0.5), 0.5), (bid(0.25), 0.5)), ((bid(0.25), 1.0),)),
                      (((bid(0.25), 1.0),),)))
    # manual: bidder 2 always bids 0.25; bidder 1 ties at 0.25 half the time
    # (lexicographic tie goes to bidder 1) and outbids otherwise, so bidder 1
    # always wins: welfare = E[v_1] = 0.25*1 + 0.75*0.5
    e_sw = 0.25 * 1.0 + 0.75 * 0.5
    e_opt = 0.25 * 1.0 + 0.75 * 0.5
    assert bayesian_poa(game, strat) == pytest.approx(e_opt / e_sw)


def test_strategy_validation():
    game, strat = appendix_c_bayesian()
    bad = Strategy(((((StandardBid((0.3335,)), 1.0),),),) + strat.rules[1:])
    with pytest.raises(ValueError):
        bad.validate(game)
    unbalanced = Strategy(((((StandardBid((0.333,)), 0.5),),),) + strat.rules[1:])
    with pytest.raises(ValueError):
        unbalanced.validate(game)


# -- undominated bidding and the interface conversion -------------------------


def test_undominated_upa():
    v = random_valuation("submodular", 4, 1.0, seed=21)
    m = marginals(v)
    assert is_undominated_upa(v, StandardBid(m))
    lowered = StandardBid((m[0] - 0.01,) + m[1:])
    assert not is_undominated_upa(v, lowered)
    above = StandardBid((m[0],) + tuple(min(m[j] + 0.01, m[j - 1])
                                        for j in range(1, 4)))
    assert not is_undominated_upa(v, above)


def test_undominated_needs_submodular():
    jump = Valuation((0.0, 1.0, 1.0, 2.0))
    with pytest.raises(ValueError):
        is_undominated_upa(jump, StandardBid((1.0, 0.0, 0.0)))


def test_theorem4_loser_bids_undominated():
    named = theorem4_instance(8, 1e-6)
    prof = named.profile("equilibrium")
    for i in range(1, named.n):
        bid = prof.bids[i].expand(named.k)
        assert is_undominated_upa(named.instance.valuations[i], bid)


def test_conversion_maps_losers_to_first_marginal():
    rng = case_rng(31, 0)
    inst, prof = lemma1_equilibrium(rng)
    converted = pne_standard_to_uniform(prof, inst)
    out = allocate(prof, inst.tie_break)
    for i in range(inst.n):
        if out.allocation[i] == 0:
            m1 = marginals(inst.valuations[i])[0]
            assert converted.bids[i] == UniformBid(m1, 1)
        else:
            x = out.allocation[i]
            assert converted.bids[i].quantity == x
            assert converted.bids[i].price == inst.valuations[i].value(x) / x


def test_conversion_rejects_non_canonical_profiles():
    rng = case_rng(31, 1)
    inst, prof = lemma1_equilibrium(rng)
    vec = list(prof.vector(0))
    vec[0] = vec[0] + 0.05
    broken = prof.replace(0, StandardBid(tuple(vec)))
    with pytest.raises(ValueError):
        pne_standard_to_uniform(broken, inst)


def test_conversion_preserves_outcome_on_constructed_equilibria():
    for idx in range(25):
        rng = case_rng(32, idx)
        inst, prof = lemma1_equilibrium(rng)
        before = run_auction(prof, inst.tie_break, "uniform")
        converted = pne_standard_to_uniform(prof, inst)
        after = run_auction(converted, inst.tie_break, "uniform")
        assert before.allocation == after.allocation
        assert before.uniform_price == after.uniform_price
        assert social_welfare(inst.valuations, before.allocation) == \
            social_welfare(inst.valuations, after.allocation)


def test_canonical_profile_shape():
    rng = case_rng(33, 0)
    inst, prof = lemma1_equilibrium(rng)
    out = allocate(prof, inst.tie_break)
    for i in range(inst.n):
        vec = prof.vector(i)
        m = marginals(inst.valuations[i])
        x = out.allocation[i]
        if x:
            assert vec[:x] == m[:x]
            assert all(v == 0.0 for v in vec[x:])
        else:
            assert vec == (m[0],) + (0.0,) * (inst.k - 1)


def test_best_response_to_equalizing_curve():
    # the best reply to the equalizing bid curve matches one of its levels
    # and collects value k/e no matter which level is chosen
    import math
    from poa_lab.instances import theorem6_da_instance

    k = 50
    named = theorem6_da_instance(k, 1.0)
    prof = named.profile("lower-bound-witness")
    br = best_response(named.instance, prof, 0, BidGrid(1e-6, 1.0))
    assert br.utility == pytest.approx(k / math.e, abs=1e-9)
    curve_levels = {v for v in prof.vector(1) if v > 0}
    assert any(abs(br.bid.price - level) <= 1.1e-6 for level in curve_levels)
    assert br.utility == pytest.approx(
        named.instance.valuations[0].value(br.units)
        - br.units * br.bid.price, abs=1e-9)


def test_no_continuum_equilibrium_instance_on_grid():
    # first-price with ties against the high bidder has no equilibrium in
    # the continuum; on a grid one appears at tick granularity
    inst = AuctionInstance((valuation(0, 1.0), valuation(0, 0.5)), 1,
                           "discriminatory", tie_favor_bidder(1))
    grid = BidGrid(0.25, 1.0)
    tied = standard_profile(1, standard_bid(0.5), standard_bid(0.5))
    assert not is_epsilon_equilibrium(tied, inst, grid, 0.1)
    res = find_pure_nash(inst, grid)
    assert res.equilibria
    for prof in res.equilibria:
        assert allocate(prof, inst.tie_break).allocation == (1, 0)


def test_theorem4_conversion_is_fixed_point():
    # every bidder wins one unit bidding his first marginal: the canonical
    # uniform image is the profile itself
    named = theorem4_instance(6, 1e-6)
    inst = named.instance
    std = standard_profile(
        named.k, *(named.profile("equilibrium").bids[i].expand(named.k)
                   for i in range(named.n)))
    converted = pne_standard_to_uniform(std, inst)
    assert converted.bids == named.profile("equilibrium").bids


def test_appendix_c_expected_utilities():
    game, strat = appendix_c_bayesian(alpha=0.0014, tick=1e-3)
    report = is_bayes_nash(game, strat)
    by_type = {(e.bidder, e.type_index): e for e in report.entries}
    lo = game.grid.value(333)
    hi = game.grid.value(334)
    alpha = game.priors[1][0]
    assert by_type[(0, 0)].current_utility == pytest.approx(
        (1 - alpha) * (1 - lo), abs=1e-12)
    assert by_type[(1, 0)].current_utility == pytest.approx(0.667 - hi,
                                                            abs=1e-12)
    assert by_type[(1, 1)].current_utility == 0.0


def test_uniform_interface_exhaustive_search():
    # one unit under uniform pricing is a second-price auction: the
    # truthful no-overbidding profile is an equilibrium on the grid
    inst = AuctionInstance((valuation(0, 1.0), valuation(0, 0.5)), 1,
                           "uniform", tie_favor_bidder(0))
    grid = BidGrid(0.25, 1.0, "uniform", no_overbidding=True)
    res = find_pure_nash(inst, grid)
    assert res.exhaustive
    truthful = uniform_profile(1, UniformBid(1.0, 1), UniformBid(0.5, 1))
    assert truthful in res.equilibria
    out = run_auction(truthful, inst.tie_break, "uniform")
    assert out.allocation == (1, 0) and out.payments == (0.5, 0.0)
