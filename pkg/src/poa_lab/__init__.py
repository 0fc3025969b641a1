"""Multi-unit auction mechanisms, equilibria and price-of-anarchy lab."""

from .valuations import (
    Valuation,
    additive_valuation,
    flat_valuation,
    from_marginals,
    is_subadditive,
    is_submodular,
    marginals,
    random_valuation,
    tau,
    valuation,
)
from .mechanisms import (
    DISCRIMINATORY,
    STANDARD,
    UNIFORM,
    UNIFORM_IFACE,
    AuctionInstance,
    BidProfile,
    Outcome,
    StandardBid,
    TieBreakRule,
    UniformBid,
    allocate,
    beta_minus_i,
    check_no_overbidding,
    expand_uniform,
    price_discriminatory,
    price_uniform,
    run_auction,
    social_welfare,
    standard_bid,
    standard_profile,
    tie_break_presets,
    tie_explicit,
    tie_favor_bidder,
    tie_favor_last,
    tie_lexicographic,
    uniform_profile,
    uniformize_profile,
    utilities,
    utility,
    zero_bid,
)
from .welfare import (
    OptimalAssignment,
    enumerate_optimal,
    greedy_optimal_submodular,
    optimal_allocation,
    poa_ratio,
)
from .equilibria import (
    BayesianGame,
    BidGrid,
    RegretReport,
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
    lemma5_structure,
    pne_standard_to_uniform,
    pure_strategy,
    singleton_game,
)
from .smoothness import (
    KeyLemmaDeviation,
    SmoothnessCertificate,
    bound_table,
    expected_deviation_utility_exact,
    expected_deviation_utility_mc,
    feldman_deviation,
    feldman_support,
    guarantee_lambda,
    lambert_w_minus1,
    optimal_alpha,
    smooth_poa_bound,
    template_margins_feldman,
    template_margins_key_lemma,
    theorem6_da_frontier,
    theorem6_upa_check,
    verify_key_lemma,
    verify_smoothness,
    verify_template_inequality,
    weak_smooth_poa_bound,
)
from .instances import (
    NamedInstance,
    appendix_c_bayesian,
    list_instances,
    proposition1_epsilon_pne,
    proposition1_pne,
    theorem4_instance,
    theorem6_da_instance,
    theorem6_upa_instance,
    verify_named,
)

__version__ = "0.1.0"
