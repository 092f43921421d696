#include <doctest.h>

#include <cmath>

#include "parq/stability.hpp"
#include "support.hpp"

using namespace parq;

namespace {

McParams small_params() {
    McParams p;
    p.replications = 2000;
    p.truncation = 200;
    p.horizon = 20000;
    p.seed = 17;
    return p;
}

/// Z_p by one direct pass over a fixed window: running tau sum, running max
/// of sigma_{-k} - sum over lags k >= p. No suffix structure, no doubling.
double direct_window_z(const MarkedPath<double>& back, int p, std::size_t window) {
    double cum = 0.0;
    double best = 0.0;
    for (std::size_t k = 1; k <= window; ++k) {
        const auto& m = back.at(-static_cast<std::int64_t>(k));
        cum += m.tau;
        if (k >= static_cast<std::size_t>(p)) best = std::max(best, m.sigma - cum);
    }
    return best;
}

}  // namespace

TEST_CASE("JSW condition") {
    const auto cx = check_jsw_condition(counterexample_space(), 2);
    CHECK(cx.holds);
    REQUIRE(cx.exact_margin);
    CHECK(*cx.exact_margin == Rational(2) - Rational(575, 100) / 3);
    CHECK(*cx.exact_margin == Rational(1, 12));

    CHECK_FALSE(check_jsw_condition(GiGiModel(PointMass{3.0}, PointMass{1.0}), 2).holds);
    const auto boundary = check_jsw_condition(GiGiModel(Exponential{1.0}, Exponential{1.0}), 1);
    CHECK_FALSE(boundary.holds);
    CHECK(boundary.margin == 0.0);
    CHECK_THROWS_AS(check_jsw_condition(counterexample_space(), 0), std::invalid_argument);
}

TEST_CASE("P(Z_p > 0) on degenerate models") {
    const auto none = estimate_pz_positive(GiGiModel(PointMass{0.0}, Exponential{1.0}), 1, 500, 50, 3);
    CHECK(none.positive.value == 0.0);
    CHECK(none.positive.half_width == 0.0);
    CHECK(none.zero_count == 500);
    CHECK(none.valid);

    const auto all = estimate_pz_positive(GiGiModel(PointMass{2.0}, PointMass{1.0}), 1, 500, 50, 3);
    CHECK(all.positive.value == 1.0);
    CHECK(all.positive.half_width == 0.0);
    CHECK(all.zero_count == 0);

    CHECK_THROWS_AS(estimate_pz_positive(GiGiModel(PointMass{0.0}, PointMass{1.0}), 0, 5, 5, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_pz_positive(GiGiModel(PointMass{0.0}, PointMass{1.0}), 3, 5, 2, 1),
                    std::invalid_argument);
}

TEST_CASE("P(Z_1 > 0) agrees with a long-window oracle") {
    const GiGiModel model(Exponential{1.0}, Exponential{2.0});
    const std::size_t reps = 100000;
    const std::uint64_t seed = 2024;
    const auto est = estimate_pz_positive(model, 1, reps, 100, seed);
    CHECK(est.valid);

    std::size_t hits = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto back = sample_backward_path(model, 2000, replication_seed(seed, r));
        if (direct_window_z(back, 1, 2000) > 0.0) ++hits;
    }
    const double oracle = static_cast<double>(hits) / static_cast<double>(reps);
    CHECK(std::abs(est.positive.value - oracle) <= est.positive.half_width);
}

TEST_CASE("exact P(Z_p > 0) on the counterexample") {
    const auto z1 = exact_pz_positive(counterexample_space(), 1);
    CHECK(z1.positive.value == 1.0);
    CHECK(z1.positive.half_width == 0.0);
    const auto z2 = exact_pz_positive(counterexample_space(), 2);
    CHECK(z2.zero_count >= 1);  // Z_2 at omega_1 is 0
}

TEST_CASE("J_{p+1}SW conditions") {
    const auto idle = check_jpsw_conditions(GiGiModel(PointMass{0.0}, Exponential{1.0}), 2, 1, small_params());
    CHECK(idle.jpsw_condition);
    CHECK(idle.jpsw_lhs == 0.0);
    CHECK(idle.p_z_zero_positive);
    CHECK(idle.splitting_ok);

    const auto det = check_jpsw_conditions(GiGiModel(PointMass{2.0}, PointMass{1.0}), 2, 1, small_params());
    CHECK_FALSE(det.jpsw_condition);
    CHECK(det.jpsw_lhs == 2.0);
    CHECK(det.jpsw_rhs == 1.0);
    CHECK_FALSE(det.p_z_zero_positive);
    CHECK(det.pz.positive.half_width == 0.0);
    CHECK(det.loss.probability.half_width == 0.0);
    CHECK(det.loss.probability.value == 0.5);

    const auto mc = check_jpsw_conditions(GiGiModel(Exponential{1.0}, Exponential{0.4}), 3, 1, small_params());
    const double gap = mc.mean_sigma * mc.pz.positive.value - 2 * mc.mean_tau;
    CHECK(std::abs(gap) > mc.mean_sigma * mc.pz.positive.half_width);
    CHECK(mc.jpsw_condition == (gap < 0));
    CHECK(mc.hypotheses.size() == 4);
    CHECK(mc.hypotheses[2].holds);  // exponential tau

    const auto uni = check_jpsw_conditions(GiGiModel(Exponential{1.0}, Uniform{0.5, 1.5}), 3, 1, small_params());
    CHECK_FALSE(uni.hypotheses[2].holds);

    CHECK_THROWS_AS(check_jpsw_conditions(GiGiModel(PointMass{0.0}, PointMass{1.0}), 2, 2, small_params()),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_jpsw_conditions(GiGiModel(PointMass{0.0}, PointMass{1.0}), 2, 0, small_params()),
                    std::invalid_argument);
}

TEST_CASE("exact report on the counterexample") {
    McParams params = small_params();
    params.horizon = 3000;
    const auto rep = check_jpsw_conditions(counterexample_space(), 2, 1, params);
    CHECK(rep.exact);
    CHECK(rep.jsw.holds);
    // P(Z_1 > 0) = 1, so E sigma = 23/12 > 1
    CHECK_FALSE(rep.jpsw_condition);
    CHECK(rep.pz.positive.half_width == 0.0);
    CHECK(rep.loss.probability.half_width == 0.0);
    CHECK_FALSE(rep.hypotheses[2].holds);
    const std::string table = format_table(rep);
    CHECK(table.find("E[sigma] < S E[tau]") != std::string::npos);
    CHECK(table.find("E[sigma] P(Z_p>0) < (S-p) E[tau]") != std::string::npos);
    CHECK(table.find("loss/E[tau] < (S-p)/E[sigma]") != std::string::npos);
}

TEST_CASE("adding servers never breaks the J_{p+1}SW condition") {
    const GiGiModel model(Exponential{0.5}, Exponential{1.0});
    bool seen_true = false;
    for (int s = 2; s <= 6; ++s) {
        const auto rep = check_jpsw_conditions(model, s, 1, small_params());
        if (seen_true) CHECK(rep.jpsw_condition);
        seen_true = seen_true || rep.jpsw_condition;
    }
    CHECK(seen_true);
}

TEST_CASE("splitting bound coherence") {
    for (double rate : {0.4, 0.7, 1.0, 2.0}) {
        for (int s = 2; s <= 4; ++s) {
            const auto rep = check_jpsw_conditions(GiGiModel(Exponential{rate}, Exponential{1.0}), s, 1, small_params());
            const bool premise = rep.jpsw_condition && rep.jpsw_margin > 0 &&
                                 rep.loss.probability.value <= rep.pz.positive.value + rep.pz.positive.half_width +
                                                                   rep.loss.probability.half_width;
            if (premise) CHECK(rep.splitting_ok);
            if (rep.splitting.holds) CHECK(rep.splitting_basis == "direct");
        }
    }
}

TEST_CASE("loss probability") {
    CHECK(estimate_loss_probability(GiGiModel(PointMass{0.0}, Exponential{1.0}), 1, 1000, std::nullopt, 1)
              .probability.value == 0.0);
    const auto alt = estimate_loss_probability(GiGiModel(PointMass{2.0}, PointMass{1.0}), 1, 1000, std::nullopt, 1);
    CHECK(alt.probability.value == 0.5);
    CHECK(alt.probability.half_width == 0.0);
    CHECK(alt.burn_in == 100);

    const GiGiModel model(Exponential{1.0}, Exponential{1.0});
    const auto a = estimate_loss_probability(model, 2, 1000000, std::nullopt, 11);
    const auto b = estimate_loss_probability(model, 2, 1000000, std::nullopt, 12);
    CHECK(a.probability.half_width > 0.0);
    CHECK(std::abs(a.probability.value - b.probability.value) <=
          2 * std::max(a.probability.half_width, b.probability.half_width));

    CHECK_THROWS_AS(estimate_loss_probability(model, 1, 10, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_loss_probability(model, 1, 10, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("splitting comparison") {
    const auto c = splitting_comparison(0.25, 2.0, 1.0, 3, 1);
    CHECK(c.lhs == 0.25);
    CHECK(c.rhs == 1.0);
    CHECK(c.holds);
    CHECK(std::isinf(splitting_comparison(0.0, 0.0, 1.0, 2, 1).rhs));
}

TEST_CASE("replications do not depend on the thread count") {
    const GiGiModel model(Exponential{1.0}, Exponential{1.2});
    const auto one = estimate_pz_positive(model, 2, 3000, 100, 5, 1);
    const auto four = estimate_pz_positive(model, 2, 3000, 100, 5, 4);
    CHECK(one.positive.value == four.positive.value);
    CHECK(one.zero_count == four.zero_count);
    const auto l1 = estimate_loss_probability(model, 2, 5000, std::nullopt, 5, 6, 1);
    const auto l4 = estimate_loss_probability(model, 2, 5000, std::nullopt, 5, 6, 4);
    CHECK(l1.probability.value == l4.probability.value);
    CHECK(l1.probability.half_width == l4.probability.half_width);
}

TEST_CASE("tightness probe") {
    const auto grid = doubling_grid(256, 1 << 14);
    const auto idle = tightness_probe(Policy::jsw(2), GiGiModel(PointMass{0.0}, Exponential{1.0}), grid, 1);
    CHECK(idle.verdict == "tight");
    for (double q : idle.quantile_track) CHECK(q == 0.0);

    CHECK(tightness_probe(Policy::jsw(1), GiGiModel(PointMass{2.0}, PointMass{1.0}), grid, 1).verdict == "growing");
    CHECK(tightness_probe(Policy::jsw(2), GiGiModel(PointMass{3.0}, PointMass{1.0}), grid, 1).verdict == "growing");
    CHECK(tightness_probe(Policy::jpsw(2, 1), GiGiModel(PointMass{3.0}, PointMass{1.0}), grid, 1).verdict ==
          "growing");

    const auto cx = tightness_probe(Policy::jpsw(2, 1), counterexample_space(), grid, 1);
    CHECK(cx.quantile_track.size() == grid.size());
    CHECK((cx.verdict == "tight" || cx.verdict == "growing" || cx.verdict == "inconclusive"));

    CHECK_THROWS_AS(tightness_probe(Policy::jsw(2), counterexample_space(), {8, 8}, 1), std::invalid_argument);
    CHECK_THROWS_AS(tightness_probe(Policy::jsw(2), counterexample_space(), {}, 1), std::invalid_argument);
}

TEST_CASE("tightness windows") {
    // deterministic JSW(1) with sigma 2, tau 1: workload after step t is t
    const auto d = tightness_probe(Policy::jsw(1), GiGiModel(PointMass{2.0}, PointMass{1.0}), {4, 8, 100}, 1);
    REQUIRE(d.quantile_track.size() == 3);
    CHECK(d.quantile_track[0] == 4.0);
    CHECK(d.quantile_track[1] == 8.0);
    CHECK(d.quantile_track[2] == 100.0);  // rank ceil(0.99 * 50) = 50 among 51..100
}
