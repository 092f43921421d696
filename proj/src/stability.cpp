#include "parq/stability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "parq/parallel.hpp"

namespace parq {

namespace {

constexpr double kZ95 = 1.959963984540054;

double to_double(const Rational& x) { return scalar_cast<double>(x); }

std::string model_label(const Model& model) {
    return std::visit(
        [](const auto& m) -> std::string {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, CyclicSpace>) {
                return "cyclic(K=" + std::to_string(m.size()) + ")";
            } else {
                return "gigi(sigma=" + describe(m.sigma()) + ", tau=" + describe(m.tau()) + ")";
            }
        },
        model);
}

void require_p(int p, const char* what) {
    if (p < 1) throw std::invalid_argument(std::string(what) + ": p must be >= 1");
}

}  // namespace

Estimate proportion_estimate(std::size_t hits, std::size_t samples) {
    if (samples == 0) throw std::invalid_argument("proportion_estimate: no samples");
    const double n = static_cast<double>(samples);
    const double phat = static_cast<double>(hits) / n;
    return {phat, kZ95 * std::sqrt(phat * (1.0 - phat) / n), samples};
}

Estimate mean_estimate(const std::vector<double>& values) {
    if (values.size() < 2) throw std::invalid_argument("mean_estimate: need at least 2 values");
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, kZ95 * std::sqrt(ss / (n - 1.0) / n), values.size()};
}

// ---------------------------------------------------------------------------

JswCheck check_jsw_condition(const CyclicSpace& space, int servers) {
    if (servers < 1) throw std::invalid_argument("check_jsw_condition: S must be >= 1");
    const Rational margin = Rational(servers) * space.mean_tau() - space.mean_sigma();
    JswCheck c;
    c.servers = servers;
    c.mean_sigma = to_double(space.mean_sigma());
    c.mean_tau = to_double(space.mean_tau());
    c.holds = margin > 0;
    c.margin = to_double(margin);
    c.exact_margin = margin;
    return c;
}

JswCheck check_jsw_condition(const GiGiModel& model, int servers) {
    if (servers < 1) throw std::invalid_argument("check_jsw_condition: S must be >= 1");
    JswCheck c;
    c.servers = servers;
    c.mean_sigma = model.mean_sigma();
    c.mean_tau = model.mean_tau();
    c.margin = servers * c.mean_tau - c.mean_sigma;
    c.holds = c.mean_sigma < servers * c.mean_tau;
    return c;
}

JswCheck check_jsw_condition(const Model& model, int servers) {
    return std::visit([&](const auto& m) { return check_jsw_condition(m, servers); }, model);
}

// ---------------------------------------------------------------------------

PzEstimate estimate_pz_positive(const GiGiModel& model, int p, std::size_t replications,
                                std::size_t truncation, std::uint64_t seed, unsigned threads) {
    require_p(p, "estimate_pz_positive");
    if (replications < 1) throw std::invalid_argument("estimate_pz_positive: replications must be >= 1");
    if (truncation < static_cast<std::size_t>(p)) {
        throw std::invalid_argument("estimate_pz_positive: truncation must be >= p");
    }
    // 0 = zero, 1 = positive; bit 2 = truncation failure
    std::vector<unsigned char> outcome(replications);
    parallel_for(
        replications,
        [&](std::size_t r) {
            const std::uint64_t s = replication_seed(seed, r);
            for (std::size_t k = truncation;; k *= 2) {
                const auto path = sample_backward_path(model, k, s);
                const auto z = compute_zvector(path, p, k);
                const bool ok = z.tail_bound_ok;
                if (ok || k >= truncation * kMaxTruncationGrowth) {
                    outcome[r] = static_cast<unsigned char>((z.values(0) > 0.0 ? 1 : 0) | (ok ? 0 : 2));
                    return;
                }
            }
        },
        threads);

    PzEstimate est;
    est.p = p;
    est.truncation = truncation;
    std::size_t hits = 0;
    for (unsigned char o : outcome) {
        if (o & 1) ++hits;
        else ++est.zero_count;
        if (o & 2) ++est.truncation_failures;
    }
    est.positive = proportion_estimate(hits, replications);
    est.valid = est.truncation_failures * 100 <= replications;
    return est;
}

PzEstimate exact_pz_positive(const CyclicSpace& space, int p) {
    require_p(p, "exact_pz_positive");
    const std::size_t k_samples = space.size();
    PzEstimate est;
    est.p = p;
    std::size_t hits = 0;
    std::size_t widest = 0;
    for (std::size_t omega = 0; omega < k_samples; ++omega) {
        // tau > 0 on every sample, so the accumulated tau eventually passes the
        // largest sigma and the tail check succeeds
        for (std::size_t k = std::max<std::size_t>(static_cast<std::size_t>(p), k_samples);; k *= 2) {
            const auto z = compute_zvector(backward_path<Rational>(space, static_cast<std::int64_t>(omega), k), p, k);
            if (z.tail_bound_ok) {
                if (z.values(0) > 0) ++hits;
                else ++est.zero_count;
                widest = std::max(widest, k);
                break;
            }
        }
    }
    est.positive = {static_cast<double>(hits) / static_cast<double>(k_samples), 0.0, k_samples};
    est.truncation = widest;
    return est;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t resolve_burn_in(std::size_t horizon, std::optional<std::size_t> burn_in) {
    const std::size_t b = burn_in.value_or(horizon / 10);
    if (horizon <= b) throw std::invalid_argument("estimate_loss_probability: horizon must exceed burn_in");
    return b;
}

}  // namespace

LossEstimate estimate_loss_probability(const GiGiModel& model, int p, std::size_t horizon,
                                       std::optional<std::size_t> burn_in, std::uint64_t seed,
                                       std::size_t replications, unsigned threads) {
    require_p(p, "estimate_loss_probability");
    if (replications < 2) throw std::invalid_argument("estimate_loss_probability: replications must be >= 2");
    const std::size_t b = resolve_burn_in(horizon, burn_in);
    std::vector<double> fraction(replications);
    parallel_for(
        replications,
        [&](std::size_t r) {
            MarkSource source(model, replication_seed(seed, r));
            Profile<double> u = zero_profile<double>(p);
            std::size_t busy = 0;
            for (std::size_t t = 0; t < horizon; ++t) {
                if (t >= b && u(0) > 0.0) ++busy;
                u = apply_loss(u, source.next());
            }
            fraction[r] = static_cast<double>(busy) / static_cast<double>(horizon - b);
        },
        threads);
    return {p, mean_estimate(fraction), horizon, b, replications};
}

LossEstimate estimate_loss_probability(const CyclicSpace& space, int p, std::size_t horizon,
                                       std::optional<std::size_t> burn_in) {
    require_p(p, "estimate_loss_probability");
    const std::size_t b = resolve_burn_in(horizon, burn_in);
    Profile<Rational> u = zero_profile<Rational>(p);
    std::size_t busy = 0;
    for (std::size_t t = 0; t < horizon; ++t) {
        if (t >= b && u(0) > 0) ++busy;
        u = apply_loss(u, space.mark(static_cast<std::int64_t>(t)));
    }
    const double value = static_cast<double>(busy) / static_cast<double>(horizon - b);
    return {p, {value, 0.0, horizon - b}, horizon, b, 1};
}

SplittingComparison splitting_comparison(double loss, double mean_sigma, double mean_tau, int servers,
                                         int p) {
    SplittingComparison c;
    c.lhs = loss / mean_tau;
    c.rhs = mean_sigma > 0.0 ? (servers - p) / mean_sigma : std::numeric_limits<double>::infinity();
    c.holds = c.lhs < c.rhs;
    return c;
}

// ---------------------------------------------------------------------------

StabilityReport check_jpsw_conditions(const Model& model, int servers, int p, const McParams& params) {
    if (p < 1 || p > servers - 1) {
        throw std::invalid_argument("check_jpsw_conditions: need 1 <= p <= S-1, got S=" +
                                    std::to_string(servers) + ", p=" + std::to_string(p));
    }
    StabilityReport rep;
    rep.model = model_label(model);
    rep.servers = servers;
    rep.p = p;
    rep.jsw = check_jsw_condition(model, servers);
    rep.mean_sigma = rep.jsw.mean_sigma;
    rep.mean_tau = rep.jsw.mean_tau;
    rep.horizon = params.horizon;
    rep.seed = params.seed;

    bool tau_unbounded = false;
    std::string tau_detail;
    if (const auto* space = std::get_if<CyclicSpace>(&model)) {
        rep.exact = true;
        rep.pz = exact_pz_positive(*space, p);
        rep.loss = estimate_loss_probability(*space, p, params.horizon, params.burn_in);
        rep.replications = space->size();
        // exact comparison: E sigma * hits / K  vs  (S - p) E tau
        const Rational pz(static_cast<long>(space->size() - rep.pz.zero_count), static_cast<long>(space->size()));
        const Rational lhs = space->mean_sigma() * pz;
        const Rational rhs = Rational(servers - p) * space->mean_tau();
        rep.jpsw_lhs = to_double(lhs);
        rep.jpsw_rhs = to_double(rhs);
        rep.jpsw_margin = to_double(rhs - lhs);
        rep.jpsw_condition = lhs < rhs;
        tau_detail = "cyclic space: tau takes finitely many values";
    } else {
        const auto& gigi = std::get<GiGiModel>(model);
        rep.pz = estimate_pz_positive(gigi, p, params.replications, params.truncation, params.seed, params.threads);
        rep.loss = estimate_loss_probability(gigi, p, params.horizon, params.burn_in, derive_seed(params.seed, 1),
                                             params.loss_replications, params.threads);
        rep.replications = params.replications;
        rep.jpsw_lhs = rep.mean_sigma * rep.pz.positive.value;
        rep.jpsw_rhs = (servers - p) * rep.mean_tau;
        rep.jpsw_margin = rep.jpsw_rhs - rep.jpsw_lhs;
        rep.jpsw_condition = rep.jpsw_lhs < rep.jpsw_rhs;
        tau_unbounded = has_unbounded_support(gigi.tau());
        tau_detail = "tau ~ " + describe(gigi.tau());
    }
    rep.p_z_zero_positive = rep.pz.zero_count > 0;

    rep.splitting = splitting_comparison(rep.loss.probability.value, rep.mean_sigma, rep.mean_tau, servers, p);
    if (rep.splitting.holds) {
        rep.splitting_ok = true;
        rep.splitting_basis = "direct";
    } else if (rep.jpsw_condition && rep.jpsw_margin > 0.0 &&
               rep.loss.probability.value <=
                   rep.pz.positive.value + rep.pz.positive.half_width + rep.loss.probability.half_width) {
        rep.splitting_ok = true;
        rep.splitting_basis = "implied";
    } else {
        rep.splitting_ok = false;
        rep.splitting_basis = "direct";
    }

    const std::size_t n = rep.exact ? rep.replications : params.replications;
    rep.hypotheses = {
        {"E[sigma] P(Z_p>0) < (S-p) E[tau]", rep.jpsw_condition,
         "margin " + format_double(rep.jpsw_margin)},
        {"P(Z_p=0) > 0", rep.p_z_zero_positive,
         std::to_string(rep.pz.zero_count) + " of " + std::to_string(n) + (rep.exact ? " samples" : " replications") +
             " with Z_p = 0"},
        {"tau has unbounded support", tau_unbounded, tau_detail},
        {"Z_p truncation certified", rep.pz.valid,
         std::to_string(rep.pz.truncation_failures) + " tail-check failures"},
    };
    return rep;
}

std::string format_table(const StabilityReport& r) {
    std::ostringstream out;
    auto row = [&](const std::string& name, double lhs, const char* rel, double rhs, bool verdict) {
        out << "  " << name;
        for (std::size_t i = name.size(); i < 36; ++i) out << ' ';
        out << format_double(lhs) << ' ' << rel << ' ' << format_double(rhs) << "  -> "
            << (verdict ? "holds" : "fails") << '\n';
    };
    out << "model " << r.model << "  S=" << r.servers << " p=" << r.p << (r.exact ? "  (exact)" : "") << '\n';
    out << "  P(Z_p>0) = " << format_double(r.pz.positive.value) << " +/- "
        << format_double(r.pz.positive.half_width) << "  (n=" << r.pz.positive.samples << ")\n";
    out << "  P(U^p>0) = " << format_double(r.loss.probability.value) << " +/- "
        << format_double(r.loss.probability.half_width) << '\n';
    row("E[sigma] < S E[tau]", r.mean_sigma, "<", r.servers * r.mean_tau, r.jsw.holds);
    row("E[sigma] P(Z_p>0) < (S-p) E[tau]", r.jpsw_lhs, "<", r.jpsw_rhs, r.jpsw_condition);
    row("loss/E[tau] < (S-p)/E[sigma]", r.splitting.lhs, "<", r.splitting.rhs, r.splitting.holds);
    out << "  splitting_ok = " << (r.splitting_ok ? "true" : "false") << " (" << r.splitting_basis << ")\n";
    out << "hypotheses\n";
    for (const auto& h : r.hypotheses) {
        out << "  [" << (h.holds ? "x" : " ") << "] " << h.name << "  " << h.detail << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> doubling_grid(std::size_t first, std::size_t last) {
    if (first == 0 || last < first) throw std::invalid_argument("doubling_grid: need 0 < first <= last");
    std::vector<std::size_t> grid;
    for (std::size_t h = first; h <= last; h *= 2) grid.push_back(h);
    return grid;
}

namespace {

double quantile99(std::vector<double>& xs) {
    const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(xs.size())));
    const auto nth = xs.begin() + static_cast<std::ptrdiff_t>(std::max<std::size_t>(rank, 1) - 1);
    std::nth_element(xs.begin(), nth, xs.end());
    return *nth;
}

std::string tightness_verdict(const std::vector<double>& q, double threshold) {
    const std::size_t n = q.size();
    if (n < 2) return "inconclusive";
    const double prev = q[n - 2];
    const double last = q[n - 1];
    const double change = prev == last ? 0.0 : std::abs(last - prev) / std::abs(prev);
    if (change < threshold) return "tight";
    if (n >= 3 && q[n - 3] < prev && prev < last) return "growing";
    return "inconclusive";
}

}  // namespace

TightnessDiagnostic tightness_probe(const Policy& policy, const Model& model,
                                    const std::vector<std::size_t>& horizon_grid, std::uint64_t seed,
                                    double threshold) {
    if (horizon_grid.empty()) throw std::invalid_argument("tightness_probe: empty horizon grid");
    for (std::size_t i = 0; i < horizon_grid.size(); ++i) {
        if (horizon_grid[i] == 0 || (i > 0 && horizon_grid[i] <= horizon_grid[i - 1])) {
            throw std::invalid_argument("tightness_probe: horizon grid must be positive and strictly increasing");
        }
    }
    std::function<Mark<double>(std::size_t)> next;
    std::optional<MarkSource> source;
    if (const auto* space = std::get_if<CyclicSpace>(&model)) {
        next = [space](std::size_t t) { return mark_cast<double>(space->mark(static_cast<std::int64_t>(t))); };
    } else {
        source.emplace(std::get<GiGiModel>(model), seed);
        next = [&source](std::size_t) { return source->next(); };
    }

    TightnessDiagnostic diag{policy, horizon_grid, {}, threshold, ""};
    std::vector<std::vector<double>> window(horizon_grid.size());
    Profile<double> u = zero_profile<double>(policy.dimension());
    std::size_t done = 0;
    for (std::size_t t = 1; t <= horizon_grid.back(); ++t) {
        u = apply(policy, u, next(t - 1));
        const double w = total(u);
        for (std::size_t i = done; i < horizon_grid.size() && horizon_grid[i] / 2 < t; ++i) {
            if (t <= horizon_grid[i]) window[i].push_back(w);
        }
        while (done < horizon_grid.size() && horizon_grid[done] == t) {
            diag.quantile_track.push_back(quantile99(window[done]));
            std::vector<double>().swap(window[done]);
            ++done;
        }
    }
    diag.verdict = tightness_verdict(diag.quantile_track, threshold);
    return diag;
}

}  // namespace parq
