#pragma once

// Stability conditions: exact checks on cyclic spaces, Monte Carlo estimates
// on GI/GI models, and a tightness probe for forward trajectories.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parq/loynes.hpp"

namespace parq {

/// Point estimate with a 95% normal-approximation half-width.
struct Estimate {
    double value = 0.0;
    double half_width = 0.0;
    std::size_t samples = 0;
};

Estimate proportion_estimate(std::size_t hits, std::size_t samples);
/// Mean of per-replication values; half-width from their sample deviation.
Estimate mean_estimate(const std::vector<double>& values);

// ---------------------------------------------------------------------------
// JSW condition  E sigma < S E tau

struct JswCheck {
    int servers = 0;
    double mean_sigma = 0.0;
    double mean_tau = 0.0;
    bool holds = false;
    /// S E tau - E sigma
    double margin = 0.0;
    /// Set on cyclic spaces, where the means are exact.
    std::optional<Rational> exact_margin;
};

JswCheck check_jsw_condition(const CyclicSpace& space, int servers);
JswCheck check_jsw_condition(const GiGiModel& model, int servers);
JswCheck check_jsw_condition(const Model& model, int servers);

// ---------------------------------------------------------------------------
// P(Z_p > 0)

/// Seed of the path used by replication r.
inline std::uint64_t replication_seed(std::uint64_t seed, std::size_t r) {
    return derive_seed(seed, 0x5eed0000ULL + r);
}

/// Truncation grows by doubling up to this factor before a replication counts
/// as a truncation failure.
inline constexpr std::size_t kMaxTruncationGrowth = 16;

struct PzEstimate {
    int p = 0;
    Estimate positive;
    /// Replications with Z_p == 0.
    std::size_t zero_count = 0;
    std::size_t truncation = 0;
    std::size_t truncation_failures = 0;
    /// False when more than 1% of replications failed the tail check.
    bool valid = true;
};

PzEstimate estimate_pz_positive(const GiGiModel& model, int p, std::size_t replications,
                                std::size_t truncation, std::uint64_t seed, unsigned threads = 0);
/// Exact: the fraction of the K samples where Z_p > 0, windows grown until
/// the tail bound certifies the supremum.
PzEstimate exact_pz_positive(const CyclicSpace& space, int p);

// ---------------------------------------------------------------------------
// Loss probability and the splitting comparison

struct LossEstimate {
    int p = 0;
    /// Fraction of arrival epochs that find all p servers busy.
    Estimate probability;
    std::size_t horizon = 0;
    std::size_t burn_in = 0;
    std::size_t replications = 0;
};

/// Burn-in defaults to 10% of the horizon. Replications are independent
/// runs, and the half-width comes from their spread.
LossEstimate estimate_loss_probability(const GiGiModel& model, int p, std::size_t horizon,
                                       std::optional<std::size_t> burn_in, std::uint64_t seed,
                                       std::size_t replications = 8, unsigned threads = 0);
/// Deterministic run over the unrolled space from sample 0.
LossEstimate estimate_loss_probability(const CyclicSpace& space, int p, std::size_t horizon,
                                       std::optional<std::size_t> burn_in);

/// loss / E tau  vs  (S - p) / E sigma.
struct SplittingComparison {
    double lhs = 0.0;
    /// +infinity when E sigma = 0.
    double rhs = 0.0;
    bool holds = false;
};

SplittingComparison splitting_comparison(double loss, double mean_sigma, double mean_tau, int servers,
                                         int p);

// ---------------------------------------------------------------------------
// Full report for J_{p+1}SW

struct HypothesisCheck {
    std::string name;
    bool holds = false;
    std::string detail;
};

struct McParams {
    std::size_t replications = 10000;
    std::size_t truncation = 1000;
    std::size_t horizon = 100000;
    std::optional<std::size_t> burn_in;
    std::size_t loss_replications = 8;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct StabilityReport {
    std::string model;
    double mean_sigma = 0.0;
    double mean_tau = 0.0;
    int servers = 0;
    int p = 0;
    bool exact = false;

    PzEstimate pz;
    /// Evidence that P(Z_p = 0) > 0: at least one replication had Z_p == 0.
    bool p_z_zero_positive = false;

    JswCheck jsw;

    /// E sigma P(Z_p > 0)  vs  (S - p) E tau
    double jpsw_lhs = 0.0;
    double jpsw_rhs = 0.0;
    double jpsw_margin = 0.0;
    bool jpsw_condition = false;

    LossEstimate loss;
    SplittingComparison splitting;
    bool splitting_ok = false;
    /// "direct" or "implied" (by the J_{p+1}SW condition and loss <= P(Z_p > 0)).
    std::string splitting_basis;

    std::vector<HypothesisCheck> hypotheses;

    std::size_t replications = 0;
    std::size_t horizon = 0;
    std::uint64_t seed = 0;
};

StabilityReport check_jpsw_conditions(const Model& model, int servers, int p, const McParams& params);

/// Fixed-width table: each inequality with both sides and the verdict.
std::string format_table(const StabilityReport& report);

// ---------------------------------------------------------------------------
// Tightness

struct TightnessDiagnostic {
    Policy policy;
    std::vector<std::size_t> horizon_grid;
    /// 99th percentile of total workload over steps (h/2, h] for each h.
    std::vector<double> quantile_track;
    double threshold = 0.05;
    std::string verdict;  // tight | growing | inconclusive
};

std::vector<std::size_t> doubling_grid(std::size_t first, std::size_t last);

/// Forward simulation from the zero profile; profiles are not stored.
TightnessDiagnostic tightness_probe(const Policy& policy, const Model& model,
                                    const std::vector<std::size_t>& horizon_grid, std::uint64_t seed,
                                    double threshold = 0.05);

}  // namespace parq
