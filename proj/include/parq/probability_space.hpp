#pragma once

// Input models for the arrival/service marks.
//
// Two families are supported: finite cyclic spaces (K samples visited in
// order by the shift, uniform measure) and GI/GI models with independent
// i.i.d. service and inter-arrival streams.

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "parq/scalar.hpp"

namespace parq {

/// One customer: requested service time and time until the next arrival.
template <typename Scalar>
struct Mark {
    Scalar sigma;
    Scalar tau;
};

template <typename Scalar>
void validate_mark(const Mark<Scalar>& m, std::size_t index) {
    if (m.sigma < Scalar(0)) {
        throw std::invalid_argument("mark " + std::to_string(index) + ": sigma must be >= 0");
    }
    if (!(Scalar(0) < m.tau)) {
        throw std::invalid_argument("mark " + std::to_string(index) + ": tau must be > 0");
    }
}

template <typename To, typename From>
Mark<To> mark_cast(const Mark<From>& m) {
    return {scalar_cast<To>(m.sigma), scalar_cast<To>(m.tau)};
}

// ---------------------------------------------------------------------------
// Distribution descriptors

struct PointMass {
    double value;
};
struct Exponential {
    double rate;
};
struct Uniform {
    double low;
    double high;
};
struct Discrete {
    std::vector<double> values;
    std::vector<double> probs;
};

using Distribution = std::variant<PointMass, Exponential, Uniform, Discrete>;

double mean(const Distribution& d);
bool has_unbounded_support(const Distribution& d);
/// True when the law puts positive mass on 0.
bool has_atom_at_zero(const Distribution& d);
/// Throws std::invalid_argument on malformed parameters or negative support.
void validate_distribution(const Distribution& d, const char* role);
std::string describe(const Distribution& d);

// ---------------------------------------------------------------------------
// Random streams
//
// Generator: std::mt19937_64, seeded per substream. Substream seeds come from
// SplitMix64 applied along a derivation path (seed, replication, stream), so
// replications and the sigma/tau streams never share state and any one of
// them can be regenerated alone.

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Stream {
  public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}
    /// Uniform on the open interval (0, 1), 53 bits.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }
    double draw(const Distribution& d);

  private:
    std::mt19937_64 engine_;
};

inline constexpr std::uint64_t kSigmaStream = 0;
inline constexpr std::uint64_t kTauStream = 1;

// ---------------------------------------------------------------------------
// Models

class GiGiModel {
  public:
    /// Rejects invalid descriptors and any tau law with an atom at zero.
    GiGiModel(Distribution sigma, Distribution tau);

    const Distribution& sigma() const { return sigma_; }
    const Distribution& tau() const { return tau_; }
    double mean_sigma() const { return mean(sigma_); }
    double mean_tau() const { return mean(tau_); }

  private:
    Distribution sigma_;
    Distribution tau_;
};

class CyclicSpace {
  public:
    /// Throws on an empty list or an invalid mark (the message names the index).
    explicit CyclicSpace(std::vector<Mark<Rational>> marks);

    std::size_t size() const { return marks_.size(); }
    const std::vector<Mark<Rational>>& marks() const { return marks_; }
    /// Mark at sample index i, read modulo K with a nonnegative remainder.
    const Mark<Rational>& mark(std::int64_t i) const;
    Rational mean_sigma() const;
    Rational mean_tau() const;

  private:
    std::vector<Mark<Rational>> marks_;
};

using Model = std::variant<CyclicSpace, GiGiModel>;

CyclicSpace build_cyclic_space(std::vector<Mark<Rational>> marks);

/// sigma = (2.25, 1.5, 2), tau = (1, 1, 1): stable for JSW with two servers,
/// yet without any stationary profile under J2SW.
CyclicSpace counterexample_space();

inline std::int64_t cyclic_index(std::int64_t i, std::int64_t k) {
    const std::int64_t r = i % k;
    return r < 0 ? r + k : r;
}

// ---------------------------------------------------------------------------
// Paths

/// Marks indexed by time: marks[j] is the mark at time origin + j.
template <typename Scalar>
struct MarkedPath {
    std::vector<Mark<Scalar>> marks;
    std::int64_t origin = 0;
    std::optional<std::uint64_t> seed;

    std::size_t size() const { return marks.size(); }
    std::int64_t end_time() const { return origin + static_cast<std::int64_t>(marks.size()); }
    bool covers(std::int64_t first, std::int64_t last) const {
        return first >= origin && last < end_time();
    }
    const Mark<Scalar>& at(std::int64_t t) const {
        if (t < origin || t >= end_time()) {
            throw std::out_of_range("path has no mark at time " + std::to_string(t));
        }
        return marks[static_cast<std::size_t>(t - origin)];
    }
};

/// Streaming form of sample_path: the k-th call to next() returns the mark
/// sample_path(model, n, seed) holds at time k, for any n > k.
class MarkSource {
  public:
    MarkSource(const GiGiModel& model, std::uint64_t seed)
        : model_(model), sigma_(derive_seed(seed, kSigmaStream)), tau_(derive_seed(seed, kTauStream)) {}
    Mark<double> next() {
        const double s = sigma_.draw(model_.sigma());
        return {s, tau_.draw(model_.tau())};
    }

  private:
    GiGiModel model_;
    Stream sigma_;
    Stream tau_;
};

/// n i.i.d. marks at times 0..n-1.
MarkedPath<double> sample_path(const GiGiModel& model, std::size_t n, std::uint64_t seed);

/// n i.i.d. marks at times -n..-1. The k-th draw of each stream lands at
/// time -k, so a longer path from the same seed extends further into the
/// past without changing the marks already generated.
MarkedPath<double> sample_backward_path(const GiGiModel& model, std::size_t n, std::uint64_t seed);

/// marks[k] = space.mark(start + k); origin = start.
template <typename Scalar>
MarkedPath<Scalar> unroll(const CyclicSpace& space, std::int64_t start, std::size_t n) {
    if (n == 0) throw std::invalid_argument("unroll: n must be >= 1");
    MarkedPath<Scalar> path;
    path.origin = start;
    path.marks.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        path.marks.push_back(mark_cast<Scalar>(space.mark(start + static_cast<std::int64_t>(k))));
    }
    return path;
}

/// The past of sample `omega`: times -n..-1, the mark at -k being that of
/// theta^{-k} omega.
template <typename Scalar>
MarkedPath<Scalar> backward_path(const CyclicSpace& space, std::int64_t omega, std::size_t n) {
    MarkedPath<Scalar> path = unroll<Scalar>(space, omega - static_cast<std::int64_t>(n), n);
    path.origin = -static_cast<std::int64_t>(n);
    return path;
}

template <typename Scalar>
Scalar mean_sigma(const MarkedPath<Scalar>& path) {
    Scalar s(0);
    for (const auto& m : path.marks) s = s + m.sigma;
    return s / Scalar(static_cast<long>(path.size()));
}

}  // namespace parq
