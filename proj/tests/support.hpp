#pragma once

// Shared generators and independent oracles for the unit and acceptance suites.

#include <algorithm>
#include <initializer_list>
#include <random>
#include <vector>

#include "parq/loynes.hpp"

namespace parq::testing {

inline Profile<double> prof(std::initializer_list<double> xs) {
    Profile<double> u(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) u(i++) = x;
    return u;
}

inline Profile<Rational> qprof(std::initializer_list<Rational> xs) {
    Profile<Rational> u(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (const auto& x : xs) u(i++) = x;
    return u;
}

inline Mark<double> mark(double sigma, double tau) { return {sigma, tau}; }

/// Values on the grid k/64, k in [0, 64*span]. Grid arithmetic is exact in
/// double, so identities can be checked with zero tolerance, and ties and
/// exact zeros come up often enough to exercise every branch.
class GridGen {
  public:
    explicit GridGen(std::uint64_t seed, int span = 8) : rng_(seed), span_(span) {}

    double value() {
        // a third of the draws land on 0 to hit the empty-server branches
        if (std::uniform_int_distribution<int>(0, 2)(rng_) == 0) return 0.0;
        return std::uniform_int_distribution<int>(0, 64 * span_)(rng_) / 64.0;
    }
    double positive() { return std::uniform_int_distribution<int>(1, 64 * span_)(rng_) / 64.0; }

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    Profile<double> ordered(Eigen::Index dim) {
        Profile<double> u(dim);
        for (Eigen::Index i = 0; i < dim; ++i) u(i) = value();
        std::sort(u.begin(), u.end());
        return u;
    }

    /// v with u ≺ v, both ordered: v is u plus nonnegative increments pushed
    /// up so that the order is kept.
    Profile<double> dominating(const Profile<double>& u) {
        Profile<double> v(u.size());
        double floor = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double bump = integer(0, 3) == 0 ? 0.0 : positive() / 4.0;
            v(i) = std::max(u(i) + bump, floor);
            floor = v(i);
        }
        return v;
    }

    Mark<double> mark() { return {value(), positive()}; }

    std::mt19937_64& rng() { return rng_; }

  private:
    std::mt19937_64 rng_;
    int span_;
};

/// Explicit-server oracle for JSW / J_{p+1}SW / loss: servers keep their
/// identity in an unsorted vector, the customer is routed by the policy rule,
/// and only the final answer is sorted.
inline Profile<double> routed_servers_oracle(std::vector<double> servers, Mark<double> m, int p,
                                             bool loss) {
    std::vector<std::size_t> order(servers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return servers[a] < servers[b]; });
    auto free_server = std::find(servers.begin(), servers.end(), 0.0);
    if (free_server != servers.end()) {
        *free_server += m.sigma;
    } else if (!loss) {
        servers[order[static_cast<std::size_t>(p)]] += m.sigma;
    }
    Profile<double> out(static_cast<Eigen::Index>(servers.size()));
    for (std::size_t i = 0; i < servers.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = std::max(servers[i] - m.tau, 0.0);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Z_l by a literal double loop over lags, independent of compute_zvector.
template <typename Scalar>
Scalar brute_force_z(const MarkedPath<Scalar>& path, int ell, std::size_t k_max,
                     std::int64_t at_time = 0) {
    Scalar best(0);
    for (std::size_t k = static_cast<std::size_t>(ell); k <= k_max; ++k) {
        Scalar tau_sum(0);
        for (std::size_t i = 1; i <= k; ++i) tau_sum = tau_sum + path.at(at_time - static_cast<std::int64_t>(i)).tau;
        const Scalar term = path.at(at_time - static_cast<std::int64_t>(k)).sigma - tau_sum;
        if (best < term) best = term;
    }
    return best;
}

}  // namespace parq::testing
