#pragma once

// Trajectories, backward (Loynes) schemes, the Z statistics and coalescence.
//
// Time convention: a MarkedPath maps integer times to marks. A "backward path"
// holds the marks at times -n..-1 as seen from time 0. Statistics evaluated
// "at time t" look at marks t-1, t-2, ... of the same path, so one long
// chronological path serves every index along it.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parq/maps.hpp"

namespace parq {

template <typename Scalar>
struct Trajectory {
    Policy policy;
    /// profiles[n] is the profile met by the customer arriving at time path.origin + n.
    std::vector<Profile<Scalar>> profiles;
    MarkedPath<Scalar> path;
};

template <typename Scalar>
Trajectory<Scalar> forward_simulate(const Policy& policy, const Profile<Scalar>& init,
                                    const MarkedPath<Scalar>& path) {
    detail::require_dim(init.size(), policy.dimension(), "forward_simulate");
    Trajectory<Scalar> traj{policy, {}, path};
    traj.profiles.reserve(path.size() + 1);
    traj.profiles.push_back(init);
    for (const auto& m : path.marks) traj.profiles.push_back(apply(policy, traj.profiles.back(), m));
    return traj;
}

// ---------------------------------------------------------------------------
// Loynes scheme

template <typename Scalar>
struct LoynesResult {
    Policy policy;
    std::vector<Profile<Scalar>> iterates;  // W_0 = 0, W_1, ...
    bool converged = false;
    std::optional<Profile<Scalar>> limit;
    std::size_t horizon_used = 0;
    /// Stopping rule: the max-norm increment stayed <= tolerance for
    /// stall_window consecutive steps.
    Scalar tolerance = Scalar(0);
    std::size_t stall_window = 1;
};

/// W_n is the zero profile pushed forward through the marks at times -n..-1,
/// which is the backward definition W_{n+1} = map∘θ^{-1}(W_n∘θ^{-1}) read
/// pathwise. Only ≺-monotone policies are accepted.
template <typename Scalar>
LoynesResult<Scalar> loynes_iterate(const Policy& policy, const MarkedPath<Scalar>& backward,
                                    std::size_t max_n, const Scalar& tolerance,
                                    std::size_t stall_window = 1) {
    if (!policy.is_monotone()) {
        throw std::invalid_argument("loynes_iterate: " + policy.to_string() +
                                    " is not ≺-nondecreasing, so Loynes's theorem does not apply");
    }
    if (tolerance < Scalar(0)) throw std::invalid_argument("loynes_iterate: tolerance must be >= 0");
    if (stall_window == 0) throw std::invalid_argument("loynes_iterate: stall_window must be >= 1");
    const auto n_max = static_cast<std::int64_t>(max_n);
    if (max_n == 0 || !backward.covers(-n_max, -1)) {
        throw std::invalid_argument("loynes_iterate: backward path must supply marks at times -" +
                                    std::to_string(max_n) + "..-1");
    }
    LoynesResult<Scalar> res{policy, {}, false, std::nullopt, 0, tolerance, stall_window};
    res.iterates.push_back(zero_profile<Scalar>(policy.dimension()));
    std::size_t stalled = 0;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        Profile<Scalar> w = zero_profile<Scalar>(policy.dimension());
        for (std::int64_t t = -n; t <= -1; ++t) w = apply(policy, w, backward.at(t));
        const Scalar increment = max_abs_difference(w, res.iterates.back());
        res.iterates.push_back(std::move(w));
        res.horizon_used = static_cast<std::size_t>(n);
        stalled = increment <= tolerance ? stalled + 1 : 0;
        if (stalled >= stall_window) {
            res.converged = true;
            res.limit = res.iterates.back();
            break;
        }
    }
    return res;
}

/// Exact Loynes scheme on a cyclic space, seen from sample `omega`.
/// K unchanged consecutive iterates certify the limit: W_{n+K} is the one-cycle
/// map applied to W_n, and monotonicity squeezes everything in between.
inline LoynesResult<Rational> loynes_iterate(const Policy& policy, const CyclicSpace& space,
                                             std::int64_t omega, std::size_t max_n) {
    return loynes_iterate<Rational>(policy, backward_path<Rational>(space, omega, max_n), max_n,
                                    Rational(0), space.size());
}

// ---------------------------------------------------------------------------
// Z statistics
//
// Z_l at time t = [ sup_{k >= l} (sigma_{t-k} - (tau_{t-1} + ... + tau_{t-k})) ]^+,
// truncated to k <= K. The tail bound treats the largest sigma seen in the
// window as a cap for the unseen ones; on cyclic windows of length >= K this
// cap is exact.

template <typename Scalar>
struct ZValue {
    Scalar value;
    bool tail_bound_ok = false;
    std::size_t truncation_k = 0;
};

template <typename Scalar>
struct ZVector {
    /// (Z_p, Z_{p-1}, ..., Z_1), ascending.
    Profile<Scalar> values;
    std::size_t truncation_k = 0;
    bool tail_bound_ok = false;
};

namespace detail {

template <typename Scalar>
void require_window(const MarkedPath<Scalar>& path, std::int64_t at_time, std::size_t k,
                    const char* what) {
    if (!path.covers(at_time - static_cast<std::int64_t>(k), at_time - 1)) {
        throw std::invalid_argument(std::string(what) + ": path lacks the " + std::to_string(k) +
                                    " marks before time " + std::to_string(at_time));
    }
}

}  // namespace detail

template <typename Scalar>
ZVector<Scalar> compute_zvector(const MarkedPath<Scalar>& path, Eigen::Index p,
                                std::size_t truncation_k, std::int64_t at_time = 0) {
    if (p < 1) throw std::invalid_argument("compute_zvector: p must be >= 1");
    if (truncation_k < static_cast<std::size_t>(p)) {
        throw std::invalid_argument("compute_zvector: truncation must be >= p");
    }
    detail::require_window(path, at_time, truncation_k, "compute_zvector");

    // terms[k-1] = sigma_{t-k} - cumulative tau over lags 1..k
    std::vector<Scalar> terms(truncation_k);
    Scalar cumulative(0);
    Scalar sigma_cap(0);
    for (std::size_t k = 1; k <= truncation_k; ++k) {
        const auto& m = path.at(at_time - static_cast<std::int64_t>(k));
        cumulative = cumulative + m.tau;
        terms[k - 1] = m.sigma - cumulative;
        sigma_cap = vmax(sigma_cap, m.sigma);
    }
    // suffix maxima: best[l-1] = max_{k >= l} terms[k-1]
    for (std::size_t k = truncation_k - 1; k-- > 0;) terms[k] = vmax(terms[k], terms[k + 1]);

    ZVector<Scalar> z;
    z.values.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) z.values(j) = pos(terms[static_cast<std::size_t>(p - 1 - j)]);
    z.truncation_k = truncation_k;
    z.tail_bound_ok = !(z.values(0) < Scalar(sigma_cap - cumulative));
    return z;
}

template <typename Scalar>
ZValue<Scalar> compute_z(const MarkedPath<Scalar>& path, Eigen::Index ell, std::size_t truncation_k,
                         std::int64_t at_time = 0) {
    if (ell < 1) throw std::invalid_argument("compute_z: ell must be >= 1");
    if (truncation_k < static_cast<std::size_t>(ell)) {
        throw std::invalid_argument("compute_z: truncation_k must be >= ell");
    }
    const ZVector<Scalar> z = compute_zvector(path, ell, truncation_k, at_time);
    return {z.values(0), z.tail_bound_ok, truncation_k};
}

// ---------------------------------------------------------------------------
// Stationarity on cyclic spaces

/// max_i |candidate[i+1 mod K] - map(candidate[i], mark_i)|; zero exactly when
/// the candidate is a K-periodic orbit, i.e. solves X∘θ = map(X) on the space.
template <typename Scalar>
Scalar stationarity_residual(const Policy& policy, const CyclicSpace& space,
                             const std::vector<Profile<Scalar>>& candidate) {
    if (candidate.size() != space.size()) {
        throw std::invalid_argument("stationarity_residual: need one profile per sample (" +
                                    std::to_string(space.size()) + "), got " +
                                    std::to_string(candidate.size()));
    }
    Scalar worst(0);
    for (std::size_t i = 0; i < candidate.size(); ++i) {
        const Profile<Scalar> image =
            apply(policy, candidate[i], mark_cast<Scalar>(space.marks()[i]));
        worst = vmax(worst, max_abs_difference(image, candidate[(i + 1) % candidate.size()]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Coalescence

/// The monotone recursion run alongside a policy to witness renovation:
/// Phi^p above J_{p+1}SW, Psi^p above the p-server loss system, the policy
/// itself when it is already monotone.
Policy dominating_policy(const Policy& policy);

template <typename Scalar>
struct CoalescenceReport {
    Policy policy;
    Policy dominating;
    std::vector<Profile<Scalar>> starts;
    std::size_t horizon = 0;
    /// First step at which all trajectories coincide; empty if none within horizon.
    std::optional<std::size_t> merge_step;
    /// False if trajectories ever separated after merging (never expected).
    bool stayed_merged = true;
    /// Steps n where the dominating profile D had D(1) = 0 and
    /// D(l) <= tau_n + ... + tau_{n+l-1} for l = 2..dim.
    std::vector<std::size_t> renovation_hits;
};

template <typename Scalar>
bool renovation_event(const Profile<Scalar>& dominating, const MarkedPath<Scalar>& path,
                      std::size_t step) {
    const auto d = static_cast<std::size_t>(dominating.size());
    if (d > 1 && step + d > path.size()) return false;  // needs tau_n .. tau_{n+d-1}
    if (!(dominating(0) == Scalar(0))) return false;
    if (d == 1) return true;
    Scalar staircase = path.marks[step].tau;
    for (std::size_t l = 2; l <= d; ++l) {
        staircase = staircase + path.marks[step + l - 1].tau;
        if (staircase < dominating(static_cast<Eigen::Index>(l - 1))) return false;
    }
    return true;
}

template <typename Scalar>
CoalescenceReport<Scalar> detect_coalescence(const Policy& policy,
                                             const std::vector<Profile<Scalar>>& starts,
                                             const MarkedPath<Scalar>& path) {
    if (starts.empty()) throw std::invalid_argument("detect_coalescence: no starting profiles");
    for (const auto& s : starts) detail::require_dim(s.size(), policy.dimension(), "detect_coalescence");

    CoalescenceReport<Scalar> rep;
    rep.policy = policy;
    rep.dominating = dominating_policy(policy);
    rep.starts = starts;
    rep.horizon = path.size();

    std::vector<Profile<Scalar>> state = starts;
    Profile<Scalar> dom = starts.front();
    for (const auto& s : starts) dom = coordinatewise_max(dom, s);

    auto all_equal = [&] {
        for (std::size_t i = 1; i < state.size(); ++i) {
            if (!same_profile(state[i], state[0])) return false;
        }
        return true;
    };
    for (std::size_t n = 0;; ++n) {
        const bool merged = all_equal();
        if (merged && !rep.merge_step) rep.merge_step = n;
        if (!merged && rep.merge_step) rep.stayed_merged = false;
        if (renovation_event(dom, path, n)) rep.renovation_hits.push_back(n);
        if (n == path.size()) break;
        for (auto& s : state) s = apply(policy, s, path.marks[n]);
        dom = apply(rep.dominating, dom, path.marks[n]);
    }
    return rep;
}

}  // namespace parq
