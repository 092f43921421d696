#pragma once

// Driving maps of the workload recursions.
//
// Each map takes an ordered profile and one mark and returns a fresh ordered
// profile. Indices below are 0-based; "coordinate p+1" in the usual 1-based
// notation is u(p) here.
//
// The maps are templates over the scalar and touch it only through +, -,
// comparisons, vmax/vmin/pos. The empty-server test is exact equality with 0.

#include <stdexcept>
#include <string>

#include "parq/probability_space.hpp"
#include "parq/profile.hpp"

namespace parq {

namespace detail {

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* map) {
    if (got != want) {
        throw std::invalid_argument(std::string(map) + ": expected dimension " + std::to_string(want) +
                                    ", got " + std::to_string(got));
    }
}

inline void require_nonempty(Eigen::Index got, const char* map) {
    if (got < 1) throw std::invalid_argument(std::string(map) + ": empty profile");
}

}  // namespace detail

/// Join the shortest workload (Kiefer-Wolfowitz): sorted([u + sigma e_1 - tau]^+).
template <typename Scalar>
Profile<Scalar> apply_jsw(const Profile<Scalar>& u, const Mark<Scalar>& m) {
    detail::require_nonempty(u.size(), "apply_jsw");
    Profile<Scalar> v(u.size());
    v(0) = pos(Scalar(u(0) + m.sigma) - m.tau);
    for (Eigen::Index i = 1; i < u.size(); ++i) v(i) = pos(Scalar(u(i) - m.tau));
    sort_ascending(v);
    return v;
}

/// Join a free server if any, otherwise the (p+1)-th shortest workload.
/// p = 0 is JSW.
template <typename Scalar>
Profile<Scalar> apply_jpsw(const Profile<Scalar>& u, const Mark<Scalar>& m, Eigen::Index p) {
    detail::require_nonempty(u.size(), "apply_jpsw");
    if (p < 0 || p >= u.size()) {
        throw std::invalid_argument("apply_jpsw: p must lie in [0, S-1], got " + std::to_string(p));
    }
    if (u(0) == Scalar(0)) return apply_jsw(u, m);
    Profile<Scalar> v(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        v(i) = i == p ? pos(Scalar(u(i) + m.sigma) - m.tau) : pos(Scalar(u(i) - m.tau));
    }
    sort_ascending(v);
    return v;
}

/// Loss system with p servers: the customer is admitted only if a server is
/// empty; otherwise it is lost and the workloads just drain.
template <typename Scalar>
Profile<Scalar> apply_loss(const Profile<Scalar>& u, const Mark<Scalar>& m) {
    detail::require_nonempty(u.size(), "apply_loss");
    Profile<Scalar> v(u.size());
    const bool admit = u(0) == Scalar(0);
    v(0) = admit ? pos(Scalar(u(0) + m.sigma) - m.tau) : pos(Scalar(u(0) - m.tau));
    for (Eigen::Index i = 1; i < u.size(); ++i) v(i) = pos(Scalar(u(i) - m.tau));
    sort_ascending(v);
    return v;
}

/// The loss map written coordinatewise, without a sort:
///   v(i) = [((u(i) v sigma 1{u(1)=0}) ^ u(i+1)) - tau]^+,  v(p) = [(u(p) v sigma 1{u(1)=0}) - tau]^+.
template <typename Scalar>
Profile<Scalar> apply_loss_coordinatewise(const Profile<Scalar>& u, const Mark<Scalar>& m) {
    detail::require_nonempty(u.size(), "apply_loss_coordinatewise");
    const Eigen::Index q = u.size();
    const Scalar admitted = u(0) == Scalar(0) ? m.sigma : Scalar(0);
    Profile<Scalar> v(q);
    for (Eigen::Index i = 0; i + 1 < q; ++i) {
        v(i) = pos(Scalar(vmin(vmax(u(i), admitted), u(i + 1)) - m.tau));
    }
    v(q - 1) = pos(Scalar(vmax(u(q - 1), admitted) - m.tau));
    return v;
}

/// Gamma^p: v(j) = [u(j+1) - tau]^+ for j < p, v(p) = [(u(p) v sigma) - tau]^+.
template <typename Scalar>
Profile<Scalar> apply_gamma(const Profile<Scalar>& u, const Mark<Scalar>& m) {
    detail::require_nonempty(u.size(), "apply_gamma");
    const Eigen::Index q = u.size();
    Profile<Scalar> v(q);
    for (Eigen::Index j = 0; j + 1 < q; ++j) v(j) = pos(Scalar(u(j + 1) - m.tau));
    v(q - 1) = pos(Scalar(vmax(u(q - 1), m.sigma) - m.tau));
    return v;
}

/// Psi^p: v(j) = [((u(j) v sigma) ^ u(j+1)) - tau]^+ for j < p, v(p) = [(u(p) v sigma) - tau]^+.
template <typename Scalar>
Profile<Scalar> apply_psi(const Profile<Scalar>& u, const Mark<Scalar>& m) {
    detail::require_nonempty(u.size(), "apply_psi");
    const Eigen::Index q = u.size();
    Profile<Scalar> v(q);
    for (Eigen::Index j = 0; j + 1 < q; ++j) {
        v(j) = pos(Scalar(vmin(vmax(u(j), m.sigma), u(j + 1)) - m.tau));
    }
    v(q - 1) = pos(Scalar(vmax(u(q - 1), m.sigma) - m.tau));
    return v;
}

/// Phi^p on S coordinates, 1 <= p <= S-1. The first p coordinates follow Psi;
/// above p the service time is augmented by u(p+1) when no server is empty.
template <typename Scalar>
Profile<Scalar> apply_phi(const Profile<Scalar>& u, const Mark<Scalar>& m, Eigen::Index p) {
    const Eigen::Index s = u.size();
    if (p < 1 || p > s - 1) {
        throw std::invalid_argument("apply_phi: p must lie in [1, S-1], got p=" + std::to_string(p) +
                                    " with S=" + std::to_string(s));
    }
    const Scalar augmented = u(0) == Scalar(0) ? m.sigma : Scalar(m.sigma + u(p));
    Profile<Scalar> v(s);
    for (Eigen::Index j = 0; j < p; ++j) {
        v(j) = pos(Scalar(vmin(vmax(u(j), m.sigma), u(j + 1)) - m.tau));
    }
    for (Eigen::Index j = p; j + 1 < s; ++j) {
        v(j) = pos(Scalar(vmin(vmax(u(j), augmented), u(j + 1)) - m.tau));
    }
    v(s - 1) = pos(Scalar(vmax(u(s - 1), augmented) - m.tau));
    return v;
}

// ---------------------------------------------------------------------------
// Policy tags

struct Policy {
    enum class Kind { jsw, jpsw, loss, gamma, psi, phi };

    Kind kind = Kind::jsw;
    int servers = 1;  // S for jsw/jpsw/phi; equals p for loss/gamma/psi
    int p = 0;

    static Policy jsw(int s);
    static Policy jpsw(int s, int p);
    static Policy loss(int p);
    static Policy gamma(int p);
    static Policy psi(int p);
    static Policy phi(int s, int p);

    /// Parses "jsw:S", "jpsw:S:p", "loss:p", "gamma:p", "psi:p", "phi:S:p".
    static Policy parse(const std::string& text);

    int dimension() const { return servers; }
    /// ≺-nondecreasing maps, for which the Loynes scheme applies.
    bool is_monotone() const;
    std::string to_string() const;

    friend bool operator==(const Policy&, const Policy&) = default;
};

/// Dispatches on the policy after checking the profile dimension.
template <typename Scalar>
Profile<Scalar> apply(const Policy& policy, const Profile<Scalar>& u, const Mark<Scalar>& m) {
    detail::require_dim(u.size(), policy.dimension(), policy.to_string().c_str());
    switch (policy.kind) {
        case Policy::Kind::jsw: return apply_jsw(u, m);
        case Policy::Kind::jpsw: return apply_jpsw(u, m, policy.p);
        case Policy::Kind::loss: return apply_loss(u, m);
        case Policy::Kind::gamma: return apply_gamma(u, m);
        case Policy::Kind::psi: return apply_psi(u, m);
        case Policy::Kind::phi: return apply_phi(u, m, policy.p);
    }
    throw std::logic_error("unknown policy kind");
}

}  // namespace parq
