#pragma once

// Service profiles: workload vectors sorted ascending, and the coordinatewise
// partial order between them.

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

#include "parq/scalar.hpp"

namespace parq {

template <typename Scalar>
using Profile = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
Profile<Scalar> zero_profile(Eigen::Index dim) {
    Profile<Scalar> u(dim);
    for (Eigen::Index i = 0; i < dim; ++i) u(i) = Scalar(0);
    return u;
}

/// Nonnegative and ascending.
template <typename Scalar>
bool is_ordered(const Profile<Scalar>& u) {
    if (u.size() == 0) return false;
    if (u(0) < Scalar(0)) return false;
    for (Eigen::Index i = 1; i < u.size(); ++i) {
        if (u(i) < u(i - 1)) return false;
    }
    return true;
}

template <typename Scalar>
void require_ordered(const Profile<Scalar>& u, const char* what) {
    if (!is_ordered(u)) {
        throw std::invalid_argument(std::string(what) +
                                    ": profile must be nonempty, nonnegative and ascending");
    }
}

/// u ≺ v: coordinatewise u(i) <= v(i). Dimensions must agree.
template <typename Scalar>
bool precedes(const Profile<Scalar>& u, const Profile<Scalar>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("precedes: dimension mismatch");
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (v(i) < u(i)) return false;
    }
    return true;
}

/// u[p]: the first p coordinates.
template <typename Scalar>
Profile<Scalar> restrict(const Profile<Scalar>& u, Eigen::Index p) {
    if (p < 1 || p > u.size()) {
        throw std::invalid_argument("restrict: p must lie in [1, " + std::to_string(u.size()) +
                                    "], got " + std::to_string(p));
    }
    return u.head(p);
}

/// Stable ascending insertion sort. Profiles are short and the maps disturb at
/// most one coordinate, so this is linear in practice; it also issues a fixed,
/// deterministic comparison sequence, which the symbolic scalar relies on.
template <typename Scalar>
void sort_ascending(Profile<Scalar>& v) {
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        for (Eigen::Index j = i; j > 0 && v(j) < v(j - 1); --j) {
            std::swap(v(j), v(j - 1));
        }
    }
}

template <typename Scalar>
Scalar total(const Profile<Scalar>& u) {
    Scalar s(0);
    for (Eigen::Index i = 0; i < u.size(); ++i) s = s + u(i);
    return s;
}

template <typename Scalar>
Scalar max_abs_difference(const Profile<Scalar>& u, const Profile<Scalar>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("max_abs_difference: dimension mismatch");
    Scalar m(0);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        Scalar d = u(i) < v(i) ? v(i) - u(i) : u(i) - v(i);
        m = vmax(m, d);
    }
    return m;
}

/// Coordinatewise maximum; of two ordered profiles it is again ordered.
template <typename Scalar>
Profile<Scalar> coordinatewise_max(const Profile<Scalar>& u, const Profile<Scalar>& v) {
    if (u.size() != v.size()) throw std::invalid_argument("coordinatewise_max: dimension mismatch");
    Profile<Scalar> w(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) w(i) = vmax(u(i), v(i));
    return w;
}

template <typename Scalar>
bool same_profile(const Profile<Scalar>& u, const Profile<Scalar>& v) {
    if (u.size() != v.size()) return false;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (!(u(i) == v(i))) return false;
    }
    return true;
}

template <typename To, typename From>
Profile<To> profile_cast(const Profile<From>& u) {
    Profile<To> v(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) v(i) = scalar_cast<To>(u(i));
    return v;
}

}  // namespace parq
