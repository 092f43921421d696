#pragma once

// Exact polyhedra over the rationals in small dimension.
//
// A polyhedron is a conjunction of constraints  c·x + k  REL  0  with REL one
// of <=, <, =. Feasibility and witness points come from Gaussian substitution
// of the equalities followed by Fourier-Motzkin elimination with strictness
// tracking. The cost is exponential in the dimension, which is fine for the
// dimensions used here (<= 4).

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "parq/profile.hpp"

namespace parq {

using QVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using QMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

enum class Relation { le, lt, eq };

const char* to_string(Relation r);
Relation parse_relation(const std::string& text);

struct LinearConstraint {
    QVector coef;
    Rational constant;
    Relation rel = Relation::le;

    bool satisfied_by(const QVector& x) const;
};

std::string format_constraint(const LinearConstraint& c);

class Polyhedron {
  public:
    Polyhedron() = default;
    explicit Polyhedron(Eigen::Index dim) : dim_(dim) {}

    Eigen::Index dim() const { return dim_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }

    void add(LinearConstraint c);
    /// c·x + k REL 0
    void add(const QVector& coef, const Rational& constant, Relation rel) { add({coef, constant, rel}); }

    bool contains(const QVector& x) const;
    /// Some point satisfying every constraint, or nothing if the set is empty.
    std::optional<QVector> witness() const;
    bool feasible() const { return witness().has_value(); }

  private:
    Eigen::Index dim_ = 0;
    std::vector<LinearConstraint> constraints_;
};

/// u(0) >= 0 and u(i) <= u(i+1).
Polyhedron ordered_cone(Eigen::Index dim);

QVector unit_vector(Eigen::Index dim, Eigen::Index i);

}  // namespace parq
