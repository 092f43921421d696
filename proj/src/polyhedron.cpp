#include "parq/polyhedron.hpp"

#include <sstream>
#include <stdexcept>

namespace parq {

namespace {

Rational dot(const QVector& c, const QVector& x) {
    Rational s(0);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (c(i) != 0) s += c(i) * x(i);
    }
    return s;
}

bool is_zero(const QVector& c) {
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (c(i) != 0) return false;
    }
    return true;
}

bool same_vector(const QVector& a, const QVector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) != b(i)) return false;
    }
    return true;
}

// c·x + k <= 0, or < 0 when strict
struct Ineq {
    QVector c;
    Rational k;
    bool strict = false;
};

bool constant_ok(const Rational& k, bool strict) { return strict ? k < 0 : k <= 0; }

/// Adds q to sys, scaled so its first nonzero coefficient has magnitude 1 and
/// merged with any parallel constraint. Returns false if q alone is infeasible.
bool insert(std::vector<Ineq>& sys, Ineq q) {
    if (is_zero(q.c)) return constant_ok(q.k, q.strict);
    for (Eigen::Index i = 0; i < q.c.size(); ++i) {
        if (q.c(i) != 0) {
            const Rational s = abs(q.c(i));
            if (s != 1) {
                q.c /= s;
                q.k /= s;
            }
            break;
        }
    }
    for (auto& r : sys) {
        if (same_vector(r.c, q.c)) {
            // c·x <= -k: the larger k is the tighter bound
            if (q.k > r.k || (q.k == r.k && q.strict)) {
                r.k = q.k;
                r.strict = q.strict;
            }
            return true;
        }
    }
    sys.push_back(std::move(q));
    return true;
}

bool eliminate(const std::vector<Ineq>& sys, Eigen::Index v, std::vector<Ineq>& out) {
    out.clear();
    std::vector<const Ineq*> upper, lower;
    for (const auto& q : sys) {
        if (q.c(v) == 0) {
            if (!insert(out, q)) return false;
        } else if (q.c(v) > 0) {
            upper.push_back(&q);
        } else {
            lower.push_back(&q);
        }
    }
    for (const Ineq* a : upper) {
        for (const Ineq* b : lower) {
            const Rational wa = -b->c(v);
            const Rational wb = a->c(v);
            Ineq combo{a->c * wa + b->c * wb, a->k * wa + b->k * wb, a->strict || b->strict};
            combo.c(v) = 0;
            if (!insert(out, std::move(combo))) return false;
        }
    }
    return true;
}

struct Substitution {
    Eigen::Index var;
    QVector c;  // x_var = c·x + k, with c(var) = 0
    Rational k;
};

}  // namespace

const char* to_string(Relation r) {
    switch (r) {
        case Relation::le: return "<=";
        case Relation::lt: return "<";
        case Relation::eq: return "=";
    }
    return "?";
}

Relation parse_relation(const std::string& text) {
    if (text == "<=") return Relation::le;
    if (text == "<") return Relation::lt;
    if (text == "=") return Relation::eq;
    throw std::invalid_argument("unknown relation '" + text + "'");
}

bool LinearConstraint::satisfied_by(const QVector& x) const {
    const Rational v = dot(coef, x) + constant;
    switch (rel) {
        case Relation::le: return v <= 0;
        case Relation::lt: return v < 0;
        case Relation::eq: return v == 0;
    }
    return false;
}

std::string format_constraint(const LinearConstraint& c) {
    std::ostringstream out;
    bool first = true;
    for (Eigen::Index i = 0; i < c.coef.size(); ++i) {
        if (c.coef(i) == 0) continue;
        const Rational a = c.coef(i);
        out << (first ? (a < 0 ? "-" : "") : (a < 0 ? " - " : " + "));
        if (abs(a) != 1) out << abs(a) << "*";
        out << "u" << (i + 1);
        first = false;
    }
    if (c.constant != 0 || first) {
        out << (first ? (c.constant < 0 ? "-" : "") : (c.constant < 0 ? " - " : " + ")) << abs(c.constant);
    }
    out << ' ' << to_string(c.rel) << " 0";
    return out.str();
}

void Polyhedron::add(LinearConstraint c) {
    if (c.coef.size() != dim_) throw std::invalid_argument("Polyhedron::add: dimension mismatch");
    constraints_.push_back(std::move(c));
}

bool Polyhedron::contains(const QVector& x) const {
    if (x.size() != dim_) throw std::invalid_argument("Polyhedron::contains: dimension mismatch");
    for (const auto& c : constraints_) {
        if (!c.satisfied_by(x)) return false;
    }
    return true;
}

std::optional<QVector> Polyhedron::witness() const {
    std::vector<LinearConstraint> eqs;
    std::vector<Ineq> ineqs;
    for (const auto& c : constraints_) {
        if (c.rel == Relation::eq) eqs.push_back(c);
        else ineqs.push_back({c.coef, c.constant, c.rel == Relation::lt});
    }

    // Gaussian substitution of the equalities
    std::vector<Substitution> subs;
    std::vector<bool> substituted(static_cast<std::size_t>(dim_), false);
    for (std::size_t e = 0; e < eqs.size(); ++e) {
        const auto& eq = eqs[e];
        Eigen::Index var = -1;
        for (Eigen::Index i = 0; i < dim_ && var < 0; ++i) {
            if (eq.coef(i) != 0) var = i;
        }
        if (var < 0) {
            if (eq.constant != 0) return std::nullopt;
            continue;
        }
        Substitution s{var, -eq.coef / eq.coef(var), -eq.constant / eq.coef(var)};
        s.c(var) = 0;
        auto apply_sub = [&](QVector& c, Rational& k) {
            const Rational a = c(var);
            if (a == 0) return;
            c += a * s.c;
            c(var) = 0;
            k += a * s.k;
        };
        for (std::size_t f = e + 1; f < eqs.size(); ++f) apply_sub(eqs[f].coef, eqs[f].constant);
        for (auto& q : ineqs) apply_sub(q.c, q.k);
        substituted[static_cast<std::size_t>(var)] = true;
        subs.push_back(std::move(s));
    }

    // Fourier-Motzkin over the remaining variables, keeping every level
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < dim_; ++i) {
        if (!substituted[static_cast<std::size_t>(i)]) order.push_back(i);
    }
    std::vector<std::vector<Ineq>> levels(1);
    for (auto& q : ineqs) {
        if (!insert(levels[0], std::move(q))) return std::nullopt;
    }
    for (Eigen::Index v : order) {
        std::vector<Ineq> next;
        if (!eliminate(levels.back(), v, next)) return std::nullopt;
        levels.push_back(std::move(next));
    }

    // back-substitution: each level bounds its variable given the later ones
    QVector x = QVector::Zero(dim_);
    for (std::size_t i = order.size(); i-- > 0;) {
        const Eigen::Index v = order[i];
        std::optional<Rational> lo, hi;
        bool lo_strict = false, hi_strict = false;
        for (const auto& q : levels[i]) {
            if (q.c(v) == 0) continue;
            Rational rest = q.k;
            for (std::size_t j = i + 1; j < order.size(); ++j) rest += q.c(order[j]) * x(order[j]);
            const Rational bound = -rest / q.c(v);
            if (q.c(v) > 0) {
                if (!hi || bound < *hi || (bound == *hi && q.strict)) {
                    hi = bound;
                    hi_strict = q.strict;
                }
            } else {
                if (!lo || bound > *lo || (bound == *lo && q.strict)) {
                    lo = bound;
                    lo_strict = q.strict;
                }
            }
        }
        Rational value(0);
        if (lo && hi) {
            if (*hi < *lo || (*hi == *lo && (lo_strict || hi_strict))) {
                throw std::logic_error("Polyhedron::witness: elimination left an empty interval");
            }
            value = (*lo + *hi) / 2;
        } else if (lo) {
            value = *lo + 1;
        } else if (hi) {
            value = *hi - 1;
        }
        x(v) = value;
    }
    for (std::size_t i = subs.size(); i-- > 0;) {
        const auto& s = subs[i];
        Rational v = s.k;
        for (Eigen::Index j = 0; j < dim_; ++j) {
            if (s.c(j) != 0) v += s.c(j) * x(j);
        }
        x(s.var) = v;
    }
    if (!contains(x)) throw std::logic_error("Polyhedron::witness: back-substitution produced an outside point");
    return x;
}

Polyhedron ordered_cone(Eigen::Index dim) {
    Polyhedron p(dim);
    p.add(-unit_vector(dim, 0), Rational(0), Relation::le);
    for (Eigen::Index i = 0; i + 1 < dim; ++i) {
        p.add(unit_vector(dim, i) - unit_vector(dim, i + 1), Rational(0), Relation::le);
    }
    return p;
}

QVector unit_vector(Eigen::Index dim, Eigen::Index i) {
    QVector e = QVector::Zero(dim);
    e(i) = 1;
    return e;
}

}  // namespace parq
