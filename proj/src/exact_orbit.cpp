#include "parq/exact_orbit.hpp"

#include <algorithm>
#include <stdexcept>

namespace parq {

// ---------------------------------------------------------------------------
// AffineExpr

AffineExpr AffineExpr::variable(Eigen::Index dim, Eigen::Index i, BranchExplorer* ctx) {
    AffineExpr e;
    e.coef_ = unit_vector(dim, i);
    e.ctx_ = ctx;
    return e;
}

bool AffineExpr::is_constant() const {
    for (Eigen::Index i = 0; i < coef_.size(); ++i) {
        if (coef_(i) != 0) return false;
    }
    return true;
}

QVector AffineExpr::coefficients(Eigen::Index dim) const {
    if (coef_.size() == 0) return QVector::Zero(dim);
    if (coef_.size() != dim) throw std::invalid_argument("AffineExpr: dimension mismatch");
    return coef_;
}

Rational AffineExpr::evaluate(const QVector& u) const {
    Rational v = constant_;
    for (Eigen::Index i = 0; i < coef_.size(); ++i) {
        if (coef_(i) != 0) v += coef_(i) * u(i);
    }
    return v;
}

AffineExpr operator+(const AffineExpr& a, const AffineExpr& b) {
    AffineExpr r;
    r.constant_ = a.constant_ + b.constant_;
    r.ctx_ = a.ctx_ ? a.ctx_ : b.ctx_;
    if (a.coef_.size() == 0) r.coef_ = b.coef_;
    else if (b.coef_.size() == 0) r.coef_ = a.coef_;
    else r.coef_ = a.coef_ + b.coef_;
    return r;
}

AffineExpr operator-(const AffineExpr& a) {
    AffineExpr r;
    r.constant_ = -a.constant_;
    r.ctx_ = a.ctx_;
    if (a.coef_.size() > 0) r.coef_ = -a.coef_;
    return r;
}

AffineExpr operator-(const AffineExpr& a, const AffineExpr& b) { return a + (-b); }

namespace {

bool compare(const AffineExpr& a, const AffineExpr& b, BranchExplorer::Test test, BranchExplorer* ctx) {
    const AffineExpr d = a - b;
    if (d.is_constant()) {
        switch (test) {
            case BranchExplorer::Test::lt: return d.constant() < 0;
            case BranchExplorer::Test::le: return d.constant() <= 0;
            case BranchExplorer::Test::eq: return d.constant() == 0;
        }
    }
    if (!ctx) throw std::logic_error("AffineExpr: symbolic comparison outside an explorer");
    return ctx->decide(d.coef(), d.constant(), test);
}

}  // namespace

bool operator<(const AffineExpr& a, const AffineExpr& b) {
    return compare(a, b, BranchExplorer::Test::lt, a.ctx_ ? a.ctx_ : b.ctx_);
}
bool operator<=(const AffineExpr& a, const AffineExpr& b) {
    return compare(a, b, BranchExplorer::Test::le, a.ctx_ ? a.ctx_ : b.ctx_);
}
bool operator==(const AffineExpr& a, const AffineExpr& b) {
    return compare(a, b, BranchExplorer::Test::eq, a.ctx_ ? a.ctx_ : b.ctx_);
}

// ---------------------------------------------------------------------------
// BranchExplorer

namespace {

// Outcomes of  f TEST 0. lt: {f < 0, f >= 0}; le: {f <= 0, f > 0}; eq: {f = 0, f < 0, f > 0}.
struct Outcome {
    bool negate;  // constraint is (-f) REL 0
    Relation rel;
    bool truth;
};

const std::vector<Outcome>& outcomes(BranchExplorer::Test t) {
    static const std::vector<Outcome> lt{{false, Relation::lt, true}, {true, Relation::le, false}};
    static const std::vector<Outcome> le{{false, Relation::le, true}, {true, Relation::lt, false}};
    static const std::vector<Outcome> eq{
        {false, Relation::eq, true}, {false, Relation::lt, false}, {true, Relation::lt, false}};
    switch (t) {
        case BranchExplorer::Test::lt: return lt;
        case BranchExplorer::Test::le: return le;
        case BranchExplorer::Test::eq: return eq;
    }
    return lt;
}

LinearConstraint outcome_constraint(const Outcome& o, const QVector& coef, const Rational& constant) {
    return o.negate ? LinearConstraint{-coef, -constant, o.rel} : LinearConstraint{coef, constant, o.rel};
}

}  // namespace

BranchExplorer::BranchExplorer(Polyhedron root, std::size_t pattern_cap)
    : root_(std::move(root)), current_(root_), cap_(pattern_cap) {}

void BranchExplorer::check_cap() const {
    if (leaves_ + pruned_ > cap_) {
        throw std::length_error("branch pattern cap exceeded: " + std::to_string(leaves_) + " pieces and " +
                                std::to_string(pruned_) + " pruned branches examined, cap " +
                                std::to_string(cap_));
    }
}

bool BranchExplorer::decide(const QVector& coef, const Rational& constant, Test test) {
    const auto& opts = outcomes(test);
    if (depth_ == trail_.size()) {
        Decision d;
        for (int i = 0; i < static_cast<int>(opts.size()); ++i) {
            Polyhedron trial = current_;
            trial.add(outcome_constraint(opts[static_cast<std::size_t>(i)], coef, constant));
            if (trial.feasible()) d.options.push_back(i);
            else ++pruned_;
        }
        check_cap();
        if (d.options.empty()) throw std::logic_error("BranchExplorer: no feasible outcome");
        trail_.push_back(std::move(d));
    }
    const Decision& d = trail_[depth_++];
    const Outcome& o = opts[static_cast<std::size_t>(d.options[d.chosen])];
    // a lone feasible outcome is implied by the constraints already present
    if (d.options.size() > 1) current_.add(outcome_constraint(o, coef, constant));
    return o.truth;
}

// ---------------------------------------------------------------------------
// Pieces

namespace {

void require_small(const Policy& policy, const OrbitOptions& options) {
    if (policy.dimension() > options.max_dim) {
        throw std::invalid_argument("exact orbit search: dimension " + std::to_string(policy.dimension()) +
                                    " exceeds the cap " + std::to_string(options.max_dim));
    }
}

std::string format_vector(const QVector& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_rational(v(i));
    return s + ")";
}

}  // namespace

PieceEnumeration enumerate_pieces(const Policy& policy, const CyclicSpace& space, const OrbitOptions& options) {
    require_small(policy, options);
    const Eigen::Index d = policy.dimension();
    BranchExplorer explorer(ordered_cone(d), options.pattern_cap);

    Profile<AffineExpr> input(d);
    for (Eigen::Index i = 0; i < d; ++i) input(i) = AffineExpr::variable(d, i, &explorer);
    std::vector<Mark<AffineExpr>> marks;
    for (const auto& m : space.marks()) marks.push_back(mark_cast<AffineExpr>(m));

    PieceEnumeration out;
    explorer.explore(
        [&] {
            Profile<AffineExpr> u = input;
            for (const auto& m : marks) u = apply(policy, u, m);
            return u;
        },
        [&](const Profile<AffineExpr>& image, const Polyhedron& domain) {
            AffinePiece piece{QMatrix(d, d), QVector(d), domain};
            for (Eigen::Index i = 0; i < d; ++i) {
                piece.A.row(i) = image(i).coefficients(d).transpose();
                piece.b(i) = image(i).constant();
            }
            out.pieces.push_back(std::move(piece));
        });
    out.pruned = explorer.pruned();
    out.pieces_examined = explorer.leaves() + explorer.pruned();
    return out;
}

QVector cycle_map(const Policy& policy, const CyclicSpace& space, const QVector& u) {
    QVector v = u;
    for (const auto& m : space.marks()) v = apply(policy, v, m);
    return v;
}

// ---------------------------------------------------------------------------
// Fixed points

const char* to_string(OrbitVerdict v) {
    switch (v) {
        case OrbitVerdict::none: return "none";
        case OrbitVerdict::unique: return "unique";
        case OrbitVerdict::multiple: return "multiple";
        case OrbitVerdict::subspace_family: return "subspace-family";
    }
    return "?";
}

OrbitVerdict parse_verdict(const std::string& text) {
    if (text == "none") return OrbitVerdict::none;
    if (text == "unique") return OrbitVerdict::unique;
    if (text == "multiple") return OrbitVerdict::multiple;
    if (text == "subspace-family") return OrbitVerdict::subspace_family;
    throw std::invalid_argument("unknown verdict '" + text + "'");
}

bool FixedPointReport::fixed_set_contains(const QVector& u) const {
    return std::any_of(fixed_sets.begin(), fixed_sets.end(), [&](const Polyhedron& p) { return p.contains(u); });
}

namespace {

bool lex_less(const std::vector<QVector>& a, const std::vector<QVector>& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        for (Eigen::Index j = 0; j < std::min(a[i].size(), b[i].size()); ++j) {
            if (a[i](j) != b[i](j)) return a[i](j) < b[i](j);
        }
    }
    return a.size() < b.size();
}

bool same_orbit(const std::vector<QVector>& a, const std::vector<QVector>& b) {
    return !lex_less(a, b) && !lex_less(b, a);
}

}  // namespace

FixedPointReport find_cycle_fixed_points(const Policy& policy, const CyclicSpace& space,
                                         const OrbitOptions& options) {
    const PieceEnumeration pieces = enumerate_pieces(policy, space, options);
    const Eigen::Index d = policy.dimension();

    FixedPointReport rep{policy, space.marks(), pieces.pieces_examined, pieces.pieces.size(), {}, {},
                         OrbitVerdict::none};
    bool family = false;
    for (std::size_t idx = 0; idx < pieces.pieces.size(); ++idx) {
        const AffinePiece& piece = pieces.pieces[idx];
        Polyhedron fixed = piece.domain;
        for (Eigen::Index i = 0; i < d; ++i) {
            // u_i - (A u + b)_i = 0
            QVector row = unit_vector(d, i) - piece.A.row(i).transpose();
            fixed.add(row, -piece.b(i), Relation::eq);
        }
        const auto point = fixed.witness();
        bool is_family = false;
        if (point) {
            for (Eigen::Index i = 0; i < d && !is_family; ++i) {
                for (int sign : {1, -1}) {
                    Polyhedron probe = fixed;
                    probe.add(unit_vector(d, i) * Rational(sign), -Rational(sign) * (*point)(i), Relation::lt);
                    if (probe.feasible()) {
                        is_family = true;
                        break;
                    }
                }
            }
            family = family || is_family;
            rep.fixed_sets.push_back(fixed);
            std::vector<QVector> orbit{*point};
            for (std::size_t k = 0; k + 1 < space.size(); ++k) {
                orbit.push_back(apply(policy, orbit.back(), space.marks()[k]));
            }
            rep.solutions.push_back(std::move(orbit));
        }
        if (options.trace) {
            auto& out = *options.trace;
            out << "piece " << idx << '\n';
            for (const auto& c : piece.domain.constraints()) out << "  domain  " << format_constraint(c) << '\n';
            for (Eigen::Index i = 0; i < d; ++i) {
                QVector row = piece.A.row(i).transpose();
                out << "  F" << (i + 1) << " = " << format_vector(row) << " . u + " << format_rational(piece.b(i))
                    << '\n';
            }
            out << "  candidate ";
            if (!point) out << "none\n";
            else out << (is_family ? "family through " : "point ") << format_vector(*point) << '\n';
        }
    }
    std::sort(rep.solutions.begin(), rep.solutions.end(), lex_less);
    rep.solutions.erase(std::unique(rep.solutions.begin(), rep.solutions.end(), same_orbit), rep.solutions.end());

    if (family) rep.verdict = OrbitVerdict::subspace_family;
    else if (rep.solutions.empty()) rep.verdict = OrbitVerdict::none;
    else if (rep.solutions.size() == 1) rep.verdict = OrbitVerdict::unique;
    else rep.verdict = OrbitVerdict::multiple;
    return rep;
}

CounterexampleCheck verify_counterexample(const OrbitOptions& options) {
    const CyclicSpace space = counterexample_space();
    CounterexampleCheck c{find_cycle_fixed_points(Policy::jpsw(2, 1), space, options),
                          find_cycle_fixed_points(Policy::jsw(2), space, options),
                          space.mean_sigma(),
                          space.mean_tau(),
                          false,
                          {}};
    if (c.jpsw.verdict != OrbitVerdict::none) {
        c.failures.push_back(std::string("jpsw:2:1 verdict is ") + to_string(c.jpsw.verdict) + ", expected none");
    }
    if (c.jsw.solutions.empty()) c.failures.push_back("jsw:2 has no periodic stationary profile");
    for (const auto* rep : {&c.jpsw, &c.jsw}) {
        for (const auto& orbit : rep->solutions) {
            if (stationarity_residual(rep->policy, space, orbit) != 0) {
                c.failures.push_back(rep->policy.to_string() + " reported a solution with nonzero residual");
            }
        }
    }
    if (c.mean_sigma != Rational(23, 12)) c.failures.push_back("E sigma is not 23/12");
    if (!(c.mean_sigma < 2 * c.mean_tau)) c.failures.push_back("E sigma < 2 E tau fails");
    c.reproduced = c.failures.empty();
    return c;
}

}  // namespace parq
