#pragma once

// Exact search for periodic stationary profiles on finite cyclic spaces.
//
// The one-cycle map F = map_{K-1} ∘ ... ∘ map_0 is piecewise affine on the
// ordered cone. Its pieces are found by running the ordinary map code on a
// symbolic scalar (an affine form in the input coordinates): every comparison
// whose outcome is not already decided by the constraints gathered so far
// splits the run, and a depth-first explorer replays the program once per
// consistent outcome sequence. Each completed run is one piece.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "parq/loynes.hpp"
#include "parq/polyhedron.hpp"

namespace parq {

class BranchExplorer;

/// coef·u + constant over the input profile u. A form with an empty
/// coefficient vector is a plain constant.
class AffineExpr {
  public:
    AffineExpr() = default;
    AffineExpr(int c) : constant_(c) {}  // NOLINT: literal constants
    AffineExpr(const Rational& c) : constant_(c) {}  // NOLINT
    static AffineExpr variable(Eigen::Index dim, Eigen::Index i, BranchExplorer* ctx);

    const QVector& coef() const { return coef_; }
    const Rational& constant() const { return constant_; }
    bool is_constant() const;
    /// Coefficients padded to dim.
    QVector coefficients(Eigen::Index dim) const;
    Rational evaluate(const QVector& u) const;

    friend AffineExpr operator+(const AffineExpr& a, const AffineExpr& b);
    friend AffineExpr operator-(const AffineExpr& a, const AffineExpr& b);
    friend AffineExpr operator-(const AffineExpr& a);
    AffineExpr& operator+=(const AffineExpr& b) { return *this = *this + b; }
    AffineExpr& operator-=(const AffineExpr& b) { return *this = *this - b; }

    friend bool operator<(const AffineExpr& a, const AffineExpr& b);
    friend bool operator<=(const AffineExpr& a, const AffineExpr& b);
    friend bool operator==(const AffineExpr& a, const AffineExpr& b);
    friend bool operator>(const AffineExpr& a, const AffineExpr& b) { return b < a; }
    friend bool operator>=(const AffineExpr& a, const AffineExpr& b) { return b <= a; }
    friend bool operator!=(const AffineExpr& a, const AffineExpr& b) { return !(a == b); }

  private:
    QVector coef_;
    Rational constant_{0};
    BranchExplorer* ctx_ = nullptr;
};

/// Depth-first enumeration of the outcome sequences of a symbolic program.
class BranchExplorer {
  public:
    enum class Test { lt, le, eq };

    BranchExplorer(Polyhedron root, std::size_t pattern_cap);

    /// Runs body() once per feasible outcome sequence and hands each result,
    /// together with the domain of that run, to sink(result, domain).
    template <typename Body, typename Sink>
    void explore(Body&& body, Sink&& sink) {
        trail_.clear();
        leaves_ = 0;
        pruned_ = 0;
        for (;;) {
            depth_ = 0;
            current_ = root_;
            auto result = body();
            ++leaves_;
            check_cap();
            sink(result, current_);
            while (!trail_.empty() && trail_.back().chosen + 1 >= trail_.back().options.size()) trail_.pop_back();
            if (trail_.empty()) break;
            ++trail_.back().chosen;
        }
    }

    /// Outcome of  form TEST 0  on the current run.
    bool decide(const QVector& coef, const Rational& constant, Test test);

    std::size_t leaves() const { return leaves_; }
    std::size_t pruned() const { return pruned_; }

  private:
    struct Decision {
        std::vector<int> options;
        std::size_t chosen = 0;
    };

    void check_cap() const;

    Polyhedron root_;
    Polyhedron current_;
    std::size_t cap_;
    std::vector<Decision> trail_;
    std::size_t depth_ = 0;
    std::size_t leaves_ = 0;
    std::size_t pruned_ = 0;
};

struct AffinePiece {
    /// On `domain`, F(u) = A u + b.
    QMatrix A;
    QVector b;
    Polyhedron domain;

    QVector apply(const QVector& u) const { return A * u + b; }
};

struct OrbitOptions {
    Eigen::Index max_dim = 4;
    std::size_t pattern_cap = 1000000;
    /// When set, every piece is written here with its domain, A, b and fixed-point candidate.
    std::ostream* trace = nullptr;
};

struct PieceEnumeration {
    std::vector<AffinePiece> pieces;
    /// Completed runs plus outcome branches pruned as infeasible.
    std::size_t pieces_examined = 0;
    std::size_t pruned = 0;
};

/// Pieces of the one-cycle map starting at sample 0, covering the ordered cone.
PieceEnumeration enumerate_pieces(const Policy& policy, const CyclicSpace& space,
                                  const OrbitOptions& options = {});

/// The cycle map evaluated directly in rationals.
QVector cycle_map(const Policy& policy, const CyclicSpace& space, const QVector& u);

enum class OrbitVerdict { none, unique, multiple, subspace_family };

const char* to_string(OrbitVerdict v);
OrbitVerdict parse_verdict(const std::string& text);

struct FixedPointReport {
    Policy policy;
    std::vector<Mark<Rational>> marks;
    std::size_t pieces_examined = 0;
    std::size_t pieces = 0;
    /// Each solution lists the profiles at samples 0..K-1, sorted canonically.
    std::vector<std::vector<QVector>> solutions;
    /// Nonempty fixed-point sets {u in domain : F(u) = u}, one per piece that has one.
    std::vector<Polyhedron> fixed_sets;
    OrbitVerdict verdict = OrbitVerdict::none;

    /// True if u (a profile at sample 0) lies in one of the fixed sets.
    bool fixed_set_contains(const QVector& u) const;
};

FixedPointReport find_cycle_fixed_points(const Policy& policy, const CyclicSpace& space,
                                         const OrbitOptions& options = {});

struct CounterexampleCheck {
    FixedPointReport jpsw;
    FixedPointReport jsw;
    Rational mean_sigma;
    Rational mean_tau;
    /// J2SW has no periodic stationary profile, JSW(2) has one with zero
    /// residual, and E sigma = 23/12 < 2 E tau.
    bool reproduced = false;
    std::vector<std::string> failures;
};

CounterexampleCheck verify_counterexample(const OrbitOptions& options = {});

}  // namespace parq

namespace Eigen {

template <>
struct NumTraits<parq::AffineExpr> : GenericNumTraits<parq::AffineExpr> {
    using Real = parq::AffineExpr;
    using NonInteger = parq::AffineExpr;
    using Nested = parq::AffineExpr;
    using Literal = parq::AffineExpr;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 3,
        MulCost = 3
    };
};

}  // namespace Eigen
