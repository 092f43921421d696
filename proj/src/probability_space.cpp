#include "parq/probability_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace parq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

double mean(const Distribution& d) {
    return std::visit(overloaded{
                          [](const PointMass& x) { return x.value; },
                          [](const Exponential& x) { return 1.0 / x.rate; },
                          [](const Uniform& x) { return 0.5 * (x.low + x.high); },
                          [](const Discrete& x) {
                              return std::inner_product(x.values.begin(), x.values.end(),
                                                        x.probs.begin(), 0.0);
                          },
                      },
                      d);
}

bool has_unbounded_support(const Distribution& d) {
    return std::holds_alternative<Exponential>(d);
}

bool has_atom_at_zero(const Distribution& d) {
    return std::visit(overloaded{
                          [](const PointMass& x) { return x.value == 0.0; },
                          [](const Exponential&) { return false; },
                          [](const Uniform& x) { return x.low == 0.0 && x.high == 0.0; },
                          [](const Discrete& x) {
                              for (std::size_t i = 0; i < x.values.size(); ++i) {
                                  if (x.values[i] == 0.0 && x.probs[i] > 0.0) return true;
                              }
                              return false;
                          },
                      },
                      d);
}

void validate_distribution(const Distribution& d, const char* role) {
    auto fail = [role](const std::string& why) {
        throw std::invalid_argument(std::string(role) + " distribution: " + why);
    };
    std::visit(overloaded{
                   [&](const PointMass& x) {
                       if (!finite_nonnegative(x.value)) fail("point mass must be finite and >= 0");
                   },
                   [&](const Exponential& x) {
                       if (!(std::isfinite(x.rate) && x.rate > 0.0)) fail("exponential rate must be > 0");
                   },
                   [&](const Uniform& x) {
                       if (!finite_nonnegative(x.low) || !std::isfinite(x.high) || x.high < x.low) {
                           fail("uniform needs 0 <= low <= high");
                       }
                   },
                   [&](const Discrete& x) {
                       if (x.values.empty() || x.values.size() != x.probs.size()) {
                           fail("discrete needs matching nonempty values and probs");
                       }
                       double total = 0.0;
                       for (std::size_t i = 0; i < x.values.size(); ++i) {
                           if (!finite_nonnegative(x.values[i])) fail("discrete values must be >= 0");
                           if (!finite_nonnegative(x.probs[i])) fail("discrete probs must be >= 0");
                           total += x.probs[i];
                       }
                       if (std::abs(total - 1.0) > 1e-9) fail("discrete probs must sum to 1");
                   },
               },
               d);
}

std::string describe(const Distribution& d) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const PointMass& x) { os << "point(" << format_double(x.value) << ")"; },
                   [&](const Exponential& x) { os << "exp(rate=" << format_double(x.rate) << ")"; },
                   [&](const Uniform& x) {
                       os << "uniform(" << format_double(x.low) << "," << format_double(x.high) << ")";
                   },
                   [&](const Discrete& x) { os << "discrete(" << x.values.size() << " atoms)"; },
               },
               d);
    return os.str();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

double Stream::draw(const Distribution& d) {
    return std::visit(overloaded{
                          [](const PointMass& x) { return x.value; },
                          [this](const Exponential& x) { return -std::log(uniform_open()) / x.rate; },
                          [this](const Uniform& x) { return x.low + (x.high - x.low) * uniform_open(); },
                          [this](const Discrete& x) {
                              const double u = uniform_open();
                              double acc = 0.0;
                              for (std::size_t i = 0; i < x.values.size(); ++i) {
                                  acc += x.probs[i];
                                  if (u < acc) return x.values[i];
                              }
                              return x.values.back();
                          },
                      },
                      d);
}

GiGiModel::GiGiModel(Distribution sigma, Distribution tau)
    : sigma_(std::move(sigma)), tau_(std::move(tau)) {
    validate_distribution(sigma_, "sigma");
    validate_distribution(tau_, "tau");
    if (has_atom_at_zero(tau_)) {
        throw std::invalid_argument("tau distribution: positive mass at 0 is not allowed");
    }
}

CyclicSpace::CyclicSpace(std::vector<Mark<Rational>> marks) : marks_(std::move(marks)) {
    if (marks_.empty()) throw std::invalid_argument("cyclic space needs at least one mark");
    for (std::size_t i = 0; i < marks_.size(); ++i) validate_mark(marks_[i], i);
}

const Mark<Rational>& CyclicSpace::mark(std::int64_t i) const {
    return marks_[static_cast<std::size_t>(cyclic_index(i, static_cast<std::int64_t>(marks_.size())))];
}

Rational CyclicSpace::mean_sigma() const {
    Rational s(0);
    for (const auto& m : marks_) s += m.sigma;
    return s / Rational(static_cast<long>(marks_.size()));
}

Rational CyclicSpace::mean_tau() const {
    Rational s(0);
    for (const auto& m : marks_) s += m.tau;
    return s / Rational(static_cast<long>(marks_.size()));
}

CyclicSpace build_cyclic_space(std::vector<Mark<Rational>> marks) {
    return CyclicSpace(std::move(marks));
}

CyclicSpace counterexample_space() {
    return CyclicSpace({{Rational(9, 4), Rational(1)},
                        {Rational(3, 2), Rational(1)},
                        {Rational(2), Rational(1)}});
}

namespace {

std::vector<Mark<double>> draw_marks(const GiGiModel& model, std::size_t n, std::uint64_t seed) {
    MarkSource source(model, seed);
    std::vector<Mark<double>> marks(n);
    for (auto& m : marks) m = source.next();
    return marks;
}

}  // namespace

MarkedPath<double> sample_path(const GiGiModel& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample_path: n must be >= 1");
    MarkedPath<double> path;
    path.marks = draw_marks(model, n, seed);
    path.origin = 0;
    path.seed = seed;
    return path;
}

MarkedPath<double> sample_backward_path(const GiGiModel& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("sample_backward_path: n must be >= 1");
    MarkedPath<double> path;
    path.marks = draw_marks(model, n, seed);
    std::reverse(path.marks.begin(), path.marks.end());
    path.origin = -static_cast<std::int64_t>(n);
    path.seed = seed;
    return path;
}

}  // namespace parq
