#include "parq/io.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace parq {

namespace {

const json& field(const json& j, const char* name) {
    if (!j.is_object()) throw std::invalid_argument(std::string("expected an object holding '") + name + "'");
    auto it = j.find(name);
    if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + name + "'");
    return *it;
}

template <typename T>
T get(const json& j, const char* name) {
    try {
        return field(j, name).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("field '") + name + "': " + e.what());
    }
}

double getr(const json& j, const char* name) {
    try {
        return real_from_json(field(j, name));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("field '") + name + "': " + e.what());
    }
}

template <typename Scalar>
json scalar_json(const Scalar& x) {
    if constexpr (std::is_same_v<Scalar, Rational>) return rational_to_json(x);
    else return real_to_json(x);
}

template <typename Scalar>
Scalar scalar_from(const json& j) {
    if constexpr (std::is_same_v<Scalar, Rational>) return rational_from_json(j);
    else return real_from_json(j);
}

template <typename Scalar>
json profile_json(const Profile<Scalar>& u) {
    json a = json::array();
    for (Eigen::Index i = 0; i < u.size(); ++i) a.push_back(scalar_json(u(i)));
    return a;
}

template <typename Scalar>
Profile<Scalar> profile_from(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("profile must be an array");
    Profile<Scalar> u(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) u(static_cast<Eigen::Index>(i)) = scalar_from<Scalar>(j[i]);
    return u;
}

template <typename Scalar>
json loynes_json(const LoynesResult<Scalar>& r) {
    json iterates = json::array();
    for (const auto& w : r.iterates) iterates.push_back(profile_json(w));
    return {{"policy", r.policy},
            {"scalar", std::is_same_v<Scalar, Rational> ? "rational" : "double"},
            {"converged", r.converged},
            {"limit", r.limit ? profile_json(*r.limit) : json(nullptr)},
            {"horizon_used", r.horizon_used},
            {"tolerance", scalar_json(r.tolerance)},
            {"stall_window", r.stall_window},
            {"iterates", iterates}};
}

template <typename Scalar>
LoynesResult<Scalar> loynes_from(const json& j) {
    LoynesResult<Scalar> r;
    r.policy = get<Policy>(j, "policy");
    r.converged = get<bool>(j, "converged");
    if (!field(j, "limit").is_null()) r.limit = profile_from<Scalar>(field(j, "limit"));
    r.horizon_used = get<std::size_t>(j, "horizon_used");
    r.tolerance = scalar_from<Scalar>(field(j, "tolerance"));
    r.stall_window = get<std::size_t>(j, "stall_window");
    for (const auto& w : field(j, "iterates")) r.iterates.push_back(profile_from<Scalar>(w));
    return r;
}

template <typename Scalar>
json zvector_json(const ZVector<Scalar>& z) {
    return {{"values", profile_json(z.values)}, {"truncation_k", z.truncation_k}, {"tail_bound_ok", z.tail_bound_ok}};
}

template <typename Scalar>
ZVector<Scalar> zvector_from(const json& j) {
    return {profile_from<Scalar>(field(j, "values")), get<std::size_t>(j, "truncation_k"),
            get<bool>(j, "tail_bound_ok")};
}

json marks_json(const std::vector<Mark<Rational>>& marks) {
    json a = json::array();
    for (const auto& m : marks) a.push_back({rational_to_json(m.sigma), rational_to_json(m.tau)});
    return a;
}

std::vector<Mark<Rational>> marks_from(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("cyclic space needs a nonempty array of [sigma, tau]");
    std::vector<Mark<Rational>> marks;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& e = j[i];
        if (!e.is_array() || e.size() != 2) {
            throw std::invalid_argument("cyclic mark " + std::to_string(i) + " must be [sigma, tau]");
        }
        marks.push_back({rational_from_json(e[0]), rational_from_json(e[1])});
    }
    return marks;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scalars

json rational_to_json(const Rational& x) { return format_rational(x); }

Rational rational_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) return rational_from_double(j.get<double>());
    throw std::invalid_argument("expected a rational as a number or \"num/den\" string, got " + j.dump());
}

json real_to_json(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double real_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw std::invalid_argument("expected a number, got " + j.dump());
}

// ---------------------------------------------------------------------------
// Models

json distribution_to_json(const Distribution& d) {
    return std::visit(
        [](const auto& x) -> json {
            using D = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<D, PointMass>) {
                return {{"type", "point"}, {"value", real_to_json(x.value)}};
            } else if constexpr (std::is_same_v<D, Exponential>) {
                return {{"type", "exponential"}, {"rate", real_to_json(x.rate)}};
            } else if constexpr (std::is_same_v<D, Uniform>) {
                return {{"type", "uniform"}, {"low", real_to_json(x.low)}, {"high", real_to_json(x.high)}};
            } else {
                return {{"type", "discrete"}, {"values", x.values}, {"probs", x.probs}};
            }
        },
        d);
}

Distribution distribution_from_json(const json& j) {
    const auto type = get<std::string>(j, "type");
    if (type == "point") return PointMass{getr(j, "value")};
    if (type == "exponential") return Exponential{getr(j, "rate")};
    if (type == "uniform") return Uniform{getr(j, "low"), getr(j, "high")};
    if (type == "discrete") {
        return Discrete{get<std::vector<double>>(j, "values"), get<std::vector<double>>(j, "probs")};
    }
    throw std::invalid_argument("unknown distribution type '" + type + "'");
}

json model_to_json(const Model& m) {
    if (const auto* c = std::get_if<CyclicSpace>(&m)) return {{"space", {{"cyclic", marks_json(c->marks())}}}};
    const auto& g = std::get<GiGiModel>(m);
    return {{"space", {{"gigi", {{"sigma", distribution_to_json(g.sigma())}, {"tau", distribution_to_json(g.tau())}}}}}};
}

Model model_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "counterexample") return counterexample_space();
        throw std::invalid_argument("unknown model name " + j.dump());
    }
    const json& space = field(j, "space");
    if (space.contains("cyclic")) return CyclicSpace(marks_from(space.at("cyclic")));
    if (space.contains("gigi")) {
        const json& g = space.at("gigi");
        return GiGiModel(distribution_from_json(field(g, "sigma")), distribution_from_json(field(g, "tau")));
    }
    throw std::invalid_argument("space must hold 'cyclic' or 'gigi'");
}

// ---------------------------------------------------------------------------
// Profiles, Loynes results, Z vectors

json profile_to_json(const Profile<double>& u) { return profile_json(u); }
json profile_to_json(const Profile<Rational>& u) { return profile_json(u); }
Profile<double> real_profile_from_json(const json& j) { return profile_from<double>(j); }
Profile<Rational> rational_profile_from_json(const json& j) { return profile_from<Rational>(j); }

json loynes_to_json(const LoynesResult<double>& r) { return loynes_json(r); }
json loynes_to_json(const LoynesResult<Rational>& r) { return loynes_json(r); }
LoynesResult<double> real_loynes_from_json(const json& j) { return loynes_from<double>(j); }
LoynesResult<Rational> rational_loynes_from_json(const json& j) { return loynes_from<Rational>(j); }

json zvector_to_json(const ZVector<double>& z) { return zvector_json(z); }
json zvector_to_json(const ZVector<Rational>& z) { return zvector_json(z); }
ZVector<double> real_zvector_from_json(const json& j) { return zvector_from<double>(j); }
ZVector<Rational> rational_zvector_from_json(const json& j) { return zvector_from<Rational>(j); }

// ---------------------------------------------------------------------------
// Stability

void to_json(json& j, const Estimate& e) {
    j = {{"value", real_to_json(e.value)}, {"half_width", real_to_json(e.half_width)}, {"samples", e.samples}};
}
void from_json(const json& j, Estimate& e) {
    e.value = getr(j, "value");
    e.half_width = getr(j, "half_width");
    e.samples = get<std::size_t>(j, "samples");
}

void to_json(json& j, const JswCheck& c) {
    j = {{"servers", c.servers},
         {"mean_sigma", real_to_json(c.mean_sigma)},
         {"mean_tau", real_to_json(c.mean_tau)},
         {"holds", c.holds},
         {"margin", real_to_json(c.margin)},
         {"exact_margin", c.exact_margin ? rational_to_json(*c.exact_margin) : json(nullptr)}};
}
void from_json(const json& j, JswCheck& c) {
    c.servers = get<int>(j, "servers");
    c.mean_sigma = getr(j, "mean_sigma");
    c.mean_tau = getr(j, "mean_tau");
    c.holds = get<bool>(j, "holds");
    c.margin = getr(j, "margin");
    c.exact_margin.reset();
    if (!field(j, "exact_margin").is_null()) c.exact_margin = rational_from_json(field(j, "exact_margin"));
}

void to_json(json& j, const PzEstimate& e) {
    j = {{"p", e.p},
         {"positive", e.positive},
         {"zero_count", e.zero_count},
         {"truncation", e.truncation},
         {"truncation_failures", e.truncation_failures},
         {"valid", e.valid}};
}
void from_json(const json& j, PzEstimate& e) {
    e.p = get<int>(j, "p");
    e.positive = get<Estimate>(j, "positive");
    e.zero_count = get<std::size_t>(j, "zero_count");
    e.truncation = get<std::size_t>(j, "truncation");
    e.truncation_failures = get<std::size_t>(j, "truncation_failures");
    e.valid = get<bool>(j, "valid");
}

void to_json(json& j, const LossEstimate& e) {
    j = {{"p", e.p},
         {"probability", e.probability},
         {"horizon", e.horizon},
         {"burn_in", e.burn_in},
         {"replications", e.replications}};
}
void from_json(const json& j, LossEstimate& e) {
    e.p = get<int>(j, "p");
    e.probability = get<Estimate>(j, "probability");
    e.horizon = get<std::size_t>(j, "horizon");
    e.burn_in = get<std::size_t>(j, "burn_in");
    e.replications = get<std::size_t>(j, "replications");
}

void to_json(json& j, const SplittingComparison& c) {
    j = {{"lhs", real_to_json(c.lhs)}, {"rhs", real_to_json(c.rhs)}, {"holds", c.holds}};
}
void from_json(const json& j, SplittingComparison& c) {
    c.lhs = getr(j, "lhs");
    c.rhs = getr(j, "rhs");
    c.holds = get<bool>(j, "holds");
}

void to_json(json& j, const HypothesisCheck& h) { j = {{"name", h.name}, {"holds", h.holds}, {"detail", h.detail}}; }
void from_json(const json& j, HypothesisCheck& h) {
    h.name = get<std::string>(j, "name");
    h.holds = get<bool>(j, "holds");
    h.detail = get<std::string>(j, "detail");
}

void to_json(json& j, const StabilityReport& r) {
    j = {{"model", r.model},
         {"mean_sigma", real_to_json(r.mean_sigma)},
         {"mean_tau", real_to_json(r.mean_tau)},
         {"S", r.servers},
         {"p", r.p},
         {"exact", r.exact},
         {"p_z_positive", r.pz},
         {"p_z_zero_positive", r.p_z_zero_positive},
         {"jsw_condition", r.jsw},
         {"jpsw_condition", {{"lhs", real_to_json(r.jpsw_lhs)},
                             {"rhs", real_to_json(r.jpsw_rhs)},
                             {"margin", real_to_json(r.jpsw_margin)},
                             {"holds", r.jpsw_condition}}},
         {"loss_prob", r.loss},
         {"splitting", r.splitting},
         {"splitting_ok", r.splitting_ok},
         {"splitting_basis", r.splitting_basis},
         {"hypotheses", r.hypotheses},
         {"replications", r.replications},
         {"horizon", r.horizon},
         {"seed", r.seed}};
}
void from_json(const json& j, StabilityReport& r) {
    r.model = get<std::string>(j, "model");
    r.mean_sigma = getr(j, "mean_sigma");
    r.mean_tau = getr(j, "mean_tau");
    r.servers = get<int>(j, "S");
    r.p = get<int>(j, "p");
    r.exact = get<bool>(j, "exact");
    r.pz = get<PzEstimate>(j, "p_z_positive");
    r.p_z_zero_positive = get<bool>(j, "p_z_zero_positive");
    r.jsw = get<JswCheck>(j, "jsw_condition");
    const json& jp = field(j, "jpsw_condition");
    r.jpsw_lhs = getr(jp, "lhs");
    r.jpsw_rhs = getr(jp, "rhs");
    r.jpsw_margin = getr(jp, "margin");
    r.jpsw_condition = get<bool>(jp, "holds");
    r.loss = get<LossEstimate>(j, "loss_prob");
    r.splitting = get<SplittingComparison>(j, "splitting");
    r.splitting_ok = get<bool>(j, "splitting_ok");
    r.splitting_basis = get<std::string>(j, "splitting_basis");
    r.hypotheses = get<std::vector<HypothesisCheck>>(j, "hypotheses");
    r.replications = get<std::size_t>(j, "replications");
    r.horizon = get<std::size_t>(j, "horizon");
    r.seed = get<std::uint64_t>(j, "seed");
}

void to_json(json& j, const TightnessDiagnostic& d) {
    json q = json::array();
    for (double x : d.quantile_track) q.push_back(real_to_json(x));
    j = {{"policy", d.policy},
         {"horizon_grid", d.horizon_grid},
         {"quantile_track", q},
         {"threshold", real_to_json(d.threshold)},
         {"verdict", d.verdict}};
}
void from_json(const json& j, TightnessDiagnostic& d) {
    d.policy = get<Policy>(j, "policy");
    d.horizon_grid = get<std::vector<std::size_t>>(j, "horizon_grid");
    d.quantile_track.clear();
    for (const auto& x : field(j, "quantile_track")) d.quantile_track.push_back(real_from_json(x));
    d.threshold = getr(j, "threshold");
    d.verdict = get<std::string>(j, "verdict");
}

// ---------------------------------------------------------------------------
// Exact orbits

void to_json(json& j, const Polyhedron& p) {
    json cs = json::array();
    for (const auto& c : p.constraints()) {
        cs.push_back({{"coef", profile_json(Profile<Rational>(c.coef))},
                      {"constant", rational_to_json(c.constant)},
                      {"rel", to_string(c.rel)}});
    }
    j = {{"dim", p.dim()}, {"constraints", cs}};
}
void from_json(const json& j, Polyhedron& p) {
    p = Polyhedron(get<Eigen::Index>(j, "dim"));
    for (const auto& c : field(j, "constraints")) {
        p.add(profile_from<Rational>(field(c, "coef")), rational_from_json(field(c, "constant")),
              parse_relation(get<std::string>(c, "rel")));
    }
}

void to_json(json& j, const FixedPointReport& r) {
    json sols = json::array();
    for (const auto& orbit : r.solutions) {
        json o = json::array();
        for (const auto& u : orbit) o.push_back(profile_json(Profile<Rational>(u)));
        sols.push_back(o);
    }
    j = {{"policy", r.policy},
         {"space", marks_json(r.marks)},
         {"pieces_examined", r.pieces_examined},
         {"pieces", r.pieces},
         {"solutions", sols},
         {"fixed_sets", r.fixed_sets},
         {"verdict", to_string(r.verdict)}};
}
void from_json(const json& j, FixedPointReport& r) {
    r.policy = get<Policy>(j, "policy");
    r.marks = marks_from(field(j, "space"));
    r.pieces_examined = get<std::size_t>(j, "pieces_examined");
    r.pieces = get<std::size_t>(j, "pieces");
    r.solutions.clear();
    for (const auto& o : field(j, "solutions")) {
        std::vector<QVector> orbit;
        for (const auto& u : o) orbit.push_back(profile_from<Rational>(u));
        r.solutions.push_back(std::move(orbit));
    }
    r.fixed_sets = get<std::vector<Polyhedron>>(j, "fixed_sets");
    r.verdict = parse_verdict(get<std::string>(j, "verdict"));
}

void to_json(json& j, const CounterexampleCheck& c) {
    j = {{"jpsw", c.jpsw},
         {"jsw", c.jsw},
         {"mean_sigma", rational_to_json(c.mean_sigma)},
         {"mean_tau", rational_to_json(c.mean_tau)},
         {"reproduced", c.reproduced},
         {"failures", c.failures}};
}
void from_json(const json& j, CounterexampleCheck& c) {
    c.jpsw = get<FixedPointReport>(j, "jpsw");
    c.jsw = get<FixedPointReport>(j, "jsw");
    c.mean_sigma = rational_from_json(field(j, "mean_sigma"));
    c.mean_tau = rational_from_json(field(j, "mean_tau"));
    c.reproduced = get<bool>(j, "reproduced");
    c.failures = get<std::vector<std::string>>(j, "failures");
}

// ---------------------------------------------------------------------------
// CSV / TSV

void write_path_csv(std::ostream& out, const MarkedPath<double>& path) {
    out << "n,sigma,tau\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        out << (path.origin + static_cast<std::int64_t>(i)) << ',' << format_double(path.marks[i].sigma) << ','
            << format_double(path.marks[i].tau) << '\n';
    }
}

void write_trajectory_csv(std::ostream& out, const std::vector<Profile<double>>& profiles) {
    const Eigen::Index q = profiles.empty() ? 0 : profiles.front().size();
    out << "n";
    for (Eigen::Index i = 1; i <= q; ++i) out << ",w" << i;
    out << '\n';
    for (std::size_t n = 0; n < profiles.size(); ++n) {
        out << n;
        for (Eigen::Index i = 0; i < q; ++i) out << ',' << format_double(profiles[n](i));
        out << '\n';
    }
}

void write_tightness_tsv(std::ostream& out, const TightnessDiagnostic& d) {
    out << "horizon\tq99\n";
    for (std::size_t i = 0; i < d.horizon_grid.size(); ++i) {
        out << d.horizon_grid[i] << '\t' << format_double(d.quantile_track[i]) << '\n';
    }
}

}  // namespace parq
