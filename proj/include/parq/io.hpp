#pragma once

// JSON and CSV forms of models, policies and reports.
//
// Rationals are written as "num/den" strings; doubles use the shortest
// round-trip decimal, with non-finite values as the strings "inf", "-inf",
// "nan". Object keys are sorted, so equal reports serialize to equal bytes.

#include <json.hpp>

#include <ostream>
#include <string>

#include "parq/exact_orbit.hpp"
#include "parq/stability.hpp"

namespace parq {

using json = nlohmann::json;

json rational_to_json(const Rational& x);
/// Accepts "num/den", decimal strings and JSON numbers.
Rational rational_from_json(const json& j);

json real_to_json(double x);
double real_from_json(const json& j);

json distribution_to_json(const Distribution& d);
Distribution distribution_from_json(const json& j);

/// {"space": {"cyclic": [[sigma, tau], ...]}} or
/// {"space": {"gigi": {"sigma": <dist>, "tau": <dist>}}}, or the string "counterexample".
json model_to_json(const Model& m);
Model model_from_json(const json& j);

json profile_to_json(const Profile<double>& u);
json profile_to_json(const Profile<Rational>& u);
Profile<double> real_profile_from_json(const json& j);
Profile<Rational> rational_profile_from_json(const json& j);

json loynes_to_json(const LoynesResult<double>& r);
json loynes_to_json(const LoynesResult<Rational>& r);
LoynesResult<double> real_loynes_from_json(const json& j);
LoynesResult<Rational> rational_loynes_from_json(const json& j);

json zvector_to_json(const ZVector<double>& z);
json zvector_to_json(const ZVector<Rational>& z);
ZVector<double> real_zvector_from_json(const json& j);
ZVector<Rational> rational_zvector_from_json(const json& j);

void to_json(json& j, const Estimate& e);
void from_json(const json& j, Estimate& e);
void to_json(json& j, const JswCheck& c);
void from_json(const json& j, JswCheck& c);
void to_json(json& j, const PzEstimate& e);
void from_json(const json& j, PzEstimate& e);
void to_json(json& j, const LossEstimate& e);
void from_json(const json& j, LossEstimate& e);
void to_json(json& j, const SplittingComparison& c);
void from_json(const json& j, SplittingComparison& c);
void to_json(json& j, const HypothesisCheck& h);
void from_json(const json& j, HypothesisCheck& h);
void to_json(json& j, const StabilityReport& r);
void from_json(const json& j, StabilityReport& r);
void to_json(json& j, const TightnessDiagnostic& d);
void from_json(const json& j, TightnessDiagnostic& d);
void to_json(json& j, const Polyhedron& p);
void from_json(const json& j, Polyhedron& p);
void to_json(json& j, const FixedPointReport& r);
void from_json(const json& j, FixedPointReport& r);
void to_json(json& j, const CounterexampleCheck& c);
void from_json(const json& j, CounterexampleCheck& c);

/// n,sigma,tau
void write_path_csv(std::ostream& out, const MarkedPath<double>& path);
/// n,w1,...,wq where row n is the profile met by customer n.
void write_trajectory_csv(std::ostream& out, const std::vector<Profile<double>>& profiles);
/// horizon<TAB>q99
void write_tightness_tsv(std::ostream& out, const TightnessDiagnostic& d);

}  // namespace parq

namespace nlohmann {

template <>
struct adl_serializer<parq::Policy> {
    static void to_json(json& j, const parq::Policy& p) { j = p.to_string(); }
    static parq::Policy from_json(const json& j) { return parq::Policy::parse(j.get<std::string>()); }
};

}  // namespace nlohmann
