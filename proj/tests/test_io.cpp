#include <doctest.h>

#include <cmath>
#include <sstream>

#include "parq/io.hpp"
#include "support.hpp"

using namespace parq;
using parq::testing::prof;
using parq::testing::qprof;

TEST_CASE("scalar forms") {
    CHECK(rational_to_json(Rational(23, 12)) == json("23/12"));
    CHECK(rational_from_json(json("23/12")) == Rational(23, 12));
    CHECK(rational_from_json(json(3)) == 3);
    CHECK(rational_from_json(json(0.25)) == Rational(1, 4));
    CHECK_THROWS_AS(rational_from_json(json(true)), std::invalid_argument);

    CHECK(real_to_json(INFINITY) == json("inf"));
    CHECK(std::isinf(real_from_json(json("-inf"))));
    CHECK(std::isnan(real_from_json(json("nan"))));
    CHECK(real_from_json(real_to_json(0.1)) == 0.1);
}

TEST_CASE("models round-trip") {
    const Model cx = model_from_json(json("counterexample"));
    const json j = model_to_json(cx);
    CHECK(j.dump() == model_to_json(model_from_json(j)).dump());
    CHECK(std::get<CyclicSpace>(cx).mean_sigma() == Rational(23, 12));

    const json g = json::parse(R"({"space":{"gigi":{"sigma":{"type":"exponential","rate":0.5},
        "tau":{"type":"discrete","values":[1,2],"probs":[0.5,0.5]}}}})");
    const Model m = model_from_json(g);
    CHECK(std::get<GiGiModel>(m).mean_sigma() == doctest::Approx(2.0));
    CHECK(model_to_json(m) == g);

    // tau with an atom at zero is rejected
    const json bad = json::parse(R"({"space":{"gigi":{"sigma":{"type":"point","value":1},
        "tau":{"type":"point","value":0}}}})");
    CHECK_THROWS_AS(model_from_json(bad), std::invalid_argument);
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"space":{"cyclic":[]}})")), std::invalid_argument);
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"space":{}})")), std::invalid_argument);
}

TEST_CASE("loynes and z vectors round-trip") {
    const auto r = loynes_iterate(Policy::jsw(2), counterexample_space(), 0, 50);
    const json j = loynes_to_json(r);
    const auto back = rational_loynes_from_json(j);
    CHECK(back.policy == r.policy);
    CHECK(back.converged == r.converged);
    CHECK(back.iterates.size() == r.iterates.size());
    CHECK(loynes_to_json(back) == j);

    ZVector<double> z{prof({0.0, 1.5}), 10, true};
    const auto zb = real_zvector_from_json(zvector_to_json(z));
    CHECK(zb.values == z.values);
    CHECK(zb.truncation_k == 10);
}

TEST_CASE("reports round-trip") {
    McParams mc;
    mc.replications = 200;
    mc.truncation = 50;
    mc.horizon = 2000;
    mc.loss_replications = 2;
    const Model gm = GiGiModel(Exponential{1.0}, Exponential{0.8});
    const StabilityReport rep = check_jpsw_conditions(gm, 3, 1, mc);
    const json j = rep;
    CHECK(json(j.get<StabilityReport>()) == j);
    CHECK(j.at("jpsw_condition").contains("holds"));

    const auto fp = find_cycle_fixed_points(Policy::jsw(2), counterexample_space());
    const json jf = fp;
    const auto fb = jf.get<FixedPointReport>();
    CHECK(fb.verdict == fp.verdict);
    CHECK(json(fb) == jf);

    const auto td = tightness_probe(Policy::jsw(2), gm, doubling_grid(64, 256), 3);
    const json jt = td;
    CHECK(json(jt.get<TightnessDiagnostic>()) == jt);
}

TEST_CASE("csv writers") {
    MarkedPath<double> path;
    path.marks = {{1.0, 0.5}, {0.25, 2.0}};
    std::ostringstream a;
    write_path_csv(a, path);
    CHECK(a.str() == "n,sigma,tau\n0,1,0.5\n1,0.25,2\n");

    std::ostringstream b;
    write_trajectory_csv(b, {prof({0, 0}), prof({0, 1.5})});
    CHECK(b.str() == "n,w1,w2\n0,0,0\n1,0,1.5\n");
}
