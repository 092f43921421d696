#include <doctest.h>

#include <cmath>

#include "parq/probability_space.hpp"
#include "support.hpp"

using namespace parq;

TEST_CASE("cyclic space construction") {
    const CyclicSpace s = build_cyclic_space({{Rational(9, 4), Rational(1)},
                                              {Rational(3, 2), Rational(1)},
                                              {Rational(2), Rational(1)}});
    CHECK(s.size() == 3);

    const CyclicSpace single = build_cyclic_space({{Rational(0), Rational(1)}});
    CHECK(single.size() == 1);
    CHECK(single.mean_sigma() == 0);

    const CyclicSpace two = build_cyclic_space({{Rational(1), Rational(2)}, {Rational(3), Rational(2)}});
    CHECK(two.mean_sigma() == 2);
    CHECK(two.mean_tau() == 2);
}

TEST_CASE("cyclic space rejects bad input") {
    CHECK_THROWS_AS(build_cyclic_space({}), std::invalid_argument);
    try {
        build_cyclic_space({{Rational(1), Rational(1)}, {Rational(1), Rational(0)}});
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("mark 1") != std::string::npos);
    }
    CHECK_THROWS_AS(build_cyclic_space({{Rational(-1), Rational(1)}}), std::invalid_argument);
}

TEST_CASE("counterexample space") {
    const CyclicSpace s = counterexample_space();
    REQUIRE(s.size() == 3);
    CHECK(s.marks()[0].sigma == Rational(9, 4));
    CHECK(s.marks()[1].sigma == Rational(3, 2));
    CHECK(s.marks()[2].sigma == Rational(2));
    CHECK(s.mean_sigma() == Rational(23, 12));
    CHECK(s.mean_sigma() == Rational(575, 100) / 3);
    CHECK(s.mean_tau() == 1);
}

TEST_CASE("unroll follows the shift") {
    const CyclicSpace s = counterexample_space();
    const auto path = unroll<double>(s, 0, 4);
    REQUIRE(path.size() == 4);
    CHECK(path.marks[0].sigma == 2.25);
    CHECK(path.marks[1].sigma == 1.5);
    CHECK(path.marks[2].sigma == 2.0);
    CHECK(path.marks[3].sigma == 2.25);
    for (const auto& m : path.marks) CHECK(m.tau == 1.0);

    const auto back = unroll<double>(s, -1, 1);
    CHECK(back.marks[0].sigma == 2.0);
    CHECK(back.origin == -1);

    const CyclicSpace single = build_cyclic_space({{Rational(1, 3), Rational(2)}});
    const auto rep = unroll<Rational>(single, 5, 2);
    CHECK(rep.marks[0].sigma == Rational(1, 3));
    CHECK(rep.marks[1].sigma == Rational(1, 3));
}

TEST_CASE("unroll over a full cycle is a rotation") {
    testing::GridGen gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = gen.integer(1, 6);
        std::vector<Mark<Rational>> marks;
        for (int i = 0; i < k; ++i) marks.push_back({Rational(gen.integer(0, 9)), Rational(gen.integer(1, 9))});
        const CyclicSpace s(marks);
        const auto base = unroll<Rational>(s, 0, static_cast<std::size_t>(k));
        const int start = gen.integer(-20, 20);
        const auto rot = unroll<Rational>(s, start, static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
            const auto& expect = base.marks[static_cast<std::size_t>(cyclic_index(start + j, k))];
            CHECK(rot.marks[static_cast<std::size_t>(j)].sigma == expect.sigma);
            CHECK(rot.marks[static_cast<std::size_t>(j)].tau == expect.tau);
        }
    }
}

TEST_CASE("backward path of a cyclic sample") {
    const auto back = backward_path<double>(counterexample_space(), 0, 3);
    CHECK(back.origin == -3);
    CHECK(back.at(-1).sigma == 2.0);   // theta^{-1} omega_1 = omega_3
    CHECK(back.at(-2).sigma == 1.5);
    CHECK(back.at(-3).sigma == 2.25);
}

TEST_CASE("deterministic GI/GI paths") {
    const GiGiModel model(PointMass{1.0}, PointMass{2.0});
    const auto path = sample_path(model, 3, 12345);
    REQUIRE(path.size() == 3);
    for (const auto& m : path.marks) {
        CHECK(m.sigma == 1.0);
        CHECK(m.tau == 2.0);
    }
}

TEST_CASE("sampling is a pure function of model, length and seed") {
    const GiGiModel model(Exponential{1.0}, Exponential{1.0});
    const auto a = sample_path(model, 1000, 7);
    const auto b = sample_path(model, 1000, 7);
    const auto c = sample_path(model, 1000, 8);
    bool identical = true;
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        identical = identical && a.marks[i].sigma == b.marks[i].sigma && a.marks[i].tau == b.marks[i].tau;
        differs = differs || a.marks[i].sigma != c.marks[i].sigma;
    }
    CHECK(identical);
    CHECK(differs);
}

TEST_CASE("backward paths extend into the past without changing recent marks") {
    const GiGiModel model(Exponential{1.0}, Uniform{0.5, 1.5});
    const auto short_path = sample_backward_path(model, 50, 3);
    const auto long_path = sample_backward_path(model, 200, 3);
    for (std::int64_t t = -50; t <= -1; ++t) {
        CHECK(short_path.at(t).sigma == long_path.at(t).sigma);
        CHECK(short_path.at(t).tau == long_path.at(t).tau);
    }
}

TEST_CASE("exponential sample mean and sigma/tau independence") {
    const GiGiModel model(Exponential{1.0}, Exponential{1.0});
    const std::size_t n = 100000;
    const auto path = sample_path(model, n, 7);
    double sum_s = 0, sum_t = 0;
    for (const auto& m : path.marks) {
        sum_s += m.sigma;
        sum_t += m.tau;
    }
    const double ms = sum_s / n, mt = sum_t / n;
    CHECK(std::abs(ms - 1.0) < 0.01);

    // correlation between sigma_n and tau_{n+1}
    double cov = 0, vs = 0, vt = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double ds = path.marks[i].sigma - ms;
        const double dt = path.marks[i + 1].tau - mt;
        cov += ds * dt;
        vs += ds * ds;
        vt += dt * dt;
    }
    CHECK(std::abs(cov / std::sqrt(vs * vt)) < 0.02);
}

TEST_CASE("distribution descriptors") {
    CHECK(mean(Uniform{1.0, 3.0}) == 2.0);
    CHECK(mean(Discrete{{1.0, 3.0}, {0.25, 0.75}}) == 2.5);
    CHECK(mean(Exponential{0.4}) == doctest::Approx(2.5));
    CHECK(has_unbounded_support(Exponential{1.0}));
    CHECK_FALSE(has_unbounded_support(Uniform{0.0, 9.0}));

    CHECK_THROWS_AS(GiGiModel(PointMass{1.0}, PointMass{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(GiGiModel(PointMass{1.0}, Discrete{{0.0, 1.0}, {0.5, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(GiGiModel(PointMass{-1.0}, PointMass{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(GiGiModel(Exponential{0.0}, PointMass{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(GiGiModel(Uniform{2.0, 1.0}, PointMass{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(GiGiModel(Discrete{{1.0}, {0.5}}, PointMass{1.0}), std::invalid_argument);
    CHECK_NOTHROW(GiGiModel(PointMass{0.0}, Uniform{0.0, 2.0}));
}

TEST_CASE("rational literals") {
    CHECK(parse_rational("2.25") == Rational(9, 4));
    CHECK(parse_rational("-3/6") == Rational(-1, 2));
    CHECK(parse_rational("1e-3") == Rational(1, 1000));
    CHECK(parse_rational("7") == 7);
    CHECK(rational_from_double(0.1) == Rational(1, 10));
    CHECK(format_rational(Rational(23, 12)) == "23/12");
    CHECK(format_rational(Rational(2)) == "2/1");
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
}

TEST_CASE("streaming source reproduces sampled paths") {
    const GiGiModel model(Uniform{0.0, 3.0}, Exponential{2.0});
    const auto path = sample_path(model, 300, 99);
    MarkSource source(model, 99);
    for (const auto& m : path.marks) {
        const auto s = source.next();
        REQUIRE(s.sigma == m.sigma);
        REQUIRE(s.tau == m.tau);
    }
}
