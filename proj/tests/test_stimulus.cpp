#include <doctest.h>

#include <cmath>

#include "excitable/stimulus.hpp"

using namespace excitable;

TEST_CASE("gaussian pulse values") {
    CHECK(gaussian_pulse_value({2.5, 5.0, 5.0, 10.0}, 0.0, 10.0) == 2.5);
    CHECK(gaussian_pulse_value({1.0, 2.0, 3.0, 4.0}, 2.0, 4.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(gaussian_pulse_value({1.0, 2.0, 3.0, 4.0}, 0.0, 13.0) == doctest::Approx(std::exp(-4.5)).epsilon(1e-15));
    CHECK(std::exp(-4.5) == doctest::Approx(0.011109).epsilon(1e-4));
}

TEST_CASE("gaussian pulse symmetry") {
    const GaussianPulse p{0.7, 3.3, 1.7, 20.0};
    for (double x = 0.0; x < 30.0; x += 0.37) {
        for (double t = 0.0; t < 40.0; t += 1.3) REQUIRE(gaussian_pulse_value(p, x, t) == gaussian_pulse_value(p, -x, t));
    }
}

TEST_CASE("gaussian peak sits at the center and t0") {
    const GaussianPulse p{1.3, 4.0, 2.0, 11.0};
    const auto g = SpatialGrid::make(25.0, 101);
    double best = -1.0;
    std::size_t bj = 0;
    double bt = 0.0;
    for (double t = 0.0; t <= 30.0; t += 0.5) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double v = gaussian_pulse_value(p, g.x(j), t);
            if (v > best) {
                best = v;
                bj = j;
                bt = t;
            }
        }
    }
    CHECK(bj == g.center());
    CHECK(bt == 11.0);
}

TEST_CASE("two-pulse program") {
    StimulusProgram s;
    s.pulses = {GaussianPulse{2.5, 5.0, 5.0, 10.0}, GaussianPulse{2.6, 5.0, 5.0, 210.0}};
    const double second = 2.6 * std::exp(-200.0 * 200.0 / 50.0);
    CHECK(s.value(0.0, 10.0) == 2.5 + second);
    CHECK(s.value(0.0, 10.0) == doctest::Approx(2.5));
    CHECK(StimulusProgram{}.value(1.0, 3.0) == 0.0);
    StimulusProgram twice;
    twice.pulses = {s.pulses[0], s.pulses[0]};
    CHECK(twice.value(1.5, 12.0) == 2.0 * gaussian_pulse_value(std::get<GaussianPulse>(s.pulses[0]), 1.5, 12.0));
}

TEST_CASE("rectangular pulse is half-open") {
    CHECK(rectangular_pulse_value(10.0, 5.0, 6.0, 5.5) == 10.0);
    CHECK(rectangular_pulse_value(10.0, 5.0, 6.0, 5.0) == 10.0);
    CHECK(rectangular_pulse_value(10.0, 5.0, 6.0, 6.0) == 0.0);
    CHECK(rectangular_pulse_value(10.0, 5.0, 6.0, 4.0) == 0.0);
    CHECK_THROWS_AS(rectangular_pulse_value(1.0, 6.0, 6.0, 6.0), ValidationError);
}

TEST_CASE("program validation and warnings") {
    StimulusProgram s;
    s.pulses = {RectangularPulse{1.0, 3.0, 2.0}, GaussianPulse{1.0, -1.0, 1.0, 0.0}};
    CHECK(s.validate().size() == 2);
    StimulusProgram late;
    late.pulses = {GaussianPulse{1.0, 1.0, 5.0, 98.0}};
    CHECK(late.validate().empty());
    CHECK(late.warnings(0.0, 100.0).size() == 1);
    CHECK(late.warnings(0.0, 200.0).empty());
}

TEST_CASE("scaling and amplitude access") {
    StimulusProgram s;
    s.pulses = {GaussianPulse{2.0, 1.0, 1.0, 5.0}, RectangularPulse{3.0, 0.0, 1.0}};
    const auto h = s.scaled(0.5);
    CHECK(pulse_amplitude(h.pulses[0]) == 1.0);
    CHECK(pulse_amplitude(h.pulses[1]) == 1.5);
    pulse_amplitude(s.pulses[1]) = 7.0;
    CHECK(s.value(0.0, 0.5) == doctest::Approx(7.0 + 2.0 * std::exp(-12.5)));
}

TEST_CASE("field evaluation agrees bitwise with the pointwise formula") {
    StimulusProgram s;
    s.pulses = {GaussianPulse{0.14, 10.0, 5.0, 10.0}, GaussianPulse{0.15, 10.0, 5.0, 30.0},
                RectangularPulse{0.3, 2.0, 4.0}};
    const auto g = SpatialGrid::make(25.0, 201);
    StimulusField f(s, g);
    std::vector<double> out(g.size());
    for (double t : {0.0, 3.0, 10.0, 29.99, 33.0}) {
        f.evaluate(t, out);
        for (std::size_t j = 0; j < g.size(); ++j) REQUIRE(out[j] == s.value(g.x(j), t));
    }
}

TEST_CASE("targets") {
    StimulusProgram s;
    s.target = StimulusTarget::excitatory;
    const auto g = SpatialGrid::make(1.0, 3);
    CHECK(StimulusField(s, g).targets(StimulusTarget::excitatory));
    CHECK_FALSE(StimulusField(s, g).targets(StimulusTarget::inhibitory));
    s.target = StimulusTarget::both;
    CHECK(StimulusField(s, g).targets(StimulusTarget::inhibitory));
    for (auto t : {StimulusTarget::excitatory, StimulusTarget::inhibitory, StimulusTarget::both, StimulusTarget::point}) {
        CHECK(stimulus_target_from_string(to_string(t)) == t);
    }
}
