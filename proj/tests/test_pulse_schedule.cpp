// Copyright 2026 The lataddr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lataddr/errors.hpp"
#include "lataddr/pulse_schedule.hpp"
#include "lataddr/quantum_core.hpp"
#include "test_support.hpp"

using namespace lataddr;
using lataddr::testing::uniform;
using lataddr::testing::uniform_int;

namespace {
constexpr double kPi = std::numbers::pi;

LatticeConfig lattice_with_reach(std::int64_t reach) {
    LatticeConfig l;
    l.site_count = 3 * (reach + 1);
    l.reach = reach;
    return l;
}
} // namespace

TEST_CASE("gaussian pair peaks and signs") {
    const GaussianPair p{};
    CHECK(sample_pair(p, p.center_b).b == -p.peak);
    CHECK(sample_pair(p, p.center_q).q == p.peak);
    CHECK(sample_pair(p, p.center_b + p.width).b ==
          doctest::Approx(-p.peak / std::exp(1.0)).epsilon(1e-15));
    CHECK(sample_pair(p, p.center_q - p.width).q ==
          doctest::Approx(p.peak / std::exp(1.0)).epsilon(1e-15));
}

TEST_CASE("gaussian pair is truncated at the cutoff") {
    const GaussianPair p{};
    const double r = p.cutoff_widths * p.width;
    CHECK(sample_pair(p, p.center_b + r * 1.0001).b == 0.0);
    CHECK(sample_pair(p, p.center_q - r * 1.0001).q == 0.0);
    CHECK(sample_pair(p, p.center_b + r * 0.9999).b != 0.0);
    const TimeWindow w = support(p);
    CHECK(w.start == doctest::Approx(-20.0));
    CHECK(w.end == doctest::Approx(26.0));
    CHECK(breakpoints(p) == std::vector<double>{-20.0, -14.0, 20.0, 26.0});
}

TEST_CASE("amplitude scaling is exact") {
    for (int trial = 0; trial < 1000; ++trial) {
        GaussianPair p{};
        p.peak = uniform(0.1, 50.0);
        const double c = std::ldexp(1.0, static_cast<int>(uniform_int(-4, 4)));
        GaussianPair scaled = p;
        scaled.peak = c * p.peak;
        const double t = uniform(-25.0, 30.0);
        CHECK(sample_pair(scaled, t).b == c * sample_pair(p, t).b);
        CHECK(sample_pair(scaled, t).q == c * sample_pair(p, t).q);
    }
}

TEST_CASE("pulse ratio does not depend on the peak") {
    for (int trial = 0; trial < 500; ++trial) {
        GaussianPair p{};
        p.peak = uniform(0.1, 50.0);
        const double t = uniform(-14.0, 20.0);
        const PulseSample s = sample_pair(p, t);
        const double expected =
            -std::exp(-((t - p.center_b) * (t - p.center_b) - (t - p.center_q) * (t - p.center_q)) /
                      (p.width * p.width));
        CHECK(s.b / s.q == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("reversed pair swaps the pulse order") {
    const GaussianPair p{};
    const GaussianPair r = reversed(p);
    CHECK(r.center_b == p.center_q);
    CHECK(r.center_q == p.center_b);
    CHECK(sample_pair(r, 0.0).b == -p.peak);
}

TEST_CASE("square pair") {
    const SquarePair p{-3.0, 4.0, 1.0, 2.0};
    const PulseSchedule schedule = p;
    CHECK(sample(schedule, 0.5).b == 0.0);
    CHECK(sample(schedule, 1.0).b == -3.0);
    CHECK(sample(schedule, 2.9).q == 4.0);
    CHECK(sample(schedule, 3.0).q == 0.0);
    CHECK(breakpoints(schedule) == std::vector<double>{1.0, 3.0});
}

TEST_CASE("stark rotation angle") {
    ManipulationBeam beam;
    beam.rabi = 0.0;
    beam.duration = 5.0;
    CHECK(stark_rotation_angle(beam) == 0.0);
    beam.rabi = 2.0;
    beam.detuning = 8.0;
    beam.duration = 2.0;
    CHECK(stark_rotation_angle(beam) == 1.0);
    beam.rabi = 10.0;
    beam.detuning = 100.0;
    beam.duration = kPi;
    CHECK(stark_rotation_angle(beam) == doctest::Approx(kPi).epsilon(1e-15));
    beam.detuning = 0.0;
    CHECK_THROWS_AS(stark_rotation_angle(beam), std::invalid_argument);
}

TEST_CASE("stark duration inverts the rotation angle") {
    ManipulationBeam beam;
    for (int trial = 0; trial < 200; ++trial) {
        beam.rabi = uniform(1.0, 20.0);
        beam.detuning = uniform(100.0, 2000.0) * (trial % 2 == 0 ? 1.0 : -1.0);
        const double angle = uniform(0.0, 2.0 * kPi);
        beam.duration = stark_duration_for_angle(beam, angle);
        CHECK(beam.duration >= 0.0);
        const double got = stark_rotation_angle(beam);
        const double diff = std::remainder(got - angle, 2.0 * kPi);
        CHECK(std::abs(diff) < 1e-12);
    }
}

TEST_CASE("beam envelope") {
    ManipulationBeam beam;
    beam.center = 4;
    beam.reach = 3;
    CHECK(beam_envelope(beam, 4) == 1.0);
    CHECK(beam_envelope(beam, 4 + 4) == 0.0);
    CHECK(beam_envelope(beam, 4 - 4) == 0.0);
    beam.waist = 1.0;
    CHECK(beam_envelope(beam, 5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    beam.waist = 0.0;
    CHECK(beam.effective_waist() == 1.5);
}

TEST_CASE("dispersive regime check") {
    ManipulationBeam beam;
    CHECK(beam.dispersive_regime());
    beam.detuning = 50.0;
    CHECK_FALSE(beam.dispersive_regime());
}

TEST_CASE("two-photon coupling") {
    CHECK(raman_effective_rabi(0.0, 10.0, 100.0) == 0.0);
    CHECK(raman_effective_rabi(10.0, 0.0, 100.0) == 0.0);
    CHECK(raman_effective_rabi(10.0, 10.0, 100.0) == 1.0);
    CHECK(raman_effective_rabi(-10.0, 10.0, 100.0) == -1.0);
    CHECK_THROWS_AS(raman_effective_rabi(1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("uniform two-photon coupling only for reach up to two") {
    for (std::int64_t reach = 1; reach <= 20; ++reach) {
        CHECK(raman_uniformity_check(lattice_with_reach(reach)) == (reach <= 2));
    }
    CHECK(std::pow(std::sin(kPi / 3), 2) == doctest::Approx(0.75));
    CHECK_THROWS_AS(raman_pi_pulse(lattice_with_reach(3), 20.0, 20.0, 100.0), GeometryError);
}

TEST_CASE("raman pi pulse moves b fully into q on every non-node site") {
    for (std::int64_t reach : {1, 2}) {
        const LatticeConfig l = lattice_with_reach(reach);
        const double peak = 20.0 / std::abs(site_factor(1, l));
        const SquarePair pulse = raman_pi_pulse(l, peak, peak, 400.0);
        for (std::int64_t s = 1; s <= reach; ++s) {
            SiteHamiltonianSpec spec = SiteHamiltonianSpec::uniform(site_factor(s, l), pulse, 400.0, 0.0);
            IntegratorConfig cfg;
            cfg.rel_tol = 1e-10;
            cfg.abs_tol = 1e-12;
            cfg.max_step = 0.01;
            const AtomState out = evolve_over_pulses(AtomState::basis(Level::b), spec, cfg);
            // Far off resonance the excited level stays nearly empty; the
            // remainder is the dispersive correction of order (Omega/Delta)^2.
            CHECK(std::norm(out[Level::q]) > 0.99);
        }
    }
}

TEST_CASE("the longer pulse returns b to itself") {
    // A duration of pi / |coupling| is a full two-photon cycle, not a transfer.
    const LatticeConfig l = lattice_with_reach(1);
    SquarePair pulse = raman_pi_pulse(l, 20.0, 20.0, 400.0);
    pulse.duration *= 2.0;
    const SiteHamiltonianSpec spec = SiteHamiltonianSpec::uniform(1.0, pulse, 400.0, 0.0);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    const AtomState out = evolve_over_pulses(AtomState::basis(Level::b), spec, cfg);
    CHECK(std::norm(out[Level::q]) < 0.01);
    CHECK(std::norm(out[Level::b]) > 0.99);
}

TEST_CASE("validation") {
    GaussianPair p{};
    p.width = 0.0;
    CHECK_THROWS(p.validate());
    p = GaussianPair{};
    p.peak = -1.0;
    CHECK_THROWS(p.validate());
}
