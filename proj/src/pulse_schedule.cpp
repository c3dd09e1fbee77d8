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

#include "lataddr/pulse_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lataddr/errors.hpp"

namespace lataddr {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

double gaussian(double t, double center, double width, double cutoff_widths) {
    const double x = (t - center) / width;
    if (std::abs(x) > cutoff_widths) {
        return 0.0;
    }
    return std::exp(-x * x);
}

} // namespace

void GaussianPair::validate() const {
    if (!(width > 0.0)) {
        throw std::invalid_argument("gaussian pair: width must be > 0");
    }
    if (!(peak >= 0.0)) {
        throw std::invalid_argument("gaussian pair: peak must be >= 0");
    }
    if (!(cutoff_widths > 0.0)) {
        throw std::invalid_argument("gaussian pair: cutoff must be > 0");
    }
}

PulseSample sample_pair(const GaussianPair &pulses, double t) {
    return {-pulses.peak * gaussian(t, pulses.center_b, pulses.width, pulses.cutoff_widths),
            pulses.peak * gaussian(t, pulses.center_q, pulses.width, pulses.cutoff_widths)};
}

PulseSample sample(const PulseSchedule &schedule, double t) {
    return std::visit(overloaded{
                          [t](const GaussianPair &p) { return sample_pair(p, t); },
                          [t](const SquarePair &p) {
                              if (t >= p.start && t < p.start + p.duration) {
                                  return PulseSample{p.amplitude_b, p.amplitude_q};
                              }
                              return PulseSample{};
                          },
                      },
                      schedule);
}

TimeWindow support(const PulseSchedule &schedule) {
    return std::visit(overloaded{
                          [](const GaussianPair &p) {
                              const double r = p.cutoff_widths * p.width;
                              return TimeWindow{std::min(p.center_b, p.center_q) - r,
                                                std::max(p.center_b, p.center_q) + r};
                          },
                          [](const SquarePair &p) {
                              return TimeWindow{p.start, p.start + p.duration};
                          },
                      },
                      schedule);
}

std::vector<double> breakpoints(const PulseSchedule &schedule) {
    std::vector<double> points = std::visit(
        overloaded{
            [](const GaussianPair &p) {
                const double r = p.cutoff_widths * p.width;
                return std::vector<double>{p.center_b - r, p.center_b + r, p.center_q - r,
                                           p.center_q + r};
            },
            [](const SquarePair &p) {
                return std::vector<double>{p.start, p.start + p.duration};
            },
        },
        schedule);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

GaussianPair reversed(const GaussianPair &pulses) {
    GaussianPair out = pulses;
    std::swap(out.center_b, out.center_q);
    return out;
}

double ManipulationBeam::effective_waist() const {
    return waist > 0.0 ? waist : 0.5 * static_cast<double>(reach);
}

bool ManipulationBeam::dispersive_regime(double ratio) const {
    return std::abs(detuning) >= ratio * std::abs(rabi) && std::abs(rabi) >= ratio * decay;
}

double stark_rotation_angle(const ManipulationBeam &beam) {
    if (beam.detuning == 0.0) {
        throw std::invalid_argument("stark rotation: detuning must be nonzero");
    }
    return beam.rabi * beam.rabi * beam.duration / beam.detuning;
}

double stark_duration_for_angle(const ManipulationBeam &beam, double angle) {
    if (beam.detuning == 0.0 || beam.rabi == 0.0) {
        throw std::invalid_argument("stark rotation: detuning and Rabi frequency must be nonzero");
    }
    // Negative detuning turns the shift around; fold the sign into the angle.
    double wrapped = std::fmod(angle * (beam.detuning > 0.0 ? 1.0 : -1.0), 2.0 * kPi);
    if (wrapped < 0.0) {
        wrapped += 2.0 * kPi;
    }
    return wrapped * std::abs(beam.detuning) / (beam.rabi * beam.rabi);
}

double beam_envelope(const ManipulationBeam &beam, std::int64_t s) {
    const std::int64_t offset = s - beam.center;
    if (offset > beam.reach || offset < -beam.reach) {
        return 0.0;
    }
    const double x = static_cast<double>(offset) / beam.effective_waist();
    return std::exp(-x * x);
}

double raman_effective_rabi(double rabi_b, double rabi_q, double detuning) {
    if (detuning == 0.0) {
        throw std::invalid_argument("raman: detuning must be nonzero");
    }
    return rabi_b * rabi_q / detuning;
}

bool raman_uniformity_check(const LatticeConfig &lattice) {
    if (lattice.reach < 1) {
        throw GeometryError("raman uniformity: reach L must be >= 1");
    }
    // One representative per residue class m = 1..L covers every non-node site.
    const double first = std::pow(site_factor(lattice.target_site + 1, lattice), 2);
    for (std::int64_t m = 2; m <= lattice.reach; ++m) {
        const double value = std::pow(site_factor(lattice.target_site + m, lattice), 2);
        if (std::abs(value - first) > 1e-12 * std::max(first, 1e-300)) {
            return false;
        }
    }
    return true;
}

SquarePair raman_pi_pulse(const LatticeConfig &lattice, double peak_b, double peak_q,
                          double detuning, double start) {
    if (!raman_uniformity_check(lattice)) {
        throw GeometryError("raman pi pulse: non-node couplings differ for L > 2");
    }
    const double factor_sq = std::pow(site_factor(lattice.target_site + 1, lattice), 2);
    const double coupling = std::abs(raman_effective_rabi(peak_b, peak_q, detuning)) * factor_sq;
    if (coupling == 0.0) {
        throw std::invalid_argument("raman pi pulse: zero two-photon coupling");
    }
    // The b/q pair couples through the bright combination with eigenvalue
    // splitting 2 * coupling, so full transfer takes pi / (2 * coupling).
    SquarePair pulse;
    pulse.amplitude_b = -std::abs(peak_b);
    pulse.amplitude_q = std::abs(peak_q);
    pulse.start = start;
    pulse.duration = kPi / (2.0 * coupling);
    return pulse;
}

} // namespace lataddr
