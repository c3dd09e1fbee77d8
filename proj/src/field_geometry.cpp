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

#include "lataddr/field_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lataddr/errors.hpp"

namespace lataddr {

namespace {

constexpr double kPi = std::numbers::pi;

// Relative period deviation below which a wave counts as exactly commensurate.
constexpr double kCommensurateTolerance = 1e-10;

std::int64_t floor_mod(std::int64_t value, std::int64_t modulus) {
    const std::int64_t r = value % modulus;
    return r < 0 ? r + modulus : r;
}

// sin(pi * offset / stride) with exact zeros and exact odd symmetry in offset.
double commensurate_sine(std::int64_t offset, std::int64_t stride) {
    const std::int64_t m = floor_mod(offset, stride);
    if (m == 0) {
        return 0.0;
    }
    // offset = n * stride + m; sin picks up (-1)^n, and sin(pi m / stride) is
    // evaluated on min(m, stride - m) so that +offset and -offset agree bitwise.
    const std::int64_t n = (offset - m) / stride;
    const std::int64_t reduced = std::min(m, stride - m);
    const double magnitude =
        std::sin(kPi * static_cast<double>(reduced) / static_cast<double>(stride));
    return (n % 2 == 0) ? magnitude : -magnitude;
}

double debye_waller(const LatticeConfig &lattice) {
    return std::exp(-0.5 * lattice.lamb_dicke * lattice.lamb_dicke);
}

bool is_commensurate(const StandingWaveConfig &wave, const LatticeConfig &lattice) {
    const double period = spatial_period(wave);
    const double target = lattice.commensurate_period();
    return std::abs(period - target) <= kCommensurateTolerance * target;
}

// Unscaled sin(2 pi (s - k) / P + phi) with exact zeros on commensurate nodes.
double wave_sine(std::int64_t s, const LatticeConfig &lattice, const StandingWaveConfig &wave) {
    if (wave.relative_phase == 0.0 && is_commensurate(wave, lattice)) {
        return commensurate_sine(s - lattice.target_site, lattice.stride());
    }
    const double arg =
        2.0 * kPi * static_cast<double>(s - lattice.target_site) / spatial_period(wave) +
        wave.relative_phase;
    return std::sin(arg);
}

// Nearest-node position minus site position for a wave, units of d_l.
double node_displacement(std::int64_t s, const LatticeConfig &lattice,
                         const StandingWaveConfig &wave) {
    if (wave.relative_phase == 0.0 && is_commensurate(wave, lattice) && lattice.in_sublattice(s)) {
        return 0.0;
    }
    const double period = spatial_period(wave);
    const double arg =
        2.0 * kPi * static_cast<double>(s - lattice.target_site) / period + wave.relative_phase;
    const double n = std::round(arg / kPi);
    return (n * kPi - arg) * period / (2.0 * kPi);
}

} // namespace

void StandingWaveConfig::validate() const {
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
        throw GeometryError("standing wave: wavelength must be positive and finite");
    }
    if (!(tilt_angle >= 0.0 && tilt_angle < kPi / 2.0)) {
        throw GeometryError("standing wave: tilt angle must lie in [0, pi/2)");
    }
    if (!std::isfinite(spatial_period(*this))) {
        throw GeometryError("standing wave: spatial period is not finite");
    }
    if (!(peak_rabi >= 0.0)) {
        throw GeometryError("standing wave: peak Rabi frequency must be >= 0");
    }
}

void LatticeConfig::validate() const {
    if (site_count < 1) {
        throw GeometryError("lattice: site count must be >= 1");
    }
    if (reach < 1) {
        throw GeometryError("lattice: reach L must be >= 1");
    }
    if (target_site < 0 || target_site >= site_count) {
        throw GeometryError("lattice: target site must lie in [0, N)");
    }
    if (!(lamb_dicke >= 0.0)) {
        throw GeometryError("lattice: Lamb-Dicke parameter must be >= 0");
    }
}

bool LatticeConfig::in_sublattice(std::int64_t s) const {
    return floor_mod(s - target_site, stride()) == 0;
}

std::vector<std::int64_t> LatticeConfig::sublattice() const {
    std::vector<std::int64_t> sites;
    for (std::int64_t s = floor_mod(target_site, stride()); s < site_count; s += stride()) {
        sites.push_back(s);
    }
    return sites;
}

double spatial_period(const StandingWaveConfig &wave) {
    return wave.wavelength / std::cos(wave.tilt_angle);
}

double commensurate_angle(double wavelength, std::int64_t reach) {
    if (reach < 1) {
        throw GeometryError("commensurate angle: reach L must be >= 1");
    }
    const double period = 2.0 * static_cast<double>(reach + 1);
    if (!(wavelength > 0.0)) {
        throw GeometryError("commensurate angle: wavelength must be positive");
    }
    if (wavelength > period) {
        throw GeometryError("commensurate angle: wavelength " + std::to_string(wavelength) +
                            " exceeds 2(L+1) d_l = " + std::to_string(period) +
                            "; no real tilt angle");
    }
    return std::acos(wavelength / period);
}

StandingWaveConfig commensurate_wave(double wavelength, const LatticeConfig &lattice,
                                     double peak_rabi) {
    StandingWaveConfig wave;
    wave.wavelength = wavelength;
    wave.tilt_angle = commensurate_angle(wavelength, lattice.reach);
    wave.relative_phase = 0.0;
    wave.peak_rabi = peak_rabi;
    return wave;
}

double site_phase(std::int64_t s, const LatticeConfig &lattice) {
    return kPi * static_cast<double>(s - lattice.target_site) /
           static_cast<double>(lattice.stride());
}

double site_factor(std::int64_t s, const LatticeConfig &lattice) {
    return debye_waller(lattice) * commensurate_sine(s - lattice.target_site, lattice.stride());
}

double effective_rabi(std::int64_t s, const LatticeConfig &lattice, double peak_rabi) {
    return site_factor(s, lattice) * peak_rabi;
}

double wave_site_factor(std::int64_t s, const LatticeConfig &lattice,
                        const StandingWaveConfig &wave) {
    return debye_waller(lattice) * wave_sine(s, lattice, wave);
}

double calibrated_peak_rabi(const LatticeConfig &lattice, double neighbour_peak) {
    const double factor = std::abs(site_factor(lattice.target_site + 1, lattice));
    if (factor == 0.0) {
        throw GeometryError("calibration: neighbour site has zero coupling");
    }
    return neighbour_peak / factor;
}

NodeReport validate_node_condition(const LatticeConfig &lattice,
                                   const StandingWaveConfig &wave_b,
                                   const StandingWaveConfig &wave_q, double tolerance) {
    NodeReport report;
    report.period_b = spatial_period(wave_b);
    report.period_q = spatial_period(wave_q);
    report.period_relative_mismatch =
        std::abs(report.period_b - report.period_q) / report.period_q;
    report.period_mismatch = report.period_relative_mismatch > tolerance;
    const double target = lattice.commensurate_period();
    report.commensurability_mismatch =
        std::abs(report.period_b - target) > tolerance * target ||
        std::abs(report.period_q - target) > tolerance * target;
    report.phase_difference = wave_q.relative_phase - wave_b.relative_phase;
    report.phase_mismatch = std::abs(report.phase_difference) > tolerance;

    for (std::int64_t s = 0; s < lattice.site_count; ++s) {
        if (lattice.in_sublattice(s)) {
            NodeSite node{s, node_displacement(s, lattice, wave_b),
                          node_displacement(s, lattice, wave_q)};
            const double worst = std::max(std::abs(node.displacement_b),
                                          std::abs(node.displacement_q));
            if (worst > tolerance) {
                report.violations.push_back({NodeViolation::Kind::DisplacedNode, s, worst});
            }
            report.node_sites.push_back(node);
        } else {
            const double weakest = std::min(std::abs(wave_sine(s, lattice, wave_b)),
                                            std::abs(wave_sine(s, lattice, wave_q)));
            if (weakest <= tolerance) {
                report.violations.push_back({NodeViolation::Kind::SpuriousNode, s, weakest});
            }
        }
    }
    return report;
}

double required_node_precision(std::int64_t reach) {
    if (reach < 1) {
        throw GeometryError("required node precision: reach L must be >= 1");
    }
    const double x = kPi / static_cast<double>(reach + 1);
    return std::sin(x) / x / 20.0;
}

double worst_case_displacement(std::int64_t site_count, double tilt_angle, double angle_error,
                               double phase_error, std::int64_t reach) {
    if (!(tilt_angle < kPi / 2.0)) {
        throw GeometryError("worst-case displacement: tilt angle must be below pi/2");
    }
    return static_cast<double>(site_count) * std::tan(tilt_angle) * angle_error +
           static_cast<double>(reach + 1) * phase_error / kPi;
}

PrecisionBudget evaluate_budget(std::int64_t site_count, double tilt_angle, double angle_error,
                                double phase_error, std::int64_t reach) {
    if (angle_error < 0.0 || phase_error < 0.0) {
        throw GeometryError("precision budget: errors must be >= 0");
    }
    PrecisionBudget budget;
    budget.site_count = site_count;
    budget.reach = reach;
    budget.tilt_angle = tilt_angle;
    budget.angle_error = angle_error;
    budget.phase_error = phase_error;
    budget.node_displacement =
        worst_case_displacement(site_count, tilt_angle, angle_error, phase_error, reach);
    budget.required_precision = required_node_precision(reach);
    budget.feasible = budget.node_displacement <= budget.required_precision;
    return budget;
}

AsymptoticBudget asymptotic_budget(std::int64_t reach, std::int64_t site_count,
                                   double angle_error, double phase_error) {
    AsymptoticBudget out;
    out.lhs = static_cast<double>(reach + 1) *
              (static_cast<double>(site_count) * angle_error + phase_error / kPi);
    out.margin = 1.0 / 20.0 - out.lhs;
    out.feasible = out.lhs <= 1.0 / 20.0;
    return out;
}

double max_angle_error(std::int64_t reach, std::int64_t site_count, double phase_error) {
    return (1.0 / (20.0 * static_cast<double>(reach + 1)) - phase_error / kPi) /
           static_cast<double>(site_count);
}

double residual_rabi_at_node(double displacement, std::int64_t reach, double reference_rabi) {
    if (std::abs(displacement) > 0.5) {
        throw std::domain_error("residual Rabi: displacement must satisfy |dd| <= d_l / 2");
    }
    const double stride = static_cast<double>(reach + 1);
    return reference_rabi * std::abs(std::sin(kPi * displacement / stride)) /
           std::sin(kPi / stride);
}

} // namespace lataddr
