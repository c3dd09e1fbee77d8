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

/**
 * @file
 * Adiabatic b -> q transfer on one site: single transfers, fidelity scans over
 * the peak coupling, threshold search, and the per-site quench map on
 * {a, b, q}.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lataddr/field_geometry.hpp"
#include "lataddr/pulse_schedule.hpp"
#include "lataddr/quantum_core.hpp"

namespace lataddr {

/// Phase of the q amplitude after a forward transfer of |b> at the default
/// pulses and a peak coupling of 20 gamma_q. The ideal quench uses it so the
/// ideal and simulated operators agree.
inline constexpr double kDefaultTransferPhase = -0.06149810908421541;

/// Everything besides the peak coupling that enters one transfer.
struct DriveSettings {
    double detuning = 100.0; ///< Delta_q
    double decay = 1.0;      ///< gamma_q
    GaussianPair pulses{};   ///< `peak` is overridden by the caller's coupling
    IntegratorConfig integrator{};
};

/// (|a> + |b>)/sqrt2 and (|a> + |q>)/sqrt2.
AtomState transfer_initial_state();
AtomState transfer_target_state();

struct TransferTargets {
    AtomState initial = transfer_initial_state(); ///< reference for fidelity_initial
    AtomState target = transfer_target_state();
};

struct TransferResult {
    AtomState final_state;
    double fidelity_initial = 0.0; ///< <Psi|rho|Psi>
    double fidelity_target = 0.0;  ///< <Psi'|rho|Psi'>
    double leakage = 0.0;          ///< 1 - survival probability
    double transfer_phase = 0.0;   ///< arg(final q) - arg(initial b); 0 if initial b = 0
};

/// Transfer with peak coupling `peak` = |f Omega_0| on a site with f = 1.
TransferResult simulate_transfer(double peak, const DriveSettings &drive = {},
                                 const AtomState &initial = transfer_initial_state(),
                                 const TransferTargets &targets = {});

/// Same, with the site factor and Omega_0 given separately.
TransferResult simulate_site_transfer(double site_factor, double peak_rabi,
                                      const DriveSettings &drive = {},
                                      const AtomState &initial = transfer_initial_state(),
                                      const TransferTargets &targets = {});

struct CurveSample {
    double peak = 0.0; ///< Omega_q^(s), units of gamma_q
    double fidelity_initial = 0.0;
    double fidelity_target = 0.0;
    double leakage = 0.0;
};

struct FidelityCurve {
    std::vector<CurveSample> samples; ///< strictly increasing in peak

    /// First peak where fidelity_target >= fidelity_initial, by linear
    /// interpolation; empty if the curves never cross.
    std::optional<double> crossing() const;
};

/// Uniform grid of `points` peaks over [peak_min, peak_max]. A degenerate
/// range yields a single sample. Points are integrated in parallel; the
/// result does not depend on the thread count.
FidelityCurve fidelity_scan(double peak_min, double peak_max, std::size_t points,
                            const DriveSettings &drive = {});

/// Smallest peak with fidelity_target >= target_fidelity, linearly
/// interpolated inside the first bracketing interval. Throws
/// std::out_of_range if the curve never reaches the target.
double find_threshold(const FidelityCurve &curve, double target_fidelity);

enum class QuenchDirection { forward, inverse };
enum class QuenchMethod { stirap, raman };

/// Fields, pulses and lattice that define one quench operation.
struct QuenchSetup {
    LatticeConfig lattice{};
    StandingWaveConfig wave_b{};
    StandingWaveConfig wave_q{};
    DriveSettings drive{};
    QuenchMethod method = QuenchMethod::stirap;

    /// Commensurate zero-offset waves with Omega_0 calibrated so that the
    /// neighbour k + 1 sees `neighbour_peak`.
    static QuenchSetup calibrated(const LatticeConfig &lattice, double neighbour_peak = 20.0,
                                  const DriveSettings &drive = {});
};

using SiteOperator = Eigen::Matrix3cd;

struct SiteMap {
    SiteOperator op = SiteOperator::Identity(); ///< columns: images of |a>, |b>, |q>
    double leakage = 0.0; ///< population lost from the transferred input (b forward, q inverse)
};

/// The pulse schedule one site sees, without the site factors.
PulseSchedule quench_schedule(const QuenchSetup &setup, QuenchDirection direction);

/// Operator on {a, b, q} realized at site s, assembled column by column from
/// evolutions of |a>, |b>, |q>. Node sites give the identity exactly.
SiteMap quench_site_map(std::int64_t s, const QuenchSetup &setup,
                        QuenchDirection direction = QuenchDirection::forward);

/// |a><a| + e^{i chi}|q><b| + e^{-i chi}|b><q|, its own inverse.
SiteOperator ideal_quench_operator(double transfer_phase = kDefaultTransferPhase);

} // namespace lataddr
