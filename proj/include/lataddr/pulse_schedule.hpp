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
 * Drive amplitudes for the quench fields and the focused manipulation beam.
 *
 * Frequencies are in units of gamma_q and times in 1/gamma_q. The "b" channel
 * drives |b> <-> |e_q> (Omega_1), the "q" channel drives |q> <-> |e_q>
 * (Omega_2).
 */

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "lataddr/field_geometry.hpp"

namespace lataddr {

/// Signed amplitudes of the two quench channels at one instant.
struct PulseSample {
    double b = 0.0; ///< Omega_1(t)
    double q = 0.0; ///< Omega_2(t)
};

/// Omega_i(t) = (-1)^i Omega_0 exp[-(t - t_i)^2 / width^2], zero beyond
/// cutoff_widths * width from each centre.
///
/// The defaults put the q-channel pulse first (counterintuitive order for the
/// b -> q transfer) with t_b - t_q = 6 and width 5.
struct GaussianPair {
    double peak = 20.0;          ///< Omega_0 >= 0
    double center_b = 6.0;       ///< t_1
    double center_q = 0.0;       ///< t_2
    double width = 5.0;          ///< delta_t > 0
    double cutoff_widths = 4.0;  ///< truncation radius in units of width

    void validate() const;
};

/// Constant-amplitude pair switched on over [start, start + duration).
struct SquarePair {
    double amplitude_b = 0.0;
    double amplitude_q = 0.0;
    double start = 0.0;
    double duration = 0.0;
};

using PulseSchedule = std::variant<GaussianPair, SquarePair>;

PulseSample sample_pair(const GaussianPair &pulses, double t);
PulseSample sample(const PulseSchedule &schedule, double t);

struct TimeWindow {
    double start = 0.0;
    double end = 0.0;
};

/// Support of the schedule; amplitudes are exactly zero outside it.
TimeWindow support(const PulseSchedule &schedule);

/// Instants where an amplitude switches on or off, sorted, inside support().
/// Integrators restart there instead of stepping across a kink.
std::vector<double> breakpoints(const PulseSchedule &schedule);

/// Swaps the pulse centres so the b-channel pulse comes first.
GaussianPair reversed(const GaussianPair &pulses);

/// Focused beam on |b> <-> |e_m> used for the AC-Stark z rotation.
struct ManipulationBeam {
    double rabi = 10.0;       ///< Omega_m2, units of gamma_m
    double detuning = 1000.0; ///< Delta_m
    double decay = 0.1;       ///< gamma_m
    double duration = 0.0;    ///< Delta t
    std::int64_t center = 0;  ///< beam centre k
    std::int64_t reach = 1;   ///< hard cutoff: no effect for |s - k| > L
    double waist = 0.0;       ///< Gaussian waist in d_l; <= 0 selects L / 2

    double effective_waist() const;

    /// Delta_m >> |Omega_m2| >> gamma_m, each by at least `ratio`.
    bool dispersive_regime(double ratio = 10.0) const;
};

/// |Omega_m2|^2 Delta t / Delta_m. Throws std::invalid_argument if Delta_m = 0.
double stark_rotation_angle(const ManipulationBeam &beam);

/// Pulse duration that produces `angle` with the beam's Rabi frequency and
/// detuning. Angles are taken modulo 2 pi into [0, 2 pi).
double stark_duration_for_angle(const ManipulationBeam &beam, double angle);

/// exp[-(s - k)^2 / w^2] for |s - k| <= L, exactly 0 beyond.
double beam_envelope(const ManipulationBeam &beam, std::int64_t s);

/// Two-photon Rabi frequency Omega_q1 Omega_q2 / Delta_q.
double raman_effective_rabi(double rabi_b, double rabi_q, double detuning);

/// True iff sin^2(phi_s) is one value over all non-node sites, i.e. a single
/// Raman pi pulse transfers every non-node site at once.
bool raman_uniformity_check(const LatticeConfig &lattice);

/// Square Raman pulse that carries |b> fully to |q> on every non-node site.
///
/// The peaks are the standing-wave maxima; each site sees them scaled by its
/// coupling factor. Throws GeometryError when the non-node couplings are not
/// uniform (L > 2).
SquarePair raman_pi_pulse(const LatticeConfig &lattice, double peak_b, double peak_q,
                          double detuning, double start = 0.0);

} // namespace lataddr
