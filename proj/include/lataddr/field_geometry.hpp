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
 * Standing-wave geometry along a 1D lattice axis.
 *
 * All lengths are in units of the lattice spacing d_l, all angles in radians.
 * Site s sits at x = s, the target site k at x = k. A standing wave with
 * spatial period P and relative phase offset phi couples site s with the
 * factor exp(-eta^2/2) * sin(2 pi (s - k) / P + phi). When P = 2(L+1) and
 * phi = 0 the nodes land exactly on the sublattice S = {k + (L+1) n}.
 */

#pragma once

#include <cstdint>
#include <vector>

namespace lataddr {

/// One standing-wave field formed by two plane waves tilted by +/- tilt_angle.
struct StandingWaveConfig {
    double wavelength = 10.0;    ///< lambda_qi, units of d_l
    double tilt_angle = 0.0;     ///< theta_qi in [0, pi/2)
    double relative_phase = 0.0; ///< node offset; 0 registers a node on site k
    double peak_rabi = 0.0;      ///< Omega_0, units of gamma_q

    /// Throws GeometryError if the wavelength or angle is out of range.
    void validate() const;
};

struct LatticeConfig {
    std::int64_t site_count = 10;  ///< N
    std::int64_t target_site = 0;  ///< k, in [0, N)
    std::int64_t reach = 4;        ///< L >= 1
    double lamb_dicke = 0.0;       ///< eta >= 0

    void validate() const;

    /// Sublattice period L + 1.
    std::int64_t stride() const { return reach + 1; }

    /// Standing-wave period required for nodes on S: 2 (L + 1) d_l.
    double commensurate_period() const { return 2.0 * static_cast<double>(stride()); }

    /// True iff (s - k) mod (L + 1) == 0. Defined for every integer s.
    bool in_sublattice(std::int64_t s) const;

    /// S_L^(k) restricted to [0, N), ascending.
    std::vector<std::int64_t> sublattice() const;
};

double spatial_period(const StandingWaveConfig &wave);

/// Tilt angle that makes lambda / cos(theta) = 2 (L + 1). Throws GeometryError
/// when lambda exceeds 2 (L + 1) d_l.
double commensurate_angle(double wavelength, std::int64_t reach);

/// Convenience: a zero-offset wave at the commensurate angle for `lattice`.
StandingWaveConfig commensurate_wave(double wavelength, const LatticeConfig &lattice,
                                     double peak_rabi);

/// phi_s = pi (s - k) / (L + 1).
double site_phase(std::int64_t s, const LatticeConfig &lattice);

/// exp(-eta^2/2) sin(phi_s), exactly zero on the sublattice.
double site_factor(std::int64_t s, const LatticeConfig &lattice);

double effective_rabi(std::int64_t s, const LatticeConfig &lattice, double peak_rabi);

/// Coupling factor of an arbitrary (possibly misaligned) wave at site s.
/// Reduces to site_factor() bit-for-bit when the wave is exactly commensurate
/// with zero offset.
double wave_site_factor(std::int64_t s, const LatticeConfig &lattice,
                        const StandingWaveConfig &wave);

/// Peak amplitude Omega_0 that gives |Omega_q^(k+1)| = neighbour_peak.
double calibrated_peak_rabi(const LatticeConfig &lattice, double neighbour_peak);

/// Node placement of one wave relative to a sublattice site.
struct NodeSite {
    std::int64_t site = 0;
    double displacement_b = 0.0; ///< nearest node of the b-coupling wave minus site
    double displacement_q = 0.0;
};

struct NodeViolation {
    enum class Kind { DisplacedNode, SpuriousNode };
    Kind kind = Kind::DisplacedNode;
    std::int64_t site = 0;
    double magnitude = 0.0; ///< |displacement| or |coupling factor|
};

struct NodeReport {
    std::vector<NodeSite> node_sites;
    std::vector<NodeViolation> violations;
    double period_b = 0.0;
    double period_q = 0.0;
    double period_relative_mismatch = 0.0; ///< |P_b - P_q| / P_q
    bool period_mismatch = false;
    bool commensurability_mismatch = false; ///< either period != 2 (L + 1)
    double phase_difference = 0.0;
    bool phase_mismatch = false;

    bool ok() const {
        return violations.empty() && !period_mismatch && !commensurability_mismatch &&
               !phase_mismatch;
    }
};

/// Checks that both waves share period and nodes, that every s in S sits on
/// a node and that no other site does. `tolerance` applies to displacements
/// (units of d_l), relative period differences and phase differences.
NodeReport validate_node_condition(const LatticeConfig &lattice,
                                   const StandingWaveConfig &wave_b,
                                   const StandingWaveConfig &wave_q,
                                   double tolerance = 1e-9);

/// Delta_d / d_l <= (1/20) sinc(pi / (L + 1)).
double required_node_precision(std::int64_t reach);

/// N tan(theta) dtheta + (L + 1) dphi / pi, in units of d_l.
double worst_case_displacement(std::int64_t site_count, double tilt_angle,
                               double angle_error, double phase_error, std::int64_t reach);

struct PrecisionBudget {
    std::int64_t site_count = 0;
    std::int64_t reach = 0;
    double tilt_angle = 0.0;
    double angle_error = 0.0;
    double phase_error = 0.0;
    double node_displacement = 0.0; ///< worst_case_displacement
    double required_precision = 0.0;
    bool feasible = false;
};

PrecisionBudget evaluate_budget(std::int64_t site_count, double tilt_angle, double angle_error,
                                double phase_error, std::int64_t reach);

struct AsymptoticBudget {
    double lhs = 0.0; ///< (L + 1)(N dtheta + dphi / pi)
    double margin = 0.0;
    bool feasible = false;
};

/// Large-L form with lambda_qi / 2 ~ d_l. The caller owns that regime check.
AsymptoticBudget asymptotic_budget(std::int64_t reach, std::int64_t site_count,
                                   double angle_error, double phase_error);

/// Largest dtheta the asymptotic budget tolerates for a given phase error.
/// Negative when the phase error alone exhausts the budget.
double max_angle_error(std::int64_t reach, std::int64_t site_count, double phase_error);

/// Rabi frequency left at a node site displaced by `displacement` (units of
/// d_l), when the nearest non-node neighbour sees `reference_rabi`.
double residual_rabi_at_node(double displacement, std::int64_t reach, double reference_rabi);

} // namespace lataddr
