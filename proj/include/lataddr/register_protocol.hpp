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
 * Dense N-site register with three ground levels per site and the
 * addressing protocols built from quench / manipulate / inverse quench.
 *
 * Basis index: sum_s level(s) * 3^s with a = 0, b = 1, q = 2, so site 0 is
 * the fastest-varying digit. Unoccupied sites stay pinned to digit 0 and are
 * skipped by every operation.
 *
 * The amplitude vector is not renormalized after losses: its squared norm
 * plus norm_deficit() stays 1. conditional_state() gives the normalized
 * state conditioned on no loss.
 */

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lataddr/field_geometry.hpp"
#include "lataddr/pulse_schedule.hpp"
#include "lataddr/quantum_core.hpp"
#include "lataddr/stirap_engine.hpp"

namespace lataddr {

inline constexpr std::int64_t kMaxRegisterSites = 12;

enum class SiteLevel : std::size_t { a = 0, b = 1, q = 2 };

using SiteVector = std::array<complex, 3>;

inline SiteVector site_basis(SiteLevel level) {
    SiteVector v{};
    v[static_cast<std::size_t>(level)] = 1.0;
    return v;
}

class LatticeRegister {
  public:
    /// Product state from per-site vectors (each normalized on entry).
    /// `occupancy` defaults to all sites filled; an empty site ignores its
    /// vector. Throws std::invalid_argument on bad sizes or N outside [1, 12].
    static LatticeRegister product(std::span<const SiteVector> sites,
                                   std::vector<bool> occupancy = {});

    /// Every site in the same state.
    static LatticeRegister uniform(std::int64_t site_count, const SiteVector &site);

    std::int64_t site_count() const { return site_count_; }
    std::size_t dimension() const { return amplitudes_.size(); }
    bool occupied(std::int64_t s) const { return occupancy_.at(static_cast<std::size_t>(s)); }
    const std::vector<bool> &occupancy() const { return occupancy_; }

    std::span<const complex> amplitudes() const { return amplitudes_; }
    complex amplitude(std::size_t index) const { return amplitudes_[index]; }

    double norm_squared() const;
    double norm_deficit() const { return norm_deficit_; }

    /// Amplitudes divided by the norm.
    std::vector<complex> conditional_state() const;

    /// Level digit of site s in basis index `index`.
    static std::size_t digit(std::size_t index, std::int64_t s);

    /// Unconditional population of `level` on site s (divide by
    /// norm_squared() for the conditional value).
    double population(std::int64_t s, SiteLevel level) const;

    /// Reduced density matrix of site s, normalized to trace 1.
    Eigen::Matrix3cd reduced_density(std::int64_t s) const;

    /// Applies a 3x3 operator to site s (skipped for an empty site).
    /// Any loss of norm is booked into norm_deficit.
    void apply_site(std::int64_t s, const Eigen::Matrix3cd &op);

    /// Multiplies every amplitude by phase(index).
    template <class PhaseFn> void apply_diagonal(PhaseFn &&phase) {
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            amplitudes_[i] *= phase(i);
        }
    }

    /// Multiplies the whole state by a global phase.
    void apply_global_phase(double angle);

    /// Keeps only basis states for which keep(index) holds and rescales the
    /// survivors to the previous norm. Returns the kept fraction of weight.
    template <class Pred> double project(Pred &&keep) {
        const double before = norm_squared();
        double kept = 0.0;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (keep(i)) {
                kept += std::norm(amplitudes_[i]);
            } else {
                amplitudes_[i] = 0.0;
            }
        }
        if (kept > 0.0) {
            const double scale = std::sqrt(before / kept);
            for (auto &z : amplitudes_) z *= scale;
        }
        return before > 0.0 ? kept / before : 0.0;
    }

    /// Removes basis states failing keep(index) and books their weight as loss.
    template <class Pred> double discard(Pred &&keep) {
        double lost = 0.0;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            if (!keep(i)) {
                lost += std::norm(amplitudes_[i]);
                amplitudes_[i] = 0.0;
            }
        }
        norm_deficit_ += lost;
        return lost;
    }

    /// Directly re-seats the amplitudes (used by tests and deserialization).
    void assign(std::vector<complex> amplitudes, double norm_deficit);

  private:
    LatticeRegister(std::int64_t n, std::vector<complex> amplitudes, std::vector<bool> occupancy)
        : site_count_(n), amplitudes_(std::move(amplitudes)), occupancy_(std::move(occupancy)) {}

    std::int64_t site_count_ = 0;
    std::vector<complex> amplitudes_;
    std::vector<bool> occupancy_;
    double norm_deficit_ = 0.0;
};

enum class OperationMode { ideal, simulated };

/// Per-call diagnostics.
struct StepReport {
    double leakage = 0.0;              ///< norm lost during the call
    double residual_b = 0.0;           ///< max |b> population left on non-node sites after Q
    double neighbour_phase_error = 0.0; ///< population-weighted Stark phase on neighbours
    double pulse_duration = 0.0;       ///< manipulation pulse length, if any
    int quench_pairs = 0;              ///< Q / Q^-1 rounds consumed
};

struct MeasurementResult {
    bool bright = false;
    double bright_probability = 0.0; ///< conditional |b>_k population after Q
    double neighbour_bright_population = 0.0; ///< |b> left on other illuminated sites
    StepReport report;
};

struct EulerAngles {
    double first_z = 0.0;  ///< applied first
    double x = 0.0;
    double second_z = 0.0; ///< applied last
    double global_phase = 0.0;
};

/// U = e^{i global} R_z(second_z) R_x(x) R_z(first_z) for a 2x2 unitary U.
EulerAngles zxz_decomposition(const Eigen::Matrix2cd &unitary);

Eigen::Matrix2cd rz_matrix(double angle);
Eigen::Matrix2cd rx_matrix(double angle);

/// Quench fields, drive and beam shared by all protocol calls. Target site
/// and reach are per call; the site count comes from the register.
struct ProtocolSetup {
    double lamb_dicke = 0.0;
    double neighbour_peak = 20.0; ///< |Omega_q^(k+1)| the fields are calibrated to
    DriveSettings drive{};
    QuenchMethod method = QuenchMethod::stirap;
    ManipulationBeam beam{};      ///< center/reach are filled per call
    double transfer_phase = kDefaultTransferPhase;
    /// Explicit fields replace the calibrated commensurate ones. They must
    /// still satisfy the node condition for every (k, L) they are used with.
    std::optional<StandingWaveConfig> wave_b;
    std::optional<StandingWaveConfig> wave_q;
};

/// Runs the addressing protocols on a register. Simulated site maps are
/// cached per (site factor, direction); the cache is guarded so one instance
/// can serve several threads.
class AddressingProtocol {
  public:
    explicit AddressingProtocol(ProtocolSetup setup = {});

    const ProtocolSetup &setup() const { return setup_; }

    StepReport quench(LatticeRegister &reg, std::int64_t k, std::int64_t reach,
                      OperationMode mode) const;
    StepReport inverse_quench(LatticeRegister &reg, std::int64_t k, std::int64_t reach,
                              OperationMode mode) const;

    /// exp(-i alpha sigma_z / 2) on site k, sigma_z = |a><a| - |b><b|.
    StepReport rotate_z(LatticeRegister &reg, std::int64_t k, std::int64_t reach, double angle,
                        OperationMode mode) const;

    /// exp(-i beta sigma_x / 2) on site k via H_C R_z H_C.
    StepReport rotate_x(LatticeRegister &reg, std::int64_t k, std::int64_t reach, double angle,
                        OperationMode mode) const;

    /// Arbitrary single-qubit unitary through a Z-X-Z sequence. Zero-angle
    /// stages are skipped, so at most three quench pairs are used.
    StepReport rotate(LatticeRegister &reg, std::int64_t k, std::int64_t reach,
                      const Eigen::Matrix2cd &unitary, OperationMode mode) const;

    /// Fluorescence readout of site k. Projective; deterministic for a seed.
    MeasurementResult measure(LatticeRegister &reg, std::int64_t k, std::int64_t reach,
                              std::uint64_t seed, OperationMode mode) const;

    /// C_L^(k) = prod over s in S of (|a><a|_s + |b><b|_s sigma_z^(s+1)).
    /// Throws GeometryError if some s + 1 falls outside the register.
    StepReport collective_cphase(LatticeRegister &reg, std::int64_t k, std::int64_t reach,
                                 OperationMode mode) const;

    /// C, R_x^(k+1)(-alpha/2), C.
    StepReport controlled_rotation(LatticeRegister &reg, std::int64_t k, std::int64_t reach,
                                   double angle, OperationMode mode) const;

    /// Geometry used for (k, L) on an N-site register.
    QuenchSetup quench_setup(std::int64_t site_count, std::int64_t k, std::int64_t reach) const;

    /// Site map for one site in simulated mode (cached).
    SiteMap simulated_site_map(const QuenchSetup &setup, std::int64_t s,
                               QuenchDirection direction) const;

  private:
    StepReport apply_quench(LatticeRegister &reg, std::int64_t k, std::int64_t reach,
                            OperationMode mode, QuenchDirection direction) const;

    ProtocolSetup setup_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::tuple<double, double, int>, SiteMap> cache_;
};

/// Global Hadamard (sigma_x + sigma_z)/sqrt2 on the {a, b} subspace of every
/// occupied site; |q> is untouched.
void collective_hadamard(LatticeRegister &reg);

/// Occupancy after preparing all |b>, quenching with (k, L) and releasing
/// every atom left in |q>. Runs per site, so N is not capped.
std::vector<bool> pattern_load(std::int64_t site_count, std::int64_t k, std::int64_t reach);

enum class PumpMode { deterministic, trajectory };

struct PumpReport {
    double leakage = 0.0;       ///< deterministic: q weight removed
    double pumped_weight = 0.0; ///< trajectory: q population met, summed over sites
    std::vector<std::int64_t> pumped_sites;
};

/// Clears residual |q> population. Deterministic mode discards it as loss;
/// trajectory mode samples, per occupied site, whether the atom was in |q>
/// and if so moves it to `pump_target` incoherently.
PumpReport optical_pump(LatticeRegister &reg, std::uint64_t seed, PumpMode mode,
                        SiteLevel pump_target = SiteLevel::a);

/// Independent, reproducible random stream for trial `index` under `seed`.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index);

} // namespace lataddr
