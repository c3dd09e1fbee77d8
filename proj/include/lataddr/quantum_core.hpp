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
 * Single-site Lambda system {a, b, q, e_q} under the rotating-frame
 * Hamiltonian with spontaneous decay folded into a non-Hermitian energy.
 *
 * Units: gamma_q sets the frequency scale. Frequencies are in gamma_q, times
 * in 1/gamma_q. Decayed population is lost from the state, so the squared
 * norm of an evolved state is the probability that no photon was scattered.
 */

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "lataddr/pulse_schedule.hpp"

namespace lataddr {

using complex = std::complex<double>;

enum class Level : std::size_t { a = 0, b = 1, q = 2, e = 3 };

inline constexpr std::size_t kSiteLevels = 4;

/// Amplitudes over (a, b, q, e_q). May be sub-normalized after decay.
class AtomState {
  public:
    using Amplitudes = std::array<complex, kSiteLevels>;

    AtomState() : amplitudes_{complex{1.0, 0.0}, {}, {}, {}} {}

    static AtomState basis(Level level);

    /// Normalizes the given amplitudes. Throws std::invalid_argument on a zero vector.
    static AtomState normalized(const Amplitudes &amplitudes);

    /// Takes the amplitudes as-is (used for evolved, possibly decayed states).
    static AtomState raw(const Amplitudes &amplitudes);

    complex operator[](Level level) const { return amplitudes_[static_cast<std::size_t>(level)]; }
    const Amplitudes &amplitudes() const { return amplitudes_; }
    std::span<const complex> view() const { return amplitudes_; }

    double norm_squared() const;

  private:
    explicit AtomState(const Amplitudes &amplitudes) : amplitudes_(amplitudes) {}

    Amplitudes amplitudes_;
};

/// Per-site Hamiltonian parameters. The couplings of the two quench fields at
/// this site are factor * Omega_i(t); a node site has both factors zero.
struct SiteHamiltonianSpec {
    double detuning = 100.0; ///< Delta_q
    double decay = 1.0;      ///< gamma_q >= 0
    double factor_b = 1.0;   ///< exp(-eta^2/2) sin(phi_s) seen by the b-channel field
    double factor_q = 1.0;   ///< same for the q-channel field
    PulseSchedule pulses = GaussianPair{};

    static SiteHamiltonianSpec uniform(double site_factor, PulseSchedule pulses,
                                       double detuning = 100.0, double decay = 1.0);

    void validate() const;
};

using Hamiltonian = Eigen::Matrix4cd;

/// (Delta - i gamma/2)|e><e| + f_b Omega_1(t)(|e><b| + h.c.) + f_q Omega_2(t)(|e><q| + h.c.)
Hamiltonian build_hamiltonian(const SiteHamiltonianSpec &spec, double t);

enum class IntegratorMethod { fixed_rk4, adaptive_rk45 };

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::adaptive_rk45;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    /// Upper bound on the adaptive step; the step size itself for fixed_rk4.
    double max_step = 1.0;

    void validate() const;
};

/// Integrates i d|psi>/dt = H(t)|psi> from t_start to t_end. Integration is
/// restarted at every pulse switch-on/off instant inside the interval.
///
/// Throws IntegrationError when the adaptive step underflows or the state
/// turns non-finite.
AtomState evolve(const AtomState &state, const SiteHamiltonianSpec &spec, double t_start,
                 double t_end, const IntegratorConfig &config = {});

/// Evolves over the full support of the site's pulse schedule.
AtomState evolve_over_pulses(const AtomState &state, const SiteHamiltonianSpec &spec,
                             const IntegratorConfig &config = {});

/// |<target|psi>|^2 for a normalized target; psi may be sub-normalized.
/// Throws std::invalid_argument when the target is not normalized or the
/// sizes differ.
double fidelity(std::span<const complex> psi, std::span<const complex> target);
double fidelity(const AtomState &psi, const AtomState &target);

/// Squared norm: the no-emission probability of the non-Hermitian model.
double survival_probability(const AtomState &state);

} // namespace lataddr
