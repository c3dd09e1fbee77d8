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

#include "lataddr/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "lataddr/errors.hpp"

namespace lataddr {

namespace {

using State = AtomState::Amplitudes;

constexpr complex kMinusI{0.0, -1.0};

// Smallest adaptive step relative to the segment length before giving up.
constexpr double kStepUnderflow = 1e-13;

constexpr std::size_t idx(Level level) { return static_cast<std::size_t>(level); }

struct Schrodinger {
    const SiteHamiltonianSpec &spec;

    void operator()(const State &x, State &dxdt, double t) const {
        const PulseSample drive = sample(spec.pulses, t);
        const double wb = spec.factor_b * drive.b;
        const double wq = spec.factor_q * drive.q;
        const complex excited{spec.detuning, -0.5 * spec.decay};
        // Row a of H is zero.
        dxdt[idx(Level::a)] = complex{};
        dxdt[idx(Level::b)] = kMinusI * (wb * x[idx(Level::e)]);
        dxdt[idx(Level::q)] = kMinusI * (wq * x[idx(Level::e)]);
        dxdt[idx(Level::e)] =
            kMinusI * (wb * x[idx(Level::b)] + wq * x[idx(Level::q)] + excited * x[idx(Level::e)]);
    }
};

bool finite(const State &x) {
    return std::all_of(x.begin(), x.end(), [](const complex &z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

void rk4_segment(const Schrodinger &rhs, State &x, double t0, double t1, double max_step) {
    const double span = t1 - t0;
    const auto steps = static_cast<std::size_t>(std::ceil(span / max_step - 1e-9));
    const double h = span / static_cast<double>(std::max<std::size_t>(steps, 1));
    State k1{}, k2{}, k3{}, k4{}, tmp{};
    for (std::size_t n = 0; n < std::max<std::size_t>(steps, 1); ++n) {
        const double t = t0 + static_cast<double>(n) * h;
        rhs(x, k1, t);
        for (std::size_t i = 0; i < kSiteLevels; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        rhs(tmp, k2, t + 0.5 * h);
        for (std::size_t i = 0; i < kSiteLevels; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        rhs(tmp, k3, t + 0.5 * h);
        for (std::size_t i = 0; i < kSiteLevels; ++i) tmp[i] = x[i] + h * k3[i];
        rhs(tmp, k4, t + h);
        for (std::size_t i = 0; i < kSiteLevels; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

void adaptive_segment(const Schrodinger &rhs, State &x, double t0, double t1,
                      const IntegratorConfig &config) {
    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled(config.abs_tol, config.rel_tol,
                                           odeint::runge_kutta_dopri5<State>());
    const double span = t1 - t0;
    double t = t0;
    double dt = std::min({config.max_step, span, 1e-2});
    while (t < t1) {
        dt = std::min({dt, config.max_step, t1 - t});
        const auto result = stepper.try_step(std::cref(rhs), x, t, dt);
        if (result == odeint::fail && dt < kStepUnderflow * std::max(span, 1.0)) {
            throw IntegrationError("adaptive integrator: step size underflow at t = " +
                                   std::to_string(t));
        }
        // Land exactly on the segment end instead of accumulating round-off.
        if (result == odeint::success && t1 - t < kStepUnderflow * std::max(span, 1.0)) {
            t = t1;
        }
    }
    if (!finite(x)) {
        throw IntegrationError("adaptive integrator: state became non-finite");
    }
}

} // namespace

AtomState AtomState::basis(Level level) {
    Amplitudes amps{};
    amps[idx(level)] = 1.0;
    return AtomState(amps);
}

AtomState AtomState::normalized(const Amplitudes &amplitudes) {
    double n2 = 0.0;
    for (const auto &z : amplitudes) n2 += std::norm(z);
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
        throw std::invalid_argument("atom state: cannot normalize a zero or non-finite vector");
    }
    Amplitudes out = amplitudes;
    const double scale = 1.0 / std::sqrt(n2);
    for (auto &z : out) z *= scale;
    return AtomState(out);
}

AtomState AtomState::raw(const Amplitudes &amplitudes) { return AtomState(amplitudes); }

double AtomState::norm_squared() const {
    double n2 = 0.0;
    for (const auto &z : amplitudes_) n2 += std::norm(z);
    return n2;
}

SiteHamiltonianSpec SiteHamiltonianSpec::uniform(double site_factor, PulseSchedule pulses,
                                                 double detuning, double decay) {
    SiteHamiltonianSpec spec;
    spec.detuning = detuning;
    spec.decay = decay;
    spec.factor_b = site_factor;
    spec.factor_q = site_factor;
    spec.pulses = std::move(pulses);
    return spec;
}

void SiteHamiltonianSpec::validate() const {
    if (!(decay >= 0.0)) {
        throw std::invalid_argument("site hamiltonian: decay must be >= 0");
    }
    if (!(std::abs(factor_b) <= 1.0) || !(std::abs(factor_q) <= 1.0)) {
        throw std::invalid_argument("site hamiltonian: |site factor| must be <= 1");
    }
}

Hamiltonian build_hamiltonian(const SiteHamiltonianSpec &spec, double t) {
    const PulseSample drive = sample(spec.pulses, t);
    Hamiltonian h = Hamiltonian::Zero();
    const auto e = idx(Level::e);
    const auto b = idx(Level::b);
    const auto q = idx(Level::q);
    h(e, e) = complex{spec.detuning, -0.5 * spec.decay};
    h(e, b) = spec.factor_b * drive.b;
    h(b, e) = std::conj(h(e, b));
    h(e, q) = spec.factor_q * drive.q;
    h(q, e) = std::conj(h(e, q));
    return h;
}

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw std::invalid_argument("integrator: tolerances must be > 0");
    }
    if (!(max_step > 0.0)) {
        throw std::invalid_argument("integrator: max_step must be > 0");
    }
}

AtomState evolve(const AtomState &state, const SiteHamiltonianSpec &spec, double t_start,
                 double t_end, const IntegratorConfig &config) {
    if (t_end < t_start) {
        throw std::invalid_argument("evolve: t_end must be >= t_start");
    }
    config.validate();
    State x = state.amplitudes();
    if (t_end == t_start) {
        return AtomState::raw(x);
    }
    std::vector<double> edges{t_start};
    for (double p : breakpoints(spec.pulses)) {
        if (p > t_start && p < t_end) edges.push_back(p);
    }
    edges.push_back(t_end);

    const Schrodinger rhs{spec};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i];
        const double b = edges[i + 1];
        const PulseSample mid = sample(spec.pulses, 0.5 * (a + b));
        if (mid.b == 0.0 && mid.q == 0.0) {
            // Pulses off: only the excited level evolves, in closed form.
            x[idx(Level::e)] *= std::exp(kMinusI * complex{spec.detuning, -0.5 * spec.decay} * (b - a));
            continue;
        }
        if (config.method == IntegratorMethod::fixed_rk4) {
            rk4_segment(rhs, x, a, b, config.max_step);
        } else {
            adaptive_segment(rhs, x, a, b, config);
        }
        if (!finite(x)) {
            throw IntegrationError("evolve: state became non-finite");
        }
    }
    return AtomState::raw(x);
}

AtomState evolve_over_pulses(const AtomState &state, const SiteHamiltonianSpec &spec,
                             const IntegratorConfig &config) {
    const TimeWindow window = support(spec.pulses);
    return evolve(state, spec, window.start, window.end, config);
}

double fidelity(std::span<const complex> psi, std::span<const complex> target) {
    if (psi.size() != target.size()) {
        throw std::invalid_argument("fidelity: state and target sizes differ");
    }
    double target_norm = 0.0;
    complex overlap{};
    for (std::size_t i = 0; i < psi.size(); ++i) {
        target_norm += std::norm(target[i]);
        overlap += std::conj(target[i]) * psi[i];
    }
    if (std::abs(target_norm - 1.0) > 1e-9) {
        throw std::invalid_argument("fidelity: target state must be normalized");
    }
    return std::norm(overlap);
}

double fidelity(const AtomState &psi, const AtomState &target) {
    return fidelity(psi.view(), target.view());
}

double survival_probability(const AtomState &state) { return state.norm_squared(); }

} // namespace lataddr
