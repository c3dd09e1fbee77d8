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

#include "lataddr/stirap_engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "lataddr/errors.hpp"

namespace lataddr {

namespace {

constexpr std::size_t idx(Level level) { return static_cast<std::size_t>(level); }

TransferResult summarize(const AtomState &initial, const AtomState &final_state,
                         const TransferTargets &targets) {
    TransferResult result;
    result.final_state = final_state;
    result.fidelity_initial = fidelity(final_state, targets.initial);
    result.fidelity_target = fidelity(final_state, targets.target);
    result.leakage = std::clamp(1.0 - survival_probability(final_state), 0.0, 1.0);
    const complex b0 = initial[Level::b];
    if (std::abs(b0) > 0.0) {
        result.transfer_phase = std::arg(final_state[Level::q] / b0);
    }
    return result;
}

// Site Hamiltonian for the quench fields at site s. The schedule carries the
// b-wave peak; a different q-wave peak is folded into factor_q.
SiteHamiltonianSpec site_spec(std::int64_t s, const QuenchSetup &setup,
                              QuenchDirection direction) {
    SiteHamiltonianSpec spec;
    spec.detuning = setup.drive.detuning;
    spec.decay = setup.drive.decay;
    spec.pulses = quench_schedule(setup, direction);
    spec.factor_b = wave_site_factor(s, setup.lattice, setup.wave_b);
    spec.factor_q = wave_site_factor(s, setup.lattice, setup.wave_q);
    if (setup.method == QuenchMethod::stirap) {
        const double peak_b = setup.wave_b.peak_rabi;
        const double peak_q = setup.wave_q.peak_rabi;
        if (peak_b > 0.0) {
            spec.factor_q *= peak_q / peak_b;
        } else {
            spec.factor_b = 0.0;
        }
    }
    return spec;
}

} // namespace

AtomState transfer_initial_state() {
    return AtomState::normalized({complex{1.0}, complex{1.0}, complex{}, complex{}});
}

AtomState transfer_target_state() {
    return AtomState::normalized({complex{1.0}, complex{}, complex{1.0}, complex{}});
}

TransferResult simulate_site_transfer(double site_factor, double peak_rabi,
                                      const DriveSettings &drive, const AtomState &initial,
                                      const TransferTargets &targets) {
    if (!(peak_rabi >= 0.0)) {
        throw std::invalid_argument("transfer: peak Rabi frequency must be >= 0");
    }
    GaussianPair pulses = drive.pulses;
    pulses.peak = peak_rabi;
    pulses.validate();
    const SiteHamiltonianSpec spec =
        SiteHamiltonianSpec::uniform(site_factor, pulses, drive.detuning, drive.decay);
    const AtomState final_state = evolve_over_pulses(initial, spec, drive.integrator);
    return summarize(initial, final_state, targets);
}

TransferResult simulate_transfer(double peak, const DriveSettings &drive,
                                 const AtomState &initial, const TransferTargets &targets) {
    return simulate_site_transfer(1.0, peak, drive, initial, targets);
}

std::optional<double> FidelityCurve::crossing() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double gap = samples[i].fidelity_target - samples[i].fidelity_initial;
        if (gap >= 0.0) {
            if (i == 0) return samples[0].peak;
            const double prev = samples[i - 1].fidelity_target - samples[i - 1].fidelity_initial;
            const double w = prev / (prev - gap);
            return samples[i - 1].peak + w * (samples[i].peak - samples[i - 1].peak);
        }
    }
    return std::nullopt;
}

FidelityCurve fidelity_scan(double peak_min, double peak_max, std::size_t points,
                            const DriveSettings &drive) {
    if (points < 2) {
        throw std::invalid_argument("fidelity scan: need at least 2 points");
    }
    if (!(peak_min >= 0.0) || !(peak_max >= peak_min)) {
        throw std::invalid_argument("fidelity scan: need 0 <= peak_min <= peak_max");
    }
    const std::size_t n = (peak_max == peak_min) ? 1 : points;
    std::vector<double> peaks(n);
    for (std::size_t i = 0; i < n; ++i) {
        peaks[i] = (n == 1) ? peak_min
                            : peak_min + (peak_max - peak_min) * static_cast<double>(i) /
                                             static_cast<double>(n - 1);
    }

    FidelityCurve curve;
    curve.samples.resize(n);
    auto run = [&](std::size_t i) {
        const TransferResult r = simulate_transfer(peaks[i], drive);
        curve.samples[i] = {peaks[i], r.fidelity_initial, r.fidelity_target, r.leakage};
    };

    // Strided partition: each worker owns a disjoint set of output slots.
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, n);
    std::vector<std::future<void>> jobs;
    jobs.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < n; i += workers) run(i);
        }));
    }
    for (auto &job : jobs) job.get();
    return curve;
}

double find_threshold(const FidelityCurve &curve, double target_fidelity) {
    const auto &s = curve.samples;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].fidelity_target >= target_fidelity) {
            if (i == 0) return s[0].peak;
            const double lo = s[i - 1].fidelity_target;
            const double w = (target_fidelity - lo) / (s[i].fidelity_target - lo);
            return s[i - 1].peak + w * (s[i].peak - s[i - 1].peak);
        }
    }
    throw std::out_of_range("threshold: target fidelity not reached within the scanned range");
}

QuenchSetup QuenchSetup::calibrated(const LatticeConfig &lattice, double neighbour_peak,
                                    const DriveSettings &drive) {
    lattice.validate();
    QuenchSetup setup;
    setup.lattice = lattice;
    setup.drive = drive;
    const double peak = calibrated_peak_rabi(lattice, neighbour_peak);
    setup.wave_b = commensurate_wave(lattice.commensurate_period(), lattice, peak);
    setup.wave_q = setup.wave_b;
    return setup;
}

PulseSchedule quench_schedule(const QuenchSetup &setup, QuenchDirection direction) {
    if (setup.method == QuenchMethod::raman) {
        // The square pulse swaps b and q symmetrically; the inverse reuses it.
        return raman_pi_pulse(setup.lattice, setup.wave_b.peak_rabi, setup.wave_q.peak_rabi,
                              setup.drive.detuning);
    }
    GaussianPair pulses = setup.drive.pulses;
    pulses.peak = setup.wave_b.peak_rabi > 0.0 ? setup.wave_b.peak_rabi : setup.wave_q.peak_rabi;
    return direction == QuenchDirection::forward ? pulses : reversed(pulses);
}

SiteMap quench_site_map(std::int64_t s, const QuenchSetup &setup, QuenchDirection direction) {
    const SiteHamiltonianSpec spec = site_spec(s, setup, direction);
    SiteMap map;
    if (spec.factor_b == 0.0 && spec.factor_q == 0.0) {
        return map;
    }
    const Level inputs[] = {Level::a, Level::b, Level::q};
    for (std::size_t col = 0; col < 3; ++col) {
        const AtomState out =
            evolve_over_pulses(AtomState::basis(inputs[col]), spec, setup.drive.integrator);
        for (std::size_t row = 0; row < 3; ++row) {
            map.op(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                out.amplitudes()[row];
        }
        const bool transferred = (direction == QuenchDirection::forward) ? inputs[col] == Level::b
                                                                          : inputs[col] == Level::q;
        if (transferred) {
            map.leakage = std::clamp(1.0 - out.norm_squared(), 0.0, 1.0);
        }
    }
    return map;
}

SiteOperator ideal_quench_operator(double transfer_phase) {
    SiteOperator op = SiteOperator::Zero();
    const complex phase = std::polar(1.0, transfer_phase);
    op(0, 0) = 1.0;
    op(idx(Level::q), idx(Level::b)) = phase;
    op(idx(Level::b), idx(Level::q)) = std::conj(phase);
    return op;
}

} // namespace lataddr
