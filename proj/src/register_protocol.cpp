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

#include "lataddr/register_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "lataddr/errors.hpp"

namespace lataddr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kA = 0;
constexpr std::size_t kB = 1;
constexpr std::size_t kQ = 2;

// Rotation angles below this are treated as absent stages.
constexpr double kNegligibleAngle = 1e-15;

std::size_t stride_of(std::int64_t s) {
    std::size_t stride = 1;
    for (std::int64_t i = 0; i < s; ++i) stride *= 3;
    return stride;
}

double uniform01(std::mt19937_64 &gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void check_geometry(const LatticeRegister &reg, std::int64_t k, std::int64_t reach) {
    LatticeConfig lattice;
    lattice.site_count = reg.site_count();
    lattice.target_site = k;
    lattice.reach = reach;
    lattice.validate();
}

} // namespace

LatticeRegister LatticeRegister::product(std::span<const SiteVector> sites,
                                         std::vector<bool> occupancy) {
    const auto n = static_cast<std::int64_t>(sites.size());
    if (n < 1 || n > kMaxRegisterSites) {
        throw std::invalid_argument("register: site count must lie in [1, " +
                                    std::to_string(kMaxRegisterSites) + "], got " +
                                    std::to_string(n));
    }
    if (occupancy.empty()) {
        occupancy.assign(sites.size(), true);
    }
    if (occupancy.size() != sites.size()) {
        throw std::invalid_argument("register: occupancy length differs from site count");
    }
    std::vector<complex> amps{complex{1.0}};
    for (std::size_t s = 0; s < sites.size(); ++s) {
        SiteVector v{complex{1.0}, {}, {}};
        if (occupancy[s]) {
            double n2 = 0.0;
            for (const auto &z : sites[s]) n2 += std::norm(z);
            if (!(n2 > 0.0)) {
                throw std::invalid_argument("register: site " + std::to_string(s) +
                                            " has a zero state vector");
            }
            for (std::size_t l = 0; l < 3; ++l) v[l] = sites[s][l] / std::sqrt(n2);
        }
        // New site becomes the most significant digit.
        std::vector<complex> next(amps.size() * 3);
        for (std::size_t l = 0; l < 3; ++l) {
            for (std::size_t i = 0; i < amps.size(); ++i) {
                next[l * amps.size() + i] = v[l] * amps[i];
            }
        }
        amps = std::move(next);
    }
    return LatticeRegister(n, std::move(amps), std::move(occupancy));
}

LatticeRegister LatticeRegister::uniform(std::int64_t site_count, const SiteVector &site) {
    if (site_count < 1 || site_count > kMaxRegisterSites) {
        throw std::invalid_argument("register: site count must lie in [1, " +
                                    std::to_string(kMaxRegisterSites) + "], got " +
                                    std::to_string(site_count));
    }
    const std::vector<SiteVector> sites(static_cast<std::size_t>(site_count), site);
    return product(sites);
}

double LatticeRegister::norm_squared() const {
    double n2 = 0.0;
    for (const auto &z : amplitudes_) n2 += std::norm(z);
    return n2;
}

std::vector<complex> LatticeRegister::conditional_state() const {
    const double n = std::sqrt(norm_squared());
    std::vector<complex> out(amplitudes_);
    if (n > 0.0) {
        for (auto &z : out) z /= n;
    }
    return out;
}

std::size_t LatticeRegister::digit(std::size_t index, std::int64_t s) {
    return (index / stride_of(s)) % 3;
}

double LatticeRegister::population(std::int64_t s, SiteLevel level) const {
    const std::size_t stride = stride_of(s);
    const auto want = static_cast<std::size_t>(level);
    double p = 0.0;
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        if ((i / stride) % 3 == want) p += std::norm(amplitudes_[i]);
    }
    return p;
}

Eigen::Matrix3cd LatticeRegister::reduced_density(std::int64_t s) const {
    const std::size_t stride = stride_of(s);
    Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        if ((i / stride) % 3 != 0) continue;
        const complex v[3] = {amplitudes_[i], amplitudes_[i + stride], amplitudes_[i + 2 * stride]};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) rho(r, c) += v[r] * std::conj(v[c]);
        }
    }
    const complex trace = rho.trace();
    if (std::abs(trace) > 0.0) rho /= trace;
    return rho;
}

void LatticeRegister::apply_site(std::int64_t s, const Eigen::Matrix3cd &op) {
    if (s < 0 || s >= site_count_) {
        throw std::out_of_range("register: site index out of range");
    }
    if (!occupied(s)) {
        return;
    }
    const double before = norm_squared();
    const std::size_t stride = stride_of(s);
    for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
        if ((i / stride) % 3 != 0) continue;
        const complex v0 = amplitudes_[i];
        const complex v1 = amplitudes_[i + stride];
        const complex v2 = amplitudes_[i + 2 * stride];
        amplitudes_[i] = op(0, 0) * v0 + op(0, 1) * v1 + op(0, 2) * v2;
        amplitudes_[i + stride] = op(1, 0) * v0 + op(1, 1) * v1 + op(1, 2) * v2;
        amplitudes_[i + 2 * stride] = op(2, 0) * v0 + op(2, 1) * v1 + op(2, 2) * v2;
    }
    norm_deficit_ += before - norm_squared();
}

void LatticeRegister::apply_global_phase(double angle) {
    const complex phase = std::polar(1.0, angle);
    for (auto &z : amplitudes_) z *= phase;
}

void LatticeRegister::assign(std::vector<complex> amplitudes, double norm_deficit) {
    if (amplitudes.size() != amplitudes_.size()) {
        throw std::invalid_argument("register: amplitude vector has the wrong dimension");
    }
    amplitudes_ = std::move(amplitudes);
    norm_deficit_ = norm_deficit;
}

Eigen::Matrix2cd rz_matrix(double angle) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = std::polar(1.0, -0.5 * angle);
    m(1, 1) = std::polar(1.0, 0.5 * angle);
    return m;
}

Eigen::Matrix2cd rx_matrix(double angle) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    Eigen::Matrix2cd m;
    m << complex{c, 0.0}, complex{0.0, -s}, complex{0.0, -s}, complex{c, 0.0};
    return m;
}

EulerAngles zxz_decomposition(const Eigen::Matrix2cd &unitary) {
    const complex det = unitary.determinant();
    if (std::abs(std::abs(det) - 1.0) > 1e-9 ||
        !(unitary * unitary.adjoint()).isIdentity(1e-9)) {
        throw std::invalid_argument("euler decomposition: matrix is not unitary");
    }
    EulerAngles angles;
    angles.global_phase = 0.5 * std::arg(det);
    const Eigen::Matrix2cd v = unitary * std::polar(1.0, -angles.global_phase);
    const double c = std::abs(v(0, 0));
    const double s = std::abs(v(0, 1));
    angles.x = 2.0 * std::atan2(s, c);
    const double eps = 1e-14;
    double sum = (c > eps) ? -2.0 * std::arg(v(0, 0)) : 0.0;
    double diff = (s > eps) ? 2.0 * std::arg(complex{0.0, 1.0} * v(0, 1)) : 0.0;
    if (c <= eps) sum = diff;
    if (s <= eps) diff = sum;
    angles.first_z = 0.5 * (sum + diff);
    angles.second_z = 0.5 * (sum - diff);
    return angles;
}

AddressingProtocol::AddressingProtocol(ProtocolSetup setup) : setup_(std::move(setup)) {}

QuenchSetup AddressingProtocol::quench_setup(std::int64_t site_count, std::int64_t k,
                                             std::int64_t reach) const {
    LatticeConfig lattice;
    lattice.site_count = site_count;
    lattice.target_site = k;
    lattice.reach = reach;
    lattice.lamb_dicke = setup_.lamb_dicke;
    QuenchSetup qs = QuenchSetup::calibrated(lattice, setup_.neighbour_peak, setup_.drive);
    qs.method = setup_.method;
    if (setup_.wave_b) qs.wave_b = *setup_.wave_b;
    if (setup_.wave_q) qs.wave_q = *setup_.wave_q;
    const NodeReport report = validate_node_condition(lattice, qs.wave_b, qs.wave_q);
    if (!report.ok()) {
        throw GeometryError("quench: node condition violated for k = " + std::to_string(k) +
                            ", L = " + std::to_string(reach));
    }
    return qs;
}

SiteMap AddressingProtocol::simulated_site_map(const QuenchSetup &setup, std::int64_t s,
                                               QuenchDirection direction) const {
    const double coupling_b = wave_site_factor(s, setup.lattice, setup.wave_b) * setup.wave_b.peak_rabi;
    const double coupling_q = wave_site_factor(s, setup.lattice, setup.wave_q) * setup.wave_q.peak_rabi;
    const auto key = std::make_tuple(coupling_b, coupling_q, static_cast<int>(direction));
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    SiteMap map = quench_site_map(s, setup, direction);
    std::lock_guard lock(cache_mutex_);
    cache_.emplace(key, map);
    return map;
}

StepReport AddressingProtocol::apply_quench(LatticeRegister &reg, std::int64_t k,
                                            std::int64_t reach, OperationMode mode,
                                            QuenchDirection direction) const {
    check_geometry(reg, k, reach);
    const QuenchSetup qs = quench_setup(reg.site_count(), k, reach);
    const double deficit_before = reg.norm_deficit();
    const Eigen::Matrix3cd ideal = ideal_quench_operator(setup_.transfer_phase);
    for (std::int64_t s = 0; s < reg.site_count(); ++s) {
        if (qs.lattice.in_sublattice(s) || !reg.occupied(s)) continue;
        if (mode == OperationMode::ideal) {
            reg.apply_site(s, ideal);
        } else {
            reg.apply_site(s, simulated_site_map(qs, s, direction).op);
        }
    }
    StepReport report;
    report.leakage = reg.norm_deficit() - deficit_before;
    if (direction == QuenchDirection::forward) {
        const double n2 = reg.norm_squared();
        for (std::int64_t s = 0; s < reg.site_count(); ++s) {
            if (qs.lattice.in_sublattice(s) || !reg.occupied(s) || n2 <= 0.0) continue;
            report.residual_b = std::max(report.residual_b, reg.population(s, SiteLevel::b) / n2);
        }
    }
    return report;
}

StepReport AddressingProtocol::quench(LatticeRegister &reg, std::int64_t k, std::int64_t reach,
                                      OperationMode mode) const {
    return apply_quench(reg, k, reach, mode, QuenchDirection::forward);
}

StepReport AddressingProtocol::inverse_quench(LatticeRegister &reg, std::int64_t k,
                                              std::int64_t reach, OperationMode mode) const {
    return apply_quench(reg, k, reach, mode, QuenchDirection::inverse);
}

StepReport AddressingProtocol::rotate_z(LatticeRegister &reg, std::int64_t k, std::int64_t reach,
                                        double angle, OperationMode mode) const {
    const double deficit_before = reg.norm_deficit();
    StepReport report = quench(reg, k, reach, mode);

    ManipulationBeam beam = setup_.beam;
    beam.center = k;
    beam.reach = reach;
    report.pulse_duration = stark_duration_for_angle(beam, angle);

    // The Stark pulse shifts only |b>: each illuminated site gains
    // exp(i angle envelope) on b. The global exp(-i angle/2) turns the target
    // site's map into exactly R_z(angle).
    std::vector<std::pair<std::size_t, complex>> lit;
    const double n2 = reg.norm_squared();
    for (std::int64_t s = 0; s < reg.site_count(); ++s) {
        const double env = beam_envelope(beam, s);
        if (env == 0.0 || !reg.occupied(s)) continue;
        lit.emplace_back(stride_of(s), std::polar(1.0, angle * env));
        if (s != k && n2 > 0.0) {
            report.neighbour_phase_error =
                std::max(report.neighbour_phase_error,
                         std::abs(angle) * env * reg.population(s, SiteLevel::b) / n2);
        }
    }
    reg.apply_diagonal([&](std::size_t i) {
        complex phase{1.0};
        for (const auto &[stride, shift] : lit) {
            if ((i / stride) % 3 == kB) phase *= shift;
        }
        return phase;
    });
    reg.apply_global_phase(-0.5 * angle);

    inverse_quench(reg, k, reach, mode);
    report.leakage = reg.norm_deficit() - deficit_before;
    report.quench_pairs = 1;
    return report;
}

StepReport AddressingProtocol::rotate_x(LatticeRegister &reg, std::int64_t k, std::int64_t reach,
                                        double angle, OperationMode mode) const {
    collective_hadamard(reg);
    StepReport report = rotate_z(reg, k, reach, angle, mode);
    collective_hadamard(reg);
    return report;
}

StepReport AddressingProtocol::rotate(LatticeRegister &reg, std::int64_t k, std::int64_t reach,
                                      const Eigen::Matrix2cd &unitary, OperationMode mode) const {
    const EulerAngles angles = zxz_decomposition(unitary);
    const double deficit_before = reg.norm_deficit();
    StepReport total;
    auto accumulate = [&total](const StepReport &r) {
        total.residual_b = std::max(total.residual_b, r.residual_b);
        total.neighbour_phase_error = std::max(total.neighbour_phase_error, r.neighbour_phase_error);
        total.pulse_duration += r.pulse_duration;
        total.quench_pairs += r.quench_pairs;
    };
    if (std::abs(angles.first_z) > kNegligibleAngle) {
        accumulate(rotate_z(reg, k, reach, angles.first_z, mode));
    }
    if (std::abs(angles.x) > kNegligibleAngle) {
        accumulate(rotate_x(reg, k, reach, angles.x, mode));
    }
    if (std::abs(angles.second_z) > kNegligibleAngle) {
        accumulate(rotate_z(reg, k, reach, angles.second_z, mode));
    }
    reg.apply_global_phase(angles.global_phase);
    total.leakage = reg.norm_deficit() - deficit_before;
    return total;
}

MeasurementResult AddressingProtocol::measure(LatticeRegister &reg, std::int64_t k,
                                              std::int64_t reach, std::uint64_t seed,
                                              OperationMode mode) const {
    const double deficit_before = reg.norm_deficit();
    MeasurementResult result;
    result.report = quench(reg, k, reach, mode);

    const double n2 = reg.norm_squared();
    if (n2 > 0.0 && reg.occupied(k)) {
        result.bright_probability = reg.population(k, SiteLevel::b) / n2;
        ManipulationBeam beam = setup_.beam;
        beam.center = k;
        beam.reach = reach;
        for (std::int64_t s = 0; s < reg.site_count(); ++s) {
            if (s == k || !reg.occupied(s) || beam_envelope(beam, s) == 0.0) continue;
            result.neighbour_bright_population += reg.population(s, SiteLevel::b) / n2;
        }
    }
    std::mt19937_64 gen(derive_stream_seed(seed, 0));
    result.bright = uniform01(gen) < result.bright_probability;
    const std::size_t stride = stride_of(k);
    const bool bright = result.bright;
    reg.project([&](std::size_t i) { return (((i / stride) % 3) == kB) == bright; });

    inverse_quench(reg, k, reach, mode);
    result.report.leakage = reg.norm_deficit() - deficit_before;
    result.report.quench_pairs = 1;
    return result;
}

StepReport AddressingProtocol::collective_cphase(LatticeRegister &reg, std::int64_t k,
                                                 std::int64_t reach, OperationMode mode) const {
    check_geometry(reg, k, reach);
    LatticeConfig lattice;
    lattice.site_count = reg.site_count();
    lattice.target_site = k;
    lattice.reach = reach;
    const std::vector<std::int64_t> controls = lattice.sublattice();
    for (std::int64_t s : controls) {
        if (s + 1 >= reg.site_count()) {
            throw GeometryError("collective cphase: neighbour of sublattice site " +
                                std::to_string(s) + " lies outside the register");
        }
    }
    const double deficit_before = reg.norm_deficit();
    StepReport report = quench(reg, k, reach, mode);

    // Conditional pi phase on |b>_s |q>_{s+1}.
    reg.apply_diagonal([&](std::size_t i) {
        int flips = 0;
        for (std::int64_t s : controls) {
            if (LatticeRegister::digit(i, s) == kB && LatticeRegister::digit(i, s + 1) == kQ) {
                ++flips;
            }
        }
        return complex{(flips % 2 == 0) ? 1.0 : -1.0};
    });

    inverse_quench(reg, k, reach, mode);
    report.leakage = reg.norm_deficit() - deficit_before;
    report.quench_pairs = 1;
    return report;
}

StepReport AddressingProtocol::controlled_rotation(LatticeRegister &reg, std::int64_t k,
                                                   std::int64_t reach, double angle,
                                                   OperationMode mode) const {
    if (k + 1 >= reg.site_count()) {
        throw GeometryError("controlled rotation: target site k + 1 lies outside the register");
    }
    const double deficit_before = reg.norm_deficit();
    StepReport total = collective_cphase(reg, k, reach, mode);
    const StepReport middle = rotate_x(reg, k + 1, reach, -0.5 * angle, mode);
    const StepReport last = collective_cphase(reg, k, reach, mode);
    total.residual_b = std::max({total.residual_b, middle.residual_b, last.residual_b});
    total.neighbour_phase_error = middle.neighbour_phase_error;
    total.pulse_duration = middle.pulse_duration;
    total.quench_pairs = 3;
    total.leakage = reg.norm_deficit() - deficit_before;
    return total;
}

void collective_hadamard(LatticeRegister &reg) {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
    h(kA, kA) = r;
    h(kA, kB) = r;
    h(kB, kA) = r;
    h(kB, kB) = -r;
    h(kQ, kQ) = 1.0;
    for (std::int64_t s = 0; s < reg.site_count(); ++s) {
        reg.apply_site(s, h);
    }
}

std::vector<bool> pattern_load(std::int64_t site_count, std::int64_t k, std::int64_t reach) {
    LatticeConfig lattice;
    lattice.site_count = site_count;
    lattice.target_site = k;
    lattice.reach = reach;
    lattice.validate();
    const Eigen::Matrix3cd quench_op = ideal_quench_operator();
    Eigen::Vector3cd prepared = Eigen::Vector3cd::Zero();
    prepared(kB) = 1.0;
    std::vector<bool> occupied(static_cast<std::size_t>(site_count));
    for (std::int64_t s = 0; s < site_count; ++s) {
        const Eigen::Vector3cd after = lattice.in_sublattice(s) ? prepared : quench_op * prepared;
        // Releasing the |q> potential drops every atom found in q.
        occupied[static_cast<std::size_t>(s)] = std::norm(after(kQ)) < 0.5;
    }
    return occupied;
}

PumpReport optical_pump(LatticeRegister &reg, std::uint64_t seed, PumpMode mode,
                        SiteLevel pump_target) {
    PumpReport report;
    if (mode == PumpMode::deterministic) {
        report.leakage = reg.discard([&](std::size_t i) {
            for (std::int64_t s = 0; s < reg.site_count(); ++s) {
                if (reg.occupied(s) && LatticeRegister::digit(i, s) == kQ) return false;
            }
            return true;
        });
        return report;
    }
    if (pump_target == SiteLevel::q) {
        throw std::invalid_argument("optical pump: target must lie in the qubit subspace");
    }
    Eigen::Matrix3cd move = Eigen::Matrix3cd::Identity();
    move(kQ, kQ) = 0.0;
    move(static_cast<std::size_t>(pump_target), kQ) = 1.0;
    for (std::int64_t s = 0; s < reg.site_count(); ++s) {
        if (!reg.occupied(s)) continue;
        const double n2 = reg.norm_squared();
        if (n2 <= 0.0) break;
        const double p = reg.population(s, SiteLevel::q) / n2;
        report.pumped_weight += p;
        std::mt19937_64 gen(derive_stream_seed(seed, static_cast<std::uint64_t>(s)));
        const bool in_q = uniform01(gen) < p;
        const std::size_t stride = stride_of(s);
        reg.project([&](std::size_t i) { return (((i / stride) % 3) == kQ) == in_q; });
        if (in_q) {
            reg.apply_site(s, move);
            report.pumped_sites.push_back(s);
        }
    }
    return report;
}

std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

} // namespace lataddr
