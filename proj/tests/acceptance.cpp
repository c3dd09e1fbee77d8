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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>

#include "lataddr/cli_reporting.hpp"
#include "lataddr/errors.hpp"
#include "reference_values.hpp"
#include "test_support.hpp"

using namespace lataddr;
using namespace lataddr::testing;
namespace ref = lataddr::reference;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Check = std::function<Outcome()>;

constexpr double kPi = std::numbers::pi;
const double kHalf = std::sqrt(0.5);
const SiteVector kPlus{complex{kHalf}, complex{kHalf}, complex{}};

std::string fmt(const char *pattern, double value) {
    char buf[96];
    std::snprintf(buf, sizeof buf, pattern, value);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// 1
Outcome node_exactness() {
    const auto start = std::chrono::steady_clock::now();
    int nodes = 0;
    for (std::int64_t reach = 1; reach <= 20; ++reach) {
        LatticeConfig lattice;
        lattice.reach = reach;
        lattice.site_count = 3 * (reach + 1) + 2;
        lattice.target_site = reach / 2 + 1;
        const QuenchSetup setup = QuenchSetup::calibrated(lattice);
        for (std::int64_t s = 0; s < lattice.site_count; ++s) {
            if ((s - lattice.target_site) % (reach + 1) != 0) continue;
            ++nodes;
            if (effective_rabi(s, lattice, 20.0) != 0.0) return {false, "nonzero coupling at node " + std::to_string(s)};
            for (auto dir : {QuenchDirection::forward, QuenchDirection::inverse}) {
                if (quench_site_map(s, setup, dir).op != SiteOperator::Identity())
                    return {false, "non-identity map at node " + std::to_string(s)};
            }
        }
    }
    const double t = seconds_since(start);
    return {t < 1.0, std::to_string(nodes) + " node sites exact, " + fmt("%.3f s", t)};
}

// 2
Outcome identity_limit() {
    const auto start = std::chrono::steady_clock::now();
    const TransferResult r = simulate_transfer(0.0);
    const double t = seconds_since(start);
    const bool ok = std::abs(r.fidelity_initial - 1.0) < 1e-9 && std::abs(r.fidelity_target - 0.25) < 1e-9;
    return {ok && t < 1.0, fmt("F_initial - 1 = %.2e, ", r.fidelity_initial - 1.0) +
                               fmt("F_target - 0.25 = %.2e", r.fidelity_target - 0.25)};
}

// 3
Outcome curve_shape() {
    const auto start = std::chrono::steady_clock::now();
    const FidelityCurve curve = fidelity_scan(0.0, 40.0, 81);
    const double t = seconds_since(start);
    bool low_ok = simulate_transfer(0.2).fidelity_initial >= 0.99;
    double at20 = 0.0, lo = 1.0, hi = 0.0;
    for (const auto &s : curve.samples) {
        if (s.peak <= 0.2) low_ok = low_ok && s.fidelity_initial >= 0.99;
        if (std::abs(s.peak - 20.0) < 1e-12) at20 = s.fidelity_target;
        if (s.peak >= 20.0 - 1e-12) {
            lo = std::min(lo, s.fidelity_target);
            hi = std::max(hi, s.fidelity_target);
        }
    }
    const double deviation = std::abs(at20 - ref::kPeak20FidelityTarget);
    const double plateau = hi - lo;
    const bool ok = curve.samples.size() == 81 && low_ok && at20 > 0.9 && deviation < 1e-4 && plateau < 2e-3;
    return {ok && t < 60.0, fmt("F_target(20) = %.6f, ", at20) + fmt("reference deviation %.1e, ", deviation) +
                                fmt("plateau variation %.2e (bound 2e-3), ", plateau) + fmt("%.2f s", t)};
}

// 4
Outcome unitarity() {
    DriveSettings drive;
    drive.decay = 0.0;
    const FidelityCurve curve = fidelity_scan(0.0, 40.0, 81, drive);
    double worst = 0.0;
    for (const auto &s : curve.samples) worst = std::max(worst, std::abs(s.leakage));
    return {worst < 1e-6, fmt("max |1 - norm^2| = %.2e", worst)};
}

// 5
Outcome integrator_cross_check() {
    GaussianPair pulses{};
    pulses.peak = 20.0;
    const SiteHamiltonianSpec spec = SiteHamiltonianSpec::uniform(1.0, pulses);
    IntegratorConfig adaptive;
    adaptive.rel_tol = 1e-8;
    IntegratorConfig fixed;
    fixed.method = IntegratorMethod::fixed_rk4;
    fixed.max_step = 1e-3;
    const AtomState x = evolve_over_pulses(transfer_initial_state(), spec, adaptive);
    const AtomState y = evolve_over_pulses(transfer_initial_state(), spec, fixed);
    double worst = 0.0;
    for (std::size_t i = 0; i < kSiteLevels; ++i) worst = std::max(worst, std::abs(x.amplitudes()[i] - y.amplitudes()[i]));
    return {worst < 1e-6, fmt("max amplitude difference %.2e", worst)};
}

// 6
Outcome precision_budget() {
    const auto start = std::chrono::steady_clock::now();
    const double bound = max_angle_error(4, 1000, 0.0);
    const AsymptoticBudget at = asymptotic_budget(4, 1000, 1.0e-5, 0.0);
    const AsymptoticBudget above = asymptotic_budget(4, 1000, 1.0e-5 * (1 + 1e-9), 0.0);
    const double t = seconds_since(start);
    const bool ok = std::abs(bound - 1.0e-5) < 1e-15 && at.feasible && !above.feasible;
    return {ok && t < 1e-3, fmt("max dtheta = %.6e rad, ", bound) + fmt("%.1f us", t * 1e6)};
}

// 7
Outcome node_precision_closure() {
    double worst = 0.0;
    for (std::int64_t reach = 1; reach <= 50; ++reach) {
        const double residual = residual_rabi_at_node(required_node_precision(reach), reach, 20.0);
        worst = std::max(worst, std::abs(residual - 1.0));
    }
    return {worst < 0.05, fmt("max relative deviation from gamma_q %.2e", worst)};
}

// 8
Outcome raman_uniformity() {
    bool ok = true;
    for (std::int64_t reach = 1; reach <= 20; ++reach) {
        LatticeConfig lattice;
        lattice.reach = reach;
        lattice.site_count = 2 * (reach + 1);
        ok = ok && raman_uniformity_check(lattice) == (reach <= 2);
    }
    return {ok, "uniform exactly for L in {1, 2}"};
}

Dense cphase_dense(std::int64_t n, std::int64_t k, std::int64_t reach) {
    LatticeConfig l;
    l.site_count = n;
    l.target_site = k;
    l.reach = reach;
    const auto dim = static_cast<Eigen::Index>(std::pow(3, n));
    Dense out = Dense::Identity(dim, dim);
    for (std::int64_t s : l.sublattice()) {
        Dense pb = Dense::Zero(3, 3), rest = Dense::Identity(3, 3), z = Dense::Identity(3, 3);
        pb(1, 1) = 1.0;
        rest(1, 1) = 0.0;
        z(1, 1) = -1.0;
        std::vector<Dense> with_b(static_cast<std::size_t>(n), Dense::Identity(3, 3));
        with_b[static_cast<std::size_t>(s)] = pb;
        with_b[static_cast<std::size_t>(s + 1)] = z;
        std::vector<Dense> without_b(static_cast<std::size_t>(n), Dense::Identity(3, 3));
        without_b[static_cast<std::size_t>(s)] = rest;
        out = (embed(with_b) + embed(without_b)) * out;
    }
    return out;
}

LatticeRegister random_qubit_register(std::int64_t n) {
    std::vector<complex> amps(static_cast<std::size_t>(std::pow(3, n)));
    double n2 = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        bool qubit = true;
        for (std::int64_t s = 0; s < n; ++s) qubit = qubit && LatticeRegister::digit(i, s) != 2;
        if (!qubit) continue;
        amps[i] = {uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
        n2 += std::norm(amps[i]);
    }
    for (auto &z : amps) z /= std::sqrt(n2);
    LatticeRegister reg = LatticeRegister::uniform(n, kPlus);
    reg.assign(std::move(amps), 0.0);
    return reg;
}

// 9
Outcome gate_oracles() {
    AddressingProtocol protocol;
    Eigen::Matrix2cd h;
    h << kHalf, kHalf, kHalf, -kHalf;
    const std::tuple<std::int64_t, std::int64_t, std::int64_t> layouts[] = {{2, 0, 1}, {3, 1, 1}, {3, 0, 2}, {3, 1, 3}};
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto &[n, k, reach] = layouts[trial % 4];
        const double alpha = uniform(-2 * kPi, 2 * kPi);
        const double beta = uniform(-2 * kPi, 2 * kPi);

        LatticeRegister x = random_qubit_register(n);
        const DenseVector x0 = to_vector(x);
        protocol.rotate_x(x, k, reach, beta, OperationMode::ideal);
        Dense hc = Dense::Identity(1, 1);
        for (std::int64_t s = 0; s < n; ++s) hc = kron(lift(h), hc);
        const Dense rx_direct = site_operator(n, k, lift(rx_matrix(beta)));
        worst = std::max(worst, (to_vector(x) - rx_direct * x0).cwiseAbs().maxCoeff());
        worst = std::max(worst, ((hc * site_operator(n, k, lift(rz_matrix(beta))) * hc - rx_direct) * x0)
                                    .cwiseAbs().maxCoeff());

        LatticeRegister c = random_qubit_register(n);
        const DenseVector c0 = to_vector(c);
        protocol.controlled_rotation(c, k, reach, alpha, OperationMode::ideal);
        const Dense cz = cphase_dense(n, k, reach);
        const Dense composite = cz * site_operator(n, k + 1, lift(rx_matrix(-0.5 * alpha))) * cz;
        worst = std::max(worst, (to_vector(c) - composite * c0).cwiseAbs().maxCoeff());
    }
    return {worst < 1e-10, fmt("max deviation %.2e over 20 random angle pairs", worst)};
}

// 10
Outcome quench_round_trip() {
    AddressingProtocol protocol;
    double ideal = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::int64_t n = uniform_int(1, 5);
        std::vector<SiteVector> sites;
        for (std::int64_t s = 0; s < n; ++s) sites.push_back(random_site(true));
        LatticeRegister reg = LatticeRegister::product(sites);
        const DenseVector before = to_vector(reg);
        const std::int64_t k = uniform_int(0, n - 1), reach = uniform_int(1, 4);
        protocol.quench(reg, k, reach, OperationMode::ideal);
        protocol.inverse_quench(reg, k, reach, OperationMode::ideal);
        ideal = std::max(ideal, (to_vector(reg) - before).cwiseAbs().maxCoeff());
    }
    LatticeRegister pair = LatticeRegister::uniform(2, kPlus);
    const DenseVector start = to_vector(pair);
    protocol.quench(pair, 0, 1, OperationMode::simulated);
    protocol.inverse_quench(pair, 0, 1, OperationMode::simulated);
    const double fidelity = std::norm(start.dot(to_vector(pair)));
    const double bound = 0.995;
    return {ideal < 1e-12 && fidelity >= bound,
            fmt("ideal deviation %.1e, ", ideal) + fmt("simulated return fidelity %.5f (bound 0.995)", fidelity)};
}

// 11
Outcome patterned_loading() {
    const std::vector<bool> got = pattern_load(10, 2, 4);
    std::vector<std::int64_t> occupied;
    for (std::size_t s = 0; s < got.size(); ++s)
        if (got[s]) occupied.push_back(static_cast<std::int64_t>(s));
    bool ok = occupied == std::vector<std::int64_t>{2, 7};
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        const std::int64_t n = uniform_int(1, 300), k = uniform_int(0, n - 1), reach = uniform_int(1, 40);
        std::set<std::int64_t> oracle;
        for (std::int64_t s = k % (reach + 1); s < n; s += reach + 1) oracle.insert(s);
        const std::vector<bool> p = pattern_load(n, k, reach);
        for (std::int64_t s = 0; s < n; ++s) ok = ok && p[static_cast<std::size_t>(s)] == oracle.contains(s);
    }
    return {ok, "{2, 7} exact, 1000 random layouts match"};
}

// 12
Outcome measurement_statistics() {
    AddressingProtocol protocol;
    // N = 5, k = 1, L = 2: site 4 is another sublattice atom, site 2 a quenched neighbour.
    std::vector<SiteVector> sites(5, kPlus);
    const LatticeRegister start = LatticeRegister::product(sites);
    const Eigen::Matrix3cd other_node = start.reduced_density(4);
    const int trials = 10000;
    int bright = 0;
    double disturbance = 0.0;
    for (int t = 0; t < trials; ++t) {
        LatticeRegister reg = start;
        bright += protocol.measure(reg, 1, 2, derive_stream_seed(2026, static_cast<std::uint64_t>(t)),
                                   OperationMode::ideal).bright;
        disturbance = std::max(disturbance, (reg.reduced_density(4) - other_node).cwiseAbs().maxCoeff());
        for (std::int64_t s : {0, 2, 3})
            disturbance = std::max(disturbance, (reg.reduced_density(s) - start.reduced_density(s)).cwiseAbs().maxCoeff());
    }
    const double f = static_cast<double>(bright) / trials;
    const double sigma = std::sqrt(0.25 / trials);
    return {std::abs(f - 0.5) <= 3 * sigma && disturbance < 1e-12,
            fmt("bright frequency %.4f, ", f) + fmt("3 sigma = %.4f, ", 3 * sigma) +
                fmt("max neighbour change %.1e", disturbance)};
}

// 13
Outcome determinism() {
    const char *configs[] = {
        R"({"scan": {"points": 9}})",
        R"({"scenario": "quench", "lattice": {"N": 4, "k": 1, "L": 2}, "protocol": {"mode": "simulated"}})",
        R"({"scenario": "rotate", "lattice": {"N": 3, "k": 0, "L": 2}, "protocol": {"axis": "x", "angle": 0.7}})",
        R"({"scenario": "measure", "seed": 11, "lattice": {"N": 3, "k": 1, "L": 1}, "protocol": {"trials": 200}})",
        R"({"scenario": "cphase", "lattice": {"N": 5, "k": 0, "L": 2}})",
        R"({"scenario": "pattern-load", "lattice": {"N": 40, "k": 3, "L": 5}})",
        R"({"scenario": "precision-budget", "output_format": "json", "lattice": {"N": 1000, "k": 0, "L": 4}})",
        R"({"scenario": "protocol-script", "seed": 5, "output_format": "json", "lattice": {"N": 3, "k": 0, "L": 2},
            "protocol": {"steps": [{"op": "hadamard"}, {"op": "measure"}, {"op": "pump", "pump_mode": "trajectory"}]}})",
    };
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("lataddr-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto slurp = [](const fs::path &p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    int identical = 0;
    for (const char *text : configs) {
        RunConfig c = parse_config(text);
        c.output_path = (dir / "first").string();
        run_scenario(c);
        c.output_path = (dir / "second").string();
        run_scenario(c);
        const std::string a = slurp(dir / "first"), b = slurp(dir / "second");
        identical += !a.empty() && a == b;
    }
    fs::remove_all(dir);
    const int total = static_cast<int>(std::size(configs));
    return {identical == total, std::to_string(identical) + "/" + std::to_string(total) + " scenarios byte-identical"};
}

} // namespace

int main() {
    const std::pair<const char *, Check> criteria[] = {
        {"node exactness", node_exactness},
        {"identity limit", identity_limit},
        {"transfer curve shape", curve_shape},
        {"unitarity without decay", unitarity},
        {"integrator cross-check", integrator_cross_check},
        {"precision budget example", precision_budget},
        {"node precision closure", node_precision_closure},
        {"Raman uniformity", raman_uniformity},
        {"gate composition oracles", gate_oracles},
        {"quench round trip", quench_round_trip},
        {"patterned loading", patterned_loading},
        {"measurement statistics", measurement_statistics},
        {"determinism", determinism},
    };
    int failures = 0;
    int index = 0;
    for (const auto &[name, check] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception &e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double t = seconds_since(start);
        failures += !outcome.pass;
        std::printf("%s %2d %-26s %s [%.3f s]\n", outcome.pass ? "PASS" : "FAIL", index, name,
                    outcome.detail.c_str(), t);
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}
