#!/usr/bin/env python3
# Copyright 2026 The lataddr Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent fine-step reference for the per-site Lambda-system transfer.

Integrates i d(psi)/dt = H(t) psi over levels (a, b, q, e) with scipy's DOP853
at tight tolerance, cross-checked against a midpoint matrix-exponential
propagator. Prints the constants frozen into tests/reference_values.hpp.
"""
import numpy as np

LICENSE = """// Copyright 2026 The lataddr Authors
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
"""
from scipy.integrate import solve_ivp
from scipy.linalg import expm

DELTA = 100.0
GAMMA = 1.0
T1, T2, WIDTH = 6.0, 0.0, 5.0
CUT = 4.0


def pulse(t, center, sign, peak):
    if abs(t - center) > CUT * WIDTH:
        return 0.0
    return sign * peak * np.exp(-((t - center) / WIDTH) ** 2)


def hamiltonian(t, peak, gamma=GAMMA, t1=T1, t2=T2):
    w1 = pulse(t, t1, -1.0, peak)
    w2 = pulse(t, t2, +1.0, peak)
    h = np.zeros((4, 4), dtype=complex)
    h[3, 3] = DELTA - 0.5j * gamma
    h[3, 1] = h[1, 3] = w1
    h[3, 2] = h[2, 3] = w2
    return h


def window(t1=T1, t2=T2):
    return min(t1, t2) - CUT * WIDTH, max(t1, t2) + CUT * WIDTH


def evolve_dop(psi0, peak, gamma=GAMMA, t1=T1, t2=T2):
    lo, hi = window(t1, t2)
    # split at truncation edges so the integrator never steps across a kink
    edges = sorted({lo, hi, t1 - CUT * WIDTH, t1 + CUT * WIDTH,
                    t2 - CUT * WIDTH, t2 + CUT * WIDTH})
    psi = np.asarray(psi0, dtype=complex)
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        sol = solve_ivp(lambda t, y: -1j * hamiltonian(t, peak, gamma, t1, t2) @ y,
                        (a, b), psi, method="DOP853", rtol=1e-12, atol=1e-14)
        psi = sol.y[:, -1]
    return psi


def evolve_expm(psi0, peak, dt=2e-3, gamma=GAMMA):
    lo, hi = window()
    n = int(round((hi - lo) / dt))
    psi = np.asarray(psi0, dtype=complex)
    for i in range(n):
        tm = lo + (i + 0.5) * dt
        psi = expm(-1j * hamiltonian(tm, peak, gamma) * dt) @ psi
    return psi


S = 1 / np.sqrt(2)
PSI = np.array([S, S, 0, 0], dtype=complex)
PSI_T = np.array([S, 0, S, 0], dtype=complex)


def summary(psi):
    fi = abs(np.vdot(PSI, psi)) ** 2
    ft = abs(np.vdot(PSI_T, psi)) ** 2
    return fi, ft, 1 - np.vdot(psi, psi).real


def transfer_phase(peak):
    out = evolve_dop([0, 1, 0, 0], peak)
    return float(np.angle(out[2]))


def round_trip_fidelity(peak):
    fwd = evolve_dop(PSI, peak)
    back = evolve_dop(fwd, peak, t1=T2, t2=T1)
    return abs(np.vdot(PSI, back)) ** 2


def emit(name, value):
    print(f"inline constexpr double {name} = {float(value)!r};")


if __name__ == "__main__":
    import sys
    if "--explore" in sys.argv:
        for peak in [0.2, 1, 2, 5, 10, 15, 20, 25, 30, 40]:
            fi, ft, leak = summary(evolve_dop(PSI, peak))
            print(f"peak {peak:5.1f} fi {fi:.12f} ft {ft:.12f} leak {leak:.3e}")
        psi_d = evolve_dop(PSI, 20.0)
        psi_e = evolve_expm(PSI, 20.0)
        print("dop vs expm max diff", np.max(np.abs(psi_d - psi_e)))
        sys.exit(0)

    print(LICENSE)
    print("// Generated by tests/oracle/stirap_reference.py; do not edit by hand.")
    print("#pragma once\n")
    print("namespace lataddr::reference {\n")
    fi, ft, leak = summary(evolve_dop(PSI, 0.2))
    emit("kLowPeakFidelityInitial", fi)
    psi = evolve_dop(PSI, 20.0)
    fi, ft, leak = summary(psi)
    emit("kPeak20FidelityInitial", fi)
    emit("kPeak20FidelityTarget", ft)
    emit("kPeak20Leakage", leak)
    for i, lvl in enumerate("abqe"):
        emit(f"kPeak20Amp_{lvl}_re", psi[i].real)
        emit(f"kPeak20Amp_{lvl}_im", psi[i].imag)
    grid = np.linspace(0.0, 40.0, 81)
    fts = [summary(evolve_dop(PSI, p))[1] for p in grid]
    plateau = [f for p, f in zip(grid, fts) if p >= 20.0]
    emit("kPlateauVariation", max(plateau) - min(plateau))
    emit("kScanFidelityTargetAt2", fts[4])
    emit("kScanFidelityTargetAt40", fts[-1])
    first = next(p for p, f in zip(grid, fts) if f >= ft)
    emit("kFirstGridPeakReachingPeak20Target", first)
    phases = [transfer_phase(p) for p in grid if p >= 20.0]
    emit("kTransferPhasePeak20", phases[0])
    emit("kTransferPhasePeak40", phases[-1])
    emit("kTransferPhaseVariation", max(phases) - min(phases))
    for label, (t1, t2) in {"Forward": (T1, T2), "Inverse": (T2, T1)}.items():
        for col in "bq":
            v = [0, 1, 0, 0] if col == "b" else [0, 0, 1, 0]
            out = evolve_dop(v, 20.0, t1=t1, t2=t2)
            for i, lvl in enumerate("bq"):
                emit(f"k{label}Map20_{lvl}{col}_re", out[i + 1].real)
                emit(f"k{label}Map20_{lvl}{col}_im", out[i + 1].imag)
    # L = 4 neighbour peaks: 20 at distance 1, 20 sin(2pi/5)/sin(pi/5) at distance 2
    far = 20.0 * np.sin(2 * np.pi / 5) / np.sin(np.pi / 5)
    emit("kRoundTripFidelityPeak20", round_trip_fidelity(20.0))
    emit("kRoundTripFidelityPeakFar", round_trip_fidelity(far))
    print("\n}  // namespace lataddr::reference")
