#pragma once

#include "fluxsim/dynamics.hpp"

namespace fluxsim {

enum class TargetRotation { x_pi, y_pi };

struct SingleQubitGateSpec {
    const EigenSystem* eigsys = nullptr;
    DriveChannel channel = DriveChannel::flux;
    double tau_g_ns = 10.0;
    TargetRotation target = TargetRotation::x_pi;
    int truncation = 6;

    void validate() const;
    double eta01() const;  // |n01| or |phi01|
};

struct Gate1qOutcome {
    GateResult gate;
    PulseEnvelope pulse;
    int evaluations = 0;
    bool budget_exhausted = false;
};

// Starting amplitude from the pi-area relation eps_d * eta01 * tau_g = 0.25.
double seed_amplitude_mhz(const SingleQubitGateSpec& spec);

// Lab-frame simulation of the pulse against the ideal rotation; fidelity is
// reported raw and maximized over pre/post virtual-Z phases.
GateResult simulate_pi_gate(const SingleQubitGateSpec& spec, const PulseEnvelope& pulse);

// Amplitude prescan followed by Nelder-Mead over (amplitude factor, DRAG
// lambda, detuning) minimizing 1 - F.
Gate1qOutcome optimize_gate(const SingleQubitGateSpec& spec, const OptimizerConfig& cfg = {});

enum class SweepParameter { amplitude, drag, detuning };

// One-dimensional sweeps holding the other parameters at their defaults
// (amplitude factor 0.5, lambda 0, delta 0). Returns (value, error) pairs.
std::vector<std::pair<double, double>> parameter_sensitivity(const SingleQubitGateSpec& spec,
                                                             SweepParameter which, double lo,
                                                             double hi, int points);

// Pulse with every parameter explicit; amplitude factor is relative to the
// full-rotation amplitude 2/(eta01 tau_g).
PulseEnvelope make_pulse(const SingleQubitGateSpec& spec, double amp_factor, double drag_lambda,
                         double detuning_mhz);

}  // namespace fluxsim
