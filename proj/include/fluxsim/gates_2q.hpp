#pragma once

#include "fluxsim/coupling.hpp"
#include "fluxsim/dynamics.hpp"

#include <array>

namespace fluxsim {

// Flux drive on qubit A at the dressed frequency of qubit B (flat-top pulse).
struct CrGateSpec {
    const CoupledModel* model = nullptr;
    double tau_g_ns = 300.0;
    double tau_ramp_ns = 50.0;
    double tolerance = 1e-10;

    void validate() const;
};

// Simultaneous off-resonant flux drives on both qubits at a common frequency.
struct CzGateSpec {
    const CoupledModel* model = nullptr;
    double omega_d_ghz = 0.0;
    double phase_a = 0.0;
    double phase_b = 0.0;
    double tau_g_ns = 300.0;
    double tau_ramp_ns = 100.0;  // tau_ramp == tau_g/2 degenerates to the cosine shape
    double tolerance = 1e-10;

    void validate() const;
};

struct CrRateResult {
    double mu_mhz = 0.0;   // ZX/2 coefficient, signed
    double m_mhz = 0.0;    // IX/2 coefficient
    double eps0_mhz = 0.0;  // target rotation rate, control in |0>
    double eps1_mhz = 0.0;
    double fit_rms_rad = 0.0;
    bool flagged = false;   // poor linearity of the extracted rotation angle
};

struct Gate2qOutcome {
    GateResult gate;
    double eps_a_mhz = 0.0;  // CR uses eps_a only
    double eps_b_mhz = 0.0;
    int evaluations = 0;
    bool tuned = false;      // conditionality target reached within budget
};

struct CzRateResult {
    double zeta_mhz = 0.0;
    double fit_rms_rad = 0.0;
    bool flagged = false;
};

struct LeakageDiagnostics {
    double total = 0.0;     // both drives on, averaged over computational inputs
    double qubit_a_only = 0.0;
    double qubit_b_only = 0.0;
};

// Dressed-basis driven system for the coupled pair. Drive operators are the
// single-qubit phase operators normalized by |phi01| so amplitudes are bare
// 0-1 Rabi rates.
DrivenSystem make_driven_pair(const CoupledModel& m);

// Dressed B-qubit transition frequency (equal for both control states once the
// static ZZ is nulled).
double dressed_omega_b_ghz(const CoupledModel& m);

// Continuous-drive ZX rate extraction: drive A at the dressed B frequency with
// a flat-top pulse, track the target Bloch-vector rotation for control |0> and
// |1>, and fit the angle slopes. mu = (eps0 - eps1)/2, m = (eps0 + eps1)/2.
CrRateResult cr_rate(const CrGateSpec& spec, double eps_d_mhz, double duration_ns = 400.0);

// First-order estimate mu = J_eff * eps_d / Delta (ordinary frequency units).
double first_order_cr_mu_mhz(double j_eff_mhz, double delta_mhz, double eps_d_mhz);

// Conditionality R = 0.5 * || bloch0 - bloch1 ||.
double conditionality(const std::array<double, 3>& bloch0, const std::array<double, 3>& bloch1);

// Amplitude tune-up on |1 - R|, then Nelder-Mead on the gate error itself;
// fidelity against CNOT after virtual-Z and target X-rotation corrections.
Gate2qOutcome tune_cnot(const CrGateSpec& spec, int max_evaluations = 400);

// Dynamical ZZ rate under continuous drives: dressed-state phase evolution of
// the four computational states, phi_ZZ fit linearly over the plateau.
CzRateResult cz_dynamical_zz(const CzGateSpec& spec, double eps_a_mhz, double eps_b_mhz);

// Analytic rate (perturbative): zeta = 2 J_eff eps_A eps_B cos(phi_A - phi_B)
// / (delta_A delta_B), deltas measured from the drive to the qubits.
double analytic_cz_zeta_mhz(double j_eff_mhz, double eps_a_mhz, double eps_b_mhz,
                            double delta_a_mhz, double delta_b_mhz, double phase_diff_rad);

// Conditionality-seeded Nelder-Mead over (eps_A, eps_B); fidelity against CZ
// with virtual-Z corrections.
Gate2qOutcome tune_cz(const CzGateSpec& spec, int max_evaluations = 400);

// Leakage with both drives on and with each qubit driven separately.
LeakageDiagnostics leakage_diagnostics(const CzGateSpec& spec, double eps_a_mhz, double eps_b_mhz);

}  // namespace fluxsim
