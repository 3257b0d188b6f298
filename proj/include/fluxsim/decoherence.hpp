#pragma once

#include "fluxsim/fluxonium.hpp"

#include <optional>

namespace fluxsim {

// Loss-channel parameters. Defaults follow the architecture study's budget:
// tan(delta) = 2e-7 referenced at 5 GHz, x_qp = 5e-9 (the value tied to the
// 1 ms relaxation anchor; the companion figure quotes 2e-9), aluminum gap
// ~44 GHz, qubit at 20 mK, resonator at 50 mK.
struct NoiseEnvironment {
    double tan_delta_diel = 2e-7;
    double x_qp = 5e-9;
    double delta_al_ghz = 44.0;
    double temperature_qubit_k = 0.020;
    double temperature_resonator_k = 0.050;
    // Frequency exponent for Q_diel(omega); 0 keeps the loss tangent constant.
    double diel_freq_exponent = 0.0;

    void validate() const;
};

struct CoherenceRates {
    double gamma_1 = 0.0;    // 1/s
    double gamma_phi = 0.0;  // 1/s

    static CoherenceRates from_t1_t2(double t1_s, double t2_s);
    double t2() const { return 1.0 / (gamma_1 / 2.0 + gamma_phi); }
};

// T1 values are capped at this sentinel when a channel decouples.
constexpr double kT1CapSeconds = 1e6;

// Dielectric-loss relaxation rate, Fermi-golden-rule form
//   Gamma = (hbar w01^2 / 4 E_C Q) |phi01|^2 (coth(hbar w01 / 2 kT) + 1) / 2,
// normalized so a two-level system reproduces T1 = Q/omega_01 at T -> 0
// (the transmon anchor; see README notes on the thermal-factor convention).
double gamma1_dielectric(double f01_ghz, double phi01_abs2, double e_c_ghz,
                         const NoiseEnvironment& env);
double t1_dielectric(const EigenSystem& eigsys, const NoiseEnvironment& env);

// Quasiparticle tunneling in the inductor array (array-limit formula with the
// phi/2 matrix element); detailed-balance thermal factor coth(hbar w/2kT).
double gamma1_quasiparticle(double f01_ghz, double half_phi01_abs2, double e_l_ghz,
                            const NoiseEnvironment& env);
double t1_quasiparticle(const EigenSystem& eigsys, const NoiseEnvironment& env);

double t1_total(const EigenSystem& eigsys, const NoiseEnvironment& env);

// Thermal-photon dephasing through a readout resonator of linewidth kappa.
double thermal_dephasing(double chi01_mhz, double kappa_mhz, double omega_r_ghz,
                         double t_res_kelvin);

// Decoherence-limited average gate fidelity from the Pauli-transfer-matrix
// analytics: F_p = 2^-N prod_i (1 + e^{-G1 tau} + 2 e^{-(G1/2+Gphi) tau}),
// F = (2^N F_p + 1) / (2^N + 1).
double decoherence_fidelity(int qubit_count, const std::vector<CoherenceRates>& rates,
                            double tau_s);

// Cross-check by Lindblad process tomography: propagate 4^N informationally
// complete inputs, reconstruct the PTM by linear inversion, and score against
// the ideal channel. h_sys (GHz, optional) adds coherent evolution.
double decoherence_fidelity_lindblad(int qubit_count, const std::vector<CoherenceRates>& rates,
                                     double tau_s, const std::optional<Mat>& h_sys = std::nullopt);

}  // namespace fluxsim
