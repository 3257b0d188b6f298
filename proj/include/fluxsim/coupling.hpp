#pragma once

#include "fluxsim/fluxonium.hpp"

namespace fluxsim {

// Two directly coupled fluxoniums, H = H_A + H_B + J_C n_A n_B - J_L phi_A phi_B,
// in the truncated product of single-qubit eigenbases.
struct CoupledSystem {
    FluxoniumParams qubit_a;
    FluxoniumParams qubit_b;
    double j_c_mhz = 0.0;
    double j_l_mhz = 0.0;
    int per_qubit_levels = 5;

    void validate() const;
};

struct CoupledModel {
    CoupledSystem config;
    int nlev = 0;                  // per-qubit levels
    RVec energies;                 // dressed, GHz, referenced to the ground state
    Mat eigenvectors;              // columns in the product basis (a-major)
    std::vector<int> label_of;     // product index (ka*nlev + lb) -> eigenindex
    std::vector<double> overlap;   // labeling quality per product index
    Mat phi_a, n_a, phi_b, n_b;    // single-qubit ops lifted to the product basis
    EigenSystem sys_a, sys_b;      // the underlying single-qubit systems

    int dressed_index(int ka, int lb) const;
    double dressed_energy(int ka, int lb) const;  // GHz
    Vec dressed_state(int ka, int lb) const;
};

CoupledModel build_coupled(const CoupledSystem& cs);

// Hybridization measure mu_phi = |<00|phi_A|01>| / |<00|phi_A|10>| from the
// dressed eigenvectors.
double mu_phi(const CoupledModel& m);

// Static ZZ rate w00 + w11 - w10 - w01 in kHz (signed).
double zeta_zz_static_khz(const CoupledModel& m);

// Bisection on J_C for |zeta_ZZ| < 0.1 kHz. Throws if the bracket does not
// change sign (endpoint values included in the message).
double find_zz_null_mhz(CoupledSystem cs, double j_c_lo_mhz, double j_c_hi_mhz);

struct SpinPair {
    double omega_a_mhz = 0.0;
    double omega_b_mhz = 0.0;
    double j_eff_mhz = 0.0;
};

// Exact 4x4 diagonalization of H = (wA/2)(I-Z_A) + (wB/2)(I-Z_B) + Jeff X_A X_B.
double spin_model_mu_x(const SpinPair& sp);

// J_eff = J_L * |phi01_A| * |phi01_B| (the coupled-spin mapping).
double map_jl_to_jeff_mhz(const CoupledModel& m);

}  // namespace fluxsim
