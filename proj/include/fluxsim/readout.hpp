#pragma once

#include "fluxsim/fluxonium.hpp"

#include <string>
#include <vector>

namespace fluxsim {

struct ReadoutConfig {
    double omega_r_ghz = 7.0;   // bare resonator frequency
    double g_mhz = 100.0;       // geometric coupling constant
    QubitOp coupling_kind = QubitOp::charge;
    int resonator_levels = 14;
    double kappa_mhz = 2.0;

    void validate() const;
};

struct ChiResult {
    double chi_mhz = 0.0;
    bool dispersive_warning = false;     // a virtual detuning came within 3g
    double min_detuning_ghz = 0.0;       // smallest contributing |w_xl - w_R|
    double min_label_overlap = 1.0;      // exact route only
};

// Second-order perturbation theory for the qubit-state-dependent resonator
// shift, truncated at the eigensystem's level count.
ChiResult chi01_perturbative(const EigenSystem& eigsys, const ReadoutConfig& cfg);

// Exact route: diagonalize the joint fluxonium-resonator Hamiltonian with a
// single resonator mode, label dressed states by maximal overlap with bare
// product states, and return chi01(p) from the photon-number-dependent
// transition frequencies. Throws if a needed label has overlap < 0.5.
ChiResult chi01_exact(const FluxoniumParams& params, const ReadoutConfig& cfg, int photon_number,
                      int fluxonium_levels = 8);

}  // namespace fluxsim
