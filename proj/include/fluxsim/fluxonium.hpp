#pragma once

#include "fluxsim/numerics.hpp"

#include <string>

namespace fluxsim {

// Circuit energies in GHz (H/h convention); external flux in radians,
// phi_ext = 2*pi*Phi_ext/Phi_0.
struct FluxoniumParams {
    double e_j = 4.0;
    double e_c = 1.0;
    double e_l = 1.0;
    double phi_ext = 3.14159265358979323846;

    void validate() const;
    // Advisory only: the design window 2 <= E_J/E_L <= 10, 2 <= E_J/E_C <= 10.
    bool in_fluxonium_regime() const;
};

enum class QubitOp { charge, phase, sin_half_phase };

// Truncated eigensystem of a single fluxonium: energies referenced to the
// ground state and operator matrix elements in the eigenbasis.
struct EigenSystem {
    FluxoniumParams params;
    int basis_size = 0;
    int level_count = 0;
    RVec energies;        // GHz, energies(0) == 0
    Mat n_elements;       // <i|n|j>
    Mat phi_elements;     // <i|phi|j>
    Mat sin_half_phi_elements;  // <i|sin(phi/2)|j>

    double transition(int i, int j) const;
    const Mat& op(QubitOp which) const;
};

// Hamiltonian of Eq.-(1) form in the harmonic oscillator basis of the
// E_L/E_C oscillator; cos(phi + phi_ext) expanded as
// cos(phi_ext)cos(phi) - sin(phi_ext)sin(phi) with cos/sin of the phase
// operator evaluated by spectral calculus.
Mat build_hamiltonian(const FluxoniumParams& params, int basis_size);

constexpr int kDefaultBasisSize = 110;
constexpr int kDefaultLevelCount = 12;

// Diagonalize and truncate. With check_convergence, doubles the basis and
// requires every retained transition from the ground state to move by less
// than 10 kHz.
EigenSystem spectrum(const FluxoniumParams& params, int basis_size = kDefaultBasisSize,
                     int level_count = kDefaultLevelCount, bool check_convergence = false);

double transition(const EigenSystem& eigsys, int i, int j);
double matrix_element(const EigenSystem& eigsys, QubitOp op, int i, int j);

}  // namespace fluxsim
