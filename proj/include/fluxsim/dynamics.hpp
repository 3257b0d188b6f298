#pragma once

#include "fluxsim/fluxonium.hpp"

#include <vector>

namespace fluxsim {

enum class PulseShape { cosine, flat_top_cosine };
enum class DriveChannel { charge, flux };

// Drive envelope; amplitudes are ordinary frequencies (MHz), times in ns.
// DRAG adds a quadrature component lambda * dE_I/dt and a detuning delta.
struct PulseEnvelope {
    PulseShape shape = PulseShape::cosine;
    double epsilon_d_mhz = 0.0;
    double tau_g_ns = 0.0;
    double tau_ramp_ns = 0.0;      // flat-top only
    double drag_lambda = 0.0;      // multiplies dE_I/dt (ns units)
    double detuning_delta_mhz = 0.0;

    void validate() const;
    double in_phase_ghz(double t_ns) const;       // E_I(t) in GHz
    double quadrature_ghz(double t_ns) const;     // E_Q(t) = lambda * dE_I/dt
};

struct DriveSpec {
    DriveChannel channel = DriveChannel::flux;
    double omega_d_ghz = 0.0;   // carrier; detuning_delta is added on top
    double phase = 0.0;
    PulseEnvelope envelope;
    int target_qubit = 0;

    void validate() const;
};

struct GateResult {
    Mat u_comp;              // computational-subspace block, rotating frame
    double leakage = 0.0;
    double fidelity = 0.0;       // virtual-Z corrected
    double fidelity_raw = 0.0;   // straight Eq.-(8)/(19) value
    std::vector<std::pair<RVec, double>> optimizer_trace;
};

// A truncated system the pulse engine can drive: static eigenenergies plus
// the drive coupling operators in the same basis.
struct DrivenSystem {
    RVec energies;                    // GHz, diagonal static part
    std::vector<Mat> drive_ops;       // one per drive channel used
    std::vector<int> comp_indices;    // computational basis states within the truncation
};

// H(t) = diag(energies) + sum_k E_k(t) * op_k with
// E_k(t) = E_I(t) cos(w t + phase) + E_Q(t) sin(w t + phase), w including the
// DRAG detuning. Lab frame, no rotating-wave approximation.
HamiltonianFn assemble_drive_hamiltonian(const DrivenSystem& sys,
                                         const std::vector<DriveSpec>& drives);

// Truncated single-qubit driven system (>= 3 levels for leakage accounting).
DrivenSystem truncate_single(const EigenSystem& eigsys, DriveChannel channel, int truncation);

// Propagate the computational basis columns over [0, tau_g].
Mat propagate_basis(const DrivenSystem& sys, const std::vector<DriveSpec>& drives, double tau_g_ns,
                    double tol = 1e-10);

// Restrict the propagated columns to the computational subspace, move to the
// frame rotating at the static energies, and strip the global phase (phase of
// the largest-magnitude element of the first column if (0,0) vanishes).
GateResult extract_computational_unitary(const DrivenSystem& sys, const Mat& final_states,
                                         double tau_g_ns);

// Average-fidelity formula F = [Tr(U^dag U) + |Tr(U^dag U_ideal)|^2] / (d(d+1))
// with d the computational dimension; U need not be unitary.
double gate_fidelity_raw(const Mat& u, const Mat& u_ideal);

// Fidelity maximized over virtual-Z frame phases on every qubit (closed form
// for 1Q; for 2Q a 1D scan over the one residual phase combination).
double gate_fidelity_virtual_z(const Mat& u, const Mat& u_ideal);

}  // namespace fluxsim
