#include "fluxsim/dynamics.hpp"

#include <cmath>

namespace fluxsim {

void PulseEnvelope::validate() const {
    if (!(tau_g_ns > 0)) throw std::invalid_argument("PulseEnvelope: tau_g must be positive");
    if (shape == PulseShape::flat_top_cosine && 2.0 * tau_ramp_ns > tau_g_ns)
        throw std::invalid_argument("PulseEnvelope: need 2*tau_ramp <= tau_g");
}

double PulseEnvelope::in_phase_ghz(double t) const {
    const double eps = epsilon_d_mhz * 1e-3;
    if (t < 0.0 || t > tau_g_ns) return 0.0;
    if (shape == PulseShape::cosine) return 0.5 * eps * (1.0 - std::cos(kTwoPi * t / tau_g_ns));
    if (t < tau_ramp_ns) return 0.5 * eps * (1.0 - std::cos(M_PI * t / tau_ramp_ns));
    if (t > tau_g_ns - tau_ramp_ns)
        return 0.5 * eps * (1.0 - std::cos(M_PI * (tau_g_ns - t) / tau_ramp_ns));
    return eps;
}

double PulseEnvelope::quadrature_ghz(double t) const {
    if (drag_lambda == 0.0) return 0.0;
    const double eps = epsilon_d_mhz * 1e-3;
    if (t < 0.0 || t > tau_g_ns) return 0.0;
    double deriv;
    if (shape == PulseShape::cosine) {
        deriv = 0.5 * eps * (kTwoPi / tau_g_ns) * std::sin(kTwoPi * t / tau_g_ns);
    } else if (t < tau_ramp_ns) {
        deriv = 0.5 * eps * (M_PI / tau_ramp_ns) * std::sin(M_PI * t / tau_ramp_ns);
    } else if (t > tau_g_ns - tau_ramp_ns) {
        deriv = -0.5 * eps * (M_PI / tau_ramp_ns) * std::sin(M_PI * (tau_g_ns - t) / tau_ramp_ns);
    } else {
        deriv = 0.0;
    }
    return drag_lambda * deriv;
}

void DriveSpec::validate() const {
    if (!(omega_d_ghz > 0)) throw std::invalid_argument("DriveSpec: omega_d must be positive");
    envelope.validate();
}

HamiltonianFn assemble_drive_hamiltonian(const DrivenSystem& sys,
                                         const std::vector<DriveSpec>& drives) {
    if (sys.energies.size() < 3)
        throw std::invalid_argument("assemble_drive_hamiltonian: truncation below 3 levels leaves leakage unmeasurable");
    if (drives.size() != sys.drive_ops.size())
        throw std::invalid_argument("assemble_drive_hamiltonian: one coupling operator per drive");
    for (const auto& d : drives) d.validate();

    const Eigen::Index dim = sys.energies.size();
    Mat h_static = Mat::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) h_static(i, i) = sys.energies(i);
    auto drives_copy = drives;
    auto ops = sys.drive_ops;

    return [h_static, drives_copy, ops](double t, Mat& h) {
        h = h_static;
        for (size_t k = 0; k < drives_copy.size(); ++k) {
            const auto& d = drives_copy[k];
            const double w = kTwoPi * (d.omega_d_ghz + d.envelope.detuning_delta_mhz * 1e-3);
            const double amp = d.envelope.in_phase_ghz(t) * std::cos(w * t + d.phase) +
                               d.envelope.quadrature_ghz(t) * std::sin(w * t + d.phase);
            if (amp != 0.0) h += amp * ops[k];
        }
    };
}

DrivenSystem truncate_single(const EigenSystem& eigsys, DriveChannel channel, int truncation) {
    if (truncation < 3 || truncation > eigsys.level_count)
        throw std::invalid_argument("truncate_single: need 3 <= truncation <= level_count");
    DrivenSystem sys;
    sys.energies = eigsys.energies.head(truncation);
    const Mat& full = (channel == DriveChannel::charge) ? eigsys.n_elements : eigsys.phi_elements;
    sys.drive_ops.push_back(full.topLeftCorner(truncation, truncation));
    sys.comp_indices = {0, 1};
    return sys;
}

namespace {
Mat basis_columns(const DrivenSystem& sys) {
    const Eigen::Index dim = sys.energies.size();
    Mat psi0 = Mat::Zero(dim, Eigen::Index(sys.comp_indices.size()));
    for (size_t j = 0; j < sys.comp_indices.size(); ++j) psi0(sys.comp_indices[j], j) = 1.0;
    return psi0;
}
}  // namespace

Mat propagate_basis(const DrivenSystem& sys, const std::vector<DriveSpec>& drives, double tau_g_ns,
                    double tol) {
    auto h = assemble_drive_hamiltonian(sys, drives);
    return evolve_schrodinger_block(h, basis_columns(sys), TimeGrid(0.0, tau_g_ns, 2), tol).back();
}

GateResult extract_computational_unitary(const DrivenSystem& sys, const Mat& final_states,
                                         double tau_g_ns) {
    const int nc = int(sys.comp_indices.size());
    if (final_states.cols() != nc)
        throw std::invalid_argument("extract_computational_unitary: one final state per computational input");

    GateResult res;
    res.u_comp = Mat(nc, nc);
    double pop_sum = 0.0;
    for (int j = 0; j < nc; ++j) {
        for (int i = 0; i < nc; ++i) {
            const int row = sys.comp_indices[i];
            const cxd frame = std::exp(cxd(0.0, kTwoPi * sys.energies(row) * tau_g_ns));
            res.u_comp(i, j) = frame * final_states(row, j);
            pop_sum += std::norm(final_states(row, j));
        }
    }
    res.leakage = 1.0 - pop_sum / double(nc);

    cxd anchor = res.u_comp(0, 0);
    if (std::abs(anchor) < 1e-6) {
        double best = 0.0;
        for (int i = 0; i < nc; ++i)
            if (std::abs(res.u_comp(i, 0)) > best) {
                best = std::abs(res.u_comp(i, 0));
                anchor = res.u_comp(i, 0);
            }
    }
    if (std::abs(anchor) > 0.0) res.u_comp *= std::conj(anchor) / std::abs(anchor);
    return res;
}

double gate_fidelity_raw(const Mat& u, const Mat& u_ideal) {
    const double d = double(u.rows());
    const double tr_uu = (u.adjoint() * u).trace().real();
    const cxd tr_ui = (u.adjoint() * u_ideal).trace();
    return (tr_uu + std::norm(tr_ui)) / (d * (d + 1.0));
}

namespace {

// max over theta of |a + b e^{i theta}| + |c + d e^{i theta}| via golden scan
double scan_max(const std::function<double(double)>& f) {
    const int n = 720;
    double best_x = 0.0, best = -1.0;
    for (int i = 0; i < n; ++i) {
        double x = kTwoPi * i / n;
        double v = f(x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    double lo = best_x - kTwoPi / n, hi = best_x + kTwoPi / n;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    for (int it = 0; it < 60; ++it) {
        if (f(c) > f(d)) hi = d;
        else lo = c;
        c = hi - gr * (hi - lo);
        d = lo + gr * (hi - lo);
    }
    return f(0.5 * (lo + hi)) > best ? f(0.5 * (lo + hi)) : best;
}

bool is_diagonal(const Mat& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j && std::abs(m(i, j)) > 1e-12) return false;
    return true;
}

bool is_cnot_pattern(const Mat& m) {
    // nonzeros only at (0,0),(1,1),(2,3),(3,2)
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) {
            bool allowed = (i == j && i < 2) || (i == 2 && j == 3) || (i == 3 && j == 2);
            if (!allowed && std::abs(m(i, j)) > 1e-12) return false;
        }
    return std::abs(m(0, 0)) > 0 && std::abs(m(1, 1)) > 0 && std::abs(m(2, 3)) > 0 &&
           std::abs(m(3, 2)) > 0;
}

}  // namespace

double gate_fidelity_virtual_z(const Mat& u, const Mat& u_ideal) {
    const Eigen::Index d = u.rows();
    const double tr_uu = (u.adjoint() * u).trace().real();

    double best_tr = 0.0;
    if (d == 2) {
        // Tr(ideal^dag Z(b) U Z(a)) = z00 + z01 e^{ia} + z10 e^{ib} + z11 e^{i(a+b)}
        const cxd z00 = std::conj(u_ideal(0, 0)) * u(0, 0);
        const cxd z01 = std::conj(u_ideal(0, 1)) * u(0, 1);
        const cxd z10 = std::conj(u_ideal(1, 0)) * u(1, 0);
        const cxd z11 = std::conj(u_ideal(1, 1)) * u(1, 1);
        best_tr = scan_max([&](double a) {
            cxd ea = std::exp(cxd(0, a));
            return std::abs(z00 + z01 * ea) + std::abs(z10 + z11 * ea);
        });
    } else if (d == 4 && is_diagonal(u_ideal)) {
        const cxd q0 = std::conj(u_ideal(0, 0)) * u(0, 0);
        const cxd q1 = std::conj(u_ideal(1, 1)) * u(1, 1);
        const cxd q2 = std::conj(u_ideal(2, 2)) * u(2, 2);
        const cxd q3 = std::conj(u_ideal(3, 3)) * u(3, 3);
        best_tr = scan_max([&](double a) {
            cxd ea = std::exp(cxd(0, a));
            return std::abs(q0 + q2 * ea) + std::abs(q1 + q3 * ea);
        });
    } else if (d == 4 && is_cnot_pattern(u_ideal)) {
        best_tr = std::abs(std::conj(u_ideal(0, 0)) * u(0, 0)) +
                  std::abs(std::conj(u_ideal(1, 1)) * u(1, 1)) +
                  std::abs(std::conj(u_ideal(2, 3)) * u(2, 3)) +
                  std::abs(std::conj(u_ideal(3, 2)) * u(3, 2));
    } else {
        throw std::invalid_argument("gate_fidelity_virtual_z: unsupported ideal-gate pattern");
    }
    return (tr_uu + best_tr * best_tr) / (double(d) * (double(d) + 1.0));
}

}  // namespace fluxsim
