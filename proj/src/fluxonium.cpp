#include "fluxsim/fluxonium.hpp"

#include <cmath>
#include <sstream>

namespace fluxsim {

void FluxoniumParams::validate() const {
    if (!(e_j > 0.0) || !(e_c > 0.0) || !(e_l > 0.0)) {
        std::ostringstream os;
        os << "FluxoniumParams: all energies must be strictly positive (E_J=" << e_j
           << ", E_C=" << e_c << ", E_L=" << e_l << ")";
        throw std::invalid_argument(os.str());
    }
}

bool FluxoniumParams::in_fluxonium_regime() const {
    double rl = e_j / e_l, rc = e_j / e_c;
    return rl >= 2.0 && rl <= 10.0 && rc >= 2.0 && rc <= 10.0;
}

namespace {

struct OscillatorOps {
    Mat phi;       // real symmetric
    Mat n;         // imaginary antisymmetric-in-real-part, Hermitian
    Mat cos_phi;
    Mat sin_phi;
    Mat sin_half_phi;
};

OscillatorOps oscillator_ops(const FluxoniumParams& p, int basis_size) {
    const Eigen::Index n = basis_size;
    const double phi_zpf = std::pow(8.0 * p.e_c / p.e_l, 0.25) / std::sqrt(2.0);
    const double n_zpf = std::pow(p.e_l / (8.0 * p.e_c), 0.25) / std::sqrt(2.0);

    OscillatorOps ops;
    ops.phi = Mat::Zero(n, n);
    ops.n = Mat::Zero(n, n);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        double r = std::sqrt(double(k + 1));
        ops.phi(k, k + 1) = phi_zpf * r;
        ops.phi(k + 1, k) = phi_zpf * r;
        ops.n(k, k + 1) = cxd(0.0, -n_zpf * r);   // i*n_zpf*(b^dag - b)
        ops.n(k + 1, k) = cxd(0.0, n_zpf * r);
    }
    // spectral calculus on phi for cos, sin, sin(phi/2)
    Eigen::SelfAdjointEigenSolver<Mat> es(ops.phi);
    const Mat& v = es.eigenvectors();
    RVec w = es.eigenvalues();
    auto fn_of_phi = [&](auto f) {
        Vec d(n);
        for (Eigen::Index i = 0; i < n; ++i) d(i) = f(w(i));
        return Mat(v * (d.asDiagonal() * v.adjoint()));
    };
    ops.cos_phi = fn_of_phi([](double x) { return std::cos(x); });
    ops.sin_phi = fn_of_phi([](double x) { return std::sin(x); });
    ops.sin_half_phi = fn_of_phi([](double x) { return std::sin(0.5 * x); });
    return ops;
}

}  // namespace

Mat build_hamiltonian(const FluxoniumParams& params, int basis_size) {
    params.validate();
    if (basis_size < 20) throw std::invalid_argument("build_hamiltonian: basis_size must be >= 20");
    auto ops = oscillator_ops(params, basis_size);
    Mat h = 4.0 * params.e_c * (ops.n * ops.n) + 0.5 * params.e_l * (ops.phi * ops.phi);
    h -= params.e_j * (std::cos(params.phi_ext) * ops.cos_phi - std::sin(params.phi_ext) * ops.sin_phi);
    return h;
}

EigenSystem spectrum(const FluxoniumParams& params, int basis_size, int level_count,
                     bool check_convergence) {
    params.validate();
    if (level_count > basis_size / 2)
        throw std::invalid_argument("spectrum: level_count must be <= basis_size / 2");

    auto ops = oscillator_ops(params, basis_size);
    Mat h = 4.0 * params.e_c * (ops.n * ops.n) + 0.5 * params.e_l * (ops.phi * ops.phi);
    h -= params.e_j * (std::cos(params.phi_ext) * ops.cos_phi - std::sin(params.phi_ext) * ops.sin_phi);
    auto eig = eigh(h, 1e-9);

    EigenSystem sys;
    sys.params = params;
    sys.basis_size = basis_size;
    sys.level_count = level_count;
    sys.energies = eig.values.head(level_count).array() - eig.values(0);
    const Mat v = eig.vectors.leftCols(level_count);
    sys.n_elements = v.adjoint() * ops.n * v;
    sys.phi_elements = v.adjoint() * ops.phi * v;
    sys.sin_half_phi_elements = v.adjoint() * ops.sin_half_phi * v;

    if (check_convergence) {
        EigenSystem big = spectrum(params, 2 * basis_size, level_count, false);
        for (int k = 1; k < level_count; ++k) {
            double shift = std::abs(big.energies(k) - sys.energies(k));
            if (shift > 10e-6) {  // 10 kHz in GHz
                std::ostringstream os;
                os << "spectrum: basis_size " << basis_size << " not converged, omega_0" << k
                   << " shifts by " << shift * 1e6 << " kHz on basis doubling";
                throw std::runtime_error(os.str());
            }
        }
    }
    return sys;
}

double EigenSystem::transition(int i, int j) const { return fluxsim::transition(*this, i, j); }

const Mat& EigenSystem::op(QubitOp which) const {
    switch (which) {
        case QubitOp::charge: return n_elements;
        case QubitOp::phase: return phi_elements;
        case QubitOp::sin_half_phase: return sin_half_phi_elements;
    }
    throw std::invalid_argument("unknown operator");
}

double transition(const EigenSystem& eigsys, int i, int j) {
    if (i < 0 || j < 0 || i >= j || j >= eigsys.level_count)
        throw std::out_of_range("transition: need 0 <= i < j < level_count");
    return eigsys.energies(j) - eigsys.energies(i);
}

double matrix_element(const EigenSystem& eigsys, QubitOp op, int i, int j) {
    if (i < 0 || j < 0 || i >= eigsys.level_count || j >= eigsys.level_count)
        throw std::out_of_range("matrix_element: index out of range");
    return std::abs(eigsys.op(op)(i, j));
}

}  // namespace fluxsim
