#include "fluxsim/decoherence.hpp"

#include <cmath>

namespace fluxsim {

namespace {
constexpr double kPlanck = 6.62607015e-34;   // J s
constexpr double kBoltzmann = 1.380649e-23;  // J/K
constexpr double kPi = 3.14159265358979323846;

double coth(double x) { return 1.0 / std::tanh(x); }
}  // namespace

void NoiseEnvironment::validate() const {
    if (!(tan_delta_diel > 0) || !(x_qp >= 0) || !(delta_al_ghz > 0) ||
        !(temperature_qubit_k > 0) || !(temperature_resonator_k > 0))
        throw std::invalid_argument("NoiseEnvironment: fields must be positive");
}

CoherenceRates CoherenceRates::from_t1_t2(double t1_s, double t2_s) {
    CoherenceRates r;
    r.gamma_1 = 1.0 / t1_s;
    r.gamma_phi = 1.0 / t2_s - 0.5 / t1_s;
    if (r.gamma_phi < 0 && r.gamma_phi > -1e-9 / t1_s) r.gamma_phi = 0.0;
    if (r.gamma_phi < 0) throw std::invalid_argument("CoherenceRates: T2 > 2*T1 is unphysical");
    return r;
}

double gamma1_dielectric(double f01_ghz, double phi01_abs2, double e_c_ghz,
                         const NoiseEnvironment& env) {
    env.validate();
    const double f01 = f01_ghz * 1e9;
    const double q_diel = std::pow(f01_ghz / 5.0, -env.diel_freq_exponent) / env.tan_delta_diel;
    const double x = kPlanck * f01 / (2.0 * kBoltzmann * env.temperature_qubit_k);
    // hbar w^2 / (4 E_C) in ordinary-frequency units is pi f^2 / (2 E_C)
    return kPi * f01 * f01 / (2.0 * e_c_ghz * 1e9 * q_diel) * phi01_abs2 * 0.5 * (coth(x) + 1.0);
}

double t1_dielectric(const EigenSystem& eigsys, const NoiseEnvironment& env) {
    if (eigsys.level_count < 2) throw std::invalid_argument("t1_dielectric: need >= 2 levels");
    const double phi01 = matrix_element(eigsys, QubitOp::phase, 0, 1);
    if (phi01 * phi01 < 1e-30) return kT1CapSeconds;
    double g = gamma1_dielectric(eigsys.transition(0, 1), phi01 * phi01, eigsys.params.e_c, env);
    return std::min(1.0 / g, kT1CapSeconds);
}

double gamma1_quasiparticle(double f01_ghz, double half_phi01_abs2, double e_l_ghz,
                            const NoiseEnvironment& env) {
    env.validate();
    // 8 E_L / (pi hbar) with E_L = h * E_L[Hz] gives 16 E_L[Hz]
    const double g0 = half_phi01_abs2 * 16.0 * e_l_ghz * 1e9 * env.x_qp *
                      std::sqrt(2.0 * env.delta_al_ghz / f01_ghz);
    const double x = kPlanck * f01_ghz * 1e9 / (2.0 * kBoltzmann * env.temperature_qubit_k);
    return g0 * coth(x);
}

double t1_quasiparticle(const EigenSystem& eigsys, const NoiseEnvironment& env) {
    if (eigsys.level_count < 2) throw std::invalid_argument("t1_quasiparticle: need >= 2 levels");
    const double hp01 = 0.5 * matrix_element(eigsys, QubitOp::phase, 0, 1);
    if (env.x_qp <= 0.0 || hp01 * hp01 < 1e-30) return kT1CapSeconds;
    double g = gamma1_quasiparticle(eigsys.transition(0, 1), hp01 * hp01, eigsys.params.e_l, env);
    return std::min(1.0 / g, kT1CapSeconds);
}

double t1_total(const EigenSystem& eigsys, const NoiseEnvironment& env) {
    double g = 1.0 / t1_dielectric(eigsys, env) + 1.0 / t1_quasiparticle(eigsys, env);
    return std::min(1.0 / g, kT1CapSeconds);
}

double thermal_dephasing(double chi01_mhz, double kappa_mhz, double omega_r_ghz,
                         double t_res_kelvin) {
    if (!(kappa_mhz > 0)) throw std::invalid_argument("thermal_dephasing: kappa must be positive");
    if (chi01_mhz == 0.0) return 0.0;
    const double n_th =
        1.0 / std::expm1(kPlanck * omega_r_ghz * 1e9 / (kBoltzmann * t_res_kelvin));
    if (n_th == 0.0) return 0.0;
    const cxd ratio(0.0, chi01_mhz / kappa_mhz);
    const cxd arg = (1.0 + ratio) * (1.0 + ratio) + 4.0 * ratio * n_th;
    const double kappa_angular = kTwoPi * kappa_mhz * 1e6;  // 1/s
    return 0.5 * kappa_angular * (std::sqrt(arg) - 1.0).real();
}

double decoherence_fidelity(int qubit_count, const std::vector<CoherenceRates>& rates,
                            double tau_s) {
    if (tau_s < 0) throw std::invalid_argument("decoherence_fidelity: tau must be >= 0");
    if (int(rates.size()) != qubit_count)
        throw std::invalid_argument("decoherence_fidelity: one CoherenceRates per qubit");
    const double dim = std::pow(2.0, qubit_count);
    double fp = 1.0;
    for (const auto& r : rates) {
        fp *= (1.0 + std::exp(-r.gamma_1 * tau_s) +
               2.0 * std::exp(-(0.5 * r.gamma_1 + r.gamma_phi) * tau_s)) /
              4.0;
    }
    return (dim * fp + 1.0) / (dim + 1.0);
}

namespace {

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

std::vector<Mat> pauli_basis(int n_qubits) {
    Mat id = Mat::Identity(2, 2);
    Mat sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
    sz << 1, 0, 0, -1;
    std::vector<Mat> singles{id, sx, sy, sz};
    std::vector<Mat> out{Mat::Identity(1, 1)};
    for (int q = 0; q < n_qubits; ++q) {
        std::vector<Mat> next;
        for (const auto& a : out)
            for (const auto& s : singles) next.push_back(kron(a, s));
        out = next;
    }
    return out;
}

}  // namespace

double decoherence_fidelity_lindblad(int qubit_count, const std::vector<CoherenceRates>& rates,
                                     double tau_s, const std::optional<Mat>& h_sys) {
    if (qubit_count < 1 || qubit_count > 2)
        throw std::invalid_argument("decoherence_fidelity_lindblad: 1 or 2 qubits");
    if (int(rates.size()) != qubit_count)
        throw std::invalid_argument("decoherence_fidelity_lindblad: one CoherenceRates per qubit");
    const int dim = 1 << qubit_count;
    const double tau_ns = tau_s * 1e9;

    Mat h = h_sys.value_or(Mat::Zero(dim, dim));
    if (h.rows() != dim) throw std::invalid_argument("decoherence_fidelity_lindblad: bad H dimension");
    HamiltonianFn hfn = [&](double, Mat& out) { out = h; };

    // collapse operators in 1/sqrt(ns)
    std::vector<Mat> collapse;
    Mat low(2, 2), deph(2, 2), id = Mat::Identity(2, 2);
    low << 0, 1, 0, 0;
    deph << 1, 0, 0, -1;
    for (int q = 0; q < qubit_count; ++q) {
        double g1_ns = rates[q].gamma_1 * 1e-9;
        double gphi_ns = rates[q].gamma_phi * 1e-9;
        Mat l1 = std::sqrt(g1_ns) * low;
        Mat lphi = std::sqrt(gphi_ns / 2.0) * deph;
        if (qubit_count == 2) {
            l1 = (q == 0) ? kron(l1, id) : kron(id, l1);
            lphi = (q == 0) ? kron(lphi, id) : kron(id, lphi);
        }
        if (g1_ns > 0) collapse.push_back(l1);
        if (gphi_ns > 0) collapse.push_back(lphi);
    }

    // informationally complete single-qubit inputs |0>, |1>, |+>, |+i>
    std::vector<Vec> kets(4, Vec(2));
    kets[0] << 1, 0;
    kets[1] << 0, 1;
    kets[2] << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    kets[3] << 1.0 / std::sqrt(2.0), cxd(0.0, 1.0 / std::sqrt(2.0));

    const int n_inputs = 1 << (2 * qubit_count);  // 4^N
    std::vector<Mat> rho_in(n_inputs), rho_out(n_inputs);
    TimeGrid grid(0.0, std::max(tau_ns, 1e-9), 3);
    for (int k = 0; k < n_inputs; ++k) {
        Vec ket = (qubit_count == 1) ? kets[k] : Vec(kron(Mat(kets[k / 4]), Mat(kets[k % 4])));
        rho_in[k] = ket * ket.adjoint();
        if (tau_s == 0.0 && collapse.empty() && !h_sys) {
            rho_out[k] = rho_in[k];
        } else {
            rho_out[k] = evolve_lindblad(hfn, collapse, rho_in[k], grid).back();
        }
    }

    // PTM by linear inversion: express each normalized Pauli in the rho_in
    // basis, map through, and take Pauli overlaps.
    auto paulis = pauli_basis(qubit_count);
    const int np = int(paulis.size());
    Mat basis(dim * dim, n_inputs);
    for (int k = 0; k < n_inputs; ++k)
        basis.col(k) = Eigen::Map<const Vec>(rho_in[k].data(), dim * dim);
    Eigen::ColPivHouseholderQR<Mat> qr(basis);

    Mat ptm(np, np);
    for (int j = 0; j < np; ++j) {
        Vec pj = Eigen::Map<const Vec>(paulis[j].data(), dim * dim);
        Vec coeff = qr.solve(pj);
        Mat mapped = Mat::Zero(dim, dim);
        for (int k = 0; k < n_inputs; ++k) mapped += coeff(k) * rho_out[k];
        for (int i = 0; i < np; ++i)
            ptm(i, j) = (paulis[i].adjoint() * mapped).trace() / double(dim);
    }
    if (ptm.imag().cwiseAbs().maxCoeff() > 1e-8)
        throw std::runtime_error("decoherence_fidelity_lindblad: reconstructed PTM is not real");

    // ideal PTM of the coherent part alone
    Mat r_ideal = Mat::Identity(np, np);
    if (h_sys) {
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        Vec ph(dim);
        for (int i = 0; i < dim; ++i)
            ph(i) = std::exp(cxd(0.0, -kTwoPi * es.eigenvalues()(i) * tau_ns));
        Mat u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
        for (int i = 0; i < np; ++i)
            for (int j = 0; j < np; ++j)
                r_ideal(i, j) = (paulis[i].adjoint() * u * paulis[j] * u.adjoint()).trace() /
                                double(dim);
    }

    double fp = (r_ideal.adjoint() * ptm).trace().real() / double(np);
    const double d2 = std::pow(2.0, qubit_count);
    return (d2 * fp + 1.0) / (d2 + 1.0);
}

}  // namespace fluxsim
