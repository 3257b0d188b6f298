#include "fluxsim/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fluxsim {

void CoupledSystem::validate() const {
    qubit_a.validate();
    qubit_b.validate();
    if (per_qubit_levels < 3) throw std::invalid_argument("CoupledSystem: per_qubit_levels >= 3");
    if (j_l_mhz < 0) throw std::invalid_argument("CoupledSystem: J_L is non-negative by the -J_L phi phi sign convention");
}

namespace {

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

void greedy_label(const Mat& vectors, std::vector<int>& label_of, std::vector<double>& overlap) {
    const int dim = int(vectors.rows());
    label_of.assign(dim, -1);
    overlap.assign(dim, 0.0);
    struct Entry {
        double p;
        int prod, eig;
    };
    std::vector<Entry> entries;
    entries.reserve(size_t(dim) * dim);
    for (int e = 0; e < dim; ++e)
        for (int p = 0; p < dim; ++p) {
            double w = std::norm(vectors(p, e));
            if (w > 1e-9) entries.push_back({w, p, e});
        }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.p > b.p; });
    std::vector<char> used(dim, 0);
    for (const auto& en : entries) {
        if (label_of[en.prod] >= 0 || used[en.eig]) continue;
        label_of[en.prod] = en.eig;
        overlap[en.prod] = en.p;
        used[en.eig] = 1;
    }
}

}  // namespace

int CoupledModel::dressed_index(int ka, int lb) const {
    int p = ka * nlev + lb;
    if (ka < 0 || lb < 0 || ka >= nlev || lb >= nlev || label_of[p] < 0)
        throw std::out_of_range("CoupledModel: bad dressed-state label");
    if (overlap[p] < 0.5) {
        std::ostringstream os;
        os << "CoupledModel: dressed label |" << ka << lb << "> ambiguous (overlap " << overlap[p] << ")";
        throw std::runtime_error(os.str());
    }
    return label_of[p];
}

double CoupledModel::dressed_energy(int ka, int lb) const { return energies(dressed_index(ka, lb)); }

Vec CoupledModel::dressed_state(int ka, int lb) const {
    return eigenvectors.col(dressed_index(ka, lb));
}

CoupledModel build_coupled(const CoupledSystem& cs) {
    cs.validate();
    CoupledModel m;
    m.config = cs;
    m.nlev = cs.per_qubit_levels;
    m.sys_a = spectrum(cs.qubit_a, kDefaultBasisSize, std::max(kDefaultLevelCount, cs.per_qubit_levels));
    m.sys_b = spectrum(cs.qubit_b, kDefaultBasisSize, std::max(kDefaultLevelCount, cs.per_qubit_levels));

    const int n = cs.per_qubit_levels;
    Mat ida = Mat::Identity(n, n);
    Mat ea = Mat::Zero(n, n), eb = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        ea(i, i) = m.sys_a.energies(i);
        eb(i, i) = m.sys_b.energies(i);
    }
    Mat na = m.sys_a.n_elements.topLeftCorner(n, n);
    Mat nb = m.sys_b.n_elements.topLeftCorner(n, n);
    Mat pa = m.sys_a.phi_elements.topLeftCorner(n, n);
    Mat pb = m.sys_b.phi_elements.topLeftCorner(n, n);

    m.n_a = kron(na, ida);
    m.n_b = kron(ida, nb);
    m.phi_a = kron(pa, ida);
    m.phi_b = kron(ida, pb);

    Mat h = kron(ea, ida) + kron(ida, eb) + (cs.j_c_mhz * 1e-3) * kron(na, nb) -
            (cs.j_l_mhz * 1e-3) * kron(pa, pb);
    auto eig = eigh(h, 1e-9);
    m.energies = eig.values.array() - eig.values(0);
    m.eigenvectors = eig.vectors;
    greedy_label(m.eigenvectors, m.label_of, m.overlap);
    return m;
}

double mu_phi(const CoupledModel& m) {
    Vec v00 = m.dressed_state(0, 0);
    Vec v01 = m.dressed_state(0, 1);
    Vec v10 = m.dressed_state(1, 0);
    const double num = std::abs(cxd(v00.adjoint() * m.phi_a * v01));
    const double den = std::abs(cxd(v00.adjoint() * m.phi_a * v10));
    if (den < 1e-15) return 0.0;
    return num / den;
}

double zeta_zz_static_khz(const CoupledModel& m) {
    double z = m.dressed_energy(0, 0) + m.dressed_energy(1, 1) - m.dressed_energy(1, 0) -
               m.dressed_energy(0, 1);
    return z * 1e6;  // GHz -> kHz
}

double find_zz_null_mhz(CoupledSystem cs, double lo, double hi) {
    auto zz_at = [&](double jc) {
        cs.j_c_mhz = jc;
        return zeta_zz_static_khz(build_coupled(cs));
    };
    double flo = zz_at(lo), fhi = zz_at(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) {
        std::ostringstream os;
        os << "find_zz_null: no sign change over [" << lo << ", " << hi << "] MHz; zeta = " << flo
           << " kHz and " << fhi << " kHz at the endpoints";
        throw std::runtime_error(os.str());
    }
    double mid = 0.5 * (lo + hi), fmid = 0.0;
    for (int it = 0; it < 60; ++it) {
        mid = 0.5 * (lo + hi);
        fmid = zz_at(mid);
        if (std::abs(fmid) < 0.1) return mid;
        if ((fmid > 0) == (flo > 0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return mid;
}

double spin_model_mu_x(const SpinPair& sp) {
    Mat x(2, 2), i2 = Mat::Identity(2, 2), nq(2, 2);
    x << 0, 1, 1, 0;
    nq << 0, 0, 0, 1;  // excitation-number form of (I-Z)/2
    Mat h = (sp.omega_a_mhz * 1e-3) * kron(nq, i2) + (sp.omega_b_mhz * 1e-3) * kron(i2, nq) +
            (sp.j_eff_mhz * 1e-3) * kron(x, x);
    auto eig = eigh(h);
    std::vector<int> label;
    std::vector<double> overlap;
    greedy_label(eig.vectors, label, overlap);
    Mat xa = kron(x, i2);
    Vec v00 = eig.vectors.col(label[0]);
    Vec v01 = eig.vectors.col(label[1]);
    Vec v10 = eig.vectors.col(label[2]);
    const double num = std::abs(cxd(v00.adjoint() * xa * v01));
    const double den = std::abs(cxd(v00.adjoint() * xa * v10));
    if (den < 1e-15) return 0.0;
    return num / den;
}

double map_jl_to_jeff_mhz(const CoupledModel& m) {
    const double pa = matrix_element(m.sys_a, QubitOp::phase, 0, 1);
    const double pb = matrix_element(m.sys_b, QubitOp::phase, 0, 1);
    return m.config.j_l_mhz * pa * pb;
}

}  // namespace fluxsim
