#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fluxsim {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Units convention used throughout: Hamiltonians hold ordinary frequencies
// (GHz), time is in ns, so the Schrodinger equation reads
//   dpsi/dt = -2*pi*i * H(t) * psi.
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct EighResult {
    RVec values;   // ascending
    Mat vectors;   // orthonormal columns, phase-fixed
};

// Dense Hermitian eigendecomposition. Rejects non-Hermitian input (reports the
// offending entry), sorts ascending, and fixes each eigenvector's phase so its
// largest-magnitude component is real positive.
EighResult eigh(const Mat& h, double herm_tol = 1e-12);

void require_hermitian(const Mat& h, double tol = 1e-12);

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 0.0;
    int sample_count = 0;

    TimeGrid() = default;
    TimeGrid(double t0, double t1, int n) : t_start(t0), t_end(t1), sample_count(n) {
        if (!(t1 > t0)) throw std::invalid_argument("TimeGrid: t_end must exceed t_start");
        if (n < 2) throw std::invalid_argument("TimeGrid: need at least 2 samples");
    }
    double time_at(int i) const {
        return t_start + (t_end - t_start) * double(i) / double(sample_count - 1);
    }
};

// Fills h with H(t); h is preallocated to the right dimension.
using HamiltonianFn = std::function<void(double t, Mat& h)>;

// Adaptive Dormand-Prince 5(4) propagation of one or more state columns.
// Local error is controlled to tol per unit time. Returns the state block at
// every grid sample. Throws on step-size underflow, reporting the time.
std::vector<Mat> evolve_schrodinger_block(const HamiltonianFn& h_of_t, const Mat& psi0,
                                          const TimeGrid& grid, double tol = 1e-10);

std::vector<Vec> evolve_schrodinger(const HamiltonianFn& h_of_t, const Vec& psi0,
                                    const TimeGrid& grid, double tol = 1e-10);

// Lindblad master equation: drho/dt = -2*pi*i [H, rho] + sum_k D[L_k] rho.
// Collapse operators carry units of 1/sqrt(ns). rho0 must be Hermitian,
// positive semidefinite, and unit trace.
std::vector<Mat> evolve_lindblad(const HamiltonianFn& h_of_t, const std::vector<Mat>& collapse,
                                 const Mat& rho0, const TimeGrid& grid, double tol = 1e-10);

struct OptimizerConfig {
    double initial_simplex_scale = 0.1;  // per-parameter, relative steps
    double f_tolerance = 1e-12;
    double x_tolerance = 1e-10;
    int max_evaluations = 400;
};

struct NmResult {
    RVec x;
    double f = 0.0;
    int evaluations = 0;
    bool converged = false;
    std::vector<std::pair<RVec, double>> trace;  // accepted best points
};

// Nelder-Mead simplex search. Non-finite objective values are treated as +inf;
// a simplex that is entirely non-finite is a failure.
NmResult nelder_mead(const std::function<double(const RVec&)>& objective, const RVec& x0,
                     const OptimizerConfig& cfg = {});

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

LinearFit linear_fit(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace fluxsim
