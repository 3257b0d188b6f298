#include "fluxsim/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fluxsim {

void require_hermitian(const Mat& h, double tol) {
    if (h.rows() != h.cols()) throw std::invalid_argument("matrix is not square");
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        for (Eigen::Index j = i; j < h.cols(); ++j) {
            if (std::abs(h(i, j) - std::conj(h(j, i))) > tol) {
                std::ostringstream os;
                os << "matrix is not Hermitian at (" << i << "," << j << "): |H(i,j) - conj(H(j,i))| = "
                   << std::abs(h(i, j) - std::conj(h(j, i)));
                throw std::invalid_argument(os.str());
            }
        }
    }
}

EighResult eigh(const Mat& h, double herm_tol) {
    require_hermitian(h, herm_tol);
    Eigen::SelfAdjointEigenSolver<Mat> solver(h);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: solver failed to converge");
    EighResult r{solver.eigenvalues(), solver.eigenvectors()};
    // phase convention: largest-magnitude component real positive
    for (Eigen::Index k = 0; k < r.vectors.cols(); ++k) {
        Eigen::Index imax = 0;
        double best = 0.0;
        for (Eigen::Index i = 0; i < r.vectors.rows(); ++i) {
            double a = std::abs(r.vectors(i, k));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        cxd z = r.vectors(imax, k);
        if (best > 0.0) r.vectors.col(k) *= std::conj(z) / best;
    }
    return r;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784,
                 kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;

// Generic adaptive DP54 on a matrix-valued state with a supplied RHS.
template <typename Rhs>
std::vector<Mat> dp54(const Rhs& rhs, const Mat& y0, const TimeGrid& grid, double tol) {
    const double t0 = grid.t_start, t1 = grid.t_end;
    std::vector<Mat> out;
    out.reserve(grid.sample_count);

    Mat y = y0;
    Mat k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, y5 = y, err = y;
    double t = t0;
    double h = (t1 - t0) / 1000.0;
    const double hmin = (t1 - t0) * 1e-14;

    rhs(t, y, k1);
    out.push_back(y);  // sample at t0
    int next_sample = 1;

    bool first_sample_pending = false;
    (void)first_sample_pending;

    // dense output between accepted steps done by 3rd-order Hermite interpolation
    Mat y_prev = y, f_prev = k1;
    double t_prev = t;

    while (next_sample < grid.sample_count) {
        double t_target = grid.time_at(next_sample);
        if (t >= t_target - 1e-15 * (t1 - t0)) {
            out.push_back(y);
            ++next_sample;
            continue;
        }
        double hstep = std::min(h, t1 - t);
        if (hstep < hmin) {
            std::ostringstream os;
            os << "integrator step-size underflow at t = " << t;
            throw std::runtime_error(os.str());
        }

        ytmp = y + hstep * (kA21 * k1);
        rhs(t + kC2 * hstep, ytmp, k2);
        ytmp = y + hstep * (kA31 * k1 + kA32 * k2);
        rhs(t + kC3 * hstep, ytmp, k3);
        ytmp = y + hstep * (kA41 * k1 + kA42 * k2 + kA43 * k3);
        rhs(t + kC4 * hstep, ytmp, k4);
        ytmp = y + hstep * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
        rhs(t + kC5 * hstep, ytmp, k5);
        ytmp = y + hstep * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
        rhs(t + hstep, ytmp, k6);
        y5 = y + hstep * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
        rhs(t + hstep, y5, k7);
        err = hstep * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);

        double errnorm = err.norm();
        double tol_step = tol * hstep * std::max(1.0, y.norm());
        if (errnorm <= tol_step) {
            t_prev = t;
            y_prev = y;
            f_prev = k1;
            t += hstep;
            y = y5;
            k1 = k7;  // FSAL
            // emit any samples inside (t_prev, t]
            while (next_sample < grid.sample_count) {
                double ts = grid.time_at(next_sample);
                if (ts > t + 1e-15 * (t1 - t0)) break;
                double th = (ts - t_prev) / hstep;
                // cubic Hermite between (t_prev, y_prev, f_prev) and (t, y, k1)
                double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
                double h10 = th * (1 - th) * (1 - th);
                double h01 = th * th * (3 - 2 * th);
                double h11 = th * th * (th - 1);
                out.push_back(h00 * y_prev + (h10 * hstep) * f_prev + h01 * y + (h11 * hstep) * k1);
                ++next_sample;
            }
        }
        double scale = (errnorm > 0.0) ? 0.9 * std::pow(tol_step / errnorm, 0.2) : 5.0;
        scale = std::clamp(scale, 0.2, 5.0);
        h = hstep * scale;
    }
    return out;
}

}  // namespace

std::vector<Mat> evolve_schrodinger_block(const HamiltonianFn& h_of_t, const Mat& psi0,
                                          const TimeGrid& grid, double tol) {
    const Eigen::Index dim = psi0.rows();
    Mat hbuf = Mat::Zero(dim, dim);
    auto rhs = [&](double t, const Mat& y, Mat& dy) {
        h_of_t(t, hbuf);
        dy.noalias() = hbuf * y;
        dy *= cxd(0.0, -kTwoPi);
    };
    return dp54(rhs, psi0, grid, tol);
}

std::vector<Vec> evolve_schrodinger(const HamiltonianFn& h_of_t, const Vec& psi0,
                                    const TimeGrid& grid, double tol) {
    Mat block(psi0.size(), 1);
    block.col(0) = psi0;
    auto frames = evolve_schrodinger_block(h_of_t, block, grid, tol);
    std::vector<Vec> out;
    out.reserve(frames.size());
    for (auto& f : frames) out.push_back(f.col(0));
    return out;
}

std::vector<Mat> evolve_lindblad(const HamiltonianFn& h_of_t, const std::vector<Mat>& collapse,
                                 const Mat& rho0, const TimeGrid& grid, double tol) {
    require_hermitian(rho0, 1e-9);
    if (std::abs(rho0.trace().real() - 1.0) > 1e-9 || std::abs(rho0.trace().imag()) > 1e-12)
        throw std::invalid_argument("evolve_lindblad: rho0 must have unit trace");
    {
        Eigen::SelfAdjointEigenSolver<Mat> es(rho0);
        if (es.eigenvalues().minCoeff() < -1e-9)
            throw std::invalid_argument("evolve_lindblad: rho0 is not positive semidefinite");
    }
    const Eigen::Index dim = rho0.rows();
    std::vector<Mat> ldag_l;
    ldag_l.reserve(collapse.size());
    for (const auto& l : collapse) ldag_l.push_back(l.adjoint() * l);

    Mat hbuf = Mat::Zero(dim, dim);
    auto rhs = [&](double t, const Mat& rho, Mat& drho) {
        h_of_t(t, hbuf);
        drho.noalias() = hbuf * rho;
        drho.noalias() -= rho * hbuf;
        drho *= cxd(0.0, -kTwoPi);
        for (size_t k = 0; k < collapse.size(); ++k) {
            drho.noalias() += collapse[k] * rho * collapse[k].adjoint();
            drho.noalias() -= 0.5 * (ldag_l[k] * rho + rho * ldag_l[k]);
        }
    };
    return dp54(rhs, rho0, grid, tol);
}

NmResult nelder_mead(const std::function<double(const RVec&)>& objective, const RVec& x0,
                     const OptimizerConfig& cfg) {
    if (cfg.f_tolerance <= 0 || cfg.x_tolerance <= 0 || cfg.initial_simplex_scale <= 0)
        throw std::invalid_argument("nelder_mead: tolerances must be strictly positive");
    const int n = int(x0.size());
    const double inf = std::numeric_limits<double>::infinity();
    NmResult res;
    int evals = 0;

    auto eval = [&](const RVec& x) {
        ++evals;
        double f = objective(x);
        return std::isfinite(f) ? f : inf;
    };

    std::vector<RVec> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (int i = 1; i <= n; ++i) {
        double step = cfg.initial_simplex_scale * std::max(1.0, std::abs(x0(i - 1)));
        xs[i](i - 1) += step;
    }
    for (int i = 0; i <= n; ++i) fs[i] = eval(xs[i]);

    auto order = [&] {
        std::vector<int> idx(n + 1);
        for (int i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        std::vector<RVec> xs2;
        std::vector<double> fs2;
        for (int i : idx) {
            xs2.push_back(xs[i]);
            fs2.push_back(fs[i]);
        }
        xs.swap(xs2);
        fs.swap(fs2);
    };

    order();
    if (!std::isfinite(fs[0])) throw std::runtime_error("nelder_mead: objective non-finite over the whole initial simplex");
    res.trace.emplace_back(xs[0], fs[0]);

    while (evals < cfg.max_evaluations) {
        order();
        double fspread = fs[n] - fs[0];
        double xspread = 0.0;
        for (int i = 1; i <= n; ++i) xspread = std::max(xspread, (xs[i] - xs[0]).norm());
        if (std::isfinite(fspread) && fspread <= cfg.f_tolerance && xspread <= cfg.x_tolerance) {
            res.converged = true;
            break;
        }

        RVec centroid = RVec::Zero(n);
        for (int i = 0; i < n; ++i) centroid += xs[i];
        centroid /= double(n);

        RVec xr = centroid + (centroid - xs[n]);
        double fr = eval(xr);
        if (fr < fs[0]) {
            RVec xe = centroid + 2.0 * (centroid - xs[n]);
            double fe = eval(xe);
            if (fe < fr) {
                xs[n] = xe;
                fs[n] = fe;
            } else {
                xs[n] = xr;
                fs[n] = fr;
            }
        } else if (fr < fs[n - 1]) {
            xs[n] = xr;
            fs[n] = fr;
        } else {
            bool outside = fr < fs[n];
            RVec xc = outside ? RVec(centroid + 0.5 * (xr - centroid))
                              : RVec(centroid + 0.5 * (xs[n] - centroid));
            double fc = eval(xc);
            if (fc < std::min(fr, fs[n])) {
                xs[n] = xc;
                fs[n] = fc;
            } else {
                // shrink toward best
                for (int i = 1; i <= n; ++i) {
                    xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
                    fs[i] = eval(xs[i]);
                    if (evals >= cfg.max_evaluations) break;
                }
            }
        }
        if (fs[0] < res.trace.back().second) res.trace.emplace_back(xs[0], fs[0]);
    }

    order();
    res.x = xs[0];
    res.f = fs[0];
    res.evaluations = evals;
    if (!std::isfinite(res.f)) throw std::runtime_error("nelder_mead: no finite objective value found");
    return res;
}

LinearFit linear_fit(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
    double tmin = t[0], tmax = t[0];
    for (double v : t) {
        tmin = std::min(tmin, v);
        tmax = std::max(tmax, v);
    }
    if (tmax - tmin <= 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    const double n = double(t.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    double denom = n * stt - st * st;
    LinearFit fit;
    fit.slope = (n * sty - st * sy) / denom;
    fit.intercept = (sy - fit.slope * st) / n;
    double ss = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        double r = y[i] - (fit.slope * t[i] + fit.intercept);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / n);
    return fit;
}

}  // namespace fluxsim
