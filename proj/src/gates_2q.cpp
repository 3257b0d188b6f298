#include "fluxsim/gates_2q.hpp"

#include <cmath>
#include <numeric>

namespace fluxsim {

void CrGateSpec::validate() const {
    if (!model) throw std::invalid_argument("CrGateSpec: model required");
    if (2.0 * tau_ramp_ns > tau_g_ns) throw std::invalid_argument("CrGateSpec: 2*tau_ramp <= tau_g");
}

void CzGateSpec::validate() const {
    if (!model) throw std::invalid_argument("CzGateSpec: model required");
    if (!(omega_d_ghz > 0)) throw std::invalid_argument("CzGateSpec: omega_d must be positive");
    if (2.0 * tau_ramp_ns > tau_g_ns) throw std::invalid_argument("CzGateSpec: 2*tau_ramp <= tau_g");
}

DrivenSystem make_driven_pair(const CoupledModel& m) {
    DrivenSystem sys;
    sys.energies = m.energies;
    const double pa01 = matrix_element(m.sys_a, QubitOp::phase, 0, 1);
    const double pb01 = matrix_element(m.sys_b, QubitOp::phase, 0, 1);
    const Mat& v = m.eigenvectors;
    sys.drive_ops.push_back(v.adjoint() * (m.phi_a / pa01) * v);
    sys.drive_ops.push_back(v.adjoint() * (m.phi_b / pb01) * v);
    sys.comp_indices = {m.dressed_index(0, 0), m.dressed_index(0, 1), m.dressed_index(1, 0),
                        m.dressed_index(1, 1)};
    return sys;
}

double dressed_omega_b_ghz(const CoupledModel& m) {
    return m.dressed_energy(0, 1) - m.dressed_energy(0, 0);
}

double first_order_cr_mu_mhz(double j_eff_mhz, double delta_mhz, double eps_d_mhz) {
    if (delta_mhz == 0.0) throw std::invalid_argument("first_order_cr_mu: delta must be nonzero");
    return j_eff_mhz * eps_d_mhz / delta_mhz;
}

double conditionality(const std::array<double, 3>& b0, const std::array<double, 3>& b1) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(b0[i]) > 1.0 + 1e-9 || std::abs(b1[i]) > 1.0 + 1e-9)
            throw std::invalid_argument("conditionality: Bloch components must lie in [-1, 1]");
        double d = b0[i] - b1[i];
        s += d * d;
    }
    return 0.5 * std::sqrt(s);
}

namespace {

struct DrivePair {
    DrivenSystem sys;
    std::vector<DriveSpec> drives;  // drive 0 on A, drive 1 on B
};

DrivePair make_drives(const CoupledModel& m, double omega_d_ghz, double eps_a_mhz,
                      double eps_b_mhz, double phase_a, double phase_b, double tau_g,
                      double tau_ramp) {
    DrivePair p;
    p.sys = make_driven_pair(m);
    for (int q = 0; q < 2; ++q) {
        DriveSpec d;
        d.channel = DriveChannel::flux;
        d.omega_d_ghz = omega_d_ghz;
        d.phase = (q == 0) ? phase_a : phase_b;
        d.target_qubit = q;
        d.envelope.shape = PulseShape::flat_top_cosine;
        d.envelope.epsilon_d_mhz = (q == 0) ? eps_a_mhz : eps_b_mhz;
        d.envelope.tau_g_ns = tau_g;
        d.envelope.tau_ramp_ns = tau_ramp;
        p.drives.push_back(d);
    }
    return p;
}

// Rotating-frame amplitudes of the target-B doublet for a given control state.
struct Doublet {
    cxd a, b;  // <c0|psi>, <c1|psi> with free evolution removed
};

Doublet target_doublet(const CoupledModel& m, const Vec& psi, int control, double t) {
    Doublet d;
    Vec v0 = m.dressed_state(control, 0);
    Vec v1 = m.dressed_state(control, 1);
    d.a = cxd(v0.adjoint() * psi) * std::exp(cxd(0, kTwoPi * m.dressed_energy(control, 0) * t));
    d.b = cxd(v1.adjoint() * psi) * std::exp(cxd(0, kTwoPi * m.dressed_energy(control, 1) * t));
    return d;
}

std::array<double, 3> bloch_of(const Doublet& d) {
    double n = std::norm(d.a) + std::norm(d.b);
    if (n < 1e-12) return {0, 0, 0};
    cxd cross = std::conj(d.a) * d.b;
    return {2.0 * cross.real() / n, 2.0 * cross.imag() / n,
            (std::norm(d.a) - std::norm(d.b)) / n};
}

Mat ideal_cnot() {
    Mat u = Mat::Zero(4, 4);
    u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
    return u;
}

Mat ideal_cz() {
    Mat u = Mat::Identity(4, 4);
    u(3, 3) = -1.0;
    return u;
}

// CNOT fidelity after virtual-Z plus a calibrated post X-rotation on the
// target (the commuting IX factor of the CR decomposition).
double cnot_fidelity_corrected(const Mat& u_comp) {
    Mat cnot = ideal_cnot();
    auto fid_at = [&](double theta) {
        Mat rx(2, 2);
        rx << std::cos(theta / 2), cxd(0, -std::sin(theta / 2)), cxd(0, -std::sin(theta / 2)),
            std::cos(theta / 2);
        Mat corr = Mat::Zero(4, 4);
        corr.block(0, 0, 2, 2) = rx;
        corr.block(2, 2, 2, 2) = rx;
        return gate_fidelity_virtual_z(corr * u_comp, cnot);
    };
    const int n = 360;
    double best = -1.0, best_th = 0.0;
    for (int i = 0; i < n; ++i) {
        double th = kTwoPi * i / n;
        double f = fid_at(th);
        if (f > best) {
            best = f;
            best_th = th;
        }
    }
    double lo = best_th - kTwoPi / n, hi = best_th + kTwoPi / n;
    for (int it = 0; it < 50; ++it) {
        double c = lo + (hi - lo) / 3, d2 = hi - (hi - lo) / 3;
        if (fid_at(c) < fid_at(d2)) lo = c;
        else hi = d2;
    }
    return std::max(best, fid_at(0.5 * (lo + hi)));
}

double angle_slope(const std::vector<double>& ts, const std::vector<double>& angles,
                   double* rms_out) {
    auto fit = linear_fit(ts, angles);
    if (rms_out) *rms_out = fit.rms_residual;
    return fit.slope;  // rad/ns
}

}  // namespace

CrRateResult cr_rate(const CrGateSpec& spec, double eps_d_mhz, double duration_ns) {
    spec.validate();
    const CoupledModel& m = *spec.model;
    const double ramp = std::min(spec.tau_ramp_ns, duration_ns / 4.0);
    auto dp = make_drives(m, dressed_omega_b_ghz(m), eps_d_mhz, 0.0, 0.0, 0.0, duration_ns, ramp);
    std::vector<DriveSpec> drive_a{dp.drives[0]};
    DrivenSystem sys = dp.sys;
    sys.drive_ops = {sys.drive_ops[0]};

    const int samples = std::max(200, int(duration_ns));
    TimeGrid grid(0.0, duration_ns, samples);
    Mat psi0(m.energies.size(), 2);
    psi0.col(0) = m.dressed_state(0, 0);
    psi0.col(1) = m.dressed_state(1, 0);
    auto h = assemble_drive_hamiltonian(sys, drive_a);
    auto frames = evolve_schrodinger_block(h, psi0, grid, spec.tolerance);

    CrRateResult res;
    double slopes[2], rms[2];
    for (int branch = 0; branch < 2; ++branch) {
        std::vector<double> ts, ang;
        double prev = 0.0;
        bool first = true;
        for (int s = 0; s < samples; ++s) {
            double t = grid.time_at(s);
            if (t < ramp) continue;  // plateau only
            auto d = target_doublet(m, frames[s].col(branch), branch, t);
            auto b = bloch_of(d);
            double a = std::atan2(-b[1], b[2]);
            if (!first) {
                while (a - prev > M_PI) a -= kTwoPi;
                while (a - prev < -M_PI) a += kTwoPi;
            }
            first = false;
            prev = a;
            ts.push_back(t);
            ang.push_back(a);
        }
        slopes[branch] = angle_slope(ts, ang, &rms[branch]);
    }
    // slope (rad/ns) -> rotation rate in ordinary MHz
    res.eps0_mhz = slopes[0] / kTwoPi * 1e3;
    res.eps1_mhz = slopes[1] / kTwoPi * 1e3;
    res.mu_mhz = 0.5 * (res.eps0_mhz - res.eps1_mhz);
    res.m_mhz = 0.5 * (res.eps0_mhz + res.eps1_mhz);
    res.fit_rms_rad = std::max(rms[0], rms[1]);
    res.flagged = res.fit_rms_rad > 0.05 * kTwoPi;
    return res;
}

Gate2qOutcome tune_cnot(const CrGateSpec& spec, int max_evaluations) {
    spec.validate();
    const CoupledModel& m = *spec.model;
    const double wd = dressed_omega_b_ghz(m);
    const double delta_mhz = (dressed_omega_b_ghz(m) -
                              (m.dressed_energy(1, 0) - m.dressed_energy(0, 0))) *
                             1e3;
    const double jeff = map_jl_to_jeff_mhz(m);
    // area target: integral of mu(t) dt = 1/4 over the flat-top envelope
    const double t_eff = spec.tau_g_ns - spec.tau_ramp_ns;
    const double mu_needed_mhz = 0.25 / t_eff * 1e3;
    double eps_seed = std::abs(mu_needed_mhz * delta_mhz / jeff);

    DrivePair dp = make_drives(m, wd, eps_seed, 0.0, 0.0, 0.0, spec.tau_g_ns, spec.tau_ramp_ns);
    DrivenSystem sys_a = dp.sys;
    sys_a.drive_ops = {sys_a.drive_ops[0]};

    int evals = 0;
    auto r_error = [&](double eps) {
        ++evals;
        if (eps <= 0.0) return 1.0;
        auto drives = dp.drives;
        drives[0].envelope.epsilon_d_mhz = eps;
        std::vector<DriveSpec> da{drives[0]};
        Mat psi0(m.energies.size(), 2);
        psi0.col(0) = m.dressed_state(0, 0);
        psi0.col(1) = m.dressed_state(1, 0);
        auto h = assemble_drive_hamiltonian(sys_a, da);
        Mat fin = evolve_schrodinger_block(h, psi0, TimeGrid(0, spec.tau_g_ns, 2), spec.tolerance).back();
        auto b0 = bloch_of(target_doublet(m, fin.col(0), 0, spec.tau_g_ns));
        auto b1 = bloch_of(target_doublet(m, fin.col(1), 1, spec.tau_g_ns));
        return std::abs(1.0 - conditionality(b0, b1));
    };

    auto gate_at = [&](double eps) {
        auto drives = dp.drives;
        drives[0].envelope.epsilon_d_mhz = eps;
        std::vector<DriveSpec> da{drives[0]};
        Mat fin = propagate_basis(sys_a, da, spec.tau_g_ns, spec.tolerance);
        GateResult g = extract_computational_unitary(sys_a, fin, spec.tau_g_ns);
        g.fidelity_raw = gate_fidelity_raw(g.u_comp, ideal_cnot());
        g.fidelity = cnot_fidelity_corrected(g.u_comp);
        return g;
    };

    // stage 1: conditionality calibration of the amplitude
    OptimizerConfig c1;
    c1.initial_simplex_scale = 0.15;
    c1.max_evaluations = std::min(60, max_evaluations / 3);
    RVec x0(1);
    x0 << eps_seed;
    NmResult s1 = nelder_mead([&](const RVec& x) { return r_error(x(0)); }, x0, c1);

    // stage 2: polish the amplitude on the corrected gate error
    auto err_of = [&](const RVec& x) {
        ++evals;
        if (x(0) <= 0.0) return 1.0;
        return 1.0 - gate_at(x(0)).fidelity;
    };
    OptimizerConfig c2;
    c2.initial_simplex_scale = 0.01;
    c2.max_evaluations = std::max(10, max_evaluations - evals);
    NmResult s2 = nelder_mead(err_of, s1.x, c2);

    Gate2qOutcome out;
    out.eps_a_mhz = s2.x(0);
    out.gate = gate_at(out.eps_a_mhz);
    out.gate.optimizer_trace = s2.trace;
    out.evaluations = evals;
    out.tuned = s1.f < 0.01;
    return out;
}

CzRateResult cz_dynamical_zz(const CzGateSpec& spec, double eps_a_mhz, double eps_b_mhz) {
    spec.validate();
    const CoupledModel& m = *spec.model;
    auto dp = make_drives(m, spec.omega_d_ghz, eps_a_mhz, eps_b_mhz, spec.phase_a, spec.phase_b,
                          spec.tau_g_ns, spec.tau_ramp_ns);

    const int samples = std::max(200, int(spec.tau_g_ns));
    TimeGrid grid(0, spec.tau_g_ns, samples);
    Mat psi0(m.energies.size(), 4);
    int kl[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    for (int c = 0; c < 4; ++c) psi0.col(c) = m.dressed_state(kl[c][0], kl[c][1]);
    auto h = assemble_drive_hamiltonian(dp.sys, dp.drives);
    auto frames = evolve_schrodinger_block(h, psi0, grid, spec.tolerance);

    std::vector<double> ts;
    std::vector<double> pzz;
    double prev[4] = {0, 0, 0, 0};
    bool first = true;
    for (int s = 0; s < samples; ++s) {
        double t = grid.time_at(s);
        if (t < spec.tau_ramp_ns || t > spec.tau_g_ns - spec.tau_ramp_ns) continue;
        double ph[4];
        for (int c = 0; c < 4; ++c) {
            cxd amp = cxd(m.dressed_state(kl[c][0], kl[c][1]).adjoint() * frames[s].col(c)) *
                      std::exp(cxd(0, kTwoPi * m.dressed_energy(kl[c][0], kl[c][1]) * t));
            double a = std::arg(amp);
            if (!first) {
                while (a - prev[c] > M_PI) a -= kTwoPi;
                while (a - prev[c] < -M_PI) a += kTwoPi;
            }
            prev[c] = a;
            ph[c] = a;
        }
        first = false;
        ts.push_back(t);
        pzz.push_back(ph[0] + ph[3] - ph[1] - ph[2]);
    }
    if (ts.size() < 8) throw std::runtime_error("cz_dynamical_zz: plateau too short for the fit");

    CzRateResult res;
    auto fit = linear_fit(ts, pzz);
    res.zeta_mhz = fit.slope / kTwoPi * 1e3;
    res.fit_rms_rad = fit.rms_residual;
    double span = std::abs(fit.slope) * (ts.back() - ts.front());
    res.flagged = fit.rms_residual > 0.05 * std::max(span, 0.05);
    return res;
}

double analytic_cz_zeta_mhz(double j_eff_mhz, double eps_a_mhz, double eps_b_mhz,
                            double delta_a_mhz, double delta_b_mhz, double phase_diff_rad) {
    if (delta_a_mhz == 0.0 || delta_b_mhz == 0.0)
        throw std::invalid_argument("analytic_cz_zeta: drive on resonance");
    return 2.0 * j_eff_mhz * eps_a_mhz * eps_b_mhz * std::cos(phase_diff_rad) /
           (delta_a_mhz * delta_b_mhz);
}

Gate2qOutcome tune_cz(const CzGateSpec& spec, int max_evaluations) {
    spec.validate();
    const CoupledModel& m = *spec.model;
    const double jeff = map_jl_to_jeff_mhz(m);
    const double wa = m.dressed_energy(1, 0) - m.dressed_energy(0, 0);
    const double wb = dressed_omega_b_ghz(m);
    const double da = (spec.omega_d_ghz - wa) * 1e3;
    const double db = (spec.omega_d_ghz - wb) * 1e3;
    // zeta scales with the squared envelope; flat-top effective time
    const double t_eff = spec.tau_g_ns - 1.25 * spec.tau_ramp_ns;
    // target |phi_ZZ| = pi: |zeta| * t_eff = 1/2 (zeta in GHz)
    double eps0 = std::sqrt(std::abs(da * db) / (4.0 * jeff * t_eff) * 1e3);

    auto dp0 = make_drives(m, spec.omega_d_ghz, eps0, eps0, spec.phase_a, spec.phase_b,
                           spec.tau_g_ns, spec.tau_ramp_ns);
    int evals = 0;

    auto propagate = [&](double ea, double eb, const Mat& psi0) {
        auto drives = dp0.drives;
        drives[0].envelope.epsilon_d_mhz = ea;
        drives[1].envelope.epsilon_d_mhz = eb;
        auto h = assemble_drive_hamiltonian(dp0.sys, drives);
        return evolve_schrodinger_block(h, psi0, TimeGrid(0, spec.tau_g_ns, 2), spec.tolerance).back();
    };

    auto r_error = [&](const RVec& x) {
        ++evals;
        if (x(0) <= 0.0 || x(1) <= 0.0) return 1.0;
        Mat plus(m.energies.size(), 1);
        plus.col(0) = 0.5 * (m.dressed_state(0, 0) + m.dressed_state(0, 1) + m.dressed_state(1, 0) +
                             m.dressed_state(1, 1));
        Mat fin = propagate(x(0), x(1), plus);
        auto b0 = bloch_of(target_doublet(m, fin.col(0), 0, spec.tau_g_ns));
        auto b1 = bloch_of(target_doublet(m, fin.col(0), 1, spec.tau_g_ns));
        return std::abs(1.0 - conditionality(b0, b1));
    };

    auto gate_at = [&](double ea, double eb) {
        Mat psi0(m.energies.size(), 4);
        int kl[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
        for (int c = 0; c < 4; ++c) psi0.col(c) = m.dressed_state(kl[c][0], kl[c][1]);
        Mat fin = propagate(ea, eb, psi0);
        GateResult g = extract_computational_unitary(dp0.sys, fin, spec.tau_g_ns);
        g.fidelity_raw = gate_fidelity_raw(g.u_comp, ideal_cz());
        g.fidelity = gate_fidelity_virtual_z(g.u_comp, ideal_cz());
        return g;
    };

    OptimizerConfig c1;
    c1.initial_simplex_scale = 0.2;
    c1.max_evaluations = std::min(80, max_evaluations / 3);
    RVec x0(2);
    x0 << eps0, eps0;
    NmResult s1 = nelder_mead(r_error, x0, c1);

    auto err_of = [&](const RVec& x) {
        ++evals;
        if (x(0) <= 0.0 || x(1) <= 0.0) return 1.0;
        return 1.0 - gate_at(x(0), x(1)).fidelity;
    };
    OptimizerConfig c2;
    c2.initial_simplex_scale = 0.02;
    c2.max_evaluations = std::max(10, max_evaluations - evals);
    NmResult s2 = nelder_mead(err_of, s1.x, c2);

    Gate2qOutcome out;
    out.eps_a_mhz = s2.x(0);
    out.eps_b_mhz = s2.x(1);
    out.gate = gate_at(out.eps_a_mhz, out.eps_b_mhz);
    out.gate.optimizer_trace = s2.trace;
    out.evaluations = evals;
    out.tuned = s1.f < 0.01;
    return out;
}

LeakageDiagnostics leakage_diagnostics(const CzGateSpec& spec, double eps_a_mhz,
                                       double eps_b_mhz) {
    spec.validate();
    const CoupledModel& m = *spec.model;
    auto dp = make_drives(m, spec.omega_d_ghz, eps_a_mhz, eps_b_mhz, spec.phase_a, spec.phase_b,
                          spec.tau_g_ns, spec.tau_ramp_ns);
    Mat psi0(m.energies.size(), 4);
    int kl[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    for (int c = 0; c < 4; ++c) psi0.col(c) = m.dressed_state(kl[c][0], kl[c][1]);

    auto leak_with = [&](double ea, double eb) {
        auto drives = dp.drives;
        drives[0].envelope.epsilon_d_mhz = ea;
        drives[1].envelope.epsilon_d_mhz = eb;
        auto h = assemble_drive_hamiltonian(dp.sys, drives);
        Mat fin = evolve_schrodinger_block(h, psi0, TimeGrid(0, spec.tau_g_ns, 2), spec.tolerance).back();
        return extract_computational_unitary(dp.sys, fin, spec.tau_g_ns).leakage;
    };

    LeakageDiagnostics d;
    d.total = leak_with(eps_a_mhz, eps_b_mhz);
    d.qubit_a_only = leak_with(eps_a_mhz, 0.0);
    d.qubit_b_only = leak_with(0.0, eps_b_mhz);
    return d;
}

}  // namespace fluxsim
