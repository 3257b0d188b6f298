#include "fluxsim/run.hpp"

#include "fluxsim/coupling.hpp"
#include "fluxsim/decoherence.hpp"
#include "fluxsim/freq_alloc.hpp"
#include "fluxsim/gates_1q.hpp"
#include "fluxsim/gates_2q.hpp"
#include "fluxsim/qec.hpp"
#include "fluxsim/readout.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace fluxsim {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

class Params {
  public:
    Params(const std::map<std::string, std::string>& kv, std::string context)
        : kv_(kv), context_(std::move(context)) {}

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) {
            if (fallback) return *fallback;
            throw std::invalid_argument(context_ + ": missing required key '" + key + "'");
        }
        used_.insert(key);
        try {
            size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw std::invalid_argument(context_ + "." + key + ": not a number: '" + it->second + "'");
        }
    }
    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) {
            if (fallback) return *fallback;
            throw std::invalid_argument(context_ + ": missing required key '" + key + "'");
        }
        used_.insert(key);
        return it->second;
    }
    std::vector<double> list(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
        std::string raw = text(key, fallback);
        std::vector<double> out;
        std::stringstream ss(raw);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            try {
                out.push_back(std::stod(tok));
            } catch (...) {
                throw std::invalid_argument(context_ + "." + key + ": bad list entry '" + tok + "'");
            }
        }
        if (out.empty()) throw std::invalid_argument(context_ + "." + key + ": empty list");
        return out;
    }
    void reject_unknown() const {
        for (auto& [k, v] : kv_) {
            if (!used_.count(k))
                throw std::invalid_argument(context_ + ": unknown key '" + k + "'");
        }
    }

  private:
    const std::map<std::string, std::string>& kv_;
    std::string context_;
    mutable std::set<std::string> used_;
};

struct Csv {
    std::ofstream out;
    explicit Csv(const std::string& path) : out(path) {
        if (!out) throw std::runtime_error("cannot open output file " + path);
        out.precision(12);
    }
    void header(const std::vector<std::string>& cols) {
        for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
        out << "\n";
    }
    void row(const std::vector<double>& vals) {
        for (size_t i = 0; i < vals.size(); ++i) out << (i ? "," : "") << vals[i];
        out << "\n";
    }
};

FluxoniumParams params_from(const Params& p, const std::string& prefix = "") {
    FluxoniumParams fp;
    fp.e_j = p.number(prefix + "e_j_ghz", 4.0);
    fp.e_c = p.number(prefix + "e_c_ghz", 1.0);
    fp.e_l = p.number(prefix + "e_l_ghz", 1.0);
    fp.phi_ext = p.number(prefix + "phi_ext_rad", M_PI);
    return fp;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

using Writer = std::function<void(const RunConfig&, const Params&, const std::string& dir,
                                  std::vector<std::string>&)>;

void run_spectrum(const RunConfig& cfg, const Params& p, const std::string& dir,
                  std::vector<std::string>& files) {
    FluxoniumParams fp = params_from(p);
    double f0 = p.number("flux_start_rad", 0.0);
    double f1 = p.number("flux_end_rad", kTwoPi);
    int n = int(p.number("flux_points", 101));
    int levels = int(p.number("levels", 6));
    p.reject_unknown();

    std::string path = dir + "/spectrum.csv";
    Csv csv(path);
    std::vector<std::string> cols{"phi_ext_rad"};
    for (int k = 1; k < levels; ++k) cols.push_back("omega_0" + std::to_string(k) + "_ghz");
    cols.push_back("abs_n01");
    cols.push_back("abs_phi01");
    csv.header(cols);
    for (int i = 0; i < n; ++i) {
        fp.phi_ext = f0 + (f1 - f0) * i / double(std::max(1, n - 1));
        auto sys = spectrum(fp, kDefaultBasisSize, kDefaultLevelCount);
        std::vector<double> row{fp.phi_ext};
        for (int k = 1; k < levels; ++k) row.push_back(sys.energies(k));
        row.push_back(matrix_element(sys, QubitOp::charge, 0, 1));
        row.push_back(matrix_element(sys, QubitOp::phase, 0, 1));
        csv.row(row);
    }
    files.push_back(path);
}

void run_t1map(const RunConfig& cfg, const Params& p, const std::string& dir,
               std::vector<std::string>& files) {
    NoiseEnvironment env;
    env.tan_delta_diel = p.number("tan_delta_diel", env.tan_delta_diel);
    env.x_qp = p.number("x_qp", env.x_qp);
    double ec = p.number("e_c_ghz", 1.0);
    auto ejs = p.list("e_j_list_ghz", "2,3,4,5,6");
    auto els = p.list("e_l_list_ghz", "0.2,0.4,0.6,0.8,1.0,1.2,1.4,1.6,1.8,2.0");
    p.reject_unknown();

    std::string path = dir + "/t1map.csv";
    Csv csv(path);
    csv.header({"e_j_ghz", "e_l_ghz", "omega01_ghz", "t1_dielectric_s", "t1_quasiparticle_s",
                "t1_total_s"});
    for (double ej : ejs)
        for (double el : els) {
            FluxoniumParams fp{ej, ec, el, M_PI};
            auto sys = spectrum(fp);
            csv.row({ej, el, sys.energies(1), t1_dielectric(sys, env), t1_quasiparticle(sys, env),
                     t1_total(sys, env)});
        }
    files.push_back(path);
}

void run_dispersive(const RunConfig& cfg, const Params& p, const std::string& dir,
                    std::vector<std::string>& files) {
    FluxoniumParams fp = params_from(p);
    ReadoutConfig rc;
    rc.g_mhz = p.number("g_mhz", 100.0);
    rc.kappa_mhz = p.number("kappa_mhz", 2.0);
    std::string mode = p.text("mode", "resonator_sweep");

    if (mode == "flux_sweep") {
        rc.omega_r_ghz = p.number("omega_r_ghz", 7.0);
        int n = int(p.number("points", 101));
        p.reject_unknown();
        std::string path = dir + "/chi_vs_flux.csv";
        Csv csv(path);
        csv.header({"phi_ext_rad", "chi01_perturbative_mhz", "chi01_exact_p1_mhz"});
        for (int i = 0; i < n; ++i) {
            fp.phi_ext = kTwoPi * i / double(n - 1);
            auto sys = spectrum(fp);
            auto pert = chi01_perturbative(sys, rc);
            double exact = std::nan("");
            try {
                exact = chi01_exact(fp, rc, 1).chi_mhz;
            } catch (const std::runtime_error&) {
            }
            csv.row({fp.phi_ext, pert.chi_mhz, exact});
        }
        files.push_back(path);
    } else if (mode == "resonator_sweep") {
        double w0 = p.number("omega_r_start_ghz", 4.0);
        double w1 = p.number("omega_r_end_ghz", 10.0);
        int n = int(p.number("points", 25));
        p.reject_unknown();
        auto sys = spectrum(fp);
        std::string path = dir + "/chi_vs_resonator.csv";
        Csv csv(path);
        csv.header({"omega_r_ghz", "chi01_perturbative_mhz", "chi01_exact_p1_mhz",
                    "dispersive_warning"});
        for (int i = 0; i < n; ++i) {
            rc.omega_r_ghz = w0 + (w1 - w0) * i / double(n - 1);
            auto pert = chi01_perturbative(sys, rc);
            double exact = std::nan("");
            try {
                exact = chi01_exact(fp, rc, 1).chi_mhz;
            } catch (const std::runtime_error&) {
            }
            csv.row({rc.omega_r_ghz, pert.chi_mhz, exact, double(pert.dispersive_warning)});
        }
        files.push_back(path);
    } else if (mode == "dephasing") {
        double w0 = p.number("omega_r_start_ghz", 4.0);
        double w1 = p.number("omega_r_end_ghz", 10.0);
        int n = int(p.number("points", 25));
        double temp = p.number("t_res_kelvin", 0.050);
        auto chis = p.list("chi_list_mhz", "0.2,0.5,1.0");
        p.reject_unknown();
        std::string path = dir + "/thermal_dephasing.csv";
        Csv csv(path);
        std::vector<std::string> cols{"omega_r_ghz"};
        for (double c : chis) cols.push_back("t_phi_s_chi_" + std::to_string(c) + "_mhz");
        csv.header(cols);
        for (int i = 0; i < n; ++i) {
            double wr = w0 + (w1 - w0) * i / double(n - 1);
            std::vector<double> row{wr};
            for (double c : chis) row.push_back(1.0 / thermal_dephasing(c, rc.kappa_mhz, wr, temp));
            csv.row(row);
        }
        files.push_back(path);
    } else {
        throw std::invalid_argument("dispersive.mode: unknown mode '" + mode + "'");
    }
}

void run_gate1q(const RunConfig& cfg, const Params& p, const std::string& dir,
                std::vector<std::string>& files) {
    FluxoniumParams fp = params_from(p);
    std::string channel = p.text("channel", "flux");
    std::string mode = p.text("mode", "tau_sweep");
    DriveChannel ch = (channel == "charge") ? DriveChannel::charge : DriveChannel::flux;

    if (mode == "tau_sweep") {
        auto taus = p.list("tau_list_ns", "5,10,15,20,25");
        p.reject_unknown();
        auto sys = spectrum(fp);
        std::string path = dir + "/gate1q_vs_tau.csv";
        Csv csv(path);
        csv.header({"tau_g_ns", "error", "leakage", "eps_d_mhz", "drag_lambda", "detuning_mhz"});
        for (double tau : taus) {
            SingleQubitGateSpec spec{&sys, ch, tau, TargetRotation::x_pi, 6};
            auto out = optimize_gate(spec);
            csv.row({tau, 1.0 - out.gate.fidelity, out.gate.leakage, out.pulse.epsilon_d_mhz,
                     out.pulse.drag_lambda, out.pulse.detuning_delta_mhz});
        }
        files.push_back(path);
    } else if (mode == "el_sweep") {
        auto els = p.list("e_l_list_ghz", "0.5,0.775,1.05,1.325,1.6");
        double tau = p.number("tau_g_ns", 10.0);
        p.reject_unknown();
        std::string path = dir + "/gate1q_vs_frequency.csv";
        Csv csv(path);
        csv.header({"e_l_ghz", "omega01_mhz", "error", "leakage"});
        for (double el : els) {
            FluxoniumParams fq = fp;
            fq.e_l = el;
            auto sys = spectrum(fq);
            SingleQubitGateSpec spec{&sys, ch, tau, TargetRotation::x_pi, 6};
            auto out = optimize_gate(spec);
            csv.row({el, sys.energies(1) * 1e3, 1.0 - out.gate.fidelity, out.gate.leakage});
        }
        files.push_back(path);
    } else {
        throw std::invalid_argument("gate1q.mode: unknown mode '" + mode + "'");
    }
}

CoupledSystem coupled_from(const Params& p) {
    CoupledSystem cs;
    cs.qubit_a = {p.number("a_e_j_ghz", 4.0), p.number("a_e_c_ghz", 1.0),
                  p.number("a_e_l_ghz", 0.9), M_PI};
    cs.qubit_b = {p.number("b_e_j_ghz", 4.0), p.number("b_e_c_ghz", 1.0),
                  p.number("b_e_l_ghz", 1.0), M_PI};
    cs.j_c_mhz = p.number("j_c_mhz", 11.5);
    cs.j_l_mhz = p.number("j_l_mhz", 2.0);
    cs.per_qubit_levels = int(p.number("per_qubit_levels", 5));
    return cs;
}

void run_couple(const RunConfig& cfg, const Params& p, const std::string& dir,
                std::vector<std::string>& files) {
    CoupledSystem cs = coupled_from(p);
    std::string mode = p.text("mode", "jc_at_jl");

    if (mode == "jc_sweep" || mode == "jl_sweep" || mode == "jc_at_jl") {
        auto vals = p.list("sweep_list_mhz", mode == "jl_sweep" ? "0,0.5,1,1.5,2,2.5,3" : "0,5,10,11.5,15,20,25,30");
        p.reject_unknown();
        std::string path = dir + "/couple_" + mode + ".csv";
        Csv csv(path);
        csv.header({"coupling_mhz", "mu_phi", "zeta_zz_khz", "abs_zeta_zz_khz"});
        for (double v : vals) {
            CoupledSystem c2 = cs;
            if (mode == "jl_sweep") {
                c2.j_l_mhz = v;
                c2.j_c_mhz = 0.0;
            } else if (mode == "jc_sweep") {
                c2.j_c_mhz = v;
                c2.j_l_mhz = 0.0;
            } else {
                c2.j_c_mhz = v;
            }
            auto m = build_coupled(c2);
            double zz = zeta_zz_static_khz(m);
            csv.row({v, mu_phi(m), zz, std::abs(zz)});
        }
        files.push_back(path);
    } else if (mode == "elb_perturb") {
        auto fracs = p.list("perturb_list", "-0.1,-0.05,0,0.05,0.1");
        p.reject_unknown();
        std::string path = dir + "/couple_elb_perturb.csv";
        Csv csv(path);
        csv.header({"e_l_b_relative_shift", "zeta_zz_khz"});
        for (double f : fracs) {
            CoupledSystem c2 = cs;
            c2.qubit_b.e_l *= (1.0 + f);
            csv.row({f, zeta_zz_static_khz(build_coupled(c2))});
        }
        files.push_back(path);
    } else {
        throw std::invalid_argument("couple.mode: unknown mode '" + mode + "'");
    }
}

void run_cr(const RunConfig& cfg, const Params& p, const std::string& dir,
            std::vector<std::string>& files) {
    CoupledSystem cs = coupled_from(p);
    std::string mode = p.text("mode", "rate_vs_amplitude");
    double tau_g = p.number("tau_g_ns", 300.0);
    double tau_ramp = p.number("tau_ramp_ns", 50.0);

    if (mode == "rate_vs_amplitude") {
        auto amps = p.list("eps_list_mhz", "5,10,20,40,80,120,160,200");
        p.reject_unknown();
        auto m = build_coupled(cs);
        CrGateSpec spec{&m, tau_g, tau_ramp};
        std::string path = dir + "/cr_rate_vs_amplitude.csv";
        Csv csv(path);
        csv.header({"eps_d_mhz", "mu_mhz", "m_mhz", "first_order_mu_mhz", "fit_flagged"});
        double jeff = map_jl_to_jeff_mhz(m);
        double delta = (m.sys_b.energies(1) - m.sys_a.energies(1)) * 1e3;
        for (double e : amps) {
            auto r = cr_rate(spec, e);
            csv.row({e, r.mu_mhz, r.m_mhz, first_order_cr_mu_mhz(jeff, delta, e),
                     double(r.flagged)});
        }
        files.push_back(path);
    } else if (mode == "error_vs_detuning") {
        auto els = p.list("e_l_b_list_ghz", "0.55,0.7,0.9,1.1,1.3,1.6");
        p.reject_unknown();
        std::string path = dir + "/cr_error_vs_detuning.csv";
        Csv csv(path);
        csv.header({"e_l_b_ghz", "delta_mhz", "eps_d_mhz", "error", "leakage", "tuned"});
        for (double el : els) {
            CoupledSystem c2 = cs;
            c2.qubit_b.e_l = el;
            auto m = build_coupled(c2);
            CrGateSpec spec{&m, tau_g, tau_ramp};
            auto out = tune_cnot(spec);
            double delta = (m.sys_b.energies(1) - m.sys_a.energies(1)) * 1e3;
            csv.row({el, delta, out.eps_a_mhz, 1.0 - out.gate.fidelity, out.gate.leakage,
                     double(out.tuned)});
        }
        files.push_back(path);
    } else {
        throw std::invalid_argument("cr.mode: unknown mode '" + mode + "'");
    }
}

void run_cz(const RunConfig& cfg, const Params& p, const std::string& dir,
            std::vector<std::string>& files) {
    CoupledSystem cs = coupled_from(p);
    std::string mode = p.text("mode", "zz_vs_drive_freq");
    double tau_g = p.number("tau_g_ns", 300.0);
    double tau_ramp = p.number("tau_ramp_ns", tau_g / 3.0);

    if (mode == "zz_vs_drive_freq") {
        double eps = p.number("eps_mhz", 10.0);
        auto offsets = p.list("drive_offset_list_mhz", "-150,-100,-60,60,100,150,200");
        p.reject_unknown();
        auto m = build_coupled(cs);
        double wb = dressed_omega_b_ghz(m);
        double wa = m.dressed_energy(1, 0) - m.dressed_energy(0, 0);
        double jeff = map_jl_to_jeff_mhz(m);
        std::string path = dir + "/cz_zz_vs_drive.csv";
        Csv csv(path);
        csv.header({"omega_d_ghz", "zeta_numeric_mhz", "zeta_analytic_mhz", "fit_flagged"});
        for (double off : offsets) {
            CzGateSpec spec{&m, wb + off * 1e-3, 0.0, 0.0, 600.0, 60.0};
            auto r = cz_dynamical_zz(spec, eps, eps);
            double da = (spec.omega_d_ghz - wa) * 1e3, db = (spec.omega_d_ghz - wb) * 1e3;
            csv.row({spec.omega_d_ghz, r.zeta_mhz, analytic_cz_zeta_mhz(jeff, eps, eps, da, db, 0.0),
                     double(r.flagged)});
        }
        files.push_back(path);
    } else if (mode == "error_vs_detuning") {
        auto els = p.list("e_l_b_list_ghz", "0.55,0.7,0.9,1.1,1.3,1.6");
        double offset = p.number("drive_offset_mhz", 50.0);
        p.reject_unknown();
        std::string path = dir + "/cz_error_vs_detuning.csv";
        Csv csv(path);
        csv.header({"e_l_b_ghz", "delta_mhz", "eps_a_mhz", "eps_b_mhz", "error", "leakage",
                    "tuned"});
        for (double el : els) {
            CoupledSystem c2 = cs;
            c2.qubit_b.e_l = el;
            auto m = build_coupled(c2);
            CzGateSpec spec{&m, dressed_omega_b_ghz(m) + offset * 1e-3, 0.0, 0.0, tau_g, tau_ramp};
            auto out = tune_cz(spec);
            double delta = (m.sys_b.energies(1) - m.sys_a.energies(1)) * 1e3;
            csv.row({el, delta, out.eps_a_mhz, out.eps_b_mhz, 1.0 - out.gate.fidelity,
                     out.gate.leakage, double(out.tuned)});
        }
        files.push_back(path);
    } else {
        throw std::invalid_argument("cz.mode: unknown mode '" + mode + "'");
    }
}

void run_yield(const RunConfig& cfg, const Params& p, const std::string& dir,
               std::vector<std::string>& files) {
    int rows = int(p.number("rows", 4));
    int cols = int(p.number("cols", 4));
    bool periodic = p.number("periodic", 1.0) != 0.0;
    std::string gate = p.text("gate", "cz");
    auto sigmas = p.list("sigma_f_list_mhz", "0,10,20,30,40");
    int samples = int(p.number("samples", 10000));
    p.reject_unknown();

    ConstraintSet cs;
    cs.gate_type = (gate == "cr") ? GateType::cr : GateType::cz;
    auto graph = LatticeGraph::square(rows, cols, periodic);
    auto alloc = allocate(graph, cs, cfg.rng_seed);

    std::string apath = dir + "/allocation.txt";
    {
        std::ofstream out(apath);
        out.precision(9);
        out << "# node frequencies (GHz), margin_mhz = " << alloc.margin_mhz << "\n";
        for (size_t i = 0; i < alloc.node_freq_ghz.size(); ++i)
            out << "node_" << i << " = " << alloc.node_freq_ghz[i] << "\n";
        for (auto& [e, wd] : alloc.edge_drive_ghz)
            out << "drive_" << e.first << "_" << e.second << " = " << wd << "\n";
    }
    files.push_back(apath);

    std::string path = dir + "/yield.csv";
    Csv csv(path);
    csv.header({"sigma_f_mhz", "yield", "ci_lo", "ci_hi", "samples"});
    for (double s : sigmas) {
        auto est = yield_mc(alloc, graph, cs, s, samples, cfg.rng_seed, cfg.worker_count);
        csv.row({s, est.yield, est.ci_lo, est.ci_hi, double(est.samples)});
    }
    files.push_back(path);
}

void run_qec(const RunConfig& cfg, const Params& p, const std::string& dir,
             std::vector<std::string>& files) {
    auto ds = p.list("distance_list", "3,5,7");
    double t1_us = p.number("t1_us", 300.0);
    long shots = long(p.number("shots", 200000));
    p.reject_unknown();

    NoiseBudget nb = noise_budget_from_t1(t1_us * 1e-6);
    std::string path = dir + "/qec.csv";
    Csv csv(path);
    csv.header({"distance", "shots", "failures", "epsilon_l", "ci_lo", "ci_hi"});
    std::vector<int> dists;
    std::vector<double> rates;
    for (double dv : ds) {
        int d = int(dv);
        auto r = logical_error_rate(d, nb, shots, cfg.rng_seed, cfg.worker_count);
        csv.row({double(d), double(r.shots), double(r.failures), r.epsilon_l, r.ci_lo, r.ci_hi});
        dists.push_back(d);
        rates.push_back(r.epsilon_l);
    }
    files.push_back(path);
    if (dists.size() >= 3) {
        auto fit = fit_suppression(dists, rates);
        std::ofstream out(dir + "/qec_suppression.txt");
        out << "lambda = " << fit.lambda << "\nc = " << fit.c << "\n";
        files.push_back(dir + "/qec_suppression.txt");
    }
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << path << ":" << lineno << ": expected 'key = value', got '" << line << "'";
            throw std::invalid_argument(os.str());
        }
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) {
            std::ostringstream os;
            os << path << ":" << lineno << ": empty key or value";
            throw std::invalid_argument(os.str());
        }
        if (kv.count(key)) {
            std::ostringstream os;
            os << path << ":" << lineno << ": duplicate key '" << key << "'";
            throw std::invalid_argument(os.str());
        }
        kv[key] = val;
    }
    return kv;
}

std::vector<std::string> run(const RunConfig& config) {
    static const std::map<std::string, Writer> dispatch = {
        {"spectrum", run_spectrum}, {"t1map", run_t1map},   {"dispersive", run_dispersive},
        {"gate1q", run_gate1q},     {"couple", run_couple}, {"cr", run_cr},
        {"cz", run_cz},             {"yield", run_yield},   {"qec", run_qec},
    };
    auto it = dispatch.find(config.subcommand);
    if (it == dispatch.end())
        throw std::invalid_argument("unknown subcommand '" + config.subcommand + "'");

    std::filesystem::create_directories(config.output_path);
    Params p(config.params, config.subcommand);
    std::vector<std::string> files;

    auto t0 = std::chrono::steady_clock::now();
    it->second(config, p, config.output_path, files);
    auto t1 = std::chrono::steady_clock::now();

    std::ostringstream resolved;
    resolved << "subcommand = " << config.subcommand << "\nseed = " << config.rng_seed << "\n";
    for (auto& [k, v] : config.params) resolved << k << " = " << v << "\n";

    std::string meta = config.output_path + "/metadata.txt";
    std::ofstream out(meta);
    out << "version = " << kVersion << "\n";
    out << "subcommand = " << config.subcommand << "\n";
    out << "seed = " << config.rng_seed << "\n";
    out << "workers = " << config.worker_count << "\n";
    out << "config_hash = " << std::hex << fnv1a(resolved.str()) << std::dec << "\n";
    out << "wall_time_s = "
        << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() / 1000.0 << "\n";
    files.push_back(meta);
    return files;
}

}  // namespace fluxsim
