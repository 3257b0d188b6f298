#include "fluxsim/readout.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fluxsim {

void ReadoutConfig::validate() const {
    if (resonator_levels < 3) throw std::invalid_argument("ReadoutConfig: resonator_levels >= 3");
    if (g_mhz < 0) throw std::invalid_argument("ReadoutConfig: g must be >= 0");
    if (!(omega_r_ghz > 0)) throw std::invalid_argument("ReadoutConfig: omega_R must be positive");
}

ChiResult chi01_perturbative(const EigenSystem& eigsys, const ReadoutConfig& cfg) {
    cfg.validate();
    if (eigsys.level_count < 8)
        throw std::invalid_argument("chi01_perturbative: needs >= 8 levels for the sum truncation");
    const Mat& op = eigsys.op(cfg.coupling_kind);
    const double g = cfg.g_mhz * 1e-3;  // GHz
    const double wr = cfg.omega_r_ghz;

    ChiResult res;
    res.min_detuning_ghz = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (int ref : {0, 1}) {
        double sign = (ref == 0) ? 1.0 : -1.0;
        for (int l = 0; l < eigsys.level_count; ++l) {
            if (l == ref) continue;
            double el2 = std::norm(op(ref, l));
            double w = eigsys.energies(l) - eigsys.energies(ref);
            sum += sign * el2 * 2.0 * w / (w * w - wr * wr);
            if (el2 > 1e-20) {
                double det = std::abs(std::abs(w) - wr);
                res.min_detuning_ghz = std::min(res.min_detuning_ghz, det);
            }
        }
    }
    res.chi_mhz = g * g * sum * 1e3;
    res.dispersive_warning = res.min_detuning_ghz < 3.0 * g;
    return res;
}

ChiResult chi01_exact(const FluxoniumParams& params, const ReadoutConfig& cfg, int photon_number,
                      int fluxonium_levels) {
    cfg.validate();
    if (cfg.resonator_levels < photon_number + 3)
        throw std::invalid_argument("chi01_exact: resonator_levels must be >= p + 3");
    const int nq = fluxonium_levels;
    const int nr = cfg.resonator_levels;
    if (nq * nr > 2000) throw std::invalid_argument("chi01_exact: joint dimension exceeds 2000");

    EigenSystem sys = spectrum(params, kDefaultBasisSize, std::max(nq, 8));
    const Mat& coup = sys.op(cfg.coupling_kind);
    const double g = cfg.g_mhz * 1e-3;

    const int dim = nq * nr;
    Mat h = Mat::Zero(dim, dim);
    auto idx = [&](int l, int m) { return l * nr + m; };  // qubit level l, photons m
    for (int l = 0; l < nq; ++l)
        for (int m = 0; m < nr; ++m)
            h(idx(l, m), idx(l, m)) = sys.energies(l) + cfg.omega_r_ghz * m;
    for (int l = 0; l < nq; ++l)
        for (int lp = 0; lp < nq; ++lp) {
            cxd el = coup(l, lp);
            if (std::abs(el) < 1e-16) continue;
            for (int m = 0; m + 1 < nr; ++m) {
                double amp = std::sqrt(double(m + 1));
                h(idx(l, m + 1), idx(lp, m)) += g * el * amp;  // a^dag
                h(idx(l, m), idx(lp, m + 1)) += g * el * amp;  // a
            }
        }

    auto eig = eigh(h, 1e-9);

    // greedy maximal-overlap labeling of dressed states by bare product states
    std::vector<int> label_of(dim, -1);  // product index -> eigen index
    std::vector<double> quality(dim, 0.0);
    {
        struct Entry {
            double p;
            int prod, eig;
        };
        std::vector<Entry> entries;
        entries.reserve(size_t(dim) * dim);
        for (int e = 0; e < dim; ++e)
            for (int p = 0; p < dim; ++p) {
                double w = std::norm(eig.vectors(p, e));
                if (w > 1e-6) entries.push_back({w, p, e});
            }
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.p > b.p; });
        std::vector<char> used_eig(dim, 0);
        for (const auto& en : entries) {
            if (label_of[en.prod] >= 0 || used_eig[en.eig]) continue;
            label_of[en.prod] = en.eig;
            quality[en.prod] = en.p;
            used_eig[en.eig] = 1;
        }
    }

    ChiResult res;
    res.min_label_overlap = 1.0;
    auto energy_of = [&](int l, int m) {
        int p = idx(l, m);
        if (label_of[p] < 0 || quality[p] < 0.5) {
            std::ostringstream os;
            os << "chi01_exact: ambiguous dressed-state labeling for |qubit " << l << ", " << m
               << " photons> (max overlap " << quality[p] << " < 0.5); dispersive breakdown";
            throw std::runtime_error(os.str());
        }
        res.min_label_overlap = std::min(res.min_label_overlap, quality[p]);
        return eig.values(label_of[p]);
    };

    const int p = photon_number;
    double chi = (energy_of(1, p + 1) - energy_of(1, p)) - (energy_of(0, p + 1) - energy_of(0, p));
    res.chi_mhz = chi * 1e3;

    double mindet = std::numeric_limits<double>::infinity();
    for (int ref : {0, 1})
        for (int l = 0; l < nq; ++l) {
            if (l == ref || std::norm(coup(ref, l)) < 1e-20) continue;
            mindet = std::min(mindet,
                              std::abs(std::abs(sys.energies(l) - sys.energies(ref)) - cfg.omega_r_ghz));
        }
    res.min_detuning_ghz = mindet;
    res.dispersive_warning = mindet < 3.0 * g;
    return res;
}

}  // namespace fluxsim
