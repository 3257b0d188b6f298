#include "fluxsim/freq_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <sstream>

namespace fluxsim {

LatticeGraph LatticeGraph::square(int rows, int cols, bool periodic) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("LatticeGraph: empty lattice");
    LatticeGraph g;
    g.rows = rows;
    g.cols = cols;
    g.periodic = periodic;
    auto id = [&](int r, int c) { return ((r + rows) % rows) * cols + (c + cols) % cols; };
    auto add = [&](int r, int c, int r2, int c2) {
        int a = id(r, c), b = id(r2, c2);
        if (a == b) return;
        // orientation: odd-parity node drives its even-parity neighbor
        if ((r + c) % 2 == 1) g.edges.emplace_back(a, b);
        else g.edges.emplace_back(b, a);
    };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols || (periodic && cols > 2)) add(r, c, r, c + 1);
            if (r + 1 < rows || (periodic && rows > 2)) add(r, c, r + 1, c);
        }
    // dedupe (periodic wrap can revisit a pair)
    std::sort(g.edges.begin(), g.edges.end());
    auto key = [](std::pair<int, int> e) {
        return std::minmax(e.first, e.second);
    };
    std::vector<std::pair<int, int>> uniq;
    for (auto& e : g.edges) {
        bool dup = false;
        for (auto& u : uniq)
            if (key(u) == key(e)) {
                dup = true;
                break;
            }
        if (!dup) uniq.push_back(e);
    }
    g.edges = uniq;
    return g;
}

std::vector<std::vector<int>> LatticeGraph::adjacency() const {
    std::vector<std::vector<int>> adj(node_count());
    for (auto& e : edges) {
        adj[e.first].push_back(e.second);
        adj[e.second].push_back(e.first);
    }
    return adj;
}

namespace {

struct Check {
    std::string kind;
    int i, j;
    double slack;
};

template <typename Emit>
void evaluate(const Allocation& alloc, const LatticeGraph& graph, const ConstraintSet& cs,
              Emit&& emit) {
    const auto& f = alloc.node_freq_ghz;
    if (int(f.size()) != graph.node_count())
        throw std::invalid_argument("check_constraints: missing node assignments");
    auto adj = graph.adjacency();

    for (int i = 0; i < graph.node_count(); ++i) {
        emit({"band_low", i, -1, (f[i] - cs.freq_min_ghz) * 1e3});
        emit({"band_high", i, -1, (cs.freq_max_ghz - f[i]) * 1e3});
    }
    for (auto& e : graph.edges) {
        int i = e.first, j = e.second;
        double diff = std::abs(f[i] - f[j]) * 1e3;
        emit({"addressability", i, j, diff - cs.addressability_min_mhz});
        emit({"two_photon", i, j, std::abs(2 * f[i] - f[j]) * 1e3 - cs.two_photon_min_mhz});
        emit({"two_photon", j, i, std::abs(2 * f[j] - f[i]) * 1e3 - cs.two_photon_min_mhz});
        emit({"gate_window_low", i, j, diff - cs.gate_detuning_min_mhz});
        emit({"gate_window_high", i, j, cs.gate_detuning_max_mhz - diff});

        double wd;
        if (cs.gate_type == GateType::cr) {
            wd = f[j];  // drive on resonance with the target
        } else {
            auto it = alloc.edge_drive_ghz.find(e);
            if (it == alloc.edge_drive_ghz.end())
                throw std::invalid_argument("check_constraints: missing CZ edge drive frequency");
            wd = it->second;
            emit({"cz_midpoint", i, j,
                  std::abs(wd - 0.5 * (f[i] + f[j])) * 1e3 - cs.cz_midpoint_exclusion_mhz});
        }
        // spectators: neighbors of either endpoint, excluding the pair itself
        for (int end : {i, j}) {
            for (int k : adj[end]) {
                if (k == i || k == j) continue;
                emit({"spectator", k, i, std::abs(wd - f[k]) * 1e3 - cs.spectator_min_mhz});
                emit({"spectator_two_photon", k, i,
                      std::abs(2 * wd - f[k]) * 1e3 - cs.spectator_two_photon_min_mhz});
            }
        }
    }
}

}  // namespace

std::vector<Violation> check_constraints(const Allocation& alloc, const LatticeGraph& graph,
                                         const ConstraintSet& cs) {
    std::vector<Violation> out;
    evaluate(alloc, graph, cs, [&](const Check& c) {
        if (c.slack < 0) out.push_back({c.kind, c.i, c.j, c.slack});
    });
    return out;
}

double constraint_margin_mhz(const Allocation& alloc, const LatticeGraph& graph,
                             const ConstraintSet& cs) {
    double m = std::numeric_limits<double>::infinity();
    evaluate(alloc, graph, cs, [&](const Check& c) { m = std::min(m, c.slack); });
    return m;
}

namespace {

// margin restricted to constraints touching one node (used by local search)
double node_margin(const Allocation& alloc, const LatticeGraph& graph, const ConstraintSet& cs,
                   int node) {
    double m = std::numeric_limits<double>::infinity();
    evaluate(alloc, graph, cs, [&](const Check& c) {
        if (c.i == node || c.j == node) m = std::min(m, c.slack);
    });
    return m;
}

void recentre_drive(Allocation& alloc, const LatticeGraph& graph, const ConstraintSet& cs,
                    const std::pair<int, int>& e) {
    // best drive frequency for this edge on a fine grid
    const auto& f = alloc.node_freq_ghz;
    double lo = cs.freq_min_ghz - 0.05, hi = cs.freq_max_ghz + 0.1;
    double best = 0.5 * (f[e.first] + f[e.second]) + 0.030, best_m = -1e18;
    for (double wd = lo; wd <= hi; wd += 0.001) {
        alloc.edge_drive_ghz[e] = wd;
        double m = std::numeric_limits<double>::infinity();
        evaluate(alloc, graph, cs, [&](const Check& c) {
            if ((c.kind == "cz_midpoint" || c.kind == "spectator" ||
                 c.kind == "spectator_two_photon") &&
                c.j == e.first)
                m = std::min(m, c.slack);
        });
        if (m > best_m) {
            best_m = m;
            best = wd;
        }
    }
    alloc.edge_drive_ghz[e] = best;
}

}  // namespace

Allocation allocate(const LatticeGraph& graph, const ConstraintSet& cs, uint64_t rng_seed,
                    int restarts) {
    Allocation best_alloc;
    double best_margin = -std::numeric_limits<double>::infinity();
    if (graph.node_count() == 0) {
        best_alloc.margin_mhz = std::numeric_limits<double>::infinity();
        return best_alloc;
    }

    for (int attempt = 0; attempt < restarts; ++attempt) {
        std::mt19937_64 rng(rng_seed + 0x9e3779b97f4a7c15ULL * attempt);
        Allocation alloc;
        alloc.node_freq_ghz.assign(graph.node_count(), 0.0);

        std::vector<int> order(graph.node_count());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);

        std::vector<char> assigned(graph.node_count(), 0);
        auto adj = graph.adjacency();

        // greedy: per node, scan a 1 MHz grid and keep the max-margin frequency
        for (int node : order) {
            double best_f = cs.freq_min_ghz, best_m = -1e18;
            std::uniform_real_distribution<double> jitter(0.0, 0.001);
            double offset = jitter(rng);
            for (double f = cs.freq_min_ghz + offset; f <= cs.freq_max_ghz; f += 0.001) {
                double m = (cs.freq_max_ghz - f) * 1e3;
                m = std::min(m, (f - cs.freq_min_ghz) * 1e3);
                for (int nb : adj[node]) {
                    if (!assigned[nb]) continue;
                    double g = alloc.node_freq_ghz[nb];
                    double diff = std::abs(f - g) * 1e3;
                    m = std::min(m, diff - cs.addressability_min_mhz);
                    m = std::min(m, std::abs(2 * f - g) * 1e3 - cs.two_photon_min_mhz);
                    m = std::min(m, std::abs(2 * g - f) * 1e3 - cs.two_photon_min_mhz);
                    m = std::min(m, diff - cs.gate_detuning_min_mhz);
                    m = std::min(m, cs.gate_detuning_max_mhz - diff);
                    // second-neighbor separation helps the spectator checks later
                    for (int nb2 : adj[nb]) {
                        if (nb2 == node || !assigned[nb2]) continue;
                        double g2 = alloc.node_freq_ghz[nb2];
                        m = std::min(m, 0.5 * (std::abs(f - g2) * 1e3 - cs.addressability_min_mhz));
                    }
                }
                if (m > best_m) {
                    best_m = m;
                    best_f = f;
                }
            }
            alloc.node_freq_ghz[node] = best_f;
            assigned[node] = 1;
        }
        if (cs.gate_type == GateType::cz)
            for (auto& e : graph.edges) recentre_drive(alloc, graph, cs, e);

        // coordinate local search on the global minimum slack
        double margin = constraint_margin_mhz(alloc, graph, cs);
        for (int pass = 0; pass < 8; ++pass) {
            bool improved = false;
            for (int node = 0; node < graph.node_count(); ++node) {
                double keep = alloc.node_freq_ghz[node];
                double best_f = keep, best_nm = node_margin(alloc, graph, cs, node);
                for (double f = cs.freq_min_ghz; f <= cs.freq_max_ghz; f += 0.0005) {
                    alloc.node_freq_ghz[node] = f;
                    double nm = node_margin(alloc, graph, cs, node);
                    if (nm > best_nm + 1e-9) {
                        best_nm = nm;
                        best_f = f;
                    }
                }
                alloc.node_freq_ghz[node] = best_f;
                if (cs.gate_type == GateType::cz)
                    for (auto& e : graph.edges)
                        if (e.first == node || e.second == node) recentre_drive(alloc, graph, cs, e);
                double new_margin = constraint_margin_mhz(alloc, graph, cs);
                if (new_margin > margin + 1e-9) {
                    margin = new_margin;
                    improved = true;
                } else if (new_margin < margin - 1e-9) {
                    alloc.node_freq_ghz[node] = keep;  // revert global regressions
                    if (cs.gate_type == GateType::cz)
                        for (auto& e : graph.edges)
                            if (e.first == node || e.second == node)
                                recentre_drive(alloc, graph, cs, e);
                }
            }
            if (!improved) break;
        }
        margin = constraint_margin_mhz(alloc, graph, cs);
        if (margin > best_margin) {
            best_margin = margin;
            best_alloc = alloc;
        }
    }

    best_alloc.margin_mhz = best_margin;
    if (best_margin < 0) {
        std::ostringstream os;
        os << "allocate: no feasible allocation found within the restart budget (best margin "
           << best_margin << " MHz)";
        throw std::runtime_error(os.str());
    }
    return best_alloc;
}

YieldEstimate yield_mc(const Allocation& alloc, const LatticeGraph& graph, const ConstraintSet& cs,
                       double sigma_f_mhz, int samples, uint64_t rng_seed, int workers) {
    YieldEstimate est;
    est.samples = samples;
    est.sigma_f_mhz = sigma_f_mhz;
    est.rng_seed = rng_seed;

    auto run_chunk = [&](int begin, int end) {
        int passes = 0;
        Allocation trial = alloc;
        for (int s = begin; s < end; ++s) {
            std::mt19937_64 rng(rng_seed ^ (0x9e3779b97f4a7c15ULL * (s + 1)));
            std::normal_distribution<double> noise(0.0, sigma_f_mhz * 1e-3);
            if (sigma_f_mhz > 0)
                for (size_t i = 0; i < trial.node_freq_ghz.size(); ++i)
                    trial.node_freq_ghz[i] = alloc.node_freq_ghz[i] + noise(rng);
            else
                trial.node_freq_ghz = alloc.node_freq_ghz;
            if (cs.gate_type == GateType::cz) {
                for (auto& [e, wd] : trial.edge_drive_ghz) {
                    double mid0 = 0.5 * (alloc.node_freq_ghz[e.first] + alloc.node_freq_ghz[e.second]);
                    double mid1 = 0.5 * (trial.node_freq_ghz[e.first] + trial.node_freq_ghz[e.second]);
                    wd = alloc.edge_drive_ghz.at(e) + (mid1 - mid0);
                }
            }
            bool pass = true;
            evaluate(trial, graph, cs, [&](const Check& c) {
                if (c.slack < 0) pass = false;
            });
            if (pass) ++passes;
        }
        return passes;
    };

    if (workers <= 1 || samples < 2 * workers) {
        est.passes = run_chunk(0, samples);
    } else {
        std::vector<std::future<int>> futs;
        int chunk = (samples + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            int b = w * chunk, e = std::min(samples, b + chunk);
            if (b >= e) break;
            futs.push_back(std::async(std::launch::async, run_chunk, b, e));
        }
        for (auto& f : futs) est.passes += f.get();
    }

    est.yield = samples > 0 ? double(est.passes) / samples : 0.0;
    // Wilson score interval, z = 1.96
    const double z = 1.959963984540054, n = double(samples);
    if (n > 0) {
        double p = est.yield, z2 = z * z;
        double denom = 1.0 + z2 / n;
        double centre = (p + z2 / (2 * n)) / denom;
        double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
        est.ci_lo = std::max(0.0, centre - half);
        est.ci_hi = std::min(1.0, centre + half);
    }
    return est;
}

double tile_yield(double y_cell, double n_device, double n_cell) {
    if (y_cell < 0.0 || y_cell > 1.0) throw std::invalid_argument("tile_yield: y_cell in [0,1]");
    if (!(n_cell > 0)) throw std::invalid_argument("tile_yield: n_cell must be positive");
    return std::pow(y_cell, n_device / n_cell);
}

double dispersion_model_mhz(const FluxoniumParams& params, double delta_ej_rel,
                            double delta_el_rel) {
    if (std::abs(delta_ej_rel) > 0.1 || std::abs(delta_el_rel) > 0.1)
        throw std::invalid_argument("dispersion_model: relative perturbations must be <= 0.1");
    FluxoniumParams p2 = params;
    p2.e_j *= 1.0 + delta_ej_rel;
    p2.e_l *= 1.0 + delta_el_rel;
    auto s1 = spectrum(params, kDefaultBasisSize, 3);
    auto s2 = spectrum(p2, kDefaultBasisSize, 3);
    return (s2.energies(1) - s1.energies(1)) * 1e3;
}

}  // namespace fluxsim
