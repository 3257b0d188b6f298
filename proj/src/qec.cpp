#include "fluxsim/qec.hpp"

#include "fluxsim/decoherence.hpp"

#include "fluxsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace fluxsim {

namespace {

inline bool anticommutes(Pauli a, Pauli b) {
    if (a == Pauli::I || b == Pauli::I || a == b) return false;
    return true;
}

// symplectic product of an (x,z)-frame with a Pauli string
bool frame_anticommutes(const std::vector<uint8_t>& fx, const std::vector<uint8_t>& fz,
                        const std::vector<std::pair<int, Pauli>>& op) {
    int count = 0;
    for (auto& [q, p] : op) {
        uint8_t px = (uint8_t(p) & 1u), pz = (uint8_t(p) >> 1) & 1u;
        count += (fx[q] & pz) ^ (fz[q] & px);
    }
    return count & 1;
}

}  // namespace

XzzxCode build_code(int distance) {
    if (distance < 3 || distance % 2 == 0)
        throw std::invalid_argument("build_code: distance must be odd and >= 3");
    const int d = distance;
    XzzxCode code;
    code.distance = d;
    code.n_data = d * d;

    // faces (R,C), R,C in [-1, d-1]; corners clipped to the grid. Interior
    // faces always included; boundary faces on alternating positions (top and
    // bottom rows, left and right columns).
    auto in_grid = [&](int r, int c) { return r >= 0 && r < d && c >= 0 && c < d; };
    struct Corner {
        int dr, dc;
        Pauli type;
    };
    // zigzag coupling order NW, NE, SW, SE; X on the NW/SE diagonal
    const std::array<Corner, 4> corners = {Corner{0, 0, Pauli::X}, Corner{0, 1, Pauli::Z},
                                           Corner{1, 0, Pauli::Z}, Corner{1, 1, Pauli::X}};
    for (int R = -1; R < d; ++R) {
        for (int C = -1; C < d; ++C) {
            std::vector<std::pair<int, Pauli>> legs;
            std::vector<int> steps;
            for (int k = 0; k < 4; ++k) {
                int r = R + corners[k].dr, c = C + corners[k].dc;
                if (!in_grid(r, c)) continue;
                legs.emplace_back(code.data_id(r, c), corners[k].type);
                steps.push_back(k);
            }
            bool keep = false;
            if (legs.size() == 4) {
                keep = true;
            } else if (legs.size() == 2) {
                // boundary faces follow the rotated-lattice pattern: one face
                // parity on the horizontal boundaries, the other on the vertical
                bool even = ((R + C) % 2 + 2) % 2 == 0;
                if ((R == -1 || R == d - 1) && even) keep = true;
                if ((C == -1 || C == d - 1) && !even) keep = true;
            }
            if (!keep) continue;
            Stabilizer s;
            s.ancilla = code.n_data + int(code.stabilizers.size());
            s.legs = legs;
            s.step = steps;
            code.stabilizers.push_back(std::move(s));
        }
    }
    code.n_ancilla = int(code.stabilizers.size());
    if (code.n_ancilla != d * d - 1) {
        std::ostringstream os;
        os << "build_code: expected " << d * d - 1 << " stabilizers, built " << code.n_ancilla;
        throw std::logic_error(os.str());
    }

    // exhaustive pairwise commutation check
    for (size_t a = 0; a < code.stabilizers.size(); ++a) {
        for (size_t b = a + 1; b < code.stabilizers.size(); ++b) {
            int anti = 0;
            for (auto& [qa, pa] : code.stabilizers[a].legs)
                for (auto& [qb, pb] : code.stabilizers[b].legs)
                    if (qa == qb && anticommutes(pa, pb)) ++anti;
            if (anti % 2 != 0) {
                std::ostringstream os;
                os << "build_code: stabilizers " << a << " and " << b << " anticommute";
                throw std::logic_error(os.str());
            }
        }
    }

    // schedule conflicts: a data qubit may appear at most once per step
    for (int step = 0; step < 4; ++step) {
        std::vector<char> used(code.n_data, 0);
        for (auto& s : code.stabilizers)
            for (size_t k = 0; k < s.legs.size(); ++k)
                if (s.step[k] == step) {
                    if (used[s.legs[k].first])
                        throw std::logic_error("build_code: schedule conflict");
                    used[s.legs[k].first] = 1;
                }
    }

    // logicals: column 0 and row 0 strings with types alternating by the
    // Hadamard-frame parity (r+c)
    for (int r = 0; r < d; ++r)
        code.logical_column.emplace_back(code.data_id(r, 0), (r % 2 == 0) ? Pauli::X : Pauli::Z);
    for (int c = 0; c < d; ++c)
        code.logical_row.emplace_back(code.data_id(0, c), (c % 2 == 0) ? Pauli::Z : Pauli::X);
    for (auto* logical : {&code.logical_column, &code.logical_row}) {
        for (auto& s : code.stabilizers) {
            int anti = 0;
            for (auto& [ql, pl] : *logical)
                for (auto& [qs, ps] : s.legs)
                    if (ql == qs && anticommutes(pl, ps)) ++anti;
            if (anti % 2 != 0) throw std::logic_error("build_code: logical anticommutes with a stabilizer");
        }
    }
    return code;
}

void NoiseBudget::validate() const {
    for (double p : {p_cz, p_h, p_readout, p_reset, p_idle_2q, p_idle_1q, p_idle_r})
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("NoiseBudget: probabilities in [0,1]");
}

NoiseBudget noise_budget_from_t1(double t1_seconds) {
    CoherenceRates r = CoherenceRates::from_t1_t2(t1_seconds, 2.0 * t1_seconds);
    NoiseBudget nb;
    nb.p_cz = 1.0 - decoherence_fidelity(2, {r, r}, 200e-9);
    nb.p_h = 1.0 - decoherence_fidelity(1, {r}, 10e-9);
    nb.p_readout = 1e-2;
    nb.p_reset = 1e-2;
    nb.p_idle_2q = 1.0 - decoherence_fidelity(1, {r}, 200e-9);
    nb.p_idle_1q = nb.p_h;
    nb.p_idle_r = nb.p_idle_2q;
    return nb;
}

RoundCircuit build_round_circuit(const XzzxCode& code, const NoiseBudget& noise) {
    noise.validate();
    RoundCircuit rc;
    using K = RoundCircuit::Instr::Kind;
    int loc = 0;
    auto noise1 = [&](int q, double p) {
        rc.instructions.push_back({K::noise1, q, -1, p, loc++});
    };
    auto noise2 = [&](int a, int b, double p) {
        rc.instructions.push_back({K::noise2, a, b, p, loc++});
    };
    auto gate = [&](K k, int q0, int q1 = -1) { rc.instructions.push_back({k, q0, q1, 0.0, -1}); };

    const int n = code.total_qubits();
    std::vector<char> touched(n, 0);

    // reset + |+> preparation
    for (auto& s : code.stabilizers) {
        gate(K::reset, s.ancilla);
        noise1(s.ancilla, noise.p_reset);
    }
    for (auto& s : code.stabilizers) {
        noise1(s.ancilla, noise.p_h);
        gate(K::hadamard, s.ancilla);
    }
    for (int q = 0; q < code.n_data; ++q) noise1(q, noise.p_idle_1q);

    // four coupling steps; CNOT legs compiled as H CZ H on the data qubit
    for (int step = 0; step < 4; ++step) {
        std::fill(touched.begin(), touched.end(), 0);
        for (auto& s : code.stabilizers) {
            for (size_t k = 0; k < s.legs.size(); ++k) {
                if (s.step[k] != step) continue;
                int q = s.legs[k].first;
                touched[q] = touched[s.ancilla] = 1;
                if (s.legs[k].second == Pauli::X) {
                    noise1(q, noise.p_h);
                    gate(K::hadamard, q);
                    noise2(s.ancilla, q, noise.p_cz);
                    gate(K::cz, s.ancilla, q);
                    noise1(q, noise.p_h);
                    gate(K::hadamard, q);
                } else {
                    noise2(s.ancilla, q, noise.p_cz);
                    gate(K::cz, s.ancilla, q);
                }
            }
        }
        for (int q = 0; q < n; ++q)
            if (!touched[q]) noise1(q, noise.p_idle_2q);
    }

    // basis rotation + measurement
    for (auto& s : code.stabilizers) {
        noise1(s.ancilla, noise.p_h);
        gate(K::hadamard, s.ancilla);
    }
    for (int q = 0; q < code.n_data; ++q) noise1(q, noise.p_idle_1q);
    for (auto& s : code.stabilizers) {
        rc.instructions.push_back({K::measure, s.ancilla, -1, noise.p_readout, loc++});
    }
    for (int q = 0; q < code.n_data; ++q) noise1(q, noise.p_idle_r);

    rc.n_noise_locations = loc;
    rc.measurements_per_round = int(code.stabilizers.size());
    return rc;
}

namespace {

struct FrameSim {
    std::vector<uint8_t> x, z;
    explicit FrameSim(int n) : x(n, 0), z(n, 0) {}

    void apply_pauli(int q, int pauli_bits) {
        x[q] ^= pauli_bits & 1;
        z[q] ^= (pauli_bits >> 1) & 1;
    }
    void hadamard(int q) { std::swap(x[q], z[q]); }
    void cz(int a, int b) {
        z[a] ^= x[b];
        z[b] ^= x[a];
    }
    void reset(int q) { x[q] = z[q] = 0; }
    bool measure_flip(int q) const { return x[q]; }  // Z-basis outcome flip
};

// Executes the per-round program. `inject` (noise_index, code) applies a
// deterministic fault instead of sampling; pass nullptr rng for noiseless.
void run_round(const RoundCircuit& rc, FrameSim& sim, std::vector<uint8_t>& meas_out,
               std::mt19937_64* rng, int inject_loc, int inject_code,
               std::vector<std::pair<int, int>>* fault_log, int loc_offset) {
    using K = RoundCircuit::Instr::Kind;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pick3(1, 3);
    std::uniform_int_distribution<int> pick15(1, 15);
    int meas_idx = 0;
    for (const auto& ins : rc.instructions) {
        switch (ins.kind) {
            case K::reset:
                sim.reset(ins.q0);
                break;
            case K::hadamard:
                sim.hadamard(ins.q0);
                break;
            case K::cz:
                sim.cz(ins.q0, ins.q1);
                break;
            case K::noise1: {
                int code = 0;
                if (rng && ins.prob > 0 && unif(*rng) < ins.prob) code = pick3(*rng);
                if (ins.noise_index + loc_offset == inject_loc) code = inject_code;
                if (code) {
                    sim.apply_pauli(ins.q0, code);
                    if (fault_log) fault_log->emplace_back(ins.noise_index + loc_offset, code);
                }
                break;
            }
            case K::noise2: {
                int code = 0;
                if (rng && ins.prob > 0 && unif(*rng) < ins.prob) code = pick15(*rng);
                if (ins.noise_index + loc_offset == inject_loc) code = inject_code;
                if (code) {
                    sim.apply_pauli(ins.q0, code & 3);
                    sim.apply_pauli(ins.q1, (code >> 2) & 3);
                    if (fault_log) fault_log->emplace_back(ins.noise_index + loc_offset, code);
                }
                break;
            }
            case K::measure: {
                bool flip = sim.measure_flip(ins.q0);
                bool coin = false;
                if (rng && ins.prob > 0 && unif(*rng) < ins.prob) coin = true;
                if (ins.noise_index + loc_offset == inject_loc && inject_code) coin = !coin;
                if (coin && fault_log) fault_log->emplace_back(ins.noise_index + loc_offset, 1);
                meas_out.push_back(uint8_t(flip ^ coin));
                ++meas_idx;
                break;
            }
            case K::idle_marker:
                break;
        }
    }
    (void)meas_idx;
}

SyndromeHistory run_program(const XzzxCode& code, const RoundCircuit& rc, int rounds,
                            std::mt19937_64* rng, int inject_loc, int inject_code,
                            std::vector<std::pair<int, int>>* fault_log) {
    FrameSim sim(code.total_qubits());
    SyndromeHistory h;
    h.rounds = rounds;
    h.n_ancilla = code.n_ancilla;
    for (int r = 0; r < rounds; ++r)
        run_round(rc, sim, h.measurements, rng, inject_loc, inject_code, fault_log,
                  r * rc.n_noise_locations);

    // detection events: XOR of consecutive rounds, first round against zero
    h.detections.assign(size_t(rounds + 1) * code.n_ancilla, 0);
    for (int r = 0; r < rounds; ++r)
        for (int a = 0; a < code.n_ancilla; ++a) {
            uint8_t prev = (r == 0) ? 0 : h.measurements[size_t(r - 1) * code.n_ancilla + a];
            h.detections[size_t(r) * code.n_ancilla + a] =
                h.measurements[size_t(r) * code.n_ancilla + a] ^ prev;
        }
    // perfect closure round from the residual data frame
    for (int a = 0; a < code.n_ancilla; ++a) {
        bool v = frame_anticommutes(sim.x, sim.z, code.stabilizers[a].legs);
        uint8_t prev = rounds > 0 ? h.measurements[size_t(rounds - 1) * code.n_ancilla + a] : 0;
        h.detections[size_t(rounds) * code.n_ancilla + a] = uint8_t(v) ^ prev;
    }
    h.final_frame_x.assign(sim.x.begin(), sim.x.begin() + code.n_data);
    h.final_frame_z.assign(sim.z.begin(), sim.z.begin() + code.n_data);
    h.logical_flipped = frame_anticommutes(sim.x, sim.z, code.logical_column);
    return h;
}

}  // namespace

SyndromeHistory sample_run(const XzzxCode& code, const RoundCircuit& circuit, int rounds,
                           std::mt19937_64& rng, std::vector<std::pair<int, int>>* fault_log) {
    return run_program(code, circuit, rounds, &rng, -1, 0, fault_log);
}

SyndromeHistory run_with_injection(const XzzxCode& code, const RoundCircuit& circuit, int rounds,
                                   int noise_index, int pauli_index) {
    return run_program(code, circuit, rounds, nullptr, noise_index, pauli_index, nullptr);
}

MatchingGraph build_matching_graph(const XzzxCode& code, const RoundCircuit& circuit, int rounds) {
    MatchingGraph g;
    const int n_det = (rounds + 1) * code.n_ancilla;
    g.n_detectors = n_det;

    // mechanism components: every stochastic location's pure-X and pure-Z
    // parts (two-qubit channels contribute one component per side), plus
    // readout flips. Components with more than two detectors (partial
    // stabilizer hooks) are rare at this budget and are left to be matched
    // through their constituent edges.
    struct Acc {
        double p = 0.0;
        double max_single = 0.0;
        bool flips = false;
    };
    std::map<std::pair<int, int>, Acc> edge_acc;
    using K = RoundCircuit::Instr::Kind;

    auto add_mech = [&](int loc, int pauli_code, double prob) {
        if (prob <= 0.0) return;
        auto h = run_with_injection(code, circuit, rounds, loc, pauli_code);
        std::vector<int> dets;
        for (int i = 0; i < n_det; ++i)
            if (h.detections[i]) dets.push_back(i);
        if (dets.empty() || dets.size() > 2) return;
        int u = dets[0], v = dets.size() == 2 ? dets[1] : -1;
        if (v >= 0 && u > v) std::swap(u, v);
        auto& slot = edge_acc[{u, v}];
        slot.p = slot.p + prob - 2.0 * slot.p * prob;  // XOR of independent mechanisms
        if (prob > slot.max_single) {
            slot.max_single = prob;
            slot.flips = h.logical_flipped;
        }
    };

    for (int r = 0; r < rounds; ++r) {
        int off = r * circuit.n_noise_locations;
        for (const auto& ins : circuit.instructions) {
            if (ins.noise_index < 0 || ins.prob <= 0.0) continue;
            int loc = off + ins.noise_index;
            if (ins.kind == K::noise1) {
                add_mech(loc, int(Pauli::X), 2.0 * ins.prob / 3.0);
                add_mech(loc, int(Pauli::Z), 2.0 * ins.prob / 3.0);
            } else if (ins.kind == K::noise2) {
                add_mech(loc, int(Pauli::X), 8.0 * ins.prob / 15.0);
                add_mech(loc, int(Pauli::Z), 8.0 * ins.prob / 15.0);
                add_mech(loc, int(Pauli::X) << 2, 8.0 * ins.prob / 15.0);
                add_mech(loc, int(Pauli::Z) << 2, 8.0 * ins.prob / 15.0);
            } else if (ins.kind == K::measure) {
                add_mech(loc, 1, ins.prob);
            }
        }
    }

    for (auto& [key, val] : edge_acc) {
        double p = std::min(val.p, 0.499999);
        g.edges.push_back({key.first, key.second, p, std::log((1.0 - p) / p), val.flips});
    }

    // all-pairs shortest paths with logical parity, boundary as node n_det
    const int n = n_det + 1;
    std::vector<std::vector<std::pair<int, const MatchingGraph::Edge*>>> adj(n);
    for (auto& e : g.edges) {
        int v = e.v < 0 ? n_det : e.v;
        adj[e.u].push_back({v, &e});
        adj[v].push_back({e.u, &e});
    }
    const double inf = std::numeric_limits<double>::infinity();
    g.dist = Eigen::MatrixXd::Constant(n, n, inf);
    g.path_flips.assign(n, std::vector<uint8_t>(n, 0));
    for (int src = 0; src < n; ++src) {
        std::vector<double> dist(n, inf);
        std::vector<uint8_t> par(n, 0);
        std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                            std::greater<>> pq;
        dist[src] = 0.0;
        pq.push({0.0, src});
        while (!pq.empty()) {
            auto [du, u] = pq.top();
            pq.pop();
            if (du > dist[u] + 1e-12) continue;
            for (auto& [v, e] : adj[u]) {
                double nd = du + e->weight;
                if (nd < dist[v] - 1e-12) {
                    dist[v] = nd;
                    par[v] = par[u] ^ uint8_t(e->flips_logical);
                    pq.push({nd, v});
                }
            }
        }
        for (int t = 0; t < n; ++t) {
            g.dist(src, t) = dist[t];
            g.path_flips[src][t] = par[t];
        }
    }
    g.boundary_dist.resize(n_det);
    g.boundary_flips.resize(n_det);
    for (int i = 0; i < n_det; ++i) {
        g.boundary_dist[i] = g.dist(i, n_det);
        g.boundary_flips[i] = g.path_flips[i][n_det];
    }
    return g;
}

DecodeResult decode(const MatchingGraph& graph, const std::vector<int>& events) {
    DecodeResult res;
    const int m = int(events.size());
    if (m == 0) return res;
    for (int ev : events)
        if (ev < 0 || ev >= graph.n_detectors)
            throw std::invalid_argument("decode: detection event out of range");

    // nodes 0..m-1 = events, m..2m-1 = boundary images
    const int n = 2 * m;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    const double scale = 1048576.0;  // integer weights keep the matcher exact
    double big = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) big = std::max(big, graph.dist(events[i], events[j]));
    for (int i = 0; i < m; ++i) big = std::max(big, 2.0 * graph.boundary_dist[events[i]]);
    big = std::min(big, 1e6);

    auto clamp = [&](double d) { return std::round(std::min(d, big + 1.0) * scale); };
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            double d = clamp(graph.dist(events[i], events[j]));
            w(i, j) = w(j, i) = d;
            w(m + i, m + j) = w(m + j, m + i) = 0.0;  // boundary images pair freely
        }
        double db = clamp(graph.boundary_dist[events[i]]);
        for (int j = 0; j < m; ++j) {
            if (j == i) {
                w(i, m + i) = w(m + i, i) = db;
            } else {
                w(i, m + j) = w(m + j, i) = clamp(big + 1.0);  // only the own image is reachable
            }
        }
    }

    auto pairs = min_weight_perfect_matching(w);
    bool flip = false;
    for (auto& [a, b] : pairs) {
        int lo = std::min(a, b), hi = std::max(a, b);
        if (hi < m) {
            res.matched_pairs.emplace_back(events[lo], events[hi]);
            flip ^= bool(graph.path_flips[events[lo]][events[hi]]);
        } else if (lo < m) {
            res.matched_pairs.emplace_back(events[lo], -1);
            flip ^= bool(graph.boundary_flips[events[lo]]);
        }
        // boundary-boundary pairs carry no correction
    }
    res.logical_flip_predicted = flip;
    return res;
}

LogicalErrorRate logical_error_rate(int distance, const NoiseBudget& noise, long shots,
                                    uint64_t seed, int workers, int rounds) {
    if (shots < 1) throw std::invalid_argument("logical_error_rate: shots >= 1");
    XzzxCode code = build_code(distance);
    RoundCircuit circuit = build_round_circuit(code, noise);
    const int nrounds = rounds > 0 ? rounds : distance;
    MatchingGraph graph = build_matching_graph(code, circuit, nrounds);

    auto run_chunk = [&](long begin, long end) {
        long fails = 0;
        std::vector<int> events;
        for (long s = begin; s < end; ++s) {
            uint64_t z = seed + 0x9e3779b97f4a7c15ULL * uint64_t(s + 1);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            std::mt19937_64 rng(z ^ (z >> 31));
            auto h = sample_run(code, circuit, nrounds, rng);
            events.clear();
            for (int i = 0; i < graph.n_detectors; ++i)
                if (h.detections[i]) events.push_back(i);
            auto dec = decode(graph, events);
            if (dec.logical_flip_predicted != h.logical_flipped) ++fails;
        }
        return fails;
    };

    LogicalErrorRate out;
    out.distance = distance;
    out.shots = shots;
    if (workers <= 1 || shots < 4 * workers) {
        out.failures = run_chunk(0, shots);
    } else {
        std::vector<std::future<long>> futs;
        long chunk = (shots + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            long b = w * chunk, e = std::min(shots, b + chunk);
            if (b >= e) break;
            futs.push_back(std::async(std::launch::async, run_chunk, b, e));
        }
        for (auto& f : futs) out.failures += f.get();
    }
    out.epsilon_l = double(out.failures) / double(shots);
    const double z = 1.959963984540054, n = double(shots), p = out.epsilon_l, z2 = z * z;
    double denom = 1.0 + z2 / n;
    double centre = (p + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    out.ci_lo = std::max(0.0, centre - half);
    out.ci_hi = std::min(1.0, centre + half);
    return out;
}

SuppressionFit fit_suppression(const std::vector<int>& distances,
                               const std::vector<double>& rates) {
    if (distances.size() != rates.size() || distances.size() < 3)
        throw std::invalid_argument("fit_suppression: need >= 3 distances");
    std::vector<double> xs, ys;
    for (size_t i = 0; i < distances.size(); ++i) {
        if (rates[i] <= 0.0) continue;  // non-positive rates excluded
        xs.push_back((distances[i] + 1.0) / 2.0);
        ys.push_back(std::log(rates[i]));
    }
    if (xs.size() < 2) throw std::invalid_argument("fit_suppression: too few positive rates");
    auto fit = linear_fit(xs, ys);
    SuppressionFit out;
    out.lambda = std::exp(-fit.slope);
    out.c = std::exp(fit.intercept);
    return out;
}

}  // namespace fluxsim
