#pragma once

#include "fluxsim/matching.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fluxsim {

enum class Pauli : uint8_t { I = 0, X = 1, Z = 2, Y = 3 };  // bit0 = X part, bit1 = Z part

// XZZX surface-code patch on a d x d data grid: every interior face carries a
// weight-4 stabilizer reading X-Z-Z-X in the zigzag coupling order
// (NW, NE, SW, SE); the boundary carries 2(d-1) two-qubit stabilizers. Data
// qubit ids are r*d + c; ancillas are indexed by stabilizer order.
struct Stabilizer {
    int ancilla = -1;                          // ancilla qubit id (offset by d^2)
    std::vector<std::pair<int, Pauli>> legs;   // (data id, leg type) in coupling order
    std::vector<int> step;                     // coupling time-step per leg (0..3)
};

struct XzzxCode {
    int distance = 0;
    int n_data = 0;
    int n_ancilla = 0;
    std::vector<Stabilizer> stabilizers;
    // tracked logical operator (column string, alternating X/Z), plus the
    // conjugate row string; support as (data id, Pauli)
    std::vector<std::pair<int, Pauli>> logical_column;
    std::vector<std::pair<int, Pauli>> logical_row;

    int data_id(int r, int c) const { return r * distance + c; }
    int total_qubits() const { return n_data + n_ancilla; }
};

// Build and verify (pairwise commutation checked exhaustively; stabilizer
// count and independence checked; even d rejected).
XzzxCode build_code(int distance);

// Expected average Pauli error rates per operation (Table-style budget).
struct NoiseBudget {
    double p_cz = 0.0;
    double p_h = 0.0;
    double p_readout = 0.0;
    double p_reset = 0.0;
    double p_idle_2q = 0.0;
    double p_idle_1q = 0.0;
    double p_idle_r = 0.0;

    void validate() const;
};

// Budget derived from the decoherence analytics at the stated operation times
// (CZ 200 ns, H 10 ns, readout 200 ns) with T2 = 2 T1; readout and reset are
// pinned at 1e-2.
NoiseBudget noise_budget_from_t1(double t1_seconds);

// One stabilizer-measurement round compiled to explicit instructions. CNOT
// legs are realized as H(data) CZ H(data) inside the same coupling step.
struct RoundCircuit {
    struct Instr {
        enum class Kind { reset, hadamard, cz, noise1, noise2, measure, idle_marker } kind;
        int q0 = -1, q1 = -1;
        double prob = 0.0;      // noise / readout-flip probability
        int noise_index = -1;   // dense index over stochastic locations
    };
    std::vector<Instr> instructions;
    int n_noise_locations = 0;
    int measurements_per_round = 0;
};

RoundCircuit build_round_circuit(const XzzxCode& code, const NoiseBudget& noise);

struct SyndromeHistory {
    int rounds = 0;                       // noisy rounds (a perfect round is appended)
    int n_ancilla = 0;
    std::vector<uint8_t> measurements;    // rounds x n_ancilla raw outcomes (frame-relative)
    std::vector<uint8_t> detections;      // (rounds+1) x n_ancilla detection events
    std::vector<uint8_t> final_frame_x;   // residual data frame
    std::vector<uint8_t> final_frame_z;
    bool logical_flipped = false;         // truth value from the frame

    int detector(int layer, int anc) const { return layer * n_ancilla + anc; }
};

// Pauli-frame Monte Carlo of `rounds` noisy rounds plus a perfect closure
// round. Optionally records every sampled fault as (noise_index, pauli pair).
SyndromeHistory sample_run(const XzzxCode& code, const RoundCircuit& circuit, int rounds,
                           std::mt19937_64& rng,
                           std::vector<std::pair<int, int>>* fault_log = nullptr);

// Noiseless run with a single injected fault at noise location `where`
// (two-qubit locations take a 15-Pauli index, single-qubit a 3-Pauli index,
// measurements flip the outcome). Used for matching-graph construction and
// the exhaustive decoder tests.
SyndromeHistory run_with_injection(const XzzxCode& code, const RoundCircuit& circuit, int rounds,
                                   int noise_index, int pauli_index);

struct MatchingGraph {
    int n_detectors = 0;  // (rounds+1) * n_ancilla
    struct Edge {
        int u, v;          // v == -1 for boundary
        double prob;
        double weight;     // log((1-p)/p)
        bool flips_logical;
    };
    std::vector<Edge> edges;
    // all-pairs shortest paths over detectors (+1 boundary column)
    Eigen::MatrixXd dist;
    std::vector<std::vector<uint8_t>> path_flips;  // logical parity along shortest path
    std::vector<double> boundary_dist;
    std::vector<uint8_t> boundary_flips;
};

MatchingGraph build_matching_graph(const XzzxCode& code, const RoundCircuit& circuit, int rounds);

struct DecodeResult {
    bool logical_flip_predicted = false;
    std::vector<std::pair<int, int>> matched_pairs;  // detector pairs (-1 = boundary)
};

DecodeResult decode(const MatchingGraph& graph, const std::vector<int>& detection_events);

struct LogicalErrorRate {
    int distance = 0;
    long shots = 0;
    long failures = 0;
    double epsilon_l = 0.0;
    double ci_lo = 0.0;  // 95% Wilson
    double ci_hi = 0.0;
};

LogicalErrorRate logical_error_rate(int distance, const NoiseBudget& noise, long shots,
                                    uint64_t seed, int workers = 1, int rounds = -1);

struct SuppressionFit {
    double lambda = 0.0;
    double c = 0.0;
};

// Fit eps_L = C / Lambda^((d+1)/2) by least squares in log space.
SuppressionFit fit_suppression(const std::vector<int>& distances,
                               const std::vector<double>& rates);

}  // namespace fluxsim
