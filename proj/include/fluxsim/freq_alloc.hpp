#pragma once

#include "fluxsim/fluxonium.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fluxsim {

enum class GateType { cr, cz };

// Square-lattice processor graph. Edges are ordered (control -> target); the
// orientation matters for CR only. Default orientation: checkerboard, nodes
// with odd (row+col) parity drive their even-parity neighbors.
struct LatticeGraph {
    int rows = 0;
    int cols = 0;
    bool periodic = false;
    std::vector<std::pair<int, int>> edges;  // (control, target)

    static LatticeGraph square(int rows, int cols, bool periodic);
    int node_count() const { return rows * cols; }
    std::vector<std::vector<int>> adjacency() const;
};

// Thresholds in MHz except the band (GHz); see the collision table.
struct ConstraintSet {
    double freq_min_ghz = 0.2;
    double freq_max_ghz = 1.2;
    double addressability_min_mhz = 20.0;
    double two_photon_min_mhz = 10.0;
    double gate_detuning_min_mhz = 20.0;
    double gate_detuning_max_mhz = 1000.0;
    double cz_midpoint_exclusion_mhz = 10.0;
    double spectator_min_mhz = 20.0;
    double spectator_two_photon_min_mhz = 10.0;
    GateType gate_type = GateType::cz;
};

struct Allocation {
    std::vector<double> node_freq_ghz;
    std::map<std::pair<int, int>, double> edge_drive_ghz;  // CZ only; CR drives at the target
    double margin_mhz = 0.0;  // minimum slack over all constraints
};

struct Violation {
    std::string kind;
    int node_i = -1;
    int node_j = -1;
    double slack_mhz = 0.0;  // negative when violated
};

// Evaluates every collision constraint; returns violations (negative slack).
std::vector<Violation> check_constraints(const Allocation& alloc, const LatticeGraph& graph,
                                         const ConstraintSet& cs);

// Minimum slack over all constraints (MHz); +inf for an empty graph.
double constraint_margin_mhz(const Allocation& alloc, const LatticeGraph& graph,
                             const ConstraintSet& cs);

// Randomized-restart greedy assignment plus coordinate local search maximizing
// the minimum slack. Deterministic for a given seed. Throws if no feasible
// point is found within the restart budget (message carries the best margin).
Allocation allocate(const LatticeGraph& graph, const ConstraintSet& cs, uint64_t rng_seed,
                    int restarts = 4);

struct YieldEstimate {
    int samples = 0;
    int passes = 0;
    double yield = 0.0;
    double ci_lo = 0.0;  // Wilson 95%
    double ci_hi = 0.0;
    double sigma_f_mhz = 0.0;
    uint64_t rng_seed = 0;
};

// Monte Carlo yield: perturb every node frequency by N(0, sigma_f^2); CZ edge
// drives are re-centered to keep their designed offset from the perturbed
// midpoint. Pass = zero violations.
YieldEstimate yield_mc(const Allocation& alloc, const LatticeGraph& graph, const ConstraintSet& cs,
                       double sigma_f_mhz, int samples, uint64_t rng_seed, int workers = 1);

// y_cell^(n_device/n_cell).
double tile_yield(double y_cell, double n_device, double n_cell);

// omega_01 shift (MHz) under relative perturbations of E_J and E_L.
double dispersion_model_mhz(const FluxoniumParams& params, double delta_ej_rel,
                            double delta_el_rel);

}  // namespace fluxsim
