#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdim/dynsys.hpp"
#include "mdim/estimators.hpp"

namespace mdim {

/// Joint probabilities over finite alphabets A x B, row-major |A| x |B|.
struct JointDistribution {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> p;

    double at(std::size_t i, std::size_t j) const { return p[i * cols + j]; }
    void validate() const; // entries >= 0, sum 1 within 1e-12
};

/// Shannon entropy in nats, convention 0 log 0 = 0. Weights must be
/// nonnegative and sum to 1 within 1e-9.
double shannon_entropy(std::span<const double> weights);

/// I(Z1, Z2) = H(Z1) + H(Z2) - H(Z1, Z2), in nats.
double mutual_information(const JointDistribution& joint);

/// One rate-distortion point. Rates are nats per symbol.
struct RDPoint {
    double distortion = 0.0;
    double rate = 0.0;
    int block_length = 1;
    std::string method;          // "blahut-arimoto" | "lloyd"
    std::vector<double> kernel;  // row-major |source| x |reproduction|; empty for lloyd
    std::vector<double> codebook_flat; // codewords, size x n x dim; lloyd only
    std::size_t codebook_size = 0;
    double grid_mesh = 0.0;
    bool converged = true;
    int iterations = 0;
};

struct RDCurve {
    std::vector<RDPoint> points;
};

/// Alternating-minimization solver for the finite-alphabet rate-distortion
/// problem: min I(X;Y) over kernels with E d(X,Y) <= target.
/// `distortion` is row-major |source| x |reproduction|. Stops when the
/// relative change of the rate functional drops below `tol`.
RDPoint blahut_arimoto(std::span<const double> source,
                       std::span<const double> distortion,
                       std::size_t reproduction_size,
                       double target_distortion,
                       double tol = 1e-9, int max_iter = 10000);

/// Block rate distortion for a process given as a measure over n-blocks:
/// per-coordinate distortion d(T^k x, y_k) in the system metric, reproduction
/// trajectories taken as orbits of `grid` points (default: the atoms of the
/// process). One RDPoint per eps, rate = (1/n) I.
RDCurve block_rate_distortion(const FiniteMeasure& process, const DynSystem& sys,
                              int n, std::span<const double> eps_list,
                              const FiniteSample* grid = nullptr,
                              double tol = 1e-9, int max_iter = 10000);

/// Codebook distortion: Lloyd alternation between nearest-codeword
/// assignment and rho_n-centroid update, best over `restarts`. Codebook size
/// floor(e^{nR}); empty cells are repaired by splitting the heaviest cell.
/// The result is an upper bound for the true infimum.
RDPoint lloyd_codebook(const FiniteMeasure& blocks, const DynSystem& sys, int n,
                       double rate, int restarts, std::uint64_t seed,
                       double tol = 1e-12, int max_iter = 200);

/// Same alternation with an explicit codebook size.
RDPoint lloyd_codebook_size(const FiniteMeasure& blocks, const DynSystem& sys, int n,
                            std::size_t codebook_size, int restarts, std::uint64_t seed,
                            double tol = 1e-12, int max_iter = 200);

/// An (n, eps)-approximation: a partition of the atoms of a measure with one
/// representative trajectory per cell, with mean rho_n distortion <= eps.
struct ApproximationMap {
    int n = 1;
    double declared_eps = 0.0;
    std::vector<std::vector<std::size_t>> cells; // partition of atom indices
    std::vector<std::vector<Point>> reps;        // one length-n trajectory per cell
};

/// Mean per-coordinate distortion of Z against the orbits of mu's atoms.
double approximation_distortion(const DynSystem& sys, const FiniteMeasure& mu,
                                const ApproximationMap& z);

/// Replace each cell's representative by the true orbit of the cell atom
/// minimizing the distance to the old representative. Preserves the cell
/// partition exactly; at most doubles the distortion. Rejects maps whose
/// distortion exceeds their declared eps.
ApproximationMap orbit_code(const DynSystem& sys, const FiniteMeasure& mu,
                            const ApproximationMap& z);

struct SandwichReport {
    EstimateReport lower_leg;  // average-ball growth at radius 4 L eps, delta 1/L
    RDPoint rate;              // block R-D at eps
    EstimateReport upper_leg;  // average-ball growth at eps, delta eps / (2 D)
    double lower_margin = 0.0; // rate - lower_leg
    double upper_margin = 0.0; // upper_leg - rate
    bool flagged = false;      // a margin fell below -tolerance
};

/// Computes the three finite-n estimates bracketing the rate-distortion
/// value and reports both inequality margins. A margin beyond tolerance is
/// flagged, not fatal: finite-n estimates need not satisfy the asymptotic
/// inequality exactly.
SandwichReport sandwich_check(const DynSystem& sys, const FiniteMeasure& mu,
                              double eps, int L, int n_lo, int n_hi,
                              double tolerance = 0.05);

} // namespace mdim
