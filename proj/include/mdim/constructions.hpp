#pragma once

#include <string>
#include <vector>

#include "mdim/covercount.hpp"
#include "mdim/dynsys.hpp"

namespace mdim {

/// Block layout for the interval maps with prescribed separated growth:
/// block k occupies J_k = [a_{k-1}, a_k] of width b_k and carries a sawtooth
/// with 2 l_k + 1 affine pieces.
struct BlockSpec {
    struct Block {
        double width = 0.0; // b_k, after normalization
        long long teeth = 1; // l_k
    };
    std::vector<Block> blocks;
    double normalization = 1.0; // C

    /// b_k = C / k^2, l_k = k^k, truncated at k_max and renormalized so the
    /// retained widths sum to 1.
    static BlockSpec quadratic_tower(int k_max);

    double block_start(std::size_t k) const;  // a_{k-1}, 1-based k
    double block_end(std::size_t k) const;    // a_k
    double tooth_eps(std::size_t k) const;    // b_k / (2 l_k + 1)
    void validate() const;
};

/// Continuous piecewise-affine self map of [0,1]; knots strictly increasing,
/// shared knot values give exact continuity.
struct PiecewiseAffineMap {
    std::vector<double> knots;
    std::vector<double> values;

    double operator()(double x) const;
    void validate() const;
};

struct MaxMdimMap {
    BlockSpec spec;
    PiecewiseAffineMap map;
    DynSystem system;
};

/// Build the sawtooth map: within each J_k, 2 l_k + 1 alternating affine
/// pieces, each surjecting onto J_k, fixing both block endpoints so adjacent
/// blocks join continuously. Rejects specs whose piece width underflows 1e-14.
MaxMdimMap build_max_mdim_map(const BlockSpec& spec);

/// Certified lower bound for the (m, eps'_k)-separated cardinality in J_k:
/// (number of increasing pieces)^m = (l_k + 1)^m, exact.
bigint symbolic_separated_count(const BlockSpec& spec, std::size_t k, int m);

/// Midpoints of the depth-m increasing-piece cylinders of block k; pairwise
/// more than eps'_k apart in d_m by one gap width.
FiniteSample separated_witnesses(const MaxMdimMap& built, std::size_t k, int m,
                                 std::size_t budget = 200000);

struct PredictedMdimRow {
    std::size_t k = 0;
    double log_teeth = 0.0;     // log l_k
    double abs_log_eps = 0.0;   // |log eps_k|, eps_k = b_k / (2 l_k)
    double ratio = 0.0;
};

/// The per-block ratio log l_k / |log eps_k| whose limsup is the dimension
/// target; exact evaluation, reported not asserted.
std::vector<PredictedMdimRow> predicted_mdim(const BlockSpec& spec);

} // namespace mdim
