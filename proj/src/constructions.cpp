#include "mdim/constructions.hpp"

#include <algorithm>
#include <cmath>

namespace mdim {

BlockSpec BlockSpec::quadratic_tower(int k_max) {
    if (k_max < 1 || k_max > 15)
        throw config_error("quadratic_tower: k_max must be in [1,15]");
    BlockSpec spec;
    double inv_sum = 0.0;
    for (int k = 1; k <= k_max; ++k) inv_sum += 1.0 / (static_cast<double>(k) * k);
    spec.normalization = 1.0 / inv_sum;
    for (int k = 1; k <= k_max; ++k) {
        BlockSpec::Block b;
        b.width = spec.normalization / (static_cast<double>(k) * k);
        long long teeth = 1;
        for (int i = 0; i < k; ++i) {
            if (teeth > (1ll << 61) / k) throw budget_error("quadratic_tower: k^k overflows");
            teeth *= k;
        }
        b.teeth = teeth;
        spec.blocks.push_back(b);
    }
    return spec;
}

void BlockSpec::validate() const {
    if (blocks.empty()) throw config_error("block spec: no blocks");
    double sum = 0.0;
    for (const auto& b : blocks) {
        if (!(b.width > 0.0)) throw config_error("block spec: widths must be positive");
        if (b.teeth < 1) throw config_error("block spec: teeth must be >= 1");
        sum += b.width;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw config_error("block spec: widths must sum to 1");
}

double BlockSpec::block_start(std::size_t k) const {
    if (k < 1 || k > blocks.size()) throw config_error("block spec: bad block index");
    double a = 0.0;
    for (std::size_t s = 0; s + 1 < k; ++s) a += blocks[s].width;
    return a;
}

double BlockSpec::block_end(std::size_t k) const {
    return block_start(k) + blocks[k - 1].width;
}

double BlockSpec::tooth_eps(std::size_t k) const {
    if (k < 1 || k > blocks.size()) throw config_error("block spec: bad block index");
    const auto& b = blocks[k - 1];
    return b.width / static_cast<double>(2 * b.teeth + 1);
}

double PiecewiseAffineMap::operator()(double x) const {
    if (x <= knots.front()) return values.front();
    if (x >= knots.back()) return values.back();
    auto it = std::upper_bound(knots.begin(), knots.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - knots.begin());
    std::size_t lo = hi - 1;
    if (x == knots[lo]) return values[lo];
    double t = (x - knots[lo]) / (knots[hi] - knots[lo]);
    double v = values[lo] + t * (values[hi] - values[lo]);
    return std::clamp(v, 0.0, 1.0);
}

void PiecewiseAffineMap::validate() const {
    if (knots.size() != values.size() || knots.size() < 2)
        throw config_error("piecewise map: bad knot arrays");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            throw config_error("piecewise map: knots must be strictly increasing");
    for (double v : values)
        if (v < 0.0 || v > 1.0) throw config_error("piecewise map: values outside [0,1]");
    if (knots.front() != 0.0 || knots.back() != 1.0)
        throw config_error("piecewise map: domain must be [0,1]");
}

MaxMdimMap build_max_mdim_map(const BlockSpec& spec) {
    spec.validate();
    // Cumulative block endpoints; force the last one to exactly 1.
    std::vector<double> a(spec.blocks.size() + 1, 0.0);
    for (std::size_t k = 0; k < spec.blocks.size(); ++k) a[k + 1] = a[k] + spec.blocks[k].width;
    if (std::fabs(a.back() - 1.0) > 1e-9)
        throw config_error("build_max_mdim_map: block widths do not fill [0,1]");
    a.back() = 1.0;

    PiecewiseAffineMap map;
    map.knots.push_back(0.0);
    map.values.push_back(0.0); // a_0 = 0 and the first knot value is a_{k-1}
    for (std::size_t k = 0; k < spec.blocks.size(); ++k) {
        const double lo = a[k], hi = a[k + 1];
        const long long pieces = 2 * spec.blocks[k].teeth + 1;
        const double width = (hi - lo) / static_cast<double>(pieces);
        if (width < 1e-14)
            throw config_error("build_max_mdim_map: piece width underflows 1e-14");
        for (long long i = 1; i <= pieces; ++i) {
            double knot = i == pieces ? hi : lo + width * static_cast<double>(i);
            map.knots.push_back(knot);
            map.values.push_back(i % 2 == 1 ? hi : lo); // odd knots sit at a_k
        }
    }
    map.validate();

    MaxMdimMap out;
    out.spec = spec;
    out.map = map;
    out.system = make_interval_system("max-mdim-map", [map](double x) { return map(x); });
    return out;
}

bigint symbolic_separated_count(const BlockSpec& spec, std::size_t k, int m) {
    if (k < 1 || k > spec.blocks.size()) throw config_error("symbolic count: bad block index");
    if (m < 1) throw config_error("symbolic count: m must be >= 1");
    bigint base = spec.blocks[k - 1].teeth + 1; // increasing pieces
    bigint out = 1;
    for (int i = 0; i < m; ++i) out *= base;
    return out;
}

FiniteSample separated_witnesses(const MaxMdimMap& built, std::size_t k, int m,
                                 std::size_t budget) {
    const BlockSpec& spec = built.spec;
    if (k < 1 || k > spec.blocks.size())
        throw config_error("separated_witnesses: bad block index");
    if (m < 1) throw config_error("separated_witnesses: m must be >= 1");
    const long long teeth = spec.blocks[k - 1].teeth;
    const long long branches = teeth + 1;
    double total = std::pow(static_cast<double>(branches), m);
    if (total > static_cast<double>(budget))
        throw budget_error("separated_witnesses: cylinder count exceeds budget");

    const double lo = spec.block_start(k);
    const double hi = spec.block_end(k);
    const double piece_w = (hi - lo) / static_cast<double>(2 * teeth + 1);

    // Increasing pieces are the even 0-based pieces of the block.
    auto piece_lo = [&](long long branch) { return lo + piece_w * static_cast<double>(2 * branch); };

    const std::size_t cnt = static_cast<std::size_t>(total + 0.5);
    FiniteSample out;
    out.dim = 1;
    out.data.reserve(cnt);
    std::vector<long long> digit(static_cast<std::size_t>(m), 0);
    for (std::size_t idx = 0; idx < cnt; ++idx) {
        // Fold the cylinder from the last symbol backwards; each increasing
        // piece maps its domain affinely onto [lo, hi].
        double u = piece_lo(digit[static_cast<std::size_t>(m - 1)]);
        double v = u + piece_w;
        for (int h = m - 2; h >= 0; --h) {
            double plo = piece_lo(digit[static_cast<std::size_t>(h)]);
            double scale = piece_w / (hi - lo);
            double nu = plo + (u - lo) * scale;
            double nv = plo + (v - lo) * scale;
            u = nu;
            v = nv;
        }
        double mid = 0.5 * (u + v);
        out.push(std::span<const double>(&mid, 1));
        for (int j = m - 1; j >= 0; --j) {
            if (++digit[static_cast<std::size_t>(j)] < branches) break;
            digit[static_cast<std::size_t>(j)] = 0;
        }
    }
    return out;
}

std::vector<PredictedMdimRow> predicted_mdim(const BlockSpec& spec) {
    spec.validate();
    std::vector<PredictedMdimRow> rows;
    rows.reserve(spec.blocks.size());
    for (std::size_t k = 1; k <= spec.blocks.size(); ++k) {
        const auto& b = spec.blocks[k - 1];
        PredictedMdimRow r;
        r.k = k;
        r.log_teeth = std::log(static_cast<double>(b.teeth));
        double eps = b.width / (2.0 * static_cast<double>(b.teeth));
        r.abs_log_eps = std::fabs(std::log(eps));
        r.ratio = r.abs_log_eps > 0.0 ? r.log_teeth / r.abs_log_eps : 0.0;
        rows.push_back(r);
    }
    return rows;
}

} // namespace mdim
