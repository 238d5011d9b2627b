#include "mdim/covercount.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mdim {

std::string BallKind::label() const {
    switch (kind) {
        case Kind::Bowen: return "bowen";
        case Kind::Average: return "average";
        case Kind::Prime: return "prime:" + std::to_string(prime_fraction);
    }
    return "?";
}

void CountCurve::add(CountEntry e) {
    for (const auto& old : entries) {
        bool same_ball = old.ball.kind == e.ball.kind &&
                         old.ball.prime_fraction == e.ball.prime_fraction;
        bool same_delta = old.delta.has_value() == e.delta.has_value() &&
                          (!old.delta || *old.delta == *e.delta);
        if (old.n == e.n && old.eps == e.eps && same_ball && same_delta)
            throw config_error("count curve: duplicate entry for (n, eps, ball, delta)");
    }
    if (e.count < 1) throw config_error("count curve: counts must be >= 1");
    entries.push_back(std::move(e));
}

namespace {

// Base metric on raw coordinate blocks, the inner loop of every kernel.
struct PairMetric {
    SpaceKind kind;
    BaseMetricKind scalar;
    int dim;
    std::vector<double> shift_weights; // stored-index weights, shift only

    explicit PairMetric(const DynSystem& sys)
        : kind(sys.kind), scalar(sys.scalar_metric), dim(sys.dim) {
        if (kind == SpaceKind::Shift) {
            scalar = sys.base.metric;
            const int l = sys.window_radius;
            if (sys.sided == Sidedness::OneSided) {
                shift_weights.resize(static_cast<std::size_t>(l) + 1);
                for (int j = 0; j <= l; ++j)
                    shift_weights[static_cast<std::size_t>(j)] = std::ldexp(1.0, -j);
            } else {
                shift_weights.resize(2 * static_cast<std::size_t>(l) + 1);
                for (int j = -l; j <= l; ++j)
                    shift_weights[static_cast<std::size_t>(j + l)] =
                        std::ldexp(1.0, -std::abs(j));
            }
        }
    }

    double coord(double a, double b) const {
        switch (scalar) {
            case BaseMetricKind::Abs: return std::fabs(a - b);
            case BaseMetricKind::Circle: {
                double d = std::fabs(a - b);
                return d < 0.5 ? d : 1.0 - d;
            }
            case BaseMetricKind::Discrete:
                return std::fabs(a - b) > kPointTol ? 1.0 : 0.0;
        }
        return 0.0;
    }

    double base(const double* a, const double* b) const {
        switch (kind) {
            case SpaceKind::Interval:
            case SpaceKind::Circle:
                return coord(a[0], b[0]);
            case SpaceKind::Product: {
                double m = 0.0;
                for (int i = 0; i < dim; ++i) m = std::max(m, coord(a[i], b[i]));
                return m;
            }
            case SpaceKind::Shift: {
                double s = 0.0;
                for (std::size_t j = 0; j < shift_weights.size(); ++j)
                    s += shift_weights[j] * coord(a[j], b[j]);
                return s;
            }
        }
        return 0.0;
    }
};

// Orbits laid out flat: point i, iterate k at data + (i * n + k) * dim.
struct OrbitTensor {
    int n = 1;
    std::size_t count = 0;
    std::size_t dim = 1;
    std::vector<double> data;

    const double* at(std::size_t i, int k) const {
        return data.data() + (i * static_cast<std::size_t>(n) + static_cast<std::size_t>(k)) * dim;
    }
};

OrbitTensor precompute_orbits(const DynSystem& sys, const FiniteSample& sample, int n,
                              ExecPolicy policy) {
    OrbitTensor t;
    t.n = n;
    t.count = sample.count;
    t.dim = sample.dim;
    t.data.resize(sample.count * static_cast<std::size_t>(n) * sample.dim);
    const auto worker = [&](std::size_t i) {
        Point p = sample.point_copy(i);
        for (int k = 0; k < n; ++k) {
            std::memcpy(t.data.data() + (i * static_cast<std::size_t>(n) + k) * t.dim,
                        p.data(), t.dim * sizeof(double));
            if (k + 1 < n) p = sys.map(p);
        }
    };
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(sample.count); ++i)
            worker(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < sample.count; ++i) worker(i);
    }
    return t;
}

// +1: certified outside (d_n > eps), -1: certified inside (d_n <= eps),
// 0: within the truncation band, caller must refuse.
int classify_pair(const PairMetric& pm, const OrbitTensor& orb, std::size_t i, std::size_t j,
                  double eps, double err, BallKind ball) {
    const int n = orb.n;
    const double hi = eps + err;
    switch (ball.kind) {
        case BallKind::Kind::Bowen: {
            double dmax = 0.0;
            for (int k = 0; k < n; ++k) {
                double d = pm.base(orb.at(i, k), orb.at(j, k));
                if (d > hi) return +1;
                if (d > dmax) dmax = d;
            }
            if (err == 0.0) return -1;
            return dmax < eps - err ? -1 : 0;
        }
        case BallKind::Kind::Average: {
            double sum = 0.0;
            for (int k = 0; k < n; ++k) {
                sum += pm.base(orb.at(i, k), orb.at(j, k));
                if (sum > hi * n) return +1;
            }
            double avg = sum / n;
            if (err == 0.0) return avg > eps ? +1 : -1;
            if (avg > eps + err) return +1;
            return avg < eps - err ? -1 : 0;
        }
        case BallKind::Kind::Prime: {
            int good = 0;
            for (int k = 0; k < n; ++k) {
                double d = pm.base(orb.at(i, k), orb.at(j, k));
                if (err > 0.0 && std::fabs(d - eps) <= err) return 0;
                if (d <= eps) ++good;
            }
            bool member =
                static_cast<double>(good) >= (1.0 - ball.prime_fraction) * n - 1e-12;
            return member ? -1 : +1;
        }
    }
    return 0;
}

[[noreturn]] void refuse(double eps, double err) {
    throw precision_error("cannot decide distance vs eps=" + std::to_string(eps) +
                          " within truncation bound " + std::to_string(err));
}

} // namespace

// -- separated sets -------------------------------------------------------

SeparatedResult greedy_separated_serial(const FiniteSample& sample, const DynSystem& sys,
                                        int n, double eps) {
    if (sample.count == 0) throw config_error("greedy_separated: empty sample");
    if (!(eps > 0.0)) throw config_error("greedy_separated: eps must be > 0");
    const PairMetric pm(sys);
    const OrbitTensor orb = precompute_orbits(sys, sample, n, ExecPolicy::Serial);
    const double err = sys.metric_error;

    SeparatedResult res;
    for (std::size_t i = 0; i < sample.count; ++i) {
        bool separated = true;
        for (std::size_t w : res.witnesses) {
            int c = classify_pair(pm, orb, i, w, eps, err, BallKind::bowen());
            if (c == 0) refuse(eps, err);
            if (c < 0) { separated = false; break; }
        }
        if (separated) res.witnesses.push_back(i);
    }
    res.count = static_cast<long long>(res.witnesses.size());
    return res;
}

SeparatedResult greedy_separated(const FiniteSample& sample, const DynSystem& sys,
                                 int n, double eps, ExecPolicy policy) {
    if (policy == ExecPolicy::Serial) return greedy_separated_serial(sample, sys, n, eps);
    if (sample.count == 0) throw config_error("greedy_separated: empty sample");
    if (!(eps > 0.0)) throw config_error("greedy_separated: eps must be > 0");
    const PairMetric pm(sys);
    const OrbitTensor orb = precompute_orbits(sys, sample, n, ExecPolicy::Parallel);
    const double err = sys.metric_error;

    SeparatedResult res;
    std::atomic<bool> any_refused{false};
    for (std::size_t i = 0; i < sample.count; ++i) {
        const std::size_t m = res.witnesses.size();
        std::atomic<bool> rejected{false};
#pragma omp parallel for schedule(static)
        for (long long wi = 0; wi < static_cast<long long>(m); ++wi) {
            if (rejected.load(std::memory_order_relaxed) ||
                any_refused.load(std::memory_order_relaxed))
                continue;
            int c = classify_pair(pm, orb, i, res.witnesses[static_cast<std::size_t>(wi)],
                                  eps, err, BallKind::bowen());
            if (c == 0) any_refused.store(true, std::memory_order_relaxed);
            else if (c < 0) rejected.store(true, std::memory_order_relaxed);
        }
        if (any_refused.load()) refuse(eps, err);
        if (!rejected.load()) res.witnesses.push_back(i);
    }
    res.count = static_cast<long long>(res.witnesses.size());
    return res;
}

long long exact_max_separated(const FiniteSample& sample, const DynSystem& sys,
                              int n, double eps, std::size_t budget) {
    if (sample.count == 0) throw config_error("exact_max_separated: empty sample");
    if (sample.count > budget)
        throw budget_error("exact_max_separated: sample size " + std::to_string(sample.count) +
                           " exceeds budget " + std::to_string(budget));
    if (sample.count > 64)
        throw budget_error("exact_max_separated: supports at most 64 points");
    const PairMetric pm(sys);
    const OrbitTensor orb = precompute_orbits(sys, sample, n, ExecPolicy::Serial);
    const double err = sys.metric_error;
    const std::size_t m = sample.count;

    // Conflict graph: edge when the pair is NOT separated (d_n <= eps).
    std::vector<std::uint64_t> adj(m, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            int c = classify_pair(pm, orb, i, j, eps, err, BallKind::bowen());
            if (c == 0) refuse(eps, err);
            if (c < 0) {
                adj[i] |= std::uint64_t(1) << j;
                adj[j] |= std::uint64_t(1) << i;
            }
        }

    long long best = 0;
    // Max independent set, branch and bound.
    auto rec = [&](auto&& self, std::uint64_t cand, long long size) -> void {
        if (size + std::popcount(cand) <= best) return;
        if (cand == 0) { best = std::max(best, size); return; }
        int v = std::countr_zero(cand);
        std::uint64_t bit = std::uint64_t(1) << v;
        self(self, cand & ~(adj[static_cast<std::size_t>(v)] | bit), size + 1);
        self(self, cand & ~bit, size);
    };
    std::uint64_t all = m == 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << m) - 1;
    rec(rec, all, 0);
    return best;
}

// -- measure covers -------------------------------------------------------

namespace {

struct BitRows {
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;

    void init(std::size_t rows, std::size_t cols) {
        words = (cols + 63) / 64;
        bits.assign(rows * words, 0);
    }
    std::uint64_t* row(std::size_t i) { return bits.data() + i * words; }
    const std::uint64_t* row(std::size_t i) const { return bits.data() + i * words; }
    void set(std::size_t i, std::size_t j) { row(i)[j / 64] |= std::uint64_t(1) << (j % 64); }
};

// Sum of weights over (row & residual), accumulated in ascending atom order.
double masked_mass(const std::uint64_t* row, const std::uint64_t* residual,
                   std::size_t words, std::span<const double> weights) {
    double mass = 0.0;
    for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bitsw = row[w] & residual[w];
        while (bitsw) {
            int b = std::countr_zero(bitsw);
            mass += weights[w * 64 + static_cast<std::size_t>(b)];
            bitsw &= bitsw - 1;
        }
    }
    return mass;
}

BitRows membership_matrix(const FiniteMeasure& mu, const DynSystem& sys,
                          const PairMetric& pm, const OrbitTensor& orb, int /*n*/,
                          double eps, BallKind ball, ExecPolicy policy) {
    const std::size_t m = mu.size();
    const double err = sys.metric_error;
    BitRows cover;
    cover.init(m, m);
    std::atomic<bool> refused{false};
    const auto fill_row = [&](std::size_t i) {
        if (refused.load(std::memory_order_relaxed)) return;
        for (std::size_t j = 0; j < m; ++j) {
            int c = classify_pair(pm, orb, i, j, eps, err, ball);
            if (c == 0) { refused.store(true); return; }
            if (c < 0) cover.set(i, j);
        }
    };
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (long long i = 0; i < static_cast<long long>(m); ++i)
            fill_row(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < m; ++i) fill_row(i);
    }
    if (refused.load()) refuse(eps, err);
    return cover;
}

} // namespace

CoverResult greedy_measure_cover(const FiniteMeasure& mu, const DynSystem& sys,
                                 int n, double eps, double delta, BallKind ball,
                                 ExecPolicy policy, std::size_t mem_cap) {
    if (!(eps > 0.0)) throw config_error("greedy_measure_cover: eps must be > 0");
    if (!(delta > 0.0 && delta < 1.0))
        throw config_error("greedy_measure_cover: delta must be in (0,1)");
    const std::size_t m = mu.size();
    if (m == 0) throw config_error("greedy_measure_cover: empty measure");
    const PairMetric pm(sys);
    const OrbitTensor orb = precompute_orbits(sys, mu.support, n, policy);
    const double err = sys.metric_error;
    const double need = 1.0 - delta;

    const std::size_t matrix_bytes = ((m + 63) / 64) * 8 * m;
    const bool use_matrix = matrix_bytes <= mem_cap;
    BitRows cover;
    if (use_matrix) cover = membership_matrix(mu, sys, pm, orb, n, eps, ball, policy);

    const std::size_t words = (m + 63) / 64;
    std::vector<std::uint64_t> residual(words, 0);
    for (std::size_t j = 0; j < m; ++j) residual[j / 64] |= std::uint64_t(1) << (j % 64);

    std::vector<std::uint64_t> scratch_row(words);
    auto row_of = [&](std::size_t i) -> const std::uint64_t* {
        if (use_matrix) return cover.row(i);
        std::fill(scratch_row.begin(), scratch_row.end(), 0);
        for (std::size_t j = 0; j < m; ++j) {
            int c = classify_pair(pm, orb, i, j, eps, err, ball);
            if (c == 0) refuse(eps, err);
            if (c < 0) scratch_row[j / 64] |= std::uint64_t(1) << (j % 64);
        }
        return scratch_row.data();
    };

    CoverResult res;
    std::vector<double> gain(m);
    while (!(res.covered_mass > need)) {
        if (use_matrix && policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < static_cast<long long>(m); ++i)
                gain[static_cast<std::size_t>(i)] =
                    masked_mass(cover.row(static_cast<std::size_t>(i)), residual.data(),
                                words, mu.weights);
        } else {
            for (std::size_t i = 0; i < m; ++i)
                gain[i] = masked_mass(row_of(i), residual.data(), words, mu.weights);
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < m; ++i)
            if (gain[i] > gain[best]) best = i; // ties keep the lowest index
        if (!(gain[best] > 0.0))
            throw std::logic_error("greedy_measure_cover: no residual gain (unreachable)");
        res.centers.push_back(best);
        res.covered_mass += gain[best];
        const std::uint64_t* br = row_of(best);
        for (std::size_t w = 0; w < words; ++w) residual[w] &= ~br[w];
    }
    res.count = static_cast<long long>(res.centers.size());
    return res;
}

CoverResult greedy_measure_cover_serial(const FiniteMeasure& mu, const DynSystem& sys,
                                        int n, double eps, double delta, BallKind ball) {
    return greedy_measure_cover(mu, sys, n, eps, delta, ball, ExecPolicy::Serial);
}

long long exact_measure_cover(const FiniteMeasure& mu, const DynSystem& sys,
                              int n, double eps, double delta, BallKind ball,
                              std::size_t budget) {
    const std::size_t m = mu.size();
    if (m == 0) throw config_error("exact_measure_cover: empty measure");
    if (m > budget)
        throw budget_error("exact_measure_cover: atom count " + std::to_string(m) +
                           " exceeds budget " + std::to_string(budget));
    const PairMetric pm(sys);
    const OrbitTensor orb = precompute_orbits(sys, mu.support, n, ExecPolicy::Serial);
    BitRows cover = membership_matrix(mu, sys, pm, orb, n, eps, ball, ExecPolicy::Serial);
    const std::size_t words = cover.words;
    const double need = 1.0 - delta;

    // Candidate balls, identical coverage sets deduplicated.
    std::vector<std::size_t> cands;
    for (std::size_t i = 0; i < m; ++i) {
        bool dup = false;
        for (std::size_t c : cands)
            if (std::equal(cover.row(i), cover.row(i) + words, cover.row(c))) { dup = true; break; }
        if (!dup) cands.push_back(i);
    }

    long long best =
        greedy_measure_cover(mu, sys, n, eps, delta, ball, ExecPolicy::Serial).count;

    std::vector<std::uint64_t> residual(words);
    auto rec = [&](auto&& self, std::size_t idx, long long used, double covered,
                   std::vector<std::uint64_t>& resid) -> void {
        if (covered > need) { best = std::min(best, used); return; }
        if (used + 1 >= best) return;
        // Admissible bound: masses of the largest remaining residual balls.
        std::vector<double> gains;
        gains.reserve(cands.size() - idx);
        for (std::size_t t = idx; t < cands.size(); ++t) {
            double g = masked_mass(cover.row(cands[t]), resid.data(), words, mu.weights);
            if (g > 0.0) gains.push_back(g);
        }
        if (gains.empty()) return;
        std::sort(gains.begin(), gains.end(), std::greater<>());
        double acc = covered;
        long long extra = 0;
        for (double g : gains) {
            if (acc > need) break;
            acc += g;
            ++extra;
        }
        if (!(acc > need) || used + extra >= best) return;

        // Branch on the remaining candidate with maximal residual gain.
        std::size_t pick = idx;
        double pick_gain = -1.0;
        for (std::size_t t = idx; t < cands.size(); ++t) {
            double g = masked_mass(cover.row(cands[t]), resid.data(), words, mu.weights);
            if (g > pick_gain) { pick_gain = g; pick = t; }
        }
        std::swap(cands[idx], cands[pick]);
        // include
        std::vector<std::uint64_t> saved = resid;
        double g = masked_mass(cover.row(cands[idx]), resid.data(), words, mu.weights);
        for (std::size_t w = 0; w < words; ++w) resid[w] &= ~cover.row(cands[idx])[w];
        self(self, idx + 1, used + 1, covered + g, resid);
        resid = saved;
        // exclude
        self(self, idx + 1, used, covered, resid);
        std::swap(cands[idx], cands[pick]);
    };
    for (std::size_t j = 0; j < m; ++j) residual[j / 64] |= std::uint64_t(1) << (j % 64);
    rec(rec, 0, 0, 0.0, residual);
    return best;
}

// -- closed forms ----------------------------------------------------------

long long cylinder_cover_exact(int k, int n, double r, double delta) {
    if (k < 1 || n < 1) throw config_error("cylinder_cover_exact: k, n must be >= 1");
    if (!(delta > 0.0 && delta < 1.0))
        throw config_error("cylinder_cover_exact: delta must be in (0,1)");
    if (!(r < 1.0 / (2.0 * k)))
        throw config_error("cylinder_cover_exact: requires r < 1/(2k)");
    long double kn = 1.0L;
    for (int i = 0; i < n; ++i) {
        kn *= k;
        if (kn > 4.6e18L) throw budget_error("cylinder_cover_exact: k^n overflows");
    }
    long double v = (1.0L - static_cast<long double>(delta)) * kn;
    return static_cast<long long>(std::floor(v)) + 1;
}

bigint shift_cover_upper(long long base_cover, int n, int l) {
    if (base_cover < 1) throw config_error("shift_cover_upper: M must be >= 1");
    if (n < 0 || l < 0) throw config_error("shift_cover_upper: n, l must be >= 0");
    bigint M = base_cover;
    bigint out = 1;
    for (int i = 0; i < n + 2 * l + 1; ++i) out *= M;
    return out;
}

int shift_cover_radius(double eps, double diam) {
    if (!(eps > 0.0)) throw config_error("shift_cover_radius: eps must be > 0");
    if (diam <= 0.0) return 0;
    for (int l = 0; l < 1100; ++l) {
        double tail = l == 0 ? 3.0 : std::ldexp(1.0, 2 - l);
        if (tail < eps / (2.0 * diam)) return l;
    }
    throw config_error("shift_cover_radius: eps too small");
}

bool ball_contains(const FiniteMeasure& mu, const DynSystem& sys, int n, double eps,
                   BallKind ball, std::size_t center, std::size_t candidate) {
    const PairMetric pm(sys);
    const OrbitTensor orb = precompute_orbits(sys, mu.support, n, ExecPolicy::Serial);
    int c = classify_pair(pm, orb, center, candidate, eps, sys.metric_error, ball);
    if (c == 0) refuse(eps, sys.metric_error);
    return c < 0;
}

} // namespace mdim
