#include "mdim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace mdim {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

const char* fit_mode_name(FitMode m) {
    switch (m) {
        case FitMode::Ols: return "ols";
        case FitMode::Upper: return "upper";
        case FitMode::Lower: return "lower";
    }
    return "?";
}

std::vector<double> EpsLadder::radii() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(steps));
    double e = eps0;
    for (int i = 0; i < steps; ++i) {
        out[static_cast<std::size_t>(i)] = e;
        e *= theta;
    }
    return out;
}

void EpsLadder::validate() const {
    if (!(eps0 > 0.0)) throw config_error("eps ladder: eps0 must be > 0");
    if (!(theta > 0.0 && theta < 1.0)) throw config_error("eps ladder: theta must be in (0,1)");
    if (steps < 1) throw config_error("eps ladder: steps must be >= 1");
}

namespace {

struct Fit {
    double slope, intercept, rms;
};

Fit ols(std::span<const double> xs, std::span<const double> ys, std::size_t lo, std::size_t hi) {
    const std::size_t m = hi - lo;
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= static_cast<double>(m);
    ybar /= static_cast<double>(m);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
    }
    if (sxx == 0.0) throw config_error("fit: degenerate abscissa");
    Fit f;
    f.slope = sxy / sxx;
    f.intercept = ybar - f.slope * xbar;
    double ss = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        double r = ys[i] - (f.intercept + f.slope * xs[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / static_cast<double>(m));
    return f;
}

} // namespace

EstimateReport fit_series(std::span<const double> xs, std::span<const double> ys,
                          FitMode mode, const std::string& quantity) {
    if (xs.size() != ys.size() || xs.size() < 3)
        throw config_error("fit_series: need >= 3 points");
    // Sort by abscissa so trailing windows are the largest-x suffixes.
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> x(xs.size()), y(ys.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        x[i] = xs[order[i]];
        y[i] = ys[order[i]];
    }

    std::size_t lo = 0;
    Fit best = ols(x, y, 0, x.size());
    if (mode != FitMode::Ols) {
        for (std::size_t start = 1; start + 3 <= x.size(); ++start) {
            Fit f = ols(x, y, start, x.size());
            bool better = mode == FitMode::Upper ? f.slope > best.slope : f.slope < best.slope;
            if (better) {
                best = f;
                lo = start;
            }
        }
    }

    EstimateReport r;
    r.quantity = quantity;
    r.slope = best.slope;
    r.intercept = best.intercept;
    r.rms_residual = best.rms;
    r.window_lo = x[lo];
    r.window_hi = x.back();
    r.mode = mode;
    std::ostringstream digest;
    digest << quantity << '|' << fit_mode_name(mode);
    for (std::size_t i = 0; i < x.size(); ++i) digest << '|' << x[i] << ',' << y[i];
    r.inputs_digest = fnv1a(digest.str());
    return r;
}

EstimateReport growth_rate(const CountCurve& curve, FitMode mode) {
    if (curve.entries.empty()) throw config_error("growth_rate: empty curve");
    const auto& first = curve.entries.front();
    std::map<int, long long> by_n;
    for (const auto& e : curve.entries) {
        if (e.eps != first.eps)
            throw config_error("growth_rate: curve must be restricted to one eps");
        auto [it, inserted] = by_n.emplace(e.n, e.count);
        if (!inserted && it->second != e.count)
            throw config_error("growth_rate: conflicting counts for one n");
    }
    if (by_n.size() < 3) throw config_error("growth_rate: need >= 3 distinct n values");
    std::vector<double> xs, ys;
    xs.reserve(by_n.size());
    ys.reserve(by_n.size());
    for (auto [n, count] : by_n) {
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(static_cast<double>(count)));
    }
    return fit_series(xs, ys, mode, "growth_rate[eps=" + std::to_string(first.eps) + "]");
}

std::vector<EntropyCurvePoint> entropy_curve(const DynSystem& sys,
                                             const FiniteSample* sample,
                                             const FiniteMeasure* mu,
                                             const EpsLadder& ladder,
                                             int n_lo, int n_hi,
                                             BallKind ball,
                                             std::optional<double> delta,
                                             FitMode mode) {
    if ((sample == nullptr) == (mu == nullptr))
        throw config_error("entropy_curve: pass exactly one of sample, measure");
    if (mu != nullptr && !delta)
        throw config_error("entropy_curve: measure covers need delta");
    if (n_hi - n_lo + 1 < 3) throw config_error("entropy_curve: need >= 3 n values");
    std::vector<double> radii = ladder.radii();
    for (double e : radii)
        if (sys.metric_error > 0.0 && e <= sys.metric_error)
            throw precision_error("entropy_curve: ladder radius " + std::to_string(e) +
                                  " at or below truncation bound " +
                                  std::to_string(sys.metric_error));

    std::vector<EntropyCurvePoint> table;
    table.reserve(radii.size());
    for (double e : radii) {
        EntropyCurvePoint pt;
        pt.eps = e;
        for (int n = n_lo; n <= n_hi; ++n) {
            CountEntry entry;
            entry.n = n;
            entry.eps = e;
            entry.ball = ball;
            if (mu != nullptr) {
                auto cover = greedy_measure_cover(*mu, sys, n, e, *delta, ball);
                entry.count = cover.count;
                entry.covered_mass = cover.covered_mass;
                entry.delta = delta;
                entry.method = "greedy";
            } else {
                entry.count = greedy_separated(*sample, sys, n, e).count;
                entry.method = "greedy";
            }
            pt.counts.add(entry);
        }
        pt.growth = growth_rate(pt.counts, mode);
        table.push_back(std::move(pt));
    }
    return table;
}

EstimateReport mdim_estimate_xy(std::span<const double> abs_log_eps,
                                std::span<const double> rates, FitMode mode) {
    return fit_series(abs_log_eps, rates, mode, "mdim");
}

EstimateReport mdim_estimate(const std::vector<EntropyCurvePoint>& table, FitMode mode) {
    if (table.size() < 3) throw config_error("mdim_estimate: need >= 3 ladder radii");
    std::vector<double> xs, ys;
    xs.reserve(table.size());
    ys.reserve(table.size());
    for (const auto& pt : table) {
        xs.push_back(std::fabs(std::log(pt.eps)));
        ys.push_back(pt.growth.slope);
    }
    return mdim_estimate_xy(xs, ys, mode);
}

EstimateReport katok_entropy(const DynSystem& sys, const FiniteMeasure& mu,
                             double eps, double delta, int n_lo, int n_hi,
                             BallKind ball, FitMode mode) {
    if (n_hi - n_lo + 1 < 3) throw config_error("katok_entropy: need >= 3 n values");
    CountCurve curve;
    for (int n = n_lo; n <= n_hi; ++n) {
        auto cover = greedy_measure_cover(mu, sys, n, eps, delta, ball);
        CountEntry e;
        e.n = n;
        e.eps = eps;
        e.count = cover.count;
        e.covered_mass = cover.covered_mass;
        e.ball = ball;
        e.delta = delta;
        e.method = "greedy";
        curve.add(e);
    }
    EstimateReport r = growth_rate(curve, mode);
    r.quantity = "katok_entropy[eps=" + std::to_string(eps) +
                 ",delta=" + std::to_string(delta) + "]";
    return r;
}

EstimateReport box_dimension(const FiniteSample& sample, const DynSystem& sys,
                             const EpsLadder& ladder, FitMode mode) {
    std::vector<double> radii = ladder.radii();
    if (radii.size() < 3) throw config_error("box_dimension: need >= 3 ladder radii");
    std::vector<double> xs, ys;
    for (double e : radii) {
        long long cnt = greedy_separated(sample, sys, 1, e).count;
        xs.push_back(std::fabs(std::log(e)));
        ys.push_back(std::log(static_cast<double>(cnt)));
    }
    EstimateReport r = fit_series(xs, ys, mode, "box_dimension");
    return r;
}

MeasureMdimReport measure_mdim(const DynSystem& sys, const FiniteMeasure& mu,
                               const EpsLadder& eps_ladder,
                               std::span<const double> deltas,
                               int n_lo, int n_hi, BallKind ball) {
    if (deltas.empty()) throw config_error("measure_mdim: empty delta ladder");
    std::vector<double> radii = eps_ladder.radii();
    MeasureMdimReport report;
    // slopes[di][ei]
    std::vector<std::vector<double>> slopes(deltas.size(),
                                            std::vector<double>(radii.size()));
    std::vector<double> xs;
    for (double e : radii) xs.push_back(std::fabs(std::log(e)));

    for (std::size_t di = 0; di < deltas.size(); ++di) {
        for (std::size_t ei = 0; ei < radii.size(); ++ei) {
            EstimateReport g = katok_entropy(sys, mu, radii[ei], deltas[di], n_lo, n_hi, ball);
            slopes[di][ei] = g.slope;
        }
        EstimateReport est = mdim_estimate_xy(xs, slopes[di], FitMode::Ols);
        est.quantity = "measure_mdim[delta=" + std::to_string(deltas[di]) + "]";
        report.per_delta.emplace_back(deltas[di], est);
    }

    std::size_t smallest = 0;
    for (std::size_t di = 1; di < deltas.size(); ++di)
        if (deltas[di] < deltas[smallest]) smallest = di;
    report.smallest_delta = report.per_delta[smallest].second;

    std::vector<double> sup(radii.size());
    for (std::size_t ei = 0; ei < radii.size(); ++ei) {
        double s = slopes[0][ei];
        for (std::size_t di = 1; di < deltas.size(); ++di) s = std::max(s, slopes[di][ei]);
        sup[ei] = s;
    }
    report.sup_delta_inside = mdim_estimate_xy(xs, sup, FitMode::Ols);
    report.sup_delta_inside.quantity = "measure_mdim[sup-delta]";
    return report;
}

} // namespace mdim
