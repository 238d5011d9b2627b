#include "mdim/dynsys.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace mdim {

namespace {

double scalar_dist(BaseMetricKind kind, double a, double b) {
    switch (kind) {
        case BaseMetricKind::Abs:
            return std::fabs(a - b);
        case BaseMetricKind::Circle: {
            double d = std::fabs(a - b);
            return std::min(d, 1.0 - d);
        }
        case BaseMetricKind::Discrete:
            return std::fabs(a - b) > kPointTol ? 1.0 : 0.0;
    }
    return 0.0;
}

// Weight sum over the truncated index set; the shift diameter factor.
double weight_sum(Sidedness sided, int l) {
    if (sided == Sidedness::OneSided) return 2.0 - std::ldexp(1.0, -l);
    return l == 0 ? 1.0 : 3.0 - std::ldexp(1.0, 1 - l);
}

} // namespace

double DynSystem::metric(const Point& x, const Point& y) const {
    switch (kind) {
        case SpaceKind::Interval:
        case SpaceKind::Circle:
            return scalar_dist(scalar_metric, x[0], y[0]);
        case SpaceKind::Product: {
            double m = 0.0;
            for (int i = 0; i < dim; ++i)
                m = std::max(m, scalar_dist(scalar_metric, x[i], y[i]));
            return m;
        }
        case SpaceKind::Shift: {
            const int l = window_radius;
            double sum = 0.0;
            if (sided == Sidedness::OneSided) {
                for (int j = 0; j <= l; ++j)
                    sum += std::ldexp(1.0, -j) * scalar_dist(base.metric, x[j], y[j]);
            } else {
                for (int j = -l; j <= l; ++j)
                    sum += std::ldexp(1.0, -std::abs(j)) *
                           scalar_dist(base.metric, x[j + l], y[j + l]);
            }
            return sum;
        }
    }
    return 0.0;
}

bool DynSystem::same_point(const Point& x, const Point& y) const {
    for (int i = 0; i < dim; ++i)
        if (std::fabs(x[i] - y[i]) > kPointTol) return false;
    return true;
}

void FiniteMeasure::validate(const DynSystem& sys) const {
    if (weights.empty() || support.count != weights.size())
        throw config_error("measure: atoms and weights disagree");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || w > 1.0) throw config_error("measure: weight outside (0,1]");
        sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-12) throw config_error("measure: weights do not sum to 1");
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        auto pa = support.point(a), pb = support.point(b);
        return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (sys.same_point(support.point_copy(order[i - 1]), support.point_copy(order[i])))
            throw config_error("measure: atoms not pairwise distinct");
}

std::vector<Point> orbit(const DynSystem& sys, const Point& x, int n) {
    if (n < 1) throw config_error("orbit: n must be >= 1");
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(n));
    out.push_back(x);
    for (int k = 1; k < n; ++k) out.push_back(sys.map(out.back()));
    return out;
}

namespace {

double dynamic_distance(const DynSystem& sys, const Point& x, const Point& y, int n,
                        double budget, bool average) {
    if (n < 1) throw config_error("dynamic distance: n must be >= 1");
    if (sys.metric_error > budget)
        throw precision_error("shift truncation bound " + std::to_string(sys.metric_error) +
                              " exceeds precision budget " + std::to_string(budget));
    Point a = x, b = y;
    double acc = sys.metric(a, b);
    for (int k = 1; k < n; ++k) {
        a = sys.map(a);
        b = sys.map(b);
        double d = sys.metric(a, b);
        acc = average ? acc + d : std::max(acc, d);
    }
    return average ? acc / n : acc;
}

} // namespace

double bowen_distance(const DynSystem& sys, const Point& x, const Point& y, int n,
                      double precision_budget) {
    return dynamic_distance(sys, x, y, n, precision_budget, false);
}

double average_distance(const DynSystem& sys, const Point& x, const Point& y, int n,
                        double precision_budget) {
    return dynamic_distance(sys, x, y, n, precision_budget, true);
}

FiniteSample sample_space(const DynSystem& sys, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw config_error("sample_space: count must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    FiniteSample out;
    out.dim = static_cast<std::size_t>(sys.dim);

    switch (sys.kind) {
        case SpaceKind::Interval:
        case SpaceKind::Circle: {
            // Stratified: one point per subinterval of length 1/count.
            for (std::size_t i = 0; i < count; ++i) {
                double p = (static_cast<double>(i) + unit(rng)) / static_cast<double>(count);
                if (p >= 1.0) p = std::nextafter(1.0, 0.0);
                out.push(std::span<const double>(&p, 1));
            }
            return out;
        }
        case SpaceKind::Product: {
            std::vector<double> p(out.dim);
            for (std::size_t i = 0; i < count; ++i) {
                for (auto& c : p) c = unit(rng);
                out.push(p);
            }
            return out;
        }
        case SpaceKind::Shift: {
            const auto& grid = sys.base.sample_grid;
            if (grid.empty())
                throw config_error("sample_space: shift base has no sample grid");
            double cap = std::pow(static_cast<double>(grid.size()),
                                  static_cast<double>(out.dim));
            if (cap <= static_cast<double>(count) * 2 && cap < 1e18)
                throw budget_error("sample_space: base grid too small for distinct windows");
            std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
            std::set<std::vector<double>> seen;
            std::vector<double> w(out.dim);
            while (seen.size() < count) {
                for (auto& c : w) c = grid[pick(rng)];
                if (seen.insert(w).second) out.push(w);
            }
            return out;
        }
    }
    throw config_error("sample_space: unsupported space kind");
}

FiniteSample enumerate_windows(const DynSystem& sys, std::span<const double> values,
                               int n, std::size_t budget) {
    if (sys.kind != SpaceKind::Shift) throw config_error("enumerate_windows: shift systems only");
    if (values.empty() || n < 1) throw config_error("enumerate_windows: empty base or n < 1");
    if (n > sys.horizon) throw config_error("enumerate_windows: n exceeds system horizon");
    double total = std::pow(static_cast<double>(values.size()), static_cast<double>(n));
    if (total > static_cast<double>(budget))
        throw budget_error("enumerate_windows: " + std::to_string(total) +
                           " windows exceed budget " + std::to_string(budget));
    const std::size_t m = values.size();
    const std::size_t cnt = static_cast<std::size_t>(total + 0.5);
    const int offset = sys.sided == Sidedness::TwoSided ? sys.window_radius : 0;

    FiniteSample out;
    out.dim = static_cast<std::size_t>(sys.dim);
    out.data.reserve(cnt * out.dim);
    std::vector<double> w(out.dim, sys.fill);
    std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
    for (std::size_t idx = 0; idx < cnt; ++idx) {
        for (int j = 0; j < n; ++j) w[static_cast<std::size_t>(offset + j)] = values[digit[j]];
        out.push(w);
        for (int j = n - 1; j >= 0; --j) { // coordinate 0 most significant
            if (++digit[j] < m) break;
            digit[j] = 0;
        }
    }
    return out;
}

DynSystem make_shift_system(const BaseSpace& base, int window_radius, int horizon,
                            Sidedness sided, TailMode tail, double fill) {
    if (window_radius < 0 || horizon < 1)
        throw config_error("make_shift_system: need l >= 0 and horizon >= 1");
    if (!std::isfinite(base.diameter) || base.diameter < 0.0)
        throw config_error("make_shift_system: base space has unknown diameter");

    DynSystem sys;
    sys.kind = SpaceKind::Shift;
    sys.sided = sided;
    sys.window_radius = window_radius;
    sys.horizon = horizon;
    sys.base = base;
    sys.dim = sided == Sidedness::TwoSided ? horizon + 2 * window_radius + 1
                                           : horizon + window_radius + 1;
    sys.fill = std::isnan(fill) ? (base.sample_grid.empty() ? 0.0 : base.sample_grid.front())
                                : fill;
    sys.diameter = base.diameter * weight_sum(sided, window_radius);
    if (tail == TailMode::FillExact) {
        sys.metric_error = 0.0;
    } else {
        sys.metric_error = sided == Sidedness::TwoSided
                               ? base.diameter * std::ldexp(1.0, 2 - window_radius)
                               : base.diameter * std::ldexp(1.0, 1 - window_radius);
    }
    sys.name = (sided == Sidedness::TwoSided ? "shift2[" : "shift1[") + base.name + "]";
    // Left shift on windows: drop the leftmost stored coordinate, append the
    // fill value on the right.
    double f = sys.fill;
    sys.map = [f](const Point& x) {
        Point y(x.size());
        std::copy(x.begin() + 1, x.end(), y.begin());
        y.back() = f;
        return y;
    };
    return sys;
}

namespace {

FiniteMeasure enumerate_measure(const DynSystem& sys,
                                std::span<const std::pair<double, double>> base_atoms,
                                int coords, int offset, std::size_t budget,
                                const char* who) {
    if (base_atoms.empty()) throw config_error(std::string(who) + ": no base atoms");
    double wsum = 0.0;
    for (auto& [v, w] : base_atoms) {
        (void)v;
        if (!(w > 0.0)) throw config_error(std::string(who) + ": nonpositive base weight");
        wsum += w;
    }
    if (std::fabs(wsum - 1.0) > 1e-12)
        throw config_error(std::string(who) + ": base weights do not sum to 1");

    double total = std::pow(static_cast<double>(base_atoms.size()),
                            static_cast<double>(coords));
    if (total > static_cast<double>(budget))
        throw budget_error(std::string(who) + ": window enumeration exceeds budget");

    const std::size_t cnt = static_cast<std::size_t>(total + 0.5);
    FiniteMeasure mu;
    mu.support.dim = static_cast<std::size_t>(sys.dim);
    mu.support.data.reserve(cnt * mu.support.dim);
    mu.weights.reserve(cnt);
    std::vector<double> w(static_cast<std::size_t>(sys.dim), sys.fill);
    std::vector<std::size_t> digit(static_cast<std::size_t>(coords), 0);
    for (std::size_t idx = 0; idx < cnt; ++idx) {
        double mass = 1.0;
        for (int j = 0; j < coords; ++j) {
            w[static_cast<std::size_t>(offset + j)] = base_atoms[digit[j]].first;
            mass *= base_atoms[digit[j]].second;
        }
        mu.support.push(w);
        mu.weights.push_back(mass);
        for (int j = coords - 1; j >= 0; --j) {
            if (++digit[j] < base_atoms.size()) break;
            digit[j] = 0;
        }
    }
    return mu;
}

} // namespace

FiniteMeasure make_product_measure(const DynSystem& shift_sys,
                                   std::span<const std::pair<double, double>> base_atoms,
                                   std::size_t budget) {
    if (shift_sys.kind != SpaceKind::Shift)
        throw config_error("make_product_measure: shift systems only");
    return enumerate_measure(shift_sys, base_atoms, shift_sys.dim, 0, budget,
                             "make_product_measure");
}

FiniteMeasure make_cylinder_measure(const DynSystem& shift_sys,
                                    std::span<const std::pair<double, double>> base_atoms,
                                    int n, std::size_t budget) {
    if (shift_sys.kind != SpaceKind::Shift)
        throw config_error("make_cylinder_measure: shift systems only");
    if (n < 1 || n > shift_sys.horizon)
        throw config_error("make_cylinder_measure: n outside [1, horizon]");
    const int offset = shift_sys.sided == Sidedness::TwoSided ? shift_sys.window_radius : 0;
    return enumerate_measure(shift_sys, base_atoms, n, offset, budget,
                             "make_cylinder_measure");
}

// -- base spaces ---------------------------------------------------------

BaseSpace base_interval_grid(int cells) {
    if (cells < 1) throw config_error("base_interval_grid: cells >= 1");
    BaseSpace b;
    b.name = "grid:" + std::to_string(cells);
    b.diameter = 1.0;
    b.metric = BaseMetricKind::Abs;
    b.sample_grid.resize(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i)
        b.sample_grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / cells;
    return b;
}

BaseSpace base_binary() {
    BaseSpace b;
    b.name = "binary";
    b.diameter = 1.0;
    b.metric = BaseMetricKind::Discrete;
    b.sample_grid = {0.0, 1.0};
    return b;
}

BaseSpace base_cantor(int depth) {
    if (depth < 1 || depth > 24) throw config_error("base_cantor: depth in [1,24]");
    BaseSpace b;
    b.name = "cantor:" + std::to_string(depth);
    b.diameter = 1.0;
    b.metric = BaseMetricKind::Abs;
    std::vector<std::pair<double, double>> intervals = {{0.0, 1.0}};
    for (int d = 0; d < depth; ++d) {
        std::vector<std::pair<double, double>> next;
        next.reserve(intervals.size() * 2);
        for (auto [lo, hi] : intervals) {
            double w = (hi - lo) / 3.0;
            next.emplace_back(lo, lo + w);
            next.emplace_back(hi - w, hi);
        }
        intervals = std::move(next);
    }
    b.sample_grid.reserve(intervals.size());
    for (auto [lo, hi] : intervals) b.sample_grid.push_back(0.5 * (lo + hi));
    return b;
}

BaseSpace base_points(std::vector<double> pts) {
    if (pts.empty()) throw config_error("base_points: empty set");
    BaseSpace b;
    b.name = "points:" + std::to_string(pts.size());
    b.metric = BaseMetricKind::Abs;
    std::sort(pts.begin(), pts.end());
    b.diameter = pts.back() - pts.front();
    b.sample_grid = std::move(pts);
    return b;
}

BaseSpace base_single_point() {
    BaseSpace b;
    b.name = "single";
    b.diameter = 0.0;
    b.metric = BaseMetricKind::Abs;
    b.sample_grid = {0.0};
    return b;
}

// -- built-in systems ----------------------------------------------------

DynSystem make_circle_doubling() {
    DynSystem sys;
    sys.name = "circle-doubling";
    sys.kind = SpaceKind::Circle;
    sys.scalar_metric = BaseMetricKind::Circle;
    sys.dim = 1;
    sys.diameter = 0.5;
    sys.map = [](const Point& x) {
        double v = 2.0 * x[0];
        if (v >= 1.0) v -= 1.0;
        return Point{v};
    };
    return sys;
}

DynSystem make_interval_tent() {
    return make_interval_system("interval-tent", [](double x) {
        return x <= 0.5 ? 2.0 * x : 2.0 - 2.0 * x;
    });
}

DynSystem make_one_point_system() {
    DynSystem sys;
    sys.name = "one-point";
    sys.kind = SpaceKind::Interval;
    sys.dim = 1;
    sys.diameter = 0.0;
    sys.map = [](const Point&) { return Point{0.0}; };
    return sys;
}

DynSystem make_torus_doubling(int factors) {
    if (factors < 1) throw config_error("make_torus_doubling: factors >= 1");
    DynSystem sys;
    sys.name = "torus-doubling:" + std::to_string(factors);
    sys.kind = SpaceKind::Product;
    sys.scalar_metric = BaseMetricKind::Circle;
    sys.dim = factors;
    sys.diameter = 0.5;
    sys.map = [](const Point& x) {
        Point y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            double v = 2.0 * x[i];
            y[i] = v >= 1.0 ? v - 1.0 : v;
        }
        return y;
    };
    return sys;
}

DynSystem make_interval_system(std::string name, std::function<double(double)> f) {
    DynSystem sys;
    sys.name = std::move(name);
    sys.kind = SpaceKind::Interval;
    sys.dim = 1;
    sys.diameter = 1.0;
    sys.map = [fn = std::move(f)](const Point& x) { return Point{fn(x[0])}; };
    return sys;
}

// -- spec parsing ---------------------------------------------------------

namespace {

BaseSpace parse_base(const std::string& v) {
    if (v == "binary") return base_binary();
    if (v == "single") return base_single_point();
    if (v.rfind("grid:", 0) == 0) return base_interval_grid(std::stoi(v.substr(5)));
    if (v.rfind("cantor:", 0) == 0) return base_cantor(std::stoi(v.substr(7)));
    if (v.rfind("points:", 0) == 0) {
        std::vector<double> pts;
        std::stringstream ss(v.substr(7));
        std::string tok;
        while (std::getline(ss, tok, ';'))
            if (!tok.empty()) pts.push_back(std::stod(tok));
        return base_points(std::move(pts));
    }
    throw config_error("unknown base space: " + v);
}

} // namespace

DynSystem parse_system_spec(const std::string& spec) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(spec);
    std::string tok;
    while (ss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw config_error("system spec: expected key=value, got " + tok);
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto kind = kv.find("kind");
    if (kind == kv.end()) throw config_error("system spec: missing kind");
    if (kind->second == "circle-doubling") return make_circle_doubling();
    if (kind->second == "interval-tent") return make_interval_tent();
    if (kind->second == "one-point") return make_one_point_system();
    if (kind->second == "shift") {
        auto need = [&](const char* k) {
            auto it = kv.find(k);
            if (it == kv.end()) throw config_error(std::string("system spec: missing ") + k);
            return it->second;
        };
        BaseSpace base = parse_base(need("base"));
        int l = std::stoi(need("l"));
        int n = std::stoi(need("n"));
        Sidedness sided = Sidedness::TwoSided;
        if (auto it = kv.find("sided"); it != kv.end())
            sided = it->second == "one" ? Sidedness::OneSided : Sidedness::TwoSided;
        TailMode tail = TailMode::Truncated;
        if (auto it = kv.find("tail"); it != kv.end())
            tail = it->second == "exact" ? TailMode::FillExact : TailMode::Truncated;
        return make_shift_system(base, l, n, sided, tail);
    }
    throw config_error("unknown system kind: " + kind->second);
}

} // namespace mdim
