#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdim/errors.hpp"

namespace mdim {

/// A point is a fixed-size block of doubles. Scalar spaces use size 1,
/// shift spaces use a window of n + 2l + 1 (or n + l + 1) coordinates,
/// product spaces use one double per factor.
using Point = std::vector<double>;

enum class SpaceKind { Interval, Circle, Product, Shift };
enum class Sidedness { TwoSided, OneSided };
enum class BaseMetricKind { Abs, Circle, Discrete };

/// Whether shift windows stand for truncations of unknown sequences
/// (Truncated: every metric evaluation carries the certified error bound
/// diameter * 2^(2-l)) or are themselves the points, constant equal to
/// `fill` outside the stored window (FillExact: the truncated metric is
/// the metric of the system and the bound is zero).
enum class TailMode { Truncated, FillExact };

/// Absolute tolerance for point equality.
inline constexpr double kPointTol = 1e-12;

/// Base space of a shift system: a finite diameter scalar space with a
/// sampling grid. `diameter` must be known (finite); use quiet NaN to mark
/// it unknown, which make_shift_system rejects.
struct BaseSpace {
    std::string name;
    double diameter = std::numeric_limits<double>::quiet_NaN();
    BaseMetricKind metric = BaseMetricKind::Abs;
    std::vector<double> sample_grid; // support used for window sampling
};

BaseSpace base_interval_grid(int cells);         // equispaced grid on [0,1]
BaseSpace base_binary();                         // {0,1}, discrete metric
BaseSpace base_cantor(int depth);                // middle-thirds midpoints
BaseSpace base_points(std::vector<double> pts);  // finite subset of [0,1]
BaseSpace base_single_point();                   // one-point space

struct DynSystem {
    std::string name;
    SpaceKind kind = SpaceKind::Interval;
    int dim = 1;              // stored doubles per point
    double diameter = 1.0;    // upper bound for all metric values (D)
    double metric_error = 0.0; // certified truncation bound; 0 means exact

    // Shift systems only.
    int window_radius = 0;    // l: metric sums weights over |k| <= l
    int horizon = 0;          // n the window was sized for
    Sidedness sided = Sidedness::TwoSided;
    BaseSpace base;
    double fill = 0.0;

    BaseMetricKind scalar_metric = BaseMetricKind::Abs; // coordinate metric

    std::function<Point(const Point&)> map;

    double metric(const Point& x, const Point& y) const;
    bool same_point(const Point& x, const Point& y) const;
};

/// Deterministic finite point set, stored flat (count x dim).
struct FiniteSample {
    std::size_t count = 0;
    std::size_t dim = 1;
    std::vector<double> data;

    std::span<const double> point(std::size_t i) const {
        return {data.data() + i * dim, dim};
    }
    Point point_copy(std::size_t i) const {
        auto p = point(i);
        return Point(p.begin(), p.end());
    }
    void push(std::span<const double> p) {
        data.insert(data.end(), p.begin(), p.end());
        ++count;
    }
};

/// A finite weighted point set; weights sum to 1 within 1e-12 and atoms are
/// pairwise distinct points.
struct FiniteMeasure {
    FiniteSample support;
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
    void validate(const DynSystem& sys) const;
};

// -- operations --------------------------------------------------------

/// Forward orbit (x, Tx, ..., T^{n-1}x).
std::vector<Point> orbit(const DynSystem& sys, const Point& x, int n);

/// Bowen metric d_n = max of base distances along the first n iterates.
/// For shift systems, throws precision_error if the truncation bound
/// exceeds `precision_budget`.
double bowen_distance(const DynSystem& sys, const Point& x, const Point& y, int n,
                      double precision_budget = std::numeric_limits<double>::infinity());

/// Average dynamical metric: mean in place of max.
double average_distance(const DynSystem& sys, const Point& x, const Point& y, int n,
                        double precision_budget = std::numeric_limits<double>::infinity());

/// Deterministic sample of the space. Interval/circle/product systems use a
/// stratified jittered grid; shift systems draw window coordinates from the
/// base sample grid (distinct windows). Rejects count = 0.
FiniteSample sample_space(const DynSystem& sys, std::size_t count, std::uint64_t seed);

/// Enumerate every window whose first n coordinates run over `values`,
/// remaining coordinates at fill. Used by the shift experiments; guarded by
/// `budget` on the window count.
FiniteSample enumerate_windows(const DynSystem& sys, std::span<const double> values,
                               int n, std::size_t budget = 200000);

/// Two-sided (or one-sided) shift over `base` with the weighted product
/// metric truncated to |k| <= l, on windows sized for `horizon` iterates.
DynSystem make_shift_system(const BaseSpace& base, int window_radius, int horizon,
                            Sidedness sided = Sidedness::TwoSided,
                            TailMode tail = TailMode::Truncated,
                            double fill = std::numeric_limits<double>::quiet_NaN());

/// Product measure over all window coordinates: one atom per coordinate
/// assignment from `base_atoms`, weight = product of coordinate weights.
FiniteMeasure make_product_measure(const DynSystem& shift_sys,
                                   std::span<const std::pair<double, double>> base_atoms,
                                   std::size_t budget = 200000);

/// Cylinder measure: atoms enumerate symbols on coordinates [0, n) only,
/// fill elsewhere; weight = product over the n cylinder coordinates.
FiniteMeasure make_cylinder_measure(const DynSystem& shift_sys,
                                    std::span<const std::pair<double, double>> base_atoms,
                                    int n, std::size_t budget = 200000);

// -- built-in systems ---------------------------------------------------

DynSystem make_circle_doubling();                    // T(x) = 2x mod 1
DynSystem make_interval_tent();                      // full tent map
DynSystem make_one_point_system();
DynSystem make_torus_doubling(int factors);          // product of doubling circles
DynSystem make_interval_system(std::string name, std::function<double(double)> f);

/// Parse a plain-text system spec (grammar documented in the README):
///   kind=circle-doubling | interval-tent | one-point | shift
///   base=binary | grid:<cells> | cantor:<depth> | points:<v;v;...> | single
///   l=<int> n=<int> sided=two|one tail=exact|truncated
DynSystem parse_system_spec(const std::string& spec);

} // namespace mdim
