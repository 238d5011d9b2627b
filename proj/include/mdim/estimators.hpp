#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mdim/covercount.hpp"
#include "mdim/dynsys.hpp"

namespace mdim {

/// Finite surrogate for a limsup/liminf: Ols fits the whole series, Upper
/// takes the maximum slope over trailing windows of length >= 3, Lower the
/// minimum.
enum class FitMode { Ols, Upper, Lower };

struct EstimateReport {
    std::string quantity;
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
    double window_lo = 0.0; // regression abscissa range actually used
    double window_hi = 0.0;
    FitMode mode = FitMode::Ols;
    std::uint64_t inputs_digest = 0;
};

/// Strictly decreasing radii eps_0 * theta^i, i = 0..steps-1.
struct EpsLadder {
    double eps0 = 0.0;
    double theta = 0.5;
    int steps = 0;

    std::vector<double> radii() const;
    void validate() const; // throws config_error
};

/// Least-squares slope of log count vs n for a curve restricted to one eps.
/// Requires >= 3 distinct n values; duplicate rows with equal counts are
/// collapsed, conflicting duplicates rejected.
EstimateReport growth_rate(const CountCurve& curve, FitMode mode = FitMode::Ols);

/// Plain series fit used by the estimators; ys against xs.
EstimateReport fit_series(std::span<const double> xs, std::span<const double> ys,
                          FitMode mode, const std::string& quantity);

struct EntropyCurvePoint {
    double eps = 0.0;
    CountCurve counts;
    EstimateReport growth;
};

/// One growth report per ladder radius. Counts separated sets of `sample`
/// when `mu` is null, measure covers of `mu` (with `delta`) otherwise. For
/// shift systems the ladder radii must exceed the metric truncation bound.
std::vector<EntropyCurvePoint> entropy_curve(const DynSystem& sys,
                                             const FiniteSample* sample,
                                             const FiniteMeasure* mu,
                                             const EpsLadder& ladder,
                                             int n_lo, int n_hi,
                                             BallKind ball,
                                             std::optional<double> delta,
                                             FitMode mode = FitMode::Ols);

/// Slope of S(eps) against |log eps| over an entropy-curve table.
EstimateReport mdim_estimate(const std::vector<EntropyCurvePoint>& table,
                             FitMode mode = FitMode::Ols);
EstimateReport mdim_estimate_xy(std::span<const double> abs_log_eps,
                                std::span<const double> rates, FitMode mode);

/// Growth rate of measure-cover counts at fixed (eps, delta): the eps-fixed
/// approximant of the entropy of mu.
EstimateReport katok_entropy(const DynSystem& sys, const FiniteMeasure& mu,
                             double eps, double delta, int n_lo, int n_hi,
                             BallKind ball = BallKind::bowen(),
                             FitMode mode = FitMode::Ols);

/// Box dimension: slope of log N(eps) vs |log eps| where N(eps) is the
/// greedy maximal eps-separated cardinality of the sample.
EstimateReport box_dimension(const FiniteSample& sample, const DynSystem& sys,
                             const EpsLadder& ladder, FitMode mode = FitMode::Ols);

struct MeasureMdimReport {
    // One row per delta: the per-delta mdim estimate over the eps ladder.
    std::vector<std::pair<double, EstimateReport>> per_delta;
    // Outer ordering: estimate at the smallest delta (no limit claim).
    EstimateReport smallest_delta;
    // Alternative ordering with sup over delta inside the eps slope.
    EstimateReport sup_delta_inside;
};

/// Upper metric mean dimension of a measure at desk scale: per-delta
/// mdim_estimate over the eps ladder, plus both orderings of the delta/eps
/// passes. Raw per-delta values are always part of the report.
MeasureMdimReport measure_mdim(const DynSystem& sys, const FiniteMeasure& mu,
                               const EpsLadder& eps_ladder,
                               std::span<const double> deltas,
                               int n_lo, int n_hi,
                               BallKind ball = BallKind::bowen());

std::uint64_t fnv1a(const std::string& s);
const char* fit_mode_name(FitMode m);

} // namespace mdim
