#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mdim/dynsys.hpp"

namespace mdim {

using bigint = boost::multiprecision::cpp_int;

enum class ExecPolicy { Serial, Parallel };

/// Dynamical ball family. Separated sets use strict > eps, covers use closed
/// balls (<= eps). Prime balls B'_n(x, eps, r) contain the points whose orbit
/// is eps-close to the orbit of x at a (1 - r)-fraction of times.
struct BallKind {
    enum class Kind { Bowen, Average, Prime };
    Kind kind = Kind::Bowen;
    double prime_fraction = 0.0; // r, prime balls only

    static BallKind bowen() { return {Kind::Bowen, 0.0}; }
    static BallKind average() { return {Kind::Average, 0.0}; }
    static BallKind prime(double r) { return {Kind::Prime, r}; }
    std::string label() const;
};

struct CountEntry {
    int n = 0;
    double eps = 0.0;
    long long count = 0;
    std::string method; // "greedy" or "exact"
    BallKind ball;
    std::optional<double> delta;
    double covered_mass = 0.0; // 0 when not a measure cover
};

/// Counts indexed by (n, eps); entries unique per (n, eps, ball, delta).
struct CountCurve {
    std::vector<CountEntry> entries;
    void add(CountEntry e);
};

struct SeparatedResult {
    long long count = 0;
    std::vector<std::size_t> witnesses; // indices into the sample
};

struct CoverResult {
    long long count = 0;
    std::vector<std::size_t> centers; // atom indices in pick order
    double covered_mass = 0.0;
};

/// Greedy maximal (n,eps)-separated subset: witnesses pairwise > eps in d_n,
/// every sample point within <= eps of some witness. Deterministic in sample
/// order. Lower bound for N_d(n, eps).
SeparatedResult greedy_separated(const FiniteSample& sample, const DynSystem& sys,
                                 int n, double eps,
                                 ExecPolicy policy = ExecPolicy::Parallel);

/// Exact maximum (n,eps)-separated cardinality (maximum independent set in
/// the eps-closeness graph). Rejects samples above `budget`.
long long exact_max_separated(const FiniteSample& sample, const DynSystem& sys,
                              int n, double eps, std::size_t budget = 24);

/// Greedy cover of mass > 1 - delta by dynamical balls centered at atoms:
/// each step picks the atom covering maximal residual mass, ties broken by
/// atom index. Upper bound for the true minimum. The pairwise membership
/// matrix is materialized blockwise when it fits `mem_cap` bytes, otherwise
/// memberships are recomputed on the fly.
CoverResult greedy_measure_cover(const FiniteMeasure& mu, const DynSystem& sys,
                                 int n, double eps, double delta, BallKind ball,
                                 ExecPolicy policy = ExecPolicy::Parallel,
                                 std::size_t mem_cap = std::size_t(2) << 30);

/// True minimum cover count by branch-and-bound over center subsets.
/// Rejects measures above `budget` atoms.
long long exact_measure_cover(const FiniteMeasure& mu, const DynSystem& sys,
                              int n, double eps, double delta, BallKind ball,
                              std::size_t budget = 20);

/// Exact N_{mu_k}(n, r, delta) for the product measure mu_k on the unit
/// interval shift, valid for r < 1/(2k): floor((1-delta) k^n) + 1.
long long cylinder_cover_exact(int k, int n, double r, double delta);

/// Covering bound for the shift over a base space covered by M balls:
/// M^(n + 2l + 1), exact.
bigint shift_cover_upper(long long base_cover, int n, int l);

/// Smallest l with sum_{|j| >= l} 2^-|j| < eps / (2 diam), the window radius
/// the covering bound argument needs.
int shift_cover_radius(double eps, double diam);

/// Ball membership predicate (closed): is y in the (n,eps[,r]) ball at x.
bool ball_contains(const FiniteMeasure& mu, const DynSystem& sys, int n, double eps,
                   BallKind ball, std::size_t center, std::size_t candidate);

// Serial reference implementations, kept for tests and benchmarks.
SeparatedResult greedy_separated_serial(const FiniteSample& sample, const DynSystem& sys,
                                        int n, double eps);
CoverResult greedy_measure_cover_serial(const FiniteMeasure& mu, const DynSystem& sys,
                                        int n, double eps, double delta, BallKind ball);

} // namespace mdim
