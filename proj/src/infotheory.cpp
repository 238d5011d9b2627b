#include "mdim/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace mdim {

void JointDistribution::validate() const {
    if (rows == 0 || cols == 0 || p.size() != rows * cols)
        throw config_error("joint distribution: bad shape");
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0) throw config_error("joint distribution: negative entry");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw config_error("joint distribution: entries do not sum to 1");
}

double shannon_entropy(std::span<const double> weights) {
    double sum = 0.0, h = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw config_error("shannon_entropy: negative weight");
        sum += w;
        if (w > 0.0) h -= w * std::log(w);
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw config_error("shannon_entropy: weights do not sum to 1");
    return h;
}

double mutual_information(const JointDistribution& joint) {
    joint.validate();
    std::vector<double> pa(joint.rows, 0.0), pb(joint.cols, 0.0);
    for (std::size_t i = 0; i < joint.rows; ++i)
        for (std::size_t j = 0; j < joint.cols; ++j) {
            pa[i] += joint.at(i, j);
            pb[j] += joint.at(i, j);
        }
    double h_joint = 0.0;
    for (double v : joint.p)
        if (v > 0.0) h_joint -= v * std::log(v);
    double mi = shannon_entropy(pa) + shannon_entropy(pb) - h_joint;
    return std::max(0.0, mi);
}

// -- Blahut-Arimoto ---------------------------------------------------------

namespace {

struct BAState {
    std::vector<double> q;      // output marginal
    std::vector<double> kernel; // W(j|i), row-major
    double rate = 0.0;
    double distortion = 0.0;
    int iterations = 0;
    bool converged = true;
};

// Alternating minimization at a fixed Lagrange slope s >= 0.
BAState ba_fixed_slope(std::span<const double> p, std::span<const double> d,
                       std::size_t S, std::size_t R, double s, double tol, int max_iter,
                       std::vector<double> q0) {
    BAState st;
    st.q = std::move(q0);
    st.kernel.assign(S * R, 0.0);
    std::vector<double> logq(R);
    std::vector<double> row_rate(S), row_dist(S);
    double prev_obj = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < max_iter; ++it) {
        for (std::size_t j = 0; j < R; ++j)
            logq[j] = st.q[j] > 0.0 ? std::log(st.q[j]) : -1e300;
        // Kernel update: W(j|i) proportional to q_j exp(-s d_ij).
#pragma omp parallel for schedule(static)
        for (long long ii = 0; ii < static_cast<long long>(S); ++ii) {
            const std::size_t i = static_cast<std::size_t>(ii);
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < R; ++j)
                best = std::max(best, logq[j] - s * d[i * R + j]);
            double z = 0.0;
            for (std::size_t j = 0; j < R; ++j) {
                double w = std::exp(logq[j] - s * d[i * R + j] - best);
                st.kernel[i * R + j] = w;
                z += w;
            }
            for (std::size_t j = 0; j < R; ++j) st.kernel[i * R + j] /= z;
        }
        // Marginal update; each column sums rows in a fixed order, so the
        // result does not depend on the thread count.
#pragma omp parallel for schedule(static)
        for (long long jj = 0; jj < static_cast<long long>(R); ++jj) {
            const std::size_t j = static_cast<std::size_t>(jj);
            double qj = 0.0;
            for (std::size_t i = 0; i < S; ++i) qj += p[i] * st.kernel[i * R + j];
            st.q[j] = qj;
        }
        // Objective: I + s E[d], monotone under the alternation.
#pragma omp parallel for schedule(static)
        for (long long ii = 0; ii < static_cast<long long>(S); ++ii) {
            const std::size_t i = static_cast<std::size_t>(ii);
            double rr = 0.0, dd = 0.0;
            for (std::size_t j = 0; j < R; ++j) {
                double w = st.kernel[i * R + j];
                if (w > 0.0 && st.q[j] > 0.0) rr += w * std::log(w / st.q[j]);
                dd += w * d[i * R + j];
            }
            row_rate[i] = p[i] * rr;
            row_dist[i] = p[i] * dd;
        }
        double rate = 0.0, dist = 0.0;
        for (std::size_t i = 0; i < S; ++i) {
            rate += row_rate[i];
            dist += row_dist[i];
        }
        st.rate = std::max(0.0, rate);
        st.distortion = dist;
        double obj = rate + s * dist;
        if (std::fabs(prev_obj - obj) <= tol * std::max(1.0, std::fabs(obj))) {
            ++it;
            break;
        }
        prev_obj = obj;
    }
    st.iterations = it;
    st.converged = it < max_iter;
    return st;
}

} // namespace

RDPoint blahut_arimoto(std::span<const double> source, std::span<const double> distortion,
                       std::size_t reproduction_size, double target_distortion,
                       double tol, int max_iter) {
    const std::size_t S = source.size();
    const std::size_t R = reproduction_size;
    if (S == 0 || R == 0 || distortion.size() != S * R)
        throw config_error("blahut_arimoto: bad shapes");
    double psum = 0.0;
    for (double v : source) {
        if (v < 0.0) throw config_error("blahut_arimoto: negative source mass");
        psum += v;
    }
    if (std::fabs(psum - 1.0) > 1e-9)
        throw config_error("blahut_arimoto: source is not a probability vector");
    for (double v : distortion)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw config_error("blahut_arimoto: distortion must be finite nonnegative");

    // Feasibility bounds.
    double d_min = 0.0; // best possible: every source letter to its cheapest letter
    for (std::size_t i = 0; i < S; ++i) {
        double m = distortion[i * R];
        for (std::size_t j = 1; j < R; ++j) m = std::min(m, distortion[i * R + j]);
        d_min += source[i] * m;
    }
    double d_zero_rate = std::numeric_limits<double>::infinity(); // best single letter
    std::size_t best_single = 0;
    for (std::size_t j = 0; j < R; ++j) {
        double e = 0.0;
        for (std::size_t i = 0; i < S; ++i) e += source[i] * distortion[i * R + j];
        if (e < d_zero_rate) {
            d_zero_rate = e;
            best_single = j;
        }
    }
    if (target_distortion < d_min - 1e-12)
        throw config_error("blahut_arimoto: target below the minimum achievable distortion");

    RDPoint out;
    out.method = "blahut-arimoto";
    out.block_length = 1;

    if (target_distortion >= d_zero_rate) {
        // Constant reproduction achieves the budget at rate zero.
        out.rate = 0.0;
        out.distortion = d_zero_rate;
        out.kernel.assign(S * R, 0.0);
        for (std::size_t i = 0; i < S; ++i) out.kernel[i * R + best_single] = 1.0;
        return out;
    }
    if (target_distortion <= d_min + 1e-12) {
        // Lossless limit: deterministic cheapest assignment.
        out.kernel.assign(S * R, 0.0);
        std::vector<double> group(R, 0.0);
        double dist = 0.0;
        for (std::size_t i = 0; i < S; ++i) {
            std::size_t arg = 0;
            for (std::size_t j = 1; j < R; ++j)
                if (distortion[i * R + j] < distortion[i * R + arg]) arg = j;
            out.kernel[i * R + arg] = 1.0;
            group[arg] += source[i];
            dist += source[i] * distortion[i * R + arg];
        }
        double h = 0.0;
        for (double g : group)
            if (g > 0.0) h -= g * std::log(g);
        out.rate = h;
        out.distortion = dist;
        return out;
    }

    // Bisection on the slope: distortion decreases as s grows.
    std::vector<double> q0(R, 1.0 / static_cast<double>(R));
    double s_lo = 0.0, s_hi = 1.0;
    BAState hi_state = ba_fixed_slope(source, distortion, S, R, s_hi, tol, max_iter, q0);
    int expand = 0;
    while (hi_state.distortion > target_distortion && expand < 60) {
        s_hi *= 2.0;
        hi_state = ba_fixed_slope(source, distortion, S, R, s_hi, tol, max_iter, q0);
        ++expand;
    }
    BAState chosen = hi_state;
    int total_iter = hi_state.iterations;
    for (int step = 0; step < 80; ++step) {
        if (s_hi - s_lo <= 1e-9 * (1.0 + s_hi)) break;
        double s = 0.5 * (s_lo + s_hi);
        BAState st = ba_fixed_slope(source, distortion, S, R, s, tol, max_iter, q0);
        total_iter += st.iterations;
        if (st.distortion <= target_distortion) {
            s_hi = s;
            chosen = st;
            if (target_distortion - st.distortion <= std::max(tol, 1e-12)) break;
        } else {
            s_lo = s;
        }
        q0 = st.q;
    }
    out.rate = chosen.rate;
    out.distortion = chosen.distortion;
    out.kernel = chosen.kernel;
    out.iterations = total_iter;
    out.converged = chosen.converged;
    return out;
}

// -- block rate distortion ---------------------------------------------------

namespace {

std::vector<std::vector<Point>> trajectories(const DynSystem& sys, const FiniteSample& pts,
                                             int n) {
    std::vector<std::vector<Point>> out;
    out.reserve(pts.count);
    for (std::size_t i = 0; i < pts.count; ++i)
        out.push_back(orbit(sys, pts.point_copy(i), n));
    return out;
}

double rho_n(const DynSystem& sys, const std::vector<Point>& a, const std::vector<Point>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += sys.metric(a[k], b[k]);
    return s / static_cast<double>(a.size());
}

} // namespace

RDCurve block_rate_distortion(const FiniteMeasure& process, const DynSystem& sys,
                              int n, std::span<const double> eps_list,
                              const FiniteSample* grid, double tol, int max_iter) {
    if (n < 1) throw config_error("block_rate_distortion: n must be >= 1");
    if (eps_list.empty()) throw config_error("block_rate_distortion: empty eps list");
    const FiniteSample& rep = grid != nullptr ? *grid : process.support;
    const std::size_t S = process.size();
    const std::size_t R = rep.count;

    auto src_traj = trajectories(sys, process.support, n);
    auto rep_traj = trajectories(sys, rep, n);

    std::vector<double> d(S * R);
    for (std::size_t i = 0; i < S; ++i)
        for (std::size_t j = 0; j < R; ++j)
            d[i * R + j] = rho_n(sys, src_traj[i], rep_traj[j]);

    double mesh = 0.0;
    for (std::size_t i = 0; i < S; ++i) {
        double m = d[i * R];
        for (std::size_t j = 1; j < R; ++j) m = std::min(m, d[i * R + j]);
        mesh = std::max(mesh, m);
    }

    RDCurve curve;
    for (double eps : eps_list) {
        RDPoint pt = blahut_arimoto(process.weights, d, R, eps, tol, max_iter);
        pt.rate /= n; // nats per symbol
        pt.block_length = n;
        pt.grid_mesh = mesh;
        curve.points.push_back(std::move(pt));
    }
    return curve;
}

// -- Lloyd codebooks ---------------------------------------------------------

RDPoint lloyd_codebook_size(const FiniteMeasure& blocks, const DynSystem& sys, int n,
                            std::size_t codebook_size, int restarts, std::uint64_t seed,
                            double tol, int max_iter) {
    const std::size_t S = blocks.size();
    if (S == 0) throw config_error("lloyd_codebook: empty measure");
    if (codebook_size < 1) throw config_error("lloyd_codebook: codebook size must be >= 1");
    codebook_size = std::min(codebook_size, S);
    auto traj = trajectories(sys, blocks.support, n);
    const std::size_t dim = blocks.support.dim;
    const std::size_t N = static_cast<std::size_t>(n);

    // Candidate codeword coordinates are the observed iterate points, so all
    // distances live in a precomputed n x S x S table.
    std::vector<double> cd(N * S * S);
    for (std::size_t k = 0; k < N; ++k)
        for (std::size_t i = 0; i < S; ++i)
            for (std::size_t j = 0; j < S; ++j)
                cd[(k * S + i) * S + j] = sys.metric(traj[i][k], traj[j][k]);

    // A codeword is one candidate index per coordinate.
    using Codeword = std::vector<std::size_t>;
    auto dist_to = [&](std::size_t i, const Codeword& code) {
        double s = 0.0;
        for (std::size_t k = 0; k < N; ++k) s += cd[(k * S + i) * S + code[k]];
        return s / static_cast<double>(n);
    };

    double best_dist = std::numeric_limits<double>::infinity();
    std::vector<Codeword> best_code;
    int best_iters = 0;

    for (int r = 0; r < std::max(1, restarts); ++r) {
        std::mt19937_64 rng(seed * 1000003ull + static_cast<std::uint64_t>(r));
        std::vector<std::size_t> idx(S);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<Codeword> code(codebook_size, Codeword(N, 0));
        for (std::size_t c = 0; c < codebook_size; ++c)
            std::fill(code[c].begin(), code[c].end(), idx[c]);

        std::vector<std::size_t> assign(S, 0);
        double prev = std::numeric_limits<double>::infinity();
        int it = 0;
        for (; it < max_iter; ++it) {
            // Assignment step.
            double dist = 0.0;
            for (std::size_t i = 0; i < S; ++i) {
                std::size_t arg = 0;
                double dmin = dist_to(i, code[0]);
                for (std::size_t c = 1; c < code.size(); ++c) {
                    double dd = dist_to(i, code[c]);
                    if (dd < dmin) { dmin = dd; arg = c; }
                }
                assign[i] = arg;
                dist += blocks.weights[i] * dmin;
            }
            // Empty-cell repair: split the heaviest cell at its farthest atom.
            std::vector<double> cell_mass(code.size(), 0.0);
            for (std::size_t i = 0; i < S; ++i) cell_mass[assign[i]] += blocks.weights[i];
            for (std::size_t c = 0; c < code.size(); ++c) {
                if (cell_mass[c] > 0.0) continue;
                std::size_t heavy = 0;
                for (std::size_t c2 = 1; c2 < code.size(); ++c2)
                    if (cell_mass[c2] > cell_mass[heavy]) heavy = c2;
                std::size_t far_atom = heavy;
                double far_d = -1.0;
                for (std::size_t i = 0; i < S; ++i) {
                    if (assign[i] != heavy) continue;
                    double dd = dist_to(i, code[heavy]);
                    if (dd > far_d) { far_d = dd; far_atom = i; }
                }
                std::fill(code[c].begin(), code[c].end(), far_atom);
                assign[far_atom] = c;
                cell_mass[c] = blocks.weights[far_atom];
                cell_mass[heavy] -= blocks.weights[far_atom];
            }
            // Centroid step: per cell and coordinate, the cheapest candidate.
            std::vector<double> acc(code.size() * S);
            for (std::size_t k = 0; k < N; ++k) {
                std::fill(acc.begin(), acc.end(), 0.0);
                for (std::size_t i = 0; i < S; ++i) {
                    const double w = blocks.weights[i];
                    const double* row = &cd[(k * S + i) * S];
                    double* arow = &acc[assign[i] * S];
                    for (std::size_t cand = 0; cand < S; ++cand) arow[cand] += w * row[cand];
                }
                for (std::size_t c = 0; c < code.size(); ++c) {
                    const double* arow = &acc[c * S];
                    std::size_t best_cand = 0;
                    for (std::size_t cand = 1; cand < S; ++cand)
                        if (arow[cand] < arow[best_cand]) best_cand = cand;
                    code[c][k] = best_cand;
                }
            }
            if (prev - dist < tol) { ++it; break; }
            prev = dist;
        }
        // Final distortion under the last codebook.
        double dist = 0.0;
        for (std::size_t i = 0; i < S; ++i) {
            double dmin = dist_to(i, code[0]);
            for (std::size_t c = 1; c < code.size(); ++c) dmin = std::min(dmin, dist_to(i, code[c]));
            dist += blocks.weights[i] * dmin;
        }
        if (dist < best_dist) {
            best_dist = dist;
            best_code = code;
            best_iters = it;
        }
    }

    RDPoint out;
    out.method = "lloyd";
    out.block_length = n;
    out.distortion = best_dist;
    out.rate = std::log(static_cast<double>(codebook_size)) / n;
    out.codebook_size = codebook_size;
    out.iterations = best_iters;
    out.codebook_flat.reserve(codebook_size * N * dim);
    for (const auto& cw : best_code)
        for (std::size_t k = 0; k < N; ++k) {
            const Point& pt = traj[cw[k]][k];
            out.codebook_flat.insert(out.codebook_flat.end(), pt.begin(), pt.end());
        }
    return out;
}

RDPoint lloyd_codebook(const FiniteMeasure& blocks, const DynSystem& sys, int n,
                       double rate, int restarts, std::uint64_t seed,
                       double tol, int max_iter) {
    if (rate < 0.0) throw config_error("lloyd_codebook: rate must be >= 0");
    double raw = std::floor(std::exp(static_cast<double>(n) * rate));
    std::size_t size = raw < 1.0 ? 1 : static_cast<std::size_t>(std::min(raw, 1e9));
    return lloyd_codebook_size(blocks, sys, n, size, restarts, seed, tol, max_iter);
}

// -- orbit coding -------------------------------------------------------------

double approximation_distortion(const DynSystem& sys, const FiniteMeasure& mu,
                                const ApproximationMap& z) {
    double total = 0.0;
    for (std::size_t c = 0; c < z.cells.size(); ++c) {
        const auto& rep = z.reps[c];
        for (std::size_t idx : z.cells[c]) {
            auto o = orbit(sys, mu.support.point_copy(idx), z.n);
            total += mu.weights[idx] * rho_n(sys, o, rep);
        }
    }
    return total;
}

ApproximationMap orbit_code(const DynSystem& sys, const FiniteMeasure& mu,
                            const ApproximationMap& z) {
    if (z.cells.size() != z.reps.size() || z.cells.empty())
        throw config_error("orbit_code: malformed approximation map");
    std::vector<bool> seen(mu.size(), false);
    for (const auto& cell : z.cells) {
        if (cell.empty()) throw config_error("orbit_code: empty cell");
        for (std::size_t idx : cell) {
            if (idx >= mu.size() || seen[idx])
                throw config_error("orbit_code: cells do not partition the atoms");
            seen[idx] = true;
        }
    }
    for (bool s : seen)
        if (!s) throw config_error("orbit_code: cells do not partition the atoms");
    for (const auto& rep : z.reps)
        if (static_cast<int>(rep.size()) != z.n)
            throw config_error("orbit_code: representative length differs from n");
    double achieved = approximation_distortion(sys, mu, z);
    if (achieved > z.declared_eps + 1e-12)
        throw config_error("orbit_code: map is not an (n,eps)-approximation of its declared eps");

    ApproximationMap out;
    out.n = z.n;
    out.declared_eps = 2.0 * z.declared_eps;
    out.cells = z.cells;
    out.reps.reserve(z.cells.size());
    for (std::size_t c = 0; c < z.cells.size(); ++c) {
        // The cell atom whose orbit is closest to the old representative.
        std::size_t arg = z.cells[c].front();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t idx : z.cells[c]) {
            auto o = orbit(sys, mu.support.point_copy(idx), z.n);
            double g = rho_n(sys, o, z.reps[c]);
            if (g < best) { best = g; arg = idx; }
        }
        out.reps.push_back(orbit(sys, mu.support.point_copy(arg), z.n));
    }
    return out;
}

// -- sandwich -----------------------------------------------------------------

SandwichReport sandwich_check(const DynSystem& sys, const FiniteMeasure& mu,
                              double eps, int L, int n_lo, int n_hi, double tolerance) {
    if (L < 2) throw config_error("sandwich_check: L must be >= 2");
    if (!(eps > 0.0)) throw config_error("sandwich_check: eps must be > 0");
    double delta_upper = eps / (2.0 * sys.diameter);
    if (!(delta_upper > 0.0 && delta_upper < 1.0))
        throw config_error("sandwich_check: eps/(2D) outside (0,1)");

    SandwichReport rep;
    rep.lower_leg = katok_entropy(sys, mu, 4.0 * L * eps, 1.0 / L, n_lo, n_hi,
                                  BallKind::average());
    rep.upper_leg = katok_entropy(sys, mu, eps, delta_upper, n_lo, n_hi,
                                  BallKind::average());
    double el[1] = {eps};
    RDCurve curve = block_rate_distortion(mu, sys, n_hi, el, nullptr, 1e-7, 4000);
    rep.rate = curve.points.front();
    rep.lower_margin = rep.rate.rate - rep.lower_leg.slope;
    rep.upper_margin = rep.upper_leg.slope - rep.rate.rate;
    rep.flagged = rep.lower_margin < -tolerance || rep.upper_margin < -tolerance;
    return rep;
}

} // namespace mdim
