#include "mdim/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mdim/constructions.hpp"
#include "mdim/covercount.hpp"
#include "mdim/dynsys.hpp"
#include "mdim/estimators.hpp"
#include "mdim/infotheory.hpp"
#include "mdim/io.hpp"

namespace mdim {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Emitter {
    std::filesystem::path dir;
    RunManifest* man;

    void file(const std::string& name, const std::string& content) const {
        io::write_file(dir / name, content);
        man->files.push_back(name);
    }
};

std::string param(const ExperimentConfig& c, const std::string& key, const std::string& dflt) {
    auto it = c.params.find(key);
    return it == c.params.end() ? dflt : it->second;
}

double param_d(const ExperimentConfig& c, const std::string& key, const std::string& dflt) {
    try {
        return std::stod(param(c, key, dflt));
    } catch (const std::exception&) {
        throw config_error("bad numeric parameter " + key);
    }
}

int param_i(const ExperimentConfig& c, const std::string& key, const std::string& dflt) {
    try {
        return std::stoi(param(c, key, dflt));
    } catch (const std::exception&) {
        throw config_error("bad integer parameter " + key);
    }
}

std::vector<double> param_dlist(const ExperimentConfig& c, const std::string& key,
                                const std::string& dflt) {
    std::vector<double> out;
    std::stringstream ss(param(c, key, dflt));
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) {
            try {
                out.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw config_error("bad list parameter " + key);
            }
        }
    if (out.empty()) throw config_error("empty list parameter " + key);
    return out;
}

std::vector<int> param_ilist(const ExperimentConfig& c, const std::string& key,
                             const std::string& dflt) {
    std::vector<int> out;
    for (double v : param_dlist(c, key, dflt)) out.push_back(static_cast<int>(v));
    return out;
}

FiniteSample sample_from_values(std::span<const double> values) {
    FiniteSample s;
    s.dim = 1;
    for (double v : values) s.push(std::span<const double>(&v, 1));
    return s;
}

DynSystem scalar_identity(BaseMetricKind metric) {
    DynSystem sys = make_interval_system("identity", [](double x) { return x; });
    sys.scalar_metric = metric;
    return sys;
}

// Maximal eps-separated values of a base space, greedy in grid order.
std::vector<double> base_separated_values(const BaseSpace& base, double eps) {
    FiniteSample s = sample_from_values(base.sample_grid);
    DynSystem ident = scalar_identity(base.metric);
    auto res = greedy_separated(s, ident, 1, eps);
    std::vector<double> out;
    out.reserve(res.witnesses.size());
    for (std::size_t w : res.witnesses) out.push_back(base.sample_grid[w]);
    return out;
}

struct ShiftGrowth {
    double eps = 0.0;
    long long base_count = 0;
    CountCurve counts;
    double slope = 0.0;
    long long observed_7eps_nmax = 0;
};

// Separated growth of the shift over `base` at one radius: window coordinates
// run over a maximal eps-separated base set, counts verified by the greedy
// kernel. The windows are a deterministic enumeration, not a random draw.
ShiftGrowth shift_separated_growth(const BaseSpace& base, double eps, int n_hi,
                                   std::size_t budget) {
    ShiftGrowth g;
    g.eps = eps;
    std::vector<double> sep = base_separated_values(base, eps);
    g.base_count = static_cast<long long>(sep.size());
    DynSystem sys = make_shift_system(base, 0, n_hi, Sidedness::TwoSided, TailMode::FillExact);
    std::vector<double> xs, ys;
    FiniteSample top_windows;
    for (int n = 1; n <= n_hi; ++n) {
        FiniteSample windows = enumerate_windows(sys, sep, n, budget);
        long long cnt = greedy_separated(windows, sys, n, eps).count;
        CountEntry e;
        e.n = n;
        e.eps = eps;
        e.count = cnt;
        e.method = "greedy";
        e.ball = BallKind::bowen();
        g.counts.add(e);
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(static_cast<double>(cnt)));
        if (n == n_hi) top_windows = std::move(windows);
    }
    g.slope = fit_series(xs, ys, FitMode::Ols, "shift-growth").slope;
    g.observed_7eps_nmax = greedy_separated(top_windows, sys, n_hi, 7.0 * eps).count;
    return g;
}

// -- prop-3.4 ---------------------------------------------------------------

void run_prop34(const ExperimentConfig& cfg, const Emitter& em) {
    std::vector<int> ks = param_ilist(cfg, "k", param(cfg, "k_list", "2,4,8,16"));
    double delta = param_d(cfg, "delta", "0.1");
    int n_max = param_i(cfg, "n-max", "8");
    std::vector<double> delta_list = param_dlist(cfg, "delta-list", "0.25,0.1,0.05");
    if (ks.size() < 3) throw config_error("prop-3.4: need at least 3 values of k");
    if (n_max < 3) throw config_error("prop-3.4: n-max must be >= 3");

    std::vector<double> abs_log_eps, slopes;
    std::string ratios = "k,r,abs_log_eps,slope,ratio,analytic\n";
    for (int k : ks) {
        double r = 1.0 / (3.0 * k);
        CountCurve curve;
        for (int n = 1; n <= n_max; ++n) {
            CountEntry e;
            e.n = n;
            e.eps = r;
            e.count = cylinder_cover_exact(k, n, r, delta);
            e.method = "exact";
            e.ball = BallKind::bowen();
            e.delta = delta;
            curve.add(e);
        }
        EstimateReport g = growth_rate(curve);
        double x = std::fabs(std::log(r));
        abs_log_eps.push_back(x);
        slopes.push_back(g.slope);
        ratios += std::to_string(k) + ',' + io::fmt(r) + ',' + io::fmt(x) + ',' +
                  io::fmt(g.slope) + ',' + io::fmt(g.slope / x) + ',' +
                  io::fmt(std::log(static_cast<double>(k)) / std::log(3.0 * k)) + '\n';
        em.file("counts_k" + std::to_string(k) + ".csv", io::count_curve_csv(curve));
    }
    EstimateReport lower = mdim_estimate_xy(abs_log_eps, slopes, FitMode::Ols);
    lower.quantity = "mdim_lower[prop-3.4]";
    em.file("mdim_lower.json", io::estimate_report_json(lower));
    em.file("ratios.csv", ratios);
    em.file("plot_ratios.gp", io::gnuplot_script("ratios.csv", "per-k growth vs |log eps|", 3, 4, false));

    // Both orderings of the delta and eps passes over the same table.
    nlohmann::ordered_json orderings;
    std::vector<double> sup_slope(ks.size(), 0.0);
    for (double d : delta_list) {
        std::vector<double> sl;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            double r = 1.0 / (3.0 * ks[i]);
            CountCurve curve;
            for (int n = 1; n <= n_max; ++n) {
                CountEntry e;
                e.n = n;
                e.eps = r;
                e.count = cylinder_cover_exact(ks[i], n, r, d);
                e.method = "exact";
                e.ball = BallKind::bowen();
                e.delta = d;
                curve.add(e);
            }
            double s = growth_rate(curve).slope;
            sl.push_back(s);
            sup_slope[i] = std::max(sup_slope[i], s);
        }
        EstimateReport est = mdim_estimate_xy(abs_log_eps, sl, FitMode::Ols);
        orderings["per_delta"].push_back(
            {{"delta", d}, {"slope", est.slope}, {"intercept", est.intercept}});
    }
    EstimateReport sup_est = mdim_estimate_xy(abs_log_eps, sup_slope, FitMode::Ols);
    orderings["sup_delta_inside"] = {{"slope", sup_est.slope}, {"intercept", sup_est.intercept}};
    em.file("orderings.json", orderings.dump(2) + "\n");
}

// -- thm-3.5 ----------------------------------------------------------------

struct Thm35Setup {
    BaseSpace base;
    std::vector<double> ladder;
    double target;
    EpsLadder box_ladder;
};

Thm35Setup thm35_setup(const std::string& space) {
    Thm35Setup s;
    if (space == "finite") {
        s.base = base_points({0.0, 0.31, 0.64, 0.97});
        s.ladder = {0.2, 0.12, 0.072, 0.0432};
        s.target = 0.0;
        s.box_ladder = {0.2, 0.6, 4};
    } else if (space == "grid") {
        s.base = base_interval_grid(16384);
        for (int j = 1; j <= 5; ++j) s.ladder.push_back(0.77 * std::ldexp(1.0, -j));
        s.target = 1.0;
        s.box_ladder = {0.25, 0.5, 9};
    } else if (space == "cantor") {
        s.base = base_cantor(10);
        for (int j = 2; j <= 5; ++j) s.ladder.push_back(std::pow(3.0, -j));
        s.target = std::log(2.0) / std::log(3.0);
        s.box_ladder = {1.0 / 9.0, 1.0 / 3.0, 7};
    } else {
        throw config_error("thm-3.5: unknown space " + space);
    }
    return s;
}

void run_thm35(const ExperimentConfig& cfg, const Emitter& em, const std::string& space) {
    Thm35Setup setup = thm35_setup(space);
    int n_hi = param_i(cfg, "n-max", "3");
    std::size_t budget = static_cast<std::size_t>(param_i(cfg, "budget", "130000"));

    EstimateReport box = box_dimension(sample_from_values(setup.base.sample_grid),
                                       scalar_identity(setup.base.metric), setup.box_ladder);
    box.quantity = "box_dimension[" + space + "]";
    em.file("box_dim.json", io::estimate_report_json(box));

    std::vector<double> xs, ys;
    std::string upper = "eps,base_count,observed_7eps,l_min,bound\n";
    std::string all_counts;
    for (double eps : setup.ladder) {
        ShiftGrowth g = shift_separated_growth(setup.base, eps, n_hi, budget);
        xs.push_back(std::fabs(std::log(eps)));
        ys.push_back(g.slope);
        all_counts += io::count_curve_csv(g.counts);
        int l_min = shift_cover_radius(eps, setup.base.diameter);
        bigint bound = shift_cover_upper(g.base_count, n_hi, l_min);
        upper += io::fmt(eps) + ',' + std::to_string(g.base_count) + ',' +
                 std::to_string(g.observed_7eps_nmax) + ',' + std::to_string(l_min) + ',' +
                 bound.str() + '\n';
    }
    EstimateReport md = mdim_estimate_xy(xs, ys, FitMode::Ols);
    md.quantity = "mdim[" + space + "-shift]";
    em.file("mdim.json", io::estimate_report_json(md));
    em.file("counts.csv", all_counts);
    em.file("upper_check.csv", upper);
    em.file("plot_counts.gp", io::gnuplot_script("counts.csv", "separated counts", 1, 5, true));

    nlohmann::ordered_json summary;
    summary["space"] = space;
    summary["target"] = setup.target;
    summary["mdim_slope"] = md.slope;
    summary["box_dim_slope"] = box.slope;
    em.file("summary.json", summary.dump(2) + "\n");
}

// -- lemma-3.1-gap -----------------------------------------------------------

void run_lemma31(const ExperimentConfig& cfg, const Emitter& em) {
    std::vector<double> eps_list = param_dlist(cfg, "eps-list", "0.125,0.0625,0.03125");
    double delta = param_d(cfg, "delta", "0.1");
    int n_max = param_i(cfg, "n-max", "8");
    int k_cap = param_i(cfg, "k-cap", "40");
    BaseSpace base = base_interval_grid(16384);

    std::string rows = "eps,S_eps,S_2eps,k_star,h_sup,rhs,margin\n";
    for (double eps : eps_list) {
        ShiftGrowth at_eps = shift_separated_growth(base, eps, 3, 200000);
        ShiftGrowth at_2eps = shift_separated_growth(base, 2.0 * eps, 3, 200000);
        // Largest product measure whose cylinder formula is valid at radius eps.
        int k_star = 0;
        for (int k = 2; k <= k_cap; ++k)
            if (eps < 1.0 / (2.0 * k)) k_star = k;
        if (k_star < 2) throw config_error("lemma-3.1-gap: eps too large for the mu_k family");
        CountCurve curve;
        for (int n = 1; n <= n_max; ++n) {
            CountEntry e;
            e.n = n;
            e.eps = eps;
            e.count = cylinder_cover_exact(k_star, n, eps, delta);
            e.method = "exact";
            e.ball = BallKind::bowen();
            e.delta = delta;
            curve.add(e);
        }
        double h_sup = growth_rate(curve).slope;
        double rhs = at_2eps.slope - 3.0 * delta * at_eps.slope;
        rows += io::fmt(eps) + ',' + io::fmt(at_eps.slope) + ',' + io::fmt(at_2eps.slope) + ',' +
                std::to_string(k_star) + ',' + io::fmt(h_sup) + ',' + io::fmt(rhs) + ',' +
                io::fmt(h_sup - rhs) + '\n';
    }
    em.file("gap.csv", rows);
    em.file("plot_gap.gp", io::gnuplot_script("gap.csv", "entropy gap lower bound", 1, 7, false));
}

// -- thm-4.7-sandwich ----------------------------------------------------------

void run_sandwich(const ExperimentConfig& cfg, const Emitter& em) {
    double eps = param_d(cfg, "eps", "0.1");
    int L = param_i(cfg, "L", "2");
    int n_max = param_i(cfg, "n-max", "10");
    int n_min = param_i(cfg, "n-min", "5");
    int l = param_i(cfg, "l", "8");
    double p = param_d(cfg, "p", "0.5");

    DynSystem sys = make_shift_system(base_binary(), l, n_max, Sidedness::TwoSided,
                                      TailMode::FillExact);
    std::vector<std::pair<double, double>> atoms = {{0.0, 1.0 - p}, {1.0, p}};
    FiniteMeasure mu = make_cylinder_measure(sys, atoms, n_max);
    SandwichReport rep = sandwich_check(sys, mu, eps, L, n_min, n_max);

    nlohmann::ordered_json j;
    j["eps"] = eps;
    j["L"] = L;
    j["lower_leg_slope"] = rep.lower_leg.slope;
    j["rate_nats"] = rep.rate.rate;
    j["upper_leg_slope"] = rep.upper_leg.slope;
    j["lower_margin"] = rep.lower_margin;
    j["upper_margin"] = rep.upper_margin;
    j["flagged"] = rep.flagged;
    em.file("sandwich.json", j.dump(2) + "\n");
    em.file("lower_leg.json", io::estimate_report_json(rep.lower_leg));
    em.file("upper_leg.json", io::estimate_report_json(rep.upper_leg));
}

// -- prop-5.3-interval ----------------------------------------------------------

void run_prop53(const ExperimentConfig& cfg, const Emitter& em) {
    int k_max = param_i(cfg, "k-max", "6");
    std::size_t growth_k = static_cast<std::size_t>(param_i(cfg, "growth-k", "3"));
    int growth_m = param_i(cfg, "growth-m", "3");

    BlockSpec spec = BlockSpec::quadratic_tower(k_max);
    MaxMdimMap built = build_max_mdim_map(spec);
    em.file("map.csv", io::piecewise_map_csv(built.map));

    std::string pred = "k,log_teeth,abs_log_eps,ratio\n";
    for (const auto& row : predicted_mdim(spec))
        pred += std::to_string(row.k) + ',' + io::fmt(row.log_teeth) + ',' +
                io::fmt(row.abs_log_eps) + ',' + io::fmt(row.ratio) + '\n';
    em.file("predicted_mdim.csv", pred);
    em.file("plot_predicted.gp",
            io::gnuplot_script("predicted_mdim.csv", "predicted ratio per block", 1, 4, false));

    double eps = spec.tooth_eps(growth_k);
    std::vector<double> xs, ys;
    CountCurve curve;
    for (int m = 1; m <= growth_m; ++m) {
        FiniteSample wit = separated_witnesses(built, growth_k, m);
        long long cnt = greedy_separated(wit, built.system, m, eps).count;
        CountEntry e;
        e.n = m;
        e.eps = eps;
        e.count = cnt;
        e.method = "greedy";
        e.ball = BallKind::bowen();
        curve.add(e);
        xs.push_back(m);
        ys.push_back(std::log(static_cast<double>(cnt)));
    }
    EstimateReport growth = fit_series(xs, ys, FitMode::Ols, "separated-growth[J_k]");
    em.file("growth.json", io::estimate_report_json(growth));
    em.file("growth_counts.csv", io::count_curve_csv(curve));

    nlohmann::ordered_json j;
    j["k"] = growth_k;
    j["eps_prime"] = eps;
    j["slope"] = growth.slope;
    j["log_branches"] =
        std::log(static_cast<double>(spec.blocks[growth_k - 1].teeth + 1));
    em.file("summary.json", j.dump(2) + "\n");
}

// -- katok-bernoulli -------------------------------------------------------------

void run_katok(const ExperimentConfig& cfg, const Emitter& em) {
    double p = param_d(cfg, "p", "0.5");
    double eps = param_d(cfg, "eps", "0.4");
    double delta = param_d(cfg, "delta", "0.1");
    int n_max = param_i(cfg, "n-max", "12");
    int l = param_i(cfg, "l", "8");
    if (!(p > 0.0 && p < 1.0)) throw config_error("katok-bernoulli: p must be in (0,1)");

    DynSystem sys = make_shift_system(base_binary(), l, n_max, Sidedness::TwoSided,
                                      TailMode::FillExact);
    std::vector<std::pair<double, double>> atoms = {{0.0, 1.0 - p}, {1.0, p}};
    FiniteMeasure mu = make_cylinder_measure(sys, atoms, n_max);

    CountCurve curve;
    for (int n = 1; n <= n_max; ++n) {
        auto cover = greedy_measure_cover(mu, sys, n, eps, delta, BallKind::bowen());
        CountEntry e;
        e.n = n;
        e.eps = eps;
        e.count = cover.count;
        e.covered_mass = cover.covered_mass;
        e.method = "greedy";
        e.ball = BallKind::bowen();
        e.delta = delta;
        curve.add(e);
    }
    EstimateReport est = growth_rate(curve);
    est.quantity = "katok_entropy[p=" + io::fmt(p) + "]";
    em.file("counts.csv", io::count_curve_csv(curve));
    em.file("estimate.json", io::estimate_report_json(est));
    em.file("plot_counts.gp", io::gnuplot_script("counts.csv", "measure cover counts", 1, 5, true));

    double href = -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
    nlohmann::ordered_json j;
    j["p"] = p;
    j["slope"] = est.slope;
    j["shannon_nats"] = href;
    j["relative_error"] = std::fabs(est.slope - href) / href;
    em.file("summary.json", j.dump(2) + "\n");
}

// -- thm-1.3-rd-limit --------------------------------------------------------------

void run_rdlimit(const ExperimentConfig& cfg, const Emitter& em) {
    double p = param_d(cfg, "p", "0.5");
    int n = param_i(cfg, "n", "6");
    int l = param_i(cfg, "l", "8");
    int restarts = param_i(cfg, "restarts", "12");
    std::vector<double> eps_list = param_dlist(cfg, "eps-list", "0.4,0.2,0.1,0.05");

    DynSystem sys = make_shift_system(base_binary(), l, n, Sidedness::TwoSided,
                                      TailMode::FillExact);
    std::vector<std::pair<double, double>> atoms = {{0.0, 1.0 - p}, {1.0, p}};
    FiniteMeasure mu = make_cylinder_measure(sys, atoms, n);

    // Mutual-information route: alternating minimization over the trajectory grid.
    RDCurve ba = block_rate_distortion(mu, sys, n, eps_list, nullptr, 1e-9, 10000);
    em.file("rd_blahut.csv", io::rd_curve_csv(ba, eps_list));

    // Operational route: smallest codebook whose expected block distortion
    // meets the budget; rate = log(size)/n.
    const std::size_t S = mu.size();
    std::vector<double> achieved(S + 1, std::numeric_limits<double>::infinity());
    std::vector<RDPoint> lloyd_pts(S + 1);
    for (std::size_t m = 1; m <= S; ++m) {
        lloyd_pts[m] = lloyd_codebook_size(mu, sys, n, m, restarts, cfg.seed + m);
        achieved[m] = lloyd_pts[m].distortion;
    }
    RDCurve codebook;
    for (double eps : eps_list) {
        std::size_t m_found = S;
        for (std::size_t m = 1; m <= S; ++m)
            if (achieved[m] <= eps) { m_found = m; break; }
        codebook.points.push_back(lloyd_pts[m_found]);
    }
    em.file("rd_codebook.csv", io::rd_curve_csv(codebook, eps_list));
    em.file("plot_rd.gp", io::gnuplot_script("rd_codebook.csv", "codebook rate vs eps", 2, 3, false));

    nlohmann::ordered_json j;
    j["p"] = p;
    j["n"] = n;
    j["entropy_nats"] = -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
    j["codebook_rate_final"] = codebook.points.back().rate;
    j["blahut_rate_final"] = ba.points.back().rate;
    j["final_gap_nats"] = j["entropy_nats"].get<double>() - codebook.points.back().rate;
    em.file("summary.json", j.dump(2) + "\n");
}

// -- box-dim-baseline ---------------------------------------------------------------

void run_boxdim(const ExperimentConfig&, const Emitter& em) {
    struct Row {
        const char* name;
        BaseSpace base;
        EpsLadder ladder;
        double target;
    };
    std::vector<Row> rows;
    rows.push_back({"grid", base_interval_grid(16384), {0.25, 0.5, 9}, 1.0});
    rows.push_back({"cantor", base_cantor(10), {1.0 / 9.0, 1.0 / 3.0, 7},
                    std::log(2.0) / std::log(3.0)});
    rows.push_back({"finite", base_points({0.0, 0.31, 0.64, 0.97}), {0.2, 0.6, 4}, 0.0});
    std::string csv = "space,slope,target\n";
    for (auto& r : rows) {
        EstimateReport est = box_dimension(sample_from_values(r.base.sample_grid),
                                           scalar_identity(r.base.metric), r.ladder);
        est.quantity = std::string("box_dimension[") + r.name + "]";
        em.file(std::string("box_") + r.name + ".json", io::estimate_report_json(est));
        csv += std::string(r.name) + ',' + io::fmt(est.slope) + ',' + io::fmt(r.target) + '\n';
    }
    em.file("box_dims.csv", csv);
}

} // namespace

const std::vector<ExperimentInfo>& list_registry() {
    static const std::vector<ExperimentInfo> registry = {
        {"prop-3.4", "§3",
         "lower bound for the mean dimension of the unit-interval shift via product measures"},
        {"thm-3.5-finite", "§3", "shift mean dimension vs box dimension, 4-point base"},
        {"thm-3.5-grid", "§3", "shift mean dimension vs box dimension, unit-interval grid base"},
        {"thm-3.5-cantor", "§3", "shift mean dimension vs box dimension, Cantor base"},
        {"lemma-3.1-gap", "§3", "family entropy estimates vs S(2e) - 3dS(e) gap"},
        {"thm-4.7-sandwich", "§4", "average-ball entropy sandwich around the rate-distortion value"},
        {"prop-5.3-interval", "§5", "interval map with maximal mean dimension, separated growth"},
        {"katok-bernoulli", "§2", "entropy from measure covers on Bernoulli shifts"},
        {"thm-1.3-rd-limit", "§1", "block rate-distortion approach to the entropy as eps shrinks"},
        {"box-dim-baseline", "§3", "box dimension estimates for the built-in base spaces"},
    };
    return registry;
}

std::string registry_json() {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& e : list_registry())
        j.push_back({{"name", e.name}, {"anchor", e.anchor}, {"summary", e.summary}});
    return j.dump(2) + "\n";
}

std::string ExperimentConfig::digest_string() const {
    std::string s = "experiment=" + experiment + ";seed=" + std::to_string(seed) +
                    ";bits=" + (bits ? "1" : "0");
    for (const auto& [k, v] : params) s += ";" + k + "=" + v;
    return s;
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    j["config_digest"] = config_digest;
    j["files"] = files;
    j["wall_ms"] = wall_ms;
    j["version"] = version;
    return j.dump(2) + "\n";
}

RunManifest run_experiment(const ExperimentConfig& config) {
    bool known = false;
    for (const auto& e : list_registry()) known = known || e.name == config.experiment;
    if (!known) throw config_error("unknown experiment: " + config.experiment);
#ifdef _OPENMP
    if (config.threads > 0) omp_set_num_threads(config.threads);
#endif
    std::filesystem::create_directories(config.out_dir);

    RunManifest man;
    man.experiment = config.experiment;
    man.config_digest = hex64(fnv1a(config.digest_string()));
    Emitter em{config.out_dir, &man};

    auto t0 = std::chrono::steady_clock::now();
    const std::string& name = config.experiment;
    if (name == "prop-3.4") run_prop34(config, em);
    else if (name == "thm-3.5-finite") run_thm35(config, em, "finite");
    else if (name == "thm-3.5-grid") run_thm35(config, em, "grid");
    else if (name == "thm-3.5-cantor") run_thm35(config, em, "cantor");
    else if (name == "lemma-3.1-gap") run_lemma31(config, em);
    else if (name == "thm-4.7-sandwich") run_sandwich(config, em);
    else if (name == "prop-5.3-interval") run_prop53(config, em);
    else if (name == "katok-bernoulli") run_katok(config, em);
    else if (name == "thm-1.3-rd-limit") run_rdlimit(config, em);
    else if (name == "box-dim-baseline") run_boxdim(config, em);
    auto t1 = std::chrono::steady_clock::now();
    man.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    io::write_file(config.out_dir / "manifest.json", man.to_json());
    return man;
}

void apply_param(ExperimentConfig& config, const std::string& key, const std::string& value) {
    if (key == "experiment") config.experiment = value;
    else if (key == "out") config.out_dir = value;
    else if (key == "seed") config.seed = std::stoull(value);
    else if (key == "threads") config.threads = std::stoi(value);
    else if (key == "bits") config.bits = value == "1" || value == "true";
    else config.params[key] = value;
}

ExperimentConfig parse_config_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw config_error("cannot read config file " + file.string());
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            auto last = s.find_last_not_of(" \t\r");
            s.erase(last == std::string::npos ? 0 : last + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw config_error("config: empty key");
        try {
            apply_param(cfg, key, value);
        } catch (const config_error&) {
            throw;
        } catch (const std::exception&) {
            throw config_error("config: bad value for " + key);
        }
    }
    return cfg;
}

} // namespace mdim
