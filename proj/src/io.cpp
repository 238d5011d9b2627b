#include "mdim/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mdim::io {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

BallKind parse_ball(const std::string& s) {
    if (s == "bowen") return BallKind::bowen();
    if (s == "average") return BallKind::average();
    if (s.rfind("prime:", 0) == 0) return BallKind::prime(std::stod(s.substr(6)));
    throw config_error("csv: unknown ball kind " + s);
}

} // namespace

std::string count_curve_csv(const CountCurve& curve) {
    std::string out = "n,eps,ball,delta,count,method,covered_mass\n";
    for (const auto& e : curve.entries) {
        out += std::to_string(e.n) + ',' + fmt(e.eps) + ',' + e.ball.label() + ',';
        out += e.delta ? fmt(*e.delta) : std::string();
        out += ',' + std::to_string(e.count) + ',' + e.method + ',' + fmt(e.covered_mass) + '\n';
    }
    return out;
}

CountCurve parse_count_curve_csv(const std::string& text) {
    CountCurve curve;
    std::stringstream ss(text);
    std::string line;
    bool first = true;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (first) { first = false; continue; }
        auto f = split(line, ',');
        if (f.size() != 7) throw config_error("csv: bad count curve row: " + line);
        CountEntry e;
        e.n = std::stoi(f[0]);
        e.eps = std::stod(f[1]);
        e.ball = parse_ball(f[2]);
        if (!f[3].empty()) e.delta = std::stod(f[3]);
        e.count = std::stoll(f[4]);
        e.method = f[5];
        e.covered_mass = std::stod(f[6]);
        curve.add(e);
    }
    return curve;
}

namespace {

const char* mode_str(FitMode m) { return fit_mode_name(m); }

FitMode parse_mode(const std::string& s) {
    if (s == "ols") return FitMode::Ols;
    if (s == "upper") return FitMode::Upper;
    if (s == "lower") return FitMode::Lower;
    throw config_error("json: unknown fit mode " + s);
}

} // namespace

std::string estimate_report_json(const EstimateReport& r) {
    nlohmann::ordered_json j;
    j["quantity"] = r.quantity;
    j["slope"] = r.slope;
    j["intercept"] = r.intercept;
    j["residual"] = r.rms_residual;
    j["window"] = {r.window_lo, r.window_hi};
    j["mode"] = mode_str(r.mode);
    char digest[32];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(r.inputs_digest));
    j["inputs-digest"] = digest;
    return j.dump(2) + "\n";
}

EstimateReport parse_estimate_report_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    EstimateReport r;
    r.quantity = j.at("quantity").get<std::string>();
    r.slope = j.at("slope").get<double>();
    r.intercept = j.at("intercept").get<double>();
    r.rms_residual = j.at("residual").get<double>();
    r.window_lo = j.at("window")[0].get<double>();
    r.window_hi = j.at("window")[1].get<double>();
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.inputs_digest = std::stoull(j.at("inputs-digest").get<std::string>(), nullptr, 16);
    return r;
}

std::string rd_curve_csv(const RDCurve& curve, std::span<const double> eps_list) {
    if (eps_list.size() != curve.points.size())
        throw config_error("rd csv: eps list does not match curve");
    std::string out = "n,eps,rate_nats,distortion,method,grid_mesh\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i];
        out += std::to_string(p.block_length) + ',' + fmt(eps_list[i]) + ',' + fmt(p.rate) +
               ',' + fmt(p.distortion) + ',' + p.method + ',' + fmt(p.grid_mesh) + '\n';
    }
    return out;
}

RDCurve parse_rd_curve_csv(const std::string& text) {
    RDCurve curve;
    std::stringstream ss(text);
    std::string line;
    bool first = true;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (first) { first = false; continue; }
        auto f = split(line, ',');
        if (f.size() != 6) throw config_error("csv: bad rd row: " + line);
        RDPoint p;
        p.block_length = std::stoi(f[0]);
        p.rate = std::stod(f[2]);
        p.distortion = std::stod(f[3]);
        p.method = f[4];
        p.grid_mesh = std::stod(f[5]);
        curve.points.push_back(std::move(p));
    }
    return curve;
}

std::string piecewise_map_csv(const PiecewiseAffineMap& map) {
    std::string out = "breakpoint,value\n";
    for (std::size_t i = 0; i < map.knots.size(); ++i)
        out += fmt(map.knots[i]) + ',' + fmt(map.values[i]) + '\n';
    return out;
}

PiecewiseAffineMap parse_piecewise_map_csv(const std::string& text) {
    PiecewiseAffineMap map;
    std::stringstream ss(text);
    std::string line;
    bool first = true;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (first) { first = false; continue; }
        auto f = split(line, ',');
        if (f.size() != 2) throw config_error("csv: bad piecewise map row: " + line);
        map.knots.push_back(std::stod(f[0]));
        map.values.push_back(std::stod(f[1]));
    }
    map.validate();
    return map;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path.string());
    out << content;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string gnuplot_script(const std::string& csv_name, const std::string& title,
                           int x_col, int y_col, bool logy) {
    std::string out;
    out += "set datafile separator ','\n";
    out += "set title '" + title + "'\n";
    out += "set key off\n";
    if (logy) out += "set logscale y\n";
    out += "plot '" + csv_name + "' using " + std::to_string(x_col) + ':' +
           std::to_string(y_col) + " with linespoints pt 7\n";
    return out;
}

} // namespace mdim::io
