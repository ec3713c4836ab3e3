#include "rytov/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "rytov/errors.hpp"

namespace rytov {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double_strict(const std::string& token, const std::string& context) {
    const std::string t = trim(token);
    if (t.empty()) throw ParseError(context + ": empty numeric field");
    std::size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &consumed);
    } catch (const std::exception&) {
        throw ParseError(context + ": not a number: '" + t + "'");
    }
    if (consumed != t.size())
        throw ParseError(context + ": trailing characters in number: '" + t + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,r_x,r_y,r_z,p_x,p_y,p_z,gamma,hall_x,hall_y,hall_z,H\n";
    for (const auto& s : traj.samples) {
        const PhononState& st = s.state;
        os << format_g17(s.t) << ',' << format_g17(st.r.x) << ',' << format_g17(st.r.y) << ','
           << format_g17(st.r.z) << ',' << format_g17(st.p.x) << ',' << format_g17(st.p.y) << ','
           << format_g17(st.p.z) << ',' << format_g17(st.gamma_acc) << ','
           << format_g17(st.hall_acc.x) << ',' << format_g17(st.hall_acc.y) << ','
           << format_g17(st.hall_acc.z) << ',' << format_g17(s.h_value) << '\n';
    }
}

void write_path_csv(std::ostream& os, const MomentumPath& path) {
    os << "t,p_x,p_y,p_z\n";
    for (const auto& s : path.samples()) {
        os << format_g17(s.t) << ',' << format_g17(s.p.x) << ',' << format_g17(s.p.y) << ','
           << format_g17(s.p.z) << '\n';
    }
}

MomentumPath read_path_csv(std::istream& is, bool closed, double closure_tol) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("path CSV: empty input");

    auto header = split_csv(trim(line));
    for (auto& h : header) h = trim(h);
    const std::vector<std::string> expected{"t", "p_x", "p_y", "p_z"};
    if (std::vector<std::string>(header.begin(), header.end()) != expected)
        throw ParseError("path CSV: header must be exactly 't,p_x,p_y,p_z'");

    std::vector<PathSample> samples;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        line_no += 1;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto fields = split_csv(t);
        if (fields.size() != 4)
            throw ParseError("path CSV line " + std::to_string(line_no) + ": expected 4 fields, got " +
                             std::to_string(fields.size()));
        const std::string ctx = "path CSV line " + std::to_string(line_no);
        samples.push_back({parse_double_strict(fields[0], ctx),
                           {parse_double_strict(fields[1], ctx), parse_double_strict(fields[2], ctx),
                            parse_double_strict(fields[3], ctx)}});
    }
    return MomentumPath(std::move(samples), closed, closure_tol);
}

void write_ensemble_summary(std::ostream& os, const EnsembleSummary& s) {
    os << "n: " << s.n << '\n';
    os << "mean: " << format_g17(s.mean) << '\n';
    os << "variance: " << format_g17(s.variance) << '\n';
    os << "std_error_mean: " << format_g17(s.std_error_mean) << '\n';
    os << "skewness: " << format_g17(s.skewness) << '\n';
    os << "excess_kurtosis: " << format_g17(s.excess_kurtosis) << '\n';
    os << "predicted_variance: " << format_g17(s.predicted_variance) << '\n';
    os << "amplitude_excursions: " << s.amplitude_excursions << '\n';
    os << "histogram:\n";
    os << "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < s.histogram.counts.size(); ++i) {
        os << format_g17(s.histogram.edges[i]) << ',' << format_g17(s.histogram.edges[i + 1]) << ','
           << s.histogram.counts[i] << '\n';
    }
}

void write_deltas_csv(std::ostream& os, std::span<const double> deltas) {
    os << "delta_gamma\n";
    for (double d : deltas) os << format_g17(d) << '\n';
}

}  // namespace rytov
