#include "gcsf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace gcsf {

const char* const kSeriesHeader =
    "t,L,A,iso_ratio,r_in,r_out,k_min,k_max,bonnesen_gap,gage_deficit,hausdorff,closure_residual";

namespace {

std::ofstream open_for_write(const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + file.string() + " for writing");
    return os;
}

void finish(std::ofstream& os, const std::filesystem::path& file) {
    os.flush();
    if (!os) throw IoError("write to " + file.string() + " failed");
}

double parse_number(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        // from_chars rejects "inf"/"nan" spellings produced by some writers.
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw std::invalid_argument("bad number '" + s + "'");
    }
    return v;
}

nlohmann::json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

void write_snapshot_csv(const Snapshot& snap, const std::filesystem::path& file) {
    const PlaneCurve curve = curve_from_support(snap.support);
    auto os = open_for_write(file);
    os << "# t=" << format_number(snap.t()) << ",n=" << snap.curvature.k.size() << "\n";
    os << "theta,k,h,x,y\n";
    const auto& grid = snap.curvature.grid;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        os << format_number(grid.theta(j)) << ',' << format_number(snap.curvature.k[j]) << ','
           << format_number(snap.support.h[j]) << ',' << format_number(curve.points[j].x) << ','
           << format_number(curve.points[j].y) << '\n';
    }
    finish(os, file);
}

void write_series_csv(const Trajectory& traj, const std::filesystem::path& file) {
    auto os = open_for_write(file);
    os << kSeriesHeader << '\n';
    for (const auto& snap : traj.snapshots) {
        const auto& s = snap.summary;
        const double row[] = {s.t,     s.L,     s.A,           s.iso_ratio,    s.r_in,      s.r_out,
                              s.k_min, s.k_max, s.bonnesen_gap, s.gage_deficit, s.hausdorff, s.closure_residual};
        for (std::size_t i = 0; i < std::size(row); ++i) {
            if (i) os << ',';
            os << format_number(row[i]);
        }
        os << '\n';
    }
    finish(os, file);
}

std::vector<GeometrySummary> read_series_csv(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw IoError("cannot open " + file.string());
    std::string line;
    if (!std::getline(is, line) || line != kSeriesHeader) {
        throw std::invalid_argument(file.string() + ": unexpected series header");
    }
    std::vector<GeometrySummary> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(parse_number(cell));
        if (cells.size() != 12) throw std::invalid_argument(file.string() + ": expected 12 columns");
        GeometrySummary s;
        s.t = cells[0];
        s.L = cells[1];
        s.A = cells[2];
        s.iso_ratio = cells[3];
        s.r_in = cells[4];
        s.r_out = cells[5];
        s.k_min = cells[6];
        s.k_max = cells[7];
        s.bonnesen_gap = cells[8];
        s.gage_deficit = cells[9];
        s.hausdorff = cells[10];
        s.closure_residual = cells[11];
        out.push_back(s);
    }
    return out;
}

nlohmann::json to_json(const GeometrySummary& s) {
    return {{"t", s.t},
            {"L", s.L},
            {"A", s.A},
            {"iso_ratio", s.iso_ratio},
            {"r_in", s.r_in},
            {"r_out", s.r_out},
            {"k_min", s.k_min},
            {"k_max", s.k_max},
            {"bonnesen_gap", s.bonnesen_gap},
            {"gage_deficit", s.gage_deficit},
            {"hausdorff", s.hausdorff},
            {"closure_residual", s.closure_residual},
            {"total_curvature_sq", s.total_curvature_sq}};
}

nlohmann::json to_json(const MonitorReport& r) {
    nlohmann::json details = nlohmann::json::object();
    for (const auto& [k, v] : r.details) details[k] = number_or_null(v);
    nlohmann::json values = nlohmann::json::array();
    for (double v : r.values) values.push_back(number_or_null(v));
    return {{"name", r.name},
            {"status", to_string(r.status)},
            {"pass", r.pass()},
            {"asserted", r.asserted},
            {"worst_margin", number_or_null(r.worst_margin)},
            {"tolerance", r.tolerance},
            {"first_violation_time",
             r.first_violation_time ? nlohmann::json(*r.first_violation_time) : nlohmann::json(nullptr)},
            {"note", r.note},
            {"details", details},
            {"times", r.times},
            {"values", values}};
}

nlohmann::json to_json(const BlowUpEstimate& e) {
    return {{"t_ref", e.t_ref},
            {"omega_lo", e.omega_lo},
            {"omega_mid", e.omega_mid},
            {"omega_hi", e.omega_hi},
            {"method", e.method}};
}

nlohmann::json summary_json(const Trajectory& traj, const std::vector<MonitorReport>& monitors,
                            const nlohmann::json& config) {
    nlohmann::json snaps = nlohmann::json::array();
    for (const auto& s : traj.snapshots) {
        auto j = to_json(s.summary);
        j["step"] = s.step;
        if (s.formulation_gap) j["formulation_gap"] = *s.formulation_gap;
        snaps.push_back(std::move(j));
    }
    nlohmann::json mons = nlohmann::json::array();
    for (const auto& m : monitors) mons.push_back(to_json(m));
    return {{"config", config},
            {"law", traj.law_label},
            {"formulation", to_string(traj.formulation)},
            {"stop_reason", to_string(traj.stop_reason)},
            {"stop_detail", traj.stop_detail},
            {"steps",
             {{"accepted", traj.stats.accepted},
              {"rejected", traj.stats.rejected},
              {"dt_min", traj.stats.dt_min},
              {"dt_max", traj.stats.dt_max}}},
            {"omega", traj.omega ? to_json(*traj.omega) : nlohmann::json(nullptr)},
            {"asymptotic", traj.asymptotic},
            {"max_formulation_gap",
             traj.max_formulation_gap ? nlohmann::json(*traj.max_formulation_gap) : nlohmann::json(nullptr)},
            {"snapshots", snaps},
            {"monitors", mons}};
}

void emit_timeseries(const Trajectory& traj, const std::vector<MonitorReport>& monitors,
                     const nlohmann::json& config, const std::filesystem::path& dir, bool write_snapshots) {
    if (traj.snapshots.empty()) throw std::invalid_argument("empty trajectory: nothing to write");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    write_series_csv(traj, dir / "series.csv");
    if (write_snapshots) {
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
            write_snapshot_csv(traj.snapshots[i], dir / ("snap_" + std::to_string(i) + ".csv"));
        }
    }
    auto os = open_for_write(dir / "summary.json");
    os << summary_json(traj, monitors, config).dump(2) << '\n';
    finish(os, dir / "summary.json");
}

}  // namespace gcsf
