#pragma once

#include "gcsf/diagnostics.hpp"
#include "gcsf/errors.hpp"
#include "gcsf/flow.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace gcsf {

/// Output directory or file could not be written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

/// Header line of series.csv.
extern const char* const kSeriesHeader;

/// One snapshot: a "# t=<t>,n=<n>" line, a column header, then
/// theta,k,h,x,y per node. Points are the support-function boundary points.
void write_snapshot_csv(const Snapshot& snap, const std::filesystem::path& file);

/// One row per snapshot with the columns of kSeriesHeader.
void write_series_csv(const Trajectory& traj, const std::filesystem::path& file);

/// Parses a file written by write_series_csv.
std::vector<GeometrySummary> read_series_csv(const std::filesystem::path& file);

nlohmann::json to_json(const GeometrySummary& s);
nlohmann::json to_json(const MonitorReport& r);
nlohmann::json to_json(const BlowUpEstimate& e);

/// Config echo, stop reason, omega bracket, per-snapshot summaries, monitors.
nlohmann::json summary_json(const Trajectory& traj, const std::vector<MonitorReport>& monitors,
                            const nlohmann::json& config);

/// Writes series.csv, summary.json and snap_<index>.csv into dir (created if
/// needed). Throws std::invalid_argument for an empty trajectory before
/// touching the filesystem, IoError when a file cannot be written.
void emit_timeseries(const Trajectory& traj, const std::vector<MonitorReport>& monitors,
                     const nlohmann::json& config, const std::filesystem::path& dir, bool write_snapshots = true);

}  // namespace gcsf
