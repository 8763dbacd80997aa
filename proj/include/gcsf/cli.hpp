#pragma once

#include "gcsf/flow.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gcsf {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_monitor_failure = 1,
    exit_usage = 2,
    exit_runtime = 3,
};

/// Initial curve built from a descriptor:
///   circle:R
///   ellipse:a,b
///   fourier:[R,]m:amp[,m:amp...]   h = R (1 + sum amp cos(m theta + phase_m)),
///                                   phases drawn from the seed.
/// Throws std::invalid_argument on a malformed descriptor or when the
/// perturbation breaks convexity (h'' + h <= 0).
std::variant<CurvatureProfile, SupportProfile> parse_curve(const std::string& descriptor, std::size_t n,
                                                           std::uint64_t seed = 0);

/// Everything needed to reproduce one `run`.
struct RunSpec {
    std::string law = "power:1";
    std::string curve = "circle:1";
    std::size_t n = 256;
    double area_floor = 1e-3;
    std::optional<double> k_cap;
    std::uint64_t max_steps = 100'000'000;
    double cfl = 0.4;
    std::string formulation = "curvature";
    std::string spatial = "fourier";
    bool dealias = false;
    std::uint64_t snapshot_every = 0;
    double snapshot_area_ratio = 0.98;
    std::uint64_t seed = 0;
    bool allow_out_of_hypothesis = false;
};

nlohmann::json to_json(const RunSpec& spec);
RunSpec run_spec_from_json(const nlohmann::json& j);

/// Builds the flow configuration a RunSpec describes.
FlowConfig make_flow_config(const RunSpec& spec);

/// Entry point of the `gcsf` tool. Data goes to files and `out`, diagnostics
/// to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gcsf
