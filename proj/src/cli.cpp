#include "gcsf/cli.hpp"

#include "gcsf/diagnostics.hpp"
#include "gcsf/errors.hpp"
#include "gcsf/io.hpp"
#include "gcsf/oracle.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace gcsf {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("bad number '" + s + "' in " + what);
    return v;
}

SpatialScheme parse_spatial(const std::string& s) {
    if (s == "fourier") return SpatialScheme::fourier;
    if (s == "fd4") return SpatialScheme::fd4;
    throw std::invalid_argument("unknown spatial scheme '" + s + "' (expected fourier or fd4)");
}

struct RunOutcome {
    int code = exit_ok;
    std::string line;
};

int severity(int code) {
    switch (code) {
        case exit_ok:
            return 0;
        case exit_monitor_failure:
            return 1;
        case exit_usage:
            return 2;
        default:
            return 3;
    }
}

// Runs one spec, writes its outputs, and returns the exit code it earns.
RunOutcome execute_run(const RunSpec& spec, const std::filesystem::path& dir, bool write_snapshots,
                       std::ostream* out, std::ostream& err) {
    RunOutcome res;
    FlowConfig cfg = [&] {
        try {
            return make_flow_config(spec);
        } catch (const ConvexityLossError& e) {
            throw std::invalid_argument(std::string("initial curve is not convex: ") + e.what());
        }
    }();
    Trajectory traj;
    try {
        traj = run(cfg);
    } catch (const HypothesisError& e) {
        err << "error: " << e.what() << " (pass --allow-out-of-hypothesis to run anyway)\n";
        res.code = exit_runtime;
        res.line = "hypothesis violation";
        return res;
    }
    const auto monitors = run_all_monitors(traj, cfg.law);
    emit_timeseries(traj, monitors, to_json(spec), dir, write_snapshots);

    std::ostringstream line;
    line << "stop=" << to_string(traj.stop_reason) << " t=" << format_number(traj.final().t())
         << " steps=" << traj.stats.accepted;
    if (traj.omega) {
        line << " omega=[" << format_number(traj.omega->omega_lo) << ", " << format_number(traj.omega->omega_hi)
             << "]";
    }
    res.line = line.str();
    if (out) {
        *out << "law: " << traj.law_label << "\n"
             << "stop_reason: " << to_string(traj.stop_reason) << " (" << traj.stop_detail << ")\n"
             << "final_t: " << format_number(traj.final().t()) << "\n"
             << "steps: " << traj.stats.accepted << " accepted, " << traj.stats.rejected << " rejected\n";
        if (traj.omega) {
            *out << "omega: lo=" << format_number(traj.omega->omega_lo)
                 << " mid=" << format_number(traj.omega->omega_mid)
                 << " hi=" << format_number(traj.omega->omega_hi) << "\n";
        }
        *out << "\n" << format_monitor_table(monitors);
    }
    if (traj.stop_reason == StopReason::convexity_loss) {
        err << "error: convexity lost: " << traj.stop_detail << "\n";
        res.code = exit_runtime;
    } else if (!monitors_pass(monitors)) {
        res.code = exit_monitor_failure;
    }
    return res;
}

void add_run_options(CLI::App* cmd, RunSpec& spec) {
    cmd->add_option("--law", spec.law, "speed law, e.g. power:1 or power:1/3")->capture_default_str();
    cmd->add_option("--n", spec.n, "grid size (power of two >= 32)")->capture_default_str();
    cmd->add_option("--area-floor", spec.area_floor, "stop when A <= this fraction of A(0)")->capture_default_str();
    cmd->add_option("--k-cap", spec.k_cap, "stop when k_max reaches this value (default 1e6 k_max(0))");
    cmd->add_option("--max-steps", spec.max_steps, "step limit")->capture_default_str();
    cmd->add_option("--cfl", spec.cfl, "fraction of the explicit stability bound")->capture_default_str();
    cmd->add_option("--spatial", spec.spatial, "fourier or fd4")->capture_default_str();
    cmd->add_flag("--dealias", spec.dealias, "2/3-rule filter on Phi''");
    cmd->add_option("--snapshot-every", spec.snapshot_every, "snapshot every N steps (0: off)")
        ->capture_default_str();
    cmd->add_option("--snapshot-area-ratio", spec.snapshot_area_ratio,
                    "snapshot when A falls by this factor (0: off)")
        ->capture_default_str();
    cmd->add_flag("--allow-out-of-hypothesis", spec.allow_out_of_hypothesis,
                  "run laws that fail (H1)/(H2), e.g. p < 1");
}

}  // namespace

std::variant<CurvatureProfile, SupportProfile> parse_curve(const std::string& descriptor, std::size_t n,
                                                           std::uint64_t seed) {
    const auto colon = descriptor.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("curve descriptor needs a ':' : " + descriptor);
    const std::string kind = descriptor.substr(0, colon);
    const std::string args = descriptor.substr(colon + 1);
    const AngleGrid grid(n);
    if (kind == "circle") {
        return circle_profile(to_double(args, descriptor), grid);
    }
    if (kind == "ellipse") {
        const auto parts = split(args, ',');
        if (parts.size() != 2) throw std::invalid_argument("ellipse descriptor is ellipse:a,b");
        const double a = to_double(parts[0], descriptor), b = to_double(parts[1], descriptor);
        return ellipse_profile(std::max(a, b), std::min(a, b), grid);
    }
    if (kind == "fourier") {
        double R = 1.0;
        std::vector<std::pair<int, double>> modes;
        const auto parts = split(args, ',');
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const auto c = parts[i].find(':');
            if (c == std::string::npos) {
                if (i != 0) throw std::invalid_argument("fourier descriptor: radius must come first");
                R = to_double(parts[i], descriptor);
                continue;
            }
            const double m = to_double(parts[i].substr(0, c), descriptor);
            if (m < 0 || m != std::floor(m) || m > static_cast<double>(n / 3)) {
                throw std::invalid_argument("fourier mode must be an integer in [0, n/3]");
            }
            modes.emplace_back(static_cast<int>(m), to_double(parts[i].substr(c + 1), descriptor));
        }
        if (!(R > 0.0)) throw std::invalid_argument("fourier radius must be positive");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        std::vector<double> h(n, R);
        for (const auto& [m, amp] : modes) {
            const double ph = phase(rng);
            for (std::size_t j = 0; j < n; ++j) h[j] += R * amp * std::cos(m * grid.theta(j) + ph);
        }
        try {
            return SupportProfile(grid, std::move(h));
        } catch (const ConvexityLossError& e) {
            throw std::invalid_argument("fourier amplitudes too large, curve is not convex: " +
                                        std::string(e.what()));
        }
    }
    throw std::invalid_argument("unknown curve kind '" + kind + "' (expected circle, ellipse or fourier)");
}

nlohmann::json to_json(const RunSpec& s) {
    return {{"subcommand", "run"},
            {"law", s.law},
            {"curve", s.curve},
            {"n", s.n},
            {"area_floor", s.area_floor},
            {"k_cap", s.k_cap ? nlohmann::json(*s.k_cap) : nlohmann::json(nullptr)},
            {"max_steps", s.max_steps},
            {"cfl", s.cfl},
            {"scheme", s.formulation},
            {"spatial", s.spatial},
            {"dealias", s.dealias},
            {"snapshot_every", s.snapshot_every},
            {"snapshot_area_ratio", s.snapshot_area_ratio},
            {"seed", s.seed},
            {"allow_out_of_hypothesis", s.allow_out_of_hypothesis}};
}

RunSpec run_spec_from_json(const nlohmann::json& j) {
    RunSpec s;
    s.law = j.at("law").get<std::string>();
    s.curve = j.at("curve").get<std::string>();
    s.n = j.at("n").get<std::size_t>();
    s.area_floor = j.at("area_floor").get<double>();
    if (!j.at("k_cap").is_null()) s.k_cap = j.at("k_cap").get<double>();
    s.max_steps = j.at("max_steps").get<std::uint64_t>();
    s.cfl = j.at("cfl").get<double>();
    s.formulation = j.at("scheme").get<std::string>();
    s.spatial = j.at("spatial").get<std::string>();
    s.dealias = j.at("dealias").get<bool>();
    s.snapshot_every = j.at("snapshot_every").get<std::uint64_t>();
    s.snapshot_area_ratio = j.at("snapshot_area_ratio").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.allow_out_of_hypothesis = j.at("allow_out_of_hypothesis").get<bool>();
    return s;
}

FlowConfig make_flow_config(const RunSpec& spec) {
    FlowConfig cfg(parse_law(spec.law), parse_curve(spec.curve, spec.n, spec.seed));
    cfg.control.c_cfl = spec.cfl;
    cfg.control.area_fraction = spec.area_floor;
    cfg.control.k_cap = spec.k_cap;
    cfg.control.max_steps = spec.max_steps;
    cfg.control.snapshot_every = spec.snapshot_every;
    cfg.control.snapshot_area_ratio = spec.snapshot_area_ratio;
    cfg.control.scheme = parse_spatial(spec.spatial);
    cfg.control.dealias = spec.dealias;
    cfg.formulation = parse_formulation(spec.formulation);
    cfg.require_hypotheses = !spec.allow_out_of_hypothesis;
    return cfg;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator for the generalized curve shortening flow v = G(k) k", "gcsf"};
    app.require_subcommand(1);

    // run
    RunSpec spec;
    std::string out_dir = "out";
    std::string replay;
    bool no_snapshots = false;
    auto* run_cmd = app.add_subcommand("run", "evolve one curve and check every monitor");
    add_run_options(run_cmd, spec);
    run_cmd->add_option("--curve", spec.curve, "circle:R | ellipse:a,b | fourier:[R,]m:amp,...")
        ->capture_default_str();
    run_cmd->add_option("--scheme", spec.formulation, "curvature, support or both")->capture_default_str();
    run_cmd->add_option("--seed", spec.seed, "seed for fourier phases")->capture_default_str();
    run_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    run_cmd->add_option("--replay", replay, "rerun the config echoed in a summary.json");
    run_cmd->add_flag("--no-snapshots", no_snapshots, "skip snap_<i>.csv files");

    // containment
    RunSpec cont;
    std::string outer = "circle:2", inner = "circle:1";
    std::string cont_dir = "out";
    auto* cont_cmd = app.add_subcommand("containment", "co-evolve two curves and track support ordering");
    add_run_options(cont_cmd, cont);
    cont_cmd->add_option("--outer", outer, "outer curve descriptor")->capture_default_str();
    cont_cmd->add_option("--inner", inner, "inner curve descriptor")->capture_default_str();
    cont_cmd->add_option("--seed", cont.seed, "seed for fourier phases")->capture_default_str();
    cont_cmd->add_option("--out", cont_dir, "output directory")->capture_default_str();

    // sweep
    RunSpec sweep_base;
    std::vector<std::string> sweep_laws{"power:1"}, sweep_curves{"ellipse:2,1"};
    std::vector<std::size_t> sweep_ns{256};
    std::string sweep_dir = "out";
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep_cmd = app.add_subcommand("sweep", "run the product of laws x curves x grid sizes in parallel");
    add_run_options(sweep_cmd, sweep_base);
    sweep_cmd->get_option("--law")->description("ignored; use --laws");
    sweep_cmd->add_option("--laws", sweep_laws, "speed laws")->delimiter(';')->capture_default_str();
    sweep_cmd->add_option("--curves", sweep_curves, "curve descriptors")->delimiter(';')->capture_default_str();
    sweep_cmd->add_option("--ns", sweep_ns, "grid sizes")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--scheme", sweep_base.formulation, "curvature, support or both")
        ->capture_default_str();
    sweep_cmd->add_option("--seed", sweep_base.seed, "seed for fourier phases")->capture_default_str();
    sweep_cmd->add_option("--threads", threads, "worker threads")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_dir, "output root; one subdirectory per run")->capture_default_str();

    // check-law
    std::string check_law = "power:1";
    std::vector<double> range{0.1, 100.0};
    int probes = 256;
    auto* check_cmd = app.add_subcommand("check-law", "probe (H1)/(H2) for a speed law");
    check_cmd->add_option("--law", check_law, "speed law")->capture_default_str();
    check_cmd->add_option("--range", range, "probe range lo,hi")->delimiter(',')->expected(2)->capture_default_str();
    check_cmd->add_option("--probes", probes, "number of log-spaced probes")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return exit_ok;
        const CLI::App* failing = &app;
        for (const auto* sub : app.get_subcommands()) failing = sub;
        err << failing->help();
        return exit_usage;
    }

    try {
        if (*run_cmd) {
            if (!replay.empty()) {
                std::ifstream is(replay);
                if (!is) throw std::invalid_argument("cannot read " + replay);
                const auto doc = nlohmann::json::parse(is);
                spec = run_spec_from_json(doc.contains("config") ? doc.at("config") : doc);
            }
            return execute_run(spec, out_dir, !no_snapshots, &out, err).code;
        }
        if (*cont_cmd) {
            const auto to_support = [&](const std::string& d) {
                auto v = parse_curve(d, cont.n, cont.seed);
                if (auto* kp = std::get_if<CurvatureProfile>(&v)) return support_from_curvature(*kp);
                return std::get<SupportProfile>(v);
            };
            const SupportProfile ho = to_support(outer), hi = to_support(inner);
            const SpeedLaw law = parse_law(cont.law);
            RunSpec echo = cont;
            echo.curve = inner;
            RunControl ctl = make_flow_config(echo).control;
            if (!cont.allow_out_of_hypothesis) {
                const double kmin = std::min(k_from_support(ho).k_min(), k_from_support(hi).k_min());
                const double kmax = std::max(k_from_support(ho).k_max(), k_from_support(hi).k_max());
                const auto rep = check_hypotheses(law, 0.5 * kmin, ctl.k_cap.value_or(1e6 * kmax));
                if (!rep.all_ok()) {
                    err << "error: speed law " << law.label()
                        << " fails the hypotheses (pass --allow-out-of-hypothesis to run anyway)\n";
                    return exit_runtime;
                }
            }
            const ContainmentResult res = containment_run(ho, hi, law, ctl);
            std::error_code ec;
            std::filesystem::create_directories(cont_dir, ec);
            if (ec) throw IoError("cannot create " + cont_dir + ": " + ec.message());
            const auto csv = std::filesystem::path(cont_dir) / "containment.csv";
            std::ofstream os(csv);
            if (!os) throw IoError("cannot open " + csv.string());
            os << "t,min_gap\n";
            for (std::size_t i = 0; i < res.times.size(); ++i) {
                os << format_number(res.times[i]) << ',' << format_number(res.min_gap[i]) << '\n';
            }
            if (!os) throw IoError("write to " + csv.string() + " failed");
            auto cfg_json = to_json(echo);
            cfg_json["subcommand"] = "containment";
            cfg_json["outer"] = outer;
            cfg_json["inner"] = inner;
            cfg_json.erase("curve");
            const nlohmann::json summary = {{"config", cfg_json},
                                            {"contained", res.contained},
                                            {"tolerance", res.tolerance},
                                            {"stop_reason", to_string(res.stop_reason)},
                                            {"stopped_by", res.stopped_by},
                                            {"min_gap", *std::min_element(res.min_gap.begin(), res.min_gap.end())},
                                            {"snapshots", res.times.size()}};
            std::ofstream js(std::filesystem::path(cont_dir) / "summary.json");
            js << summary.dump(2) << '\n';
            if (!js) throw IoError("cannot write summary.json in " + cont_dir);
            out << "contained: " << (res.contained ? "yes" : "no") << "\n"
                << "min_gap: " << format_number(summary.at("min_gap").get<double>()) << "\n"
                << "stop_reason: " << to_string(res.stop_reason) << " (" << res.stopped_by << ")\n";
            if (res.stop_reason == StopReason::convexity_loss) return exit_runtime;
            return res.contained ? exit_ok : exit_monitor_failure;
        }
        if (*sweep_cmd) {
            std::vector<RunSpec> specs;
            for (const auto& law : sweep_laws) {
                for (const auto& curve : sweep_curves) {
                    for (std::size_t n : sweep_ns) {
                        RunSpec s = sweep_base;
                        s.law = law;
                        s.curve = curve;
                        s.n = n;
                        specs.push_back(s);
                    }
                }
            }
            std::vector<RunOutcome> outcomes(specs.size());
            std::atomic<std::size_t> next{0};
            std::mutex err_mutex;
            auto worker = [&] {
                for (std::size_t i = next++; i < specs.size(); i = next++) {
                    std::ostringstream local_err;
                    try {
                        outcomes[i] = execute_run(specs[i], std::filesystem::path(sweep_dir) / ("run_" + std::to_string(i)),
                                                  true, nullptr, local_err);
                    } catch (const std::invalid_argument& e) {
                        outcomes[i] = {exit_usage, std::string("config error: ") + e.what()};
                    } catch (const std::exception& e) {
                        outcomes[i] = {exit_runtime, std::string("runtime error: ") + e.what()};
                    }
                    std::lock_guard lock(err_mutex);
                    err << local_err.str();
                }
            };
            std::vector<std::thread> pool;
            const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(specs.size())));
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
            int worst = exit_ok;
            for (std::size_t i = 0; i < specs.size(); ++i) {
                out << "run_" << i << "  " << specs[i].law << "  " << specs[i].curve << "  n=" << specs[i].n
                    << "  exit=" << outcomes[i].code << "  " << outcomes[i].line << "\n";
                if (severity(outcomes[i].code) > severity(worst)) worst = outcomes[i].code;
            }
            return worst;
        }
        if (*check_cmd) {
            const SpeedLaw law = parse_law(check_law);
            if (!(range[0] > 0.0 && range[0] < range[1])) throw std::invalid_argument("--range needs 0 < lo < hi");
            if (probes < 16) throw std::invalid_argument("--probes must be at least 16");
            const HypothesisReport rep = check_hypotheses(law, range[0], range[1], probes);
            out << "law: " << law.label() << "\n"
                << "range: [" << format_number(rep.x_lo) << ", " << format_number(rep.x_hi) << "]\n"
                << "h1_ok: " << std::boolalpha << rep.h1_ok << "\n"
                << "h2_convexity_ok: " << rep.h2_convexity_ok << "\n"
                << "h2_growth_ok: " << rep.h2_growth_ok << "\n"
                << "witness_C0: " << (rep.witness_C0 ? format_number(*rep.witness_C0) : std::string("none")) << "\n"
                << "worst_violation: " << format_number(rep.worst_violation) << "\n"
                << "witness_abscissa: "
                << (rep.witness_abscissa ? format_number(*rep.witness_abscissa) : std::string("none")) << "\n";
            return rep.all_ok() ? exit_ok : exit_monitor_failure;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: bad replay file: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_usage;
}

}  // namespace gcsf
