// sidelink-sim: link-level BLER sweeps, the BLER(SNR, velocity) table they
// produce, and the system-level highway PRR campaign that consumes it.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "sidelink/cli/support.hpp"
#include "sidelink/common.hpp"

namespace fs = std::filesystem;
using namespace sidelink;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUserError = 2;
constexpr int kExitInterrupted = 3;
constexpr int kExitInternal = 4;

void on_sigint(int) { cli::interrupt_flag().store(true); }

uint64_t env_seed_or(uint64_t fallback) {
    if (const char* e = std::getenv("SIDELINK_SIM_SEED")) return std::strtoull(e, nullptr, 10);
    return fallback;
}

cli::RunConfig load_run_config(const std::string& config_path) {
    cli::RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw std::invalid_argument("cannot open config file: " + config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        cfg = cli::parse_config(ss.str());
    }
    return cfg;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw std::invalid_argument("empty list argument");
    return out;
}

// "v" or "lo:hi:step".
std::vector<double> parse_snr(const std::string& text) {
    if (text.find(':') == std::string::npos) return {std::stod(text)};
    double lo, hi, step;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
        throw std::invalid_argument("--snr expects a value or lo:hi:step");
    std::vector<double> out;
    for (double s = lo; s <= hi + 1e-9; s += step) out.push_back(s);
    return out;
}

void echo_effective_config(const cli::RunConfig& cfg, const std::string& out_dir) {
    std::ofstream f(fs::path(out_dir) / "effective_config.json");
    f << cli::dump_config(cfg);
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    uint64_t seed = 0;
    bool seed_set = false;
    unsigned workers = std::thread::hardware_concurrency();
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON run configuration");
    cmd->add_option("--out", args.out_dir, "output directory (default: current)");
    cmd->add_option("--seed", args.seed, "master seed (overrides config and SIDELINK_SIM_SEED)")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--workers", args.workers, "worker threads (1 = canonical serial run)");
}

cli::RunConfig resolve_config(const CommonArgs& args) {
    cli::RunConfig cfg = load_run_config(args.config_path);
    cfg.seed = env_seed_or(cfg.seed);
    if (args.seed_set) cfg.seed = args.seed;
    return cfg;
}

int cmd_ll_sweep(const CommonArgs& args, const std::string& snr_arg, const std::string& vel_arg,
                 int blocks_arg, int min_errors_arg) {
    cli::RunConfig cfg = resolve_config(args);
    if (!snr_arg.empty()) cfg.ll.snr_grid_db = parse_snr(snr_arg);
    if (!vel_arg.empty()) cfg.ll.velocities_kmh = parse_list(vel_arg);
    if (blocks_arg > 0) cfg.ll.blocks_per_point = blocks_arg;
    if (min_errors_arg > 0) cfg.ll.min_errors = min_errors_arg;
    cfg.ll.seed = cfg.seed;
    cfg.ll.workers = args.workers == 0 ? 1 : args.workers;
    cfg.ll.validate();

    fs::create_directories(args.out_dir);
    echo_effective_config(cfg, args.out_dir);

    ll::SweepResult sweep = ll::run_sweep(cfg.ll, &cli::interrupt_flag());
    bool interrupted = cli::interrupt_flag().load();

    std::vector<ll::BlerPoint> done;
    for (const auto& p : sweep.points)
        if (p.blocks > 0) done.push_back(p);

    if (interrupted) {
        cli::write_bler_csv((fs::path(args.out_dir) / "bler_points.partial.csv").string(), done);
        std::ofstream marker(fs::path(args.out_dir) / "resume.json");
        marker << "{\n  \"command\": \"ll-sweep\",\n  \"completed_points\": " << done.size()
               << ",\n  \"total_points\": " << sweep.points.size() << ",\n  \"seed\": " << cfg.seed
               << ",\n  \"config_hash\": \"" << cli::config_hash(cfg) << "\"\n}\n";
        std::cerr << "interrupted: partial results in " << args.out_dir << "\n";
        return kExitInterrupted;
    }

    l2s::L2sTable table = cli::make_table(cfg, sweep);
    l2s::save(table, (fs::path(args.out_dir) / "l2s_table.json").string());
    cli::write_bler_csv((fs::path(args.out_dir) / "bler_points.csv").string(), sweep.points);
    cli::write_bler_plot((fs::path(args.out_dir) / "bler_plot.dat").string(), cfg.ll, sweep);
    std::cout << "ll-sweep: " << sweep.points.size() << " points -> " << args.out_dir << "\n";
    return kExitOk;
}

int cmd_sl_prr(const CommonArgs& args, const std::string& table_path, const std::string& ivd_arg,
               const std::string& vel_arg, const std::string& period_arg, int drops_arg, bool verbose) {
    cli::RunConfig cfg = resolve_config(args);
    if (!ivd_arg.empty()) cfg.sweep.ivd_list = parse_list(ivd_arg);
    if (!vel_arg.empty()) cfg.sweep.velocity_list = parse_list(vel_arg);
    if (!period_arg.empty()) cfg.sweep.period_list = parse_list(period_arg);
    if (drops_arg > 0) cfg.sweep.n_drops = drops_arg;

    std::string tpath = table_path;
    if (tpath.empty()) tpath = (fs::path(args.out_dir) / "l2s_table.json").string();
    if (!fs::exists(tpath)) {
        std::cerr << "missing L2S table '" << tpath << "': run ll-sweep first or pass --table\n";
        return kExitUserError;
    }
    l2s::L2sTable table = l2s::load(tpath);
    for (double v : cfg.sweep.velocity_list) {
        double best = 1e18;
        for (double tv : table.velocities_kmh) best = std::min(best, std::abs(tv - v));
        if (best > 1e-6) {
            std::cerr << "velocity " << v << " km/h not in the table; available:";
            for (double tv : table.velocities_kmh) std::cerr << ' ' << tv;
            std::cerr << "\n";
            return kExitUserError;
        }
    }

    fs::create_directories(args.out_dir);
    echo_effective_config(cfg, args.out_dir);

    unsigned workers = args.workers == 0 ? 1 : args.workers;
    auto points = sl::prr_campaign(cfg.sl, table, cfg.sweep, cfg.seed, workers, &cli::interrupt_flag());
    bool interrupted = cli::interrupt_flag().load();

    if (interrupted) {
        std::vector<sl::SweepPoint> done;
        for (const auto& p : points)
            if (p.drops > 0) done.push_back(p);
        cli::write_prr_csv((fs::path(args.out_dir) / "prr_results.partial.csv").string(), done);
        std::ofstream marker(fs::path(args.out_dir) / "resume.json");
        marker << "{\n  \"command\": \"sl-prr\",\n  \"completed_points\": " << done.size()
               << ",\n  \"total_points\": " << points.size() << ",\n  \"seed\": " << cfg.seed << "\n}\n";
        std::cerr << "interrupted: partial results in " << args.out_dir << "\n";
        return kExitInterrupted;
    }

    cli::write_prr_csv((fs::path(args.out_dir) / "prr_results.csv").string(), points);
    cli::write_prr_plot((fs::path(args.out_dir) / "prr_plot.dat").string(), points);
    if (verbose) {
        // Per-receiver detail of the first drop of each point.
        std::ofstream f(fs::path(args.out_dir) / "prr_detail.json");
        f << "{\n  \"note\": \"per-rx detail, first drop per sweep point\",\n  \"points\": [\n";
        bool first_pt = true;
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            sl::ScenarioConfig c = cfg.sl;
            c.ivd_m = points[pi].ivd_m;
            c.velocity_kmh = points[pi].velocity_kmh;
            c.tx_period_hz = points[pi].period_hz;
            uint64_t drop_seed = derive_seed(cfg.seed, pi, 0, 0xd409);
            sl::Topology topo = sl::build_topology(c, drop_seed);
            int tagged = static_cast<int>(topo.vehicles.size() / 2);
            auto assignment = sl::assign_resources(topo, c.pool, {tagged});
            auto r = sl::prr_single_drop(topo, tagged, table, c, assignment, drop_seed);
            if (!first_pt) f << ",\n";
            first_pt = false;
            f << "    {\"ivd_m\": " << points[pi].ivd_m << ", \"velocity_kmh\": " << points[pi].velocity_kmh
              << ", \"period_hz\": " << points[pi].period_hz << ", \"prr\": " << r.prr << ", \"rx\": [";
            for (std::size_t i = 0; i < r.per_rx.size(); ++i) {
                const auto& rx = r.per_rx[i];
                if (i) f << ", ";
                f << "{\"id\": " << rx.rx_id << ", \"sinr_db\": " << rx.sinr_db << ", \"bler\": " << rx.bler
                  << ", \"threshold\": " << (rx.passed_threshold ? "true" : "false")
                  << ", \"random_test\": " << (rx.random_test_pass ? "true" : "false") << "}";
            }
            f << "]}";
        }
        f << "\n  ]\n}\n";
    }
    std::cout << "sl-prr: " << points.size() << " points -> " << args.out_dir << "\n";
    return kExitOk;
}

int cmd_table_inspect(const std::string& table_path, const std::string& query) {
    if (!fs::exists(table_path)) {
        std::cerr << "table file not found: " << table_path << "\n";
        return kExitUserError;
    }
    l2s::L2sTable table = l2s::load(table_path);
    std::cout << "snr_grid_db:";
    for (double s : table.snr_grid_db) std::cout << ' ' << s;
    std::cout << "\nvelocities_kmh:";
    for (double v : table.velocities_kmh) std::cout << ' ' << v;
    std::cout << "\nmetadata:\n";
    for (const auto& [k, v] : table.metadata) std::cout << "  " << k << ": " << v << "\n";
    auto bad = table.non_monotone_rows();
    if (bad.empty()) {
        std::cout << "monotonicity: all rows non-increasing\n";
    } else {
        std::cout << "monotonicity: VIOLATIONS in rows";
        for (auto r : bad) std::cout << ' ' << table.velocities_kmh[r] << "km/h";
        std::cout << "\n";
    }
    if (!query.empty()) {
        double snr, vel;
        if (std::sscanf(query.c_str(), "%lf,%lf", &snr, &vel) != 2) {
            std::cerr << "--query expects snr,velocity\n";
            return kExitUserError;
        }
        std::cout.precision(9);
        std::cout << "bler(" << snr << " dB, " << vel << " km/h) = " << l2s::lookup(table, snr, vel) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, on_sigint);
    std::signal(SIGTERM, on_sigint);

    CLI::App app{"C-V2X sidelink link-level and system-level simulator"};
    app.set_version_flag("--version", cli::kToolVersion);
    app.require_subcommand(1);

    CommonArgs ll_args, sl_args;
    std::string snr_arg, ll_vel_arg;
    int blocks_arg = 0, min_errors_arg = 0;
    auto* ll_cmd = app.add_subcommand("ll-sweep", "run the link-level BLER sweep and emit the L2S table");
    add_common(ll_cmd, ll_args);
    ll_cmd->add_option("--snr", snr_arg, "SNR grid: value or lo:hi:step");
    ll_cmd->add_option("--velocity", ll_vel_arg, "velocity list km/h, comma-separated");
    ll_cmd->add_option("--blocks", blocks_arg, "blocks per point");
    ll_cmd->add_option("--min-errors", min_errors_arg, "early-stop error count");

    std::string table_arg, ivd_arg, sl_vel_arg, period_arg;
    int drops_arg = 0;
    bool verbose = false;
    auto* sl_cmd = app.add_subcommand("sl-prr", "run the system-level PRR campaign from an L2S table");
    add_common(sl_cmd, sl_args);
    sl_cmd->add_option("--table", table_arg, "L2S table JSON (default: <out>/l2s_table.json)");
    sl_cmd->add_option("--ivd", ivd_arg, "IVD list in metres, comma-separated");
    sl_cmd->add_option("--velocity", sl_vel_arg, "velocity list km/h, comma-separated");
    sl_cmd->add_option("--period", period_arg, "transmission period list in Hz, comma-separated");
    sl_cmd->add_option("--drops", drops_arg, "drops per sweep point");
    sl_cmd->add_flag("--verbose", verbose, "emit per-receiver detail JSON");

    std::string inspect_path, query;
    auto* ti_cmd = app.add_subcommand("table-inspect", "print table grids, metadata and monotonicity report");
    ti_cmd->add_option("table", inspect_path, "L2S table JSON path")->required();
    ti_cmd->add_option("--query", query, "interpolate: snr,velocity");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUserError;
    }

    try {
        if (ll_cmd->parsed()) return cmd_ll_sweep(ll_args, snr_arg, ll_vel_arg, blocks_arg, min_errors_arg);
        if (sl_cmd->parsed())
            return cmd_sl_prr(sl_args, table_arg, ivd_arg, sl_vel_arg, period_arg, drops_arg, verbose);
        if (ti_cmd->parsed()) return cmd_table_inspect(inspect_path, query);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUserError;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUserError;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
