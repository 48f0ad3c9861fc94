// ipp — mission runner, benchmark sweep, heatmap rendering and state export.

#include "ipp/errors.hpp"
#include "ipp/harness.hpp"
#include "ipp/heatmap.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ipp;

namespace {

struct Options {
    std::string config;
    std::string kind = "continuous";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> planners;
    std::vector<std::string> protocols;
    std::string out = ".";
    std::optional<int> missions;
    std::optional<int> repeats;
    std::optional<int> parallel;
    bool timing = false;
    // render
    std::string input;
    std::vector<std::string> layers;
    int scale = 8;
    std::optional<int> steps;
    // export-state
    int step = 0;
};

MissionConfig load_mission(const Options& o) {
    MissionConfig c = o.config.empty() ? default_mission(parse_kind(o.kind)) : read_json_file(o.config).get<MissionConfig>();
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (!o.planners.empty()) {
        c.planner = parse_planner(o.planners.front());
    }
    if (o.timing) {
        c.record_timing = true;
    }
    c.validate();
    return c;
}

BenchmarkConfig load_benchmark(const Options& o) {
    BenchmarkConfig c;
    if (!o.config.empty()) {
        c = read_json_file(o.config).get<BenchmarkConfig>();
    } else {
        c.base = default_mission(parse_kind(o.kind));
    }
    if (o.seed) {
        c.master_seed = *o.seed;
    }
    if (!o.planners.empty()) {
        c.planners.clear();
        for (const auto& p : o.planners) {
            c.planners.push_back(parse_planner(p));
        }
    }
    if (!o.protocols.empty()) {
        c.protocols.clear();
        for (const auto& p : o.protocols) {
            c.protocols.push_back(parse_protocol(p));
        }
    }
    if (o.missions) {
        c.missions = *o.missions;
    }
    if (o.repeats) {
        c.repeats = *o.repeats;
    }
    if (o.parallel) {
        c.parallel = *o.parallel;
    }
    if (o.timing) {
        c.record_timing = true;
    }
    c.validate();
    return c;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw IoError("cannot write " + path.string());
    }
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
}

std::string metrics_line(const MetricsRecord& m) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "II=%.3f Unc=%.3f RMSE=%.3f MLL=%.3f mIoU=%.3f F1=%.3f", m.ii, m.unc, m.rmse,
                  m.mll, m.miou, m.f1);
    return buf;
}

int cmd_run(const Options& o) {
    const MissionConfig c = load_mission(o);
    MissionRunner runner(c);
    runner.run();
    const EpisodeLog log = runner.finish();
    const fs::path dir(o.out);
    make_dir(dir);
    write_text(dir / "episode.csv", episode_csv(log));
    write_text(dir / "metrics.csv", std::string(MetricsRecord::kCsvHeader) + '\n' + log.metrics.to_csv_row() + '\n');
    write_text(dir / "config.json", nlohmann::json(c).dump(2) + '\n');
    write_belief_csv(runner.belief(), dir / "belief.csv");
    if (!log.valid) {
        std::cerr << "mission invalid: " << log.error << '\n';
        return 2;
    }
    std::cout << planner_name(c.planner) << " actions=" << log.actions() << ' ' << metrics_line(log.metrics) << '\n';
    return 0;
}

int cmd_benchmark(const Options& o) {
    const BenchmarkConfig c = load_benchmark(o);
    const RunSummary summary = run_benchmark(c);
    write_results(summary, c, o.out);
    for (const auto& row : summary.rows) {
        std::cout << protocol_name(row.protocol) << ' ' << planner_name(row.planner) << " episodes=" << row.episodes
                  << " invalid=" << row.invalid << ' ' << metrics_line(row.mean) << '\n';
    }
    return 0;
}

/// Plain numeric CSV grid (one row per line); `#` lines are skipped.
std::pair<GridGeometry, std::vector<double>> read_grid_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError("cannot open " + path.string());
    }
    std::vector<double> values;
    int width = -1;
    int height = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        int count = 0;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw IngestError("non-numeric entry '" + cell + "' in " + path.string());
            }
            ++count;
        }
        if (width >= 0 && count != width) {
            throw IngestError("ragged rows in " + path.string());
        }
        width = count;
        ++height;
    }
    if (width < 2 || height < 2) {
        throw IngestError("grid in " + path.string() + " is smaller than 2x2");
    }
    return {GridGeometry(width, height), values};
}

std::vector<double> layer_values(const std::string& layer, const MissionRunner& runner,
                                 const std::vector<double>& prior_uncertainty) {
    const auto& field = runner.field();
    const auto n = static_cast<std::size_t>(field.geometry.cell_count());
    std::vector<double> v(n);
    if (layer == "truth") {
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = field.kind == FeatureKind::Continuous ? field.values[i]
                                                          : (field.label(i) - 1.0) / std::max(1, field.classes - 1);
        }
    } else if (layer == "belief") {
        if (const auto* g = std::get_if<GaussianMapBelief>(&runner.belief())) {
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = g->mean(static_cast<Eigen::Index>(i));
            }
        } else {
            const auto& o = std::get<OccupancyMapBelief>(runner.belief());
            for (std::size_t i = 0; i < n; ++i) {
                Eigen::Index k = 0;
                o.probs.row(static_cast<Eigen::Index>(i)).maxCoeff(&k);
                v[i] = static_cast<double>(k) / std::max(1, o.classes - 1);
            }
        }
    } else if (layer == "interest") {
        v = runner.state().interest;
    } else if (layer == "uncertainty") {
        const auto u = uncertainty_grid(runner.belief(), UncertaintyVariant::StateSpace);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = prior_uncertainty[i] > 0.0 ? u[i] / prior_uncertainty[i] : 0.0;
        }
    } else if (layer == "mask") {
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = runner.mask()[i] ? 1.0 : 0.0;
        }
    } else {
        throw ConfigError("unknown layer '" + layer + "' (truth|belief|interest|uncertainty|mask)");
    }
    return v;
}

int cmd_render(const Options& o) {
    const fs::path dir(o.out);
    make_dir(dir);
    if (!o.input.empty()) {
        const auto [geometry, values] = read_grid_csv(o.input);
        const fs::path target = dir / (fs::path(o.input).stem().string() + ".ppm");
        render_heatmap(values, geometry, target, {}, o.scale);
        std::cout << target.string() << '\n';
        return 0;
    }
    const MissionConfig c = load_mission(o);
    MissionRunner runner(c);
    const auto prior = uncertainty_grid(runner.belief(), UncertaintyVariant::StateSpace);
    int taken = 0;
    while (!runner.done() && (!o.steps || taken < *o.steps)) {
        runner.step();
        ++taken;
    }
    std::vector<std::string> layers = o.layers;
    if (layers.empty()) {
        layers = {"truth", "belief", "interest", "uncertainty"};
    }
    for (const auto& layer : layers) {
        const auto values = layer_values(layer, runner, prior);
        const fs::path target = dir / (layer + ".ppm");
        const bool overlay = layer != "truth" && layer != "mask";
        render_heatmap(values, runner.field().geometry, target,
                       overlay ? std::span<const Pose>(runner.path()) : std::span<const Pose>(), o.scale);
        std::cout << target.string() << '\n';
    }
    return 0;
}

int cmd_export_state(const Options& o) {
    const MissionConfig c = load_mission(o);
    MissionRunner runner(c);
    for (int i = 0; i < o.step && !runner.done(); ++i) {
        runner.step();
    }
    const fs::path dir(o.out);
    make_dir(dir);
    const fs::path target = dir / ("state_" + std::to_string(runner.log().actions()) + ".csv");
    export_state_raster(runner.state(), target);
    std::cout << target.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive informative path planning: missions, benchmarks, rendering"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--kind", o.kind, "continuous|discrete (used without --config)")
            ->check(CLI::IsMember({"continuous", "discrete"}));
        sub->add_option("--seed", o.seed, "seed (master seed for benchmark)");
        sub->add_option("--out", o.out, "output directory");
        sub->add_flag("--timing", o.timing, "record per-decision replanning time");
    };

    auto* run = app.add_subcommand("run", "single mission");
    common(run);
    run->add_option("--planner", o.planners, "greedy|mcts|cmaes|coverage")->expected(1);

    auto* bench = app.add_subcommand("benchmark", "Static/Varying sweep");
    common(bench);
    bench->add_option("--planner", o.planners, "planners, comma separated")->delimiter(',');
    bench->add_option("--protocol", o.protocols, "static|varying, comma separated")->delimiter(',');
    bench->add_option("--missions", o.missions, "missions per repeat");
    bench->add_option("--repeats", o.repeats, "repeats (seeds)");
    bench->add_option("--parallel", o.parallel, "worker threads");

    auto* render = app.add_subcommand("render", "field/belief panels to PPM");
    common(render);
    render->add_option("--planner", o.planners, "greedy|mcts|cmaes|coverage")->expected(1);
    render->add_option("--input", o.input, "render a plain CSV grid instead of a mission")->check(CLI::ExistingFile);
    render->add_option("--layer", o.layers, "truth|belief|interest|uncertainty|mask")->delimiter(',');
    render->add_option("--scale", o.scale, "pixels per cell")->check(CLI::PositiveNumber);
    render->add_option("--steps", o.steps, "stop the mission after this many actions");

    auto* state = app.add_subcommand("export-state", "unified state raster after a number of actions");
    common(state);
    state->add_option("--planner", o.planners, "greedy|mcts|cmaes|coverage")->expected(1);
    state->add_option("--step", o.step, "actions to execute first")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            return cmd_run(o);
        }
        if (*bench) {
            return cmd_benchmark(o);
        }
        if (*render) {
            return cmd_render(o);
        }
        return cmd_export_state(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const IngestError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
