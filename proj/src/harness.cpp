#include "ipp/harness.hpp"

#include "ipp/errors.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>
#include <tuple>

namespace ipp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

MissionConfig validated(MissionConfig c) {
    c.validate();
    return c;
}

TerrainField build_field(const MissionConfig& c) {
    if (!c.raster.empty()) {
        TerrainField f = load_raster(c.raster, c.kind);
        if (c.kind == FeatureKind::Discrete && f.classes != c.classes) {
            throw ConfigError("raster has " + std::to_string(f.classes) + " classes but the mission expects " +
                              std::to_string(c.classes));
        }
        return f;
    }
    const std::uint64_t seed = derive_seed(c.seed, 1);
    return c.kind == FeatureKind::Continuous ? generate_continuous_field(seed, c.grid, c.field_correlation)
                                             : generate_discrete_field(seed, c.grid, c.classes, c.field_correlation);
}

MapBelief build_belief(const MissionConfig& c, const GridGeometry& g) {
    if (c.kind == FeatureKind::Continuous) {
        return gp_init(g, c.kernel, c.prior_mean, c.noise_variance);
    }
    return occ_init(g, c.classes, c.clamp);
}

Pose pick_start(const MissionConfig& c, const GridGeometry& g) {
    if (c.start) {
        if (!g.contains(c.start->x, c.start->y)) {
            throw ConfigError("start pose outside the grid");
        }
        return *c.start;
    }
    std::mt19937_64 rng(derive_seed(c.seed, 2));
    std::uniform_int_distribution<int> col(0, g.width - 1);
    std::uniform_int_distribution<int> row(0, g.height - 1);
    const int x = col(rng);
    const int y = row(rng);
    return {x, y};
}

}  // namespace

UncertaintyTrace EpisodeLog::trace() const {
    UncertaintyTrace t;
    t.reserve(steps.size());
    for (const auto& s : steps) {
        t.push_back({s.consumed_budget, s.normalized_uncertainty});
    }
    return t;
}

double EpisodeLog::mean_replan_seconds() const {
    if (steps.size() < 2) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 1; i < steps.size(); ++i) {
        total += steps[i].replan_seconds;
    }
    return total / static_cast<double>(steps.size() - 1);
}

MissionRunner::MissionRunner(MissionConfig config)
    : config_(validated(std::move(config))),
      field_(build_field(config_)),
      mask_(interest_mask(field_, config_.interest)),
      belief_(build_belief(config_, field_.geometry)),
      prior_uncertainty_(uncertainty_grid(belief_, UncertaintyVariant::StateSpace)),
      budget_(config_.budget, config_.planner_config.action_cost),
      pose_(pick_start(config_, field_.geometry)),
      sensor_rng_(derive_seed(config_.seed, 3)),
      planner_seed_(derive_seed(config_.seed, 4)) {
    if (config_.kind == FeatureKind::Discrete) {
        confusion_ = config_.confusion_matrix();
        config_.planner_config.lookahead.confusion = confusion_;
    }
    config_.planner_config.lookahead.fov = config_.fov;
    if (config_.planner == PlannerKind::Coverage) {
        coverage_ = coverage_plan(field_.geometry, config_.effective_coverage_step(), pose_, config_.budget,
                                  config_.planner_config.action_cost);
    }
    path_.push_back(pose_);
    log_.config = config_;
    StepRecord first;
    first.pose = pose_;
    try {
        first.normalized_uncertainty = normalized_uncertainty();
    } catch (const MetricError& e) {
        aborted_ = true;
        log_.valid = false;
        log_.error = e.what();
    }
    log_.steps.push_back(first);
}

double MissionRunner::normalized_uncertainty() const {
    double now = 0.0;
    double base = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < mask_.size(); ++i) {
        if (mask_[i]) {
            now += cell_uncertainty(belief_, i, UncertaintyVariant::StateSpace);
            base += prior_uncertainty_[i];
            any = true;
        }
    }
    if (!any) {
        throw MetricError("area of interest is empty");
    }
    if (config_.kind == FeatureKind::Continuous && config_.unc_normalization == TraceNormalization::LogTrace) {
        return std::log(now) / std::log(base);
    }
    return now / base;
}

Hyperparams MissionRunner::hyperparams() const {
    return {config_.interest, config_.kind == FeatureKind::Continuous ? config_.kernel.lengthscale : 0.0};
}

UnifiedState MissionRunner::state() const {
    return assemble_state(belief_, config_.interest, pose_, budget_.remaining(), hyperparams());
}

bool MissionRunner::done() const {
    if (aborted_ || finished_ || !budget_.can_act()) {
        return true;
    }
    if (config_.planner == PlannerKind::Coverage) {
        return static_cast<std::size_t>(log_.actions()) >= coverage_.size();
    }
    return false;
}

std::optional<Action> MissionRunner::choose_action() {
    const int index = log_.actions();
    if (config_.planner == PlannerKind::Coverage) {
        return coverage_[static_cast<std::size_t>(index)];
    }
    PlannerConfig pc = config_.planner_config;
    pc.seed = derive_seed(planner_seed_, static_cast<std::uint64_t>(index));
    const UnifiedState s = state();
    switch (config_.planner) {
        case PlannerKind::Greedy: return greedy_plan(s, belief_, config_.interest, pc);
        case PlannerKind::Mcts: return mcts_plan(s, belief_, config_.interest, pc);
        case PlannerKind::Cmaes: return cmaes_plan(s, belief_, config_.interest, pc);
        case PlannerKind::Coverage: break;
    }
    return std::nullopt;
}

void MissionRunner::step() {
    if (done()) {
        return;
    }
    try {
        const auto t0 = std::chrono::steady_clock::now();
        const std::optional<Action> action = choose_action();
        const auto t1 = std::chrono::steady_clock::now();
        if (!action) {
            finished_ = true;
            return;
        }
        pose_ = apply_action(pose_, *action, field_.geometry);
        budget_.spend();
        path_.push_back(pose_);

        const int t = log_.actions() + 1;
        const auto h0 = uncertainty_grid(belief_, UncertaintyVariant::Reward);
        const auto p0 = interest_grid(belief_, config_.interest);
        if (auto* g = std::get_if<GaussianMapBelief>(&belief_)) {
            ContinuousSensorModel model{config_.sensor_noise_std};
            gp_fuse_in_place(*g, sense_continuous(field_, pose_, config_.fov, model, sensor_rng_, t));
        } else {
            auto& o = std::get<OccupancyMapBelief>(belief_);
            occ_fuse_in_place(o, sense_semantic(field_, pose_, config_.fov, *confusion_, sensor_rng_, t), *confusion_);
        }
        const auto h1 = uncertainty_grid(belief_, UncertaintyVariant::Reward);

        StepRecord rec;
        rec.step = t;
        rec.pose = pose_;
        rec.action = action;
        rec.consumed_budget = budget_.consumed();
        rec.reward = weighted_reduction(h0, h1, p0);
        rec.normalized_uncertainty = normalized_uncertainty();
        rec.replan_seconds = config_.record_timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
        log_.steps.push_back(rec);
    } catch (const NumericalError& e) {
        aborted_ = true;
        log_.valid = false;
        log_.error = e.what();
    }
}

void MissionRunner::run() {
    while (!done()) {
        step();
    }
}

EpisodeLog MissionRunner::finish() {
    if (!finished_ && log_.valid) {
        finished_ = true;
        MetricsRecord m;
        try {
            m.ii = ii_metric(log_.trace(), config_.budget);
            m.unc = 100.0 * normalized_uncertainty();
            if (const auto* g = std::get_if<GaussianMapBelief>(&belief_)) {
                m.rmse = rmse_metric(*g, field_, mask_);
                m.mll = mll_metric(*g, field_, mask_);
                m.miou = kNaN;
                m.f1 = kNaN;
            } else {
                const auto scores = classification_metrics(std::get<OccupancyMapBelief>(belief_), field_, mask_);
                m.rmse = kNaN;
                m.mll = kNaN;
                m.miou = scores.miou;
                m.f1 = scores.f1;
            }
            log_.metrics = m;
        } catch (const MetricError& e) {
            log_.valid = false;
            log_.error = e.what();
        }
    }
    finished_ = true;
    return log_;
}

EpisodeLog run_mission(const MissionConfig& config) {
    MissionRunner runner(config);
    runner.run();
    return runner.finish();
}

std::string episode_csv(const EpisodeLog& log) {
    std::string out = "step,pose_x,pose_y,action,consumed_budget,reward,normalized_uncertainty";
    const bool timing = log.config.record_timing;
    out += timing ? ",replan_s\n" : "\n";
    for (const auto& s : log.steps) {
        out += std::to_string(s.step) + ',' + std::to_string(s.pose.x) + ',' + std::to_string(s.pose.y) + ',' +
               (s.action ? action_name(*s.action) : "-") + ',' + fmt(s.consumed_budget) + ',' + fmt(s.reward) + ',' +
               fmt(s.normalized_uncertainty);
        if (timing) {
            out += ',' + fmt(s.replan_seconds, "%.6g");
        }
        out += '\n';
    }
    return out;
}

MissionConfig benchmark_mission(const BenchmarkConfig& config, Protocol protocol, int repeat, int index,
                                PlannerKind planner) {
    MissionConfig c = config.base;
    c.planner = planner;
    c.record_timing = config.record_timing;
    c.start.reset();
    c.seed = derive_seed(config.master_seed, protocol == Protocol::Static ? 1 : 2, static_cast<std::uint64_t>(repeat),
                         static_cast<std::uint64_t>(index));
    std::mt19937_64 rng(derive_seed(c.seed, 99));
    auto uniform = [&](Range r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); };

    if (c.raster.empty()) {
        c.field_correlation = uniform(config.field_correlation_range);
    }
    if (c.kind == FeatureKind::Continuous) {
        double threshold = config.static_threshold;
        double lengthscale = config.static_lengthscale;
        if (protocol == Protocol::Varying) {
            threshold = uniform(config.threshold_range);
            lengthscale = uniform(config.lengthscale_range);
        }
        c.interest = ContinuousInterest{threshold, 0.0, 1.0};
        c.kernel.lengthscale = lengthscale;
    } else {
        std::set<int> classes = config.static_classes;
        if (protocol == Protocol::Varying) {
            std::bernoulli_distribution coin(0.5);
            do {
                classes.clear();
                for (int k = 1; k <= c.classes; ++k) {
                    if (coin(rng)) {
                        classes.insert(k);
                    }
                }
            } while (classes.empty());
        }
        c.interest = DiscreteInterest{classes, c.classes};
    }
    return c;
}

std::vector<SummaryRow> aggregate(std::vector<EpisodeOutcome> outcomes, const std::vector<PlannerKind>& planners,
                                  const std::vector<Protocol>& protocols) {
    std::sort(outcomes.begin(), outcomes.end(), [](const EpisodeOutcome& a, const EpisodeOutcome& b) {
        return std::tie(a.protocol, a.planner, a.repeat, a.mission) < std::tie(b.protocol, b.planner, b.repeat, b.mission);
    });
    auto fields = [](MetricsRecord& m) { return std::array<double*, 6>{&m.ii, &m.unc, &m.rmse, &m.mll, &m.miou, &m.f1}; };

    std::vector<SummaryRow> rows;
    for (Protocol protocol : protocols) {
        for (PlannerKind planner : planners) {
            SummaryRow row;
            row.planner = planner;
            row.protocol = protocol;
            std::map<int, std::pair<MetricsRecord, int>> per_repeat;
            MetricsRecord total{};
            double replan = 0.0;
            for (const auto& o : outcomes) {
                if (o.planner != planner || o.protocol != protocol) {
                    continue;
                }
                if (!o.valid) {
                    ++row.invalid;
                    continue;
                }
                ++row.episodes;
                MetricsRecord m = o.metrics;
                auto& [rep_sum, rep_count] = per_repeat.try_emplace(o.repeat, MetricsRecord{}, 0).first->second;
                const auto src = fields(m);
                const auto dst = fields(total);
                const auto rep = fields(rep_sum);
                for (std::size_t i = 0; i < src.size(); ++i) {
                    *dst[i] += *src[i];
                    *rep[i] += *src[i];
                }
                ++rep_count;
                replan += o.mean_replan_seconds;
            }
            const double n = static_cast<double>(row.episodes);
            const auto mean = fields(row.mean);
            const auto sd = fields(row.stddev);
            const auto tot = fields(total);
            for (std::size_t i = 0; i < mean.size(); ++i) {
                *mean[i] = row.episodes > 0 ? *tot[i] / n : kNaN;
                *sd[i] = 0.0;
            }
            if (per_repeat.size() >= 2) {
                std::vector<MetricsRecord> means;
                for (auto& [r, entry] : per_repeat) {
                    MetricsRecord m = entry.first;
                    for (double* v : fields(m)) {
                        *v /= entry.second;
                    }
                    means.push_back(m);
                }
                for (std::size_t i = 0; i < mean.size(); ++i) {
                    double mu = 0.0;
                    for (auto& m : means) {
                        mu += *fields(m)[i];
                    }
                    mu /= static_cast<double>(means.size());
                    double ss = 0.0;
                    for (auto& m : means) {
                        const double d = *fields(m)[i] - mu;
                        ss += d * d;
                    }
                    *sd[i] = std::sqrt(ss / static_cast<double>(means.size() - 1));
                }
            }
            row.replan_seconds = row.episodes > 0 ? replan / n : kNaN;
            rows.push_back(row);
        }
    }
    return rows;
}

RunSummary run_benchmark(const BenchmarkConfig& config) {
    config.validate();
    struct Task {
        Protocol protocol;
        int repeat;
        int mission;
        PlannerKind planner;
    };
    std::vector<Task> tasks;
    for (Protocol p : config.protocols) {
        for (int r = 0; r < config.repeats; ++r) {
            for (int m = 0; m < config.missions; ++m) {
                for (PlannerKind k : config.planners) {
                    tasks.push_back({p, r, m, k});
                }
            }
        }
    }

    RunSummary summary;
    summary.record_timing = config.record_timing;
    summary.logs.resize(tasks.size());
    summary.outcomes.resize(tasks.size());

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr failure;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) {
                return;
            }
            const Task& t = tasks[i];
            try {
                EpisodeLog log = run_mission(benchmark_mission(config, t.protocol, t.repeat, t.mission, t.planner));
                summary.outcomes[i] = {t.planner, t.protocol, t.repeat, t.mission, log.valid, log.metrics,
                                       log.mean_replan_seconds()};
                summary.logs[i] = std::move(log);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(tasks.size());
                return;
            }
        }
    };
    const int threads = std::max(1, std::min<int>(config.parallel, static_cast<int>(tasks.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    summary.rows = aggregate(summary.outcomes, config.planners, config.protocols);
    return summary;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::string metric_columns(const MetricsRecord& m) {
    // II, Unc, MLL, RMSE, mIoU, F1
    return fmt(m.ii, "%.10g") + ',' + fmt(m.unc, "%.10g") + ',' + fmt(m.mll, "%.10g") + ',' + fmt(m.rmse, "%.10g") +
           ',' + fmt(m.miou, "%.10g") + ',' + fmt(m.f1, "%.10g");
}

}  // namespace

void write_results(const RunSummary& summary, const BenchmarkConfig& config, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "episodes", ec);
    if (ec) {
        throw IoError("cannot create " + (out_dir / "episodes").string() + ": " + ec.message());
    }
    const std::string header = "planner,protocol,II,Unc,MLL,RMSE,mIoU,F1,replan_time_s";
    std::string mean_csv = header + '\n';
    std::string std_csv = header + ",episodes,invalid\n";
    for (const auto& row : summary.rows) {
        const std::string key = std::string(planner_name(row.planner)) + ',' + protocol_name(row.protocol) + ',';
        const std::string replan = summary.record_timing ? fmt(row.replan_seconds, "%.6g") : "nan";
        mean_csv += key + metric_columns(row.mean) + ',' + replan + '\n';
        std_csv += key + metric_columns(row.stddev) + ",nan," + std::to_string(row.episodes) + ',' +
                   std::to_string(row.invalid) + '\n';
    }
    write_file(out_dir / "summary.csv", mean_csv);
    write_file(out_dir / "summary_std.csv", std_csv);

    std::string episodes = "planner,protocol,repeat,mission,valid,II,Unc,MLL,RMSE,mIoU,F1\n";
    for (std::size_t i = 0; i < summary.outcomes.size(); ++i) {
        const auto& o = summary.outcomes[i];
        episodes += std::string(planner_name(o.planner)) + ',' + protocol_name(o.protocol) + ',' +
                    std::to_string(o.repeat) + ',' + std::to_string(o.mission) + ',' + (o.valid ? "1" : "0") + ',' +
                    metric_columns(o.metrics) + '\n';
        const std::string name = std::string(protocol_name(o.protocol)) + '_' + planner_name(o.planner) + "_r" +
                                 std::to_string(o.repeat) + "_m" + std::to_string(o.mission) + ".csv";
        if (i < summary.logs.size()) {
            write_file(out_dir / "episodes" / name, episode_csv(summary.logs[i]));
        }
    }
    write_file(out_dir / "episodes.csv", episodes);
    write_file(out_dir / "config.json", nlohmann::json(config).dump(2) + '\n');
}

}  // namespace ipp
