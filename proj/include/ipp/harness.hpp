#pragma once

#include "ipp/belief_maps.hpp"
#include "ipp/config.hpp"
#include "ipp/planners.hpp"
#include "ipp/reward_metrics.hpp"
#include "ipp/unified.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ipp {

struct StepRecord {
    int step = 0;
    Pose pose;
    std::optional<Action> action;  // empty for the t = 0 record
    double consumed_budget = 0.0;
    double reward = 0.0;
    double normalized_uncertainty = 1.0;
    double replan_seconds = 0.0;
};

/// Per-step trace of one mission. Holds N + 1 records for N actions; record 0
/// is the prior at zero consumed budget.
struct EpisodeLog {
    MissionConfig config;
    std::vector<StepRecord> steps;
    MetricsRecord metrics;
    bool valid = true;
    std::string error;

    [[nodiscard]] UncertaintyTrace trace() const;
    [[nodiscard]] int actions() const { return static_cast<int>(steps.size()) - 1; }
    [[nodiscard]] double mean_replan_seconds() const;
};

/// Step-wise mission execution. Each step plans on the current belief,
/// moves, senses at the new pose and fuses the reading.
class MissionRunner {
public:
    explicit MissionRunner(MissionConfig config);

    [[nodiscard]] bool done() const;
    /// Executes one action. Numerical failures mark the episode invalid and
    /// end the mission.
    void step();
    void run();

    [[nodiscard]] const TerrainField& field() const { return field_; }
    [[nodiscard]] const MapBelief& belief() const { return belief_; }
    [[nodiscard]] const std::vector<bool>& mask() const { return mask_; }
    [[nodiscard]] const std::vector<Pose>& path() const { return path_; }
    [[nodiscard]] Pose pose() const { return pose_; }
    [[nodiscard]] UnifiedState state() const;
    [[nodiscard]] Hyperparams hyperparams() const;
    [[nodiscard]] const EpisodeLog& log() const { return log_; }
    /// Computes the final metrics (once) and returns the log.
    [[nodiscard]] EpisodeLog finish();

private:
    [[nodiscard]] double normalized_uncertainty() const;
    [[nodiscard]] std::optional<Action> choose_action();

    MissionConfig config_;
    TerrainField field_;
    std::vector<bool> mask_;
    MapBelief belief_;
    std::vector<double> prior_uncertainty_;
    std::optional<ConfusionMatrix> confusion_;
    BudgetState budget_;
    Pose pose_;
    std::vector<Pose> path_;
    RandomStream sensor_rng_;
    std::uint64_t planner_seed_ = 0;
    std::vector<Action> coverage_;
    EpisodeLog log_;
    bool aborted_ = false;
    bool finished_ = false;
};

/// Runs a complete mission; fully determined by the config.
[[nodiscard]] EpisodeLog run_mission(const MissionConfig& config);

/// Episode CSV: `step,pose_x,pose_y,action,consumed_budget,reward,normalized_uncertainty`
/// plus `replan_s` when timing is recorded.
[[nodiscard]] std::string episode_csv(const EpisodeLog& log);

/// Mission `index` of repeat `repeat` under `protocol`. Every planner gets the
/// same world: field, start pose, hyperparameters and sensor noise stream.
[[nodiscard]] MissionConfig benchmark_mission(const BenchmarkConfig& config, Protocol protocol, int repeat,
                                              int index, PlannerKind planner);

struct EpisodeOutcome {
    PlannerKind planner = PlannerKind::Greedy;
    Protocol protocol = Protocol::Static;
    int repeat = 0;
    int mission = 0;
    bool valid = true;
    MetricsRecord metrics;
    double mean_replan_seconds = 0.0;
};

struct SummaryRow {
    PlannerKind planner = PlannerKind::Greedy;
    Protocol protocol = Protocol::Static;
    MetricsRecord mean;
    MetricsRecord stddev;  // across repeats, of the per-repeat means
    double replan_seconds = 0.0;
    int episodes = 0;
    int invalid = 0;
};

struct RunSummary {
    std::vector<SummaryRow> rows;
    std::vector<EpisodeOutcome> outcomes;
    std::vector<EpisodeLog> logs;
    bool record_timing = false;
};

/// Mean over valid episodes and sample standard deviation over the
/// per-repeat means, per planner x protocol. Independent of input order.
[[nodiscard]] std::vector<SummaryRow> aggregate(std::vector<EpisodeOutcome> outcomes,
                                                const std::vector<PlannerKind>& planners,
                                                const std::vector<Protocol>& protocols);

[[nodiscard]] RunSummary run_benchmark(const BenchmarkConfig& config);

/// Writes summary.csv, summary_std.csv, episodes.csv, episodes/*.csv and
/// config.json into `out_dir`.
void write_results(const RunSummary& summary, const BenchmarkConfig& config, const std::filesystem::path& out_dir);

}  // namespace ipp
