#pragma once

#include "ipp/belief_maps.hpp"
#include "ipp/grid_world.hpp"
#include "ipp/planners.hpp"
#include "ipp/reward_metrics.hpp"
#include "ipp/sensors.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ipp {

/// Everything needed to run one mission deterministically.
struct MissionConfig {
    FeatureKind kind = FeatureKind::Continuous;
    GridGeometry grid{25, 25};

    // Ground truth: generated unless `raster` is set.
    std::string raster;
    double field_correlation = 0.15;
    int classes = 3;

    InterestSpec interest = ContinuousInterest{};

    // Gaussian map
    MaternKernel kernel;
    double prior_mean = 0.5;
    double noise_variance = 0.01;

    // Occupancy map
    double confusion_diagonal = 0.8;
    std::optional<Eigen::MatrixXd> confusion;  // overrides the diagonal form
    OccupancyClamp clamp;

    FieldOfView fov{1};
    double sensor_noise_std = 0.1;

    double budget = 100.0;
    PlannerKind planner = PlannerKind::Greedy;
    PlannerConfig planner_config;
    int coverage_step = 0;  // 0 = field-of-view width

    std::uint64_t seed = 0;
    std::optional<Pose> start;
    TraceNormalization unc_normalization = TraceNormalization::Trace;
    bool record_timing = false;

    [[nodiscard]] ConfusionMatrix confusion_matrix() const;
    [[nodiscard]] int effective_coverage_step() const { return coverage_step > 0 ? coverage_step : 2 * fov.half_extent + 1; }
    void validate() const;
};

[[nodiscard]] const char* kind_name(FeatureKind k);
[[nodiscard]] FeatureKind parse_kind(const std::string& s);

/// Mission defaults per feature kind: 1-cell continuous FoV, 2-cell
/// semantic FoV, K = 3, static interest.
[[nodiscard]] MissionConfig default_mission(FeatureKind kind);

enum class Protocol { Static, Varying };

[[nodiscard]] const char* protocol_name(Protocol p);
[[nodiscard]] Protocol parse_protocol(const std::string& name);

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

struct BenchmarkConfig {
    MissionConfig base;
    std::vector<Protocol> protocols{Protocol::Static};
    int missions = 100;
    int repeats = 3;
    std::vector<PlannerKind> planners{PlannerKind::Greedy, PlannerKind::Mcts, PlannerKind::Cmaes,
                                      PlannerKind::Coverage};
    double static_threshold = 0.4;
    double static_lengthscale = 0.35;
    std::set<int> static_classes{1};
    Range threshold_range{0.0, 0.8};
    Range lengthscale_range{0.15, 0.55};
    Range field_correlation_range{0.08, 0.2};
    std::uint64_t master_seed = 0;
    int parallel = 1;
    bool record_timing = false;

    void validate() const;
};

void to_json(nlohmann::json& j, const MissionConfig& c);
void from_json(const nlohmann::json& j, MissionConfig& c);
void to_json(nlohmann::json& j, const BenchmarkConfig& c);
void from_json(const nlohmann::json& j, BenchmarkConfig& c);

/// Reads a JSON file; throws ConfigError on parse or schema problems.
[[nodiscard]] nlohmann::json read_json_file(const std::filesystem::path& path);

/// Derives an independent 64-bit stream seed from a parent seed and labels.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace ipp
