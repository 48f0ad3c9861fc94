#pragma once

#include "ipp/belief_maps.hpp"
#include "ipp/grid_world.hpp"

#include <span>
#include <string>
#include <vector>

namespace ipp {

/// Sum over cells of (h_before - h_after) / h_before * interest. Cells with
/// h_before == 0 contribute nothing.
[[nodiscard]] double weighted_reduction(std::span<const double> before, std::span<const double> after,
                                        std::span<const double> interest);

/// Reward for moving from `before` to `after`, weighting each cell's relative
/// uncertainty reduction by its interest probability under `before`.
[[nodiscard]] double step_reward(const MapBelief& before, const MapBelief& after, const InterestSpec& spec);

struct TracePoint {
    double consumed_budget = 0.0;
    double normalized_uncertainty = 1.0;
};

using UncertaintyTrace = std::vector<TracePoint>;

/// How the continuous uncertainty ratio is formed.
enum class TraceNormalization {
    Trace,     // 100 * tr(P_t) / tr(P_0) over interest cells
    LogTrace,  // 100 * log tr(P_t) / log tr(P_0)
};

/// Final uncertainty over the interest mask relative to the prior, in percent.
[[nodiscard]] double unc_metric(const MapBelief& belief, const MapBelief& prior, const std::vector<bool>& mask,
                                TraceNormalization norm = TraceNormalization::Trace);

/// 100 * (1 - trapezoidal area under normalized uncertainty vs budget
/// fraction), with the curve held flat up to fraction 1.
[[nodiscard]] double ii_metric(const UncertaintyTrace& trace, double total_budget);

/// Reported x100.
[[nodiscard]] double rmse_metric(const GaussianMapBelief& belief, const TerrainField& field,
                                 const std::vector<bool>& mask);
/// Mean negative log predictive density, reported x100.
[[nodiscard]] double mll_metric(const GaussianMapBelief& belief, const TerrainField& field,
                                const std::vector<bool>& mask);

struct ClassificationScores {
    double miou = 0.0;
    double f1 = 0.0;
};

/// Argmax prediction vs ground truth on the mask cells; classes averaged are
/// those present in the masked ground truth. Reported x100.
[[nodiscard]] ClassificationScores classification_metrics(const OccupancyMapBelief& belief,
                                                          const TerrainField& field, const std::vector<bool>& mask);

/// Final mission metrics. Fields that do not apply to the mission kind are NaN.
struct MetricsRecord {
    double ii = 0.0;
    double unc = 0.0;
    double rmse = 0.0;
    double mll = 0.0;
    double miou = 0.0;
    double f1 = 0.0;

    static constexpr const char* kCsvHeader = "II,Unc,RMSE,MLL,mIoU,F1";
    [[nodiscard]] std::string to_csv_row() const;
};

}  // namespace ipp
