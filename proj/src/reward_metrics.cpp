#include "ipp/reward_metrics.hpp"

#include "ipp/errors.hpp"
#include "ipp/unified.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

namespace ipp {

double weighted_reduction(std::span<const double> before, std::span<const double> after,
                          std::span<const double> interest) {
    double total = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (before[i] == 0.0) {
            continue;
        }
        total += (before[i] - after[i]) / before[i] * interest[i];
    }
    return total;
}

double step_reward(const MapBelief& before, const MapBelief& after, const InterestSpec& spec) {
    if (before.index() != after.index() || !(geometry_of(before) == geometry_of(after))) {
        throw ConfigError("step_reward needs beliefs of the same kind and geometry");
    }
    const auto h0 = uncertainty_grid(before, UncertaintyVariant::Reward);
    const auto h1 = uncertainty_grid(after, UncertaintyVariant::Reward);
    const auto p = interest_grid(before, spec);
    return weighted_reduction(h0, h1, p);
}

namespace {

void require_mask(const std::vector<bool>& mask, std::size_t cells) {
    if (mask.size() != cells) {
        throw MetricError("mask size does not match the map");
    }
    for (bool b : mask) {
        if (b) {
            return;
        }
    }
    throw MetricError("area of interest is empty");
}

}  // namespace

double unc_metric(const MapBelief& belief, const MapBelief& prior, const std::vector<bool>& mask,
                  TraceNormalization norm) {
    const std::size_t n = geometry_of(belief).cell_count();
    require_mask(mask, n);
    const auto variant = UncertaintyVariant::StateSpace;
    double now = 0.0;
    double base = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mask[i]) {
            now += cell_uncertainty(belief, i, variant);
            base += cell_uncertainty(prior, i, variant);
        }
    }
    if (std::holds_alternative<GaussianMapBelief>(belief) && norm == TraceNormalization::LogTrace) {
        return 100.0 * std::log(now) / std::log(base);
    }
    if (base <= 0.0) {
        throw MetricError("prior uncertainty over the area of interest is zero");
    }
    return 100.0 * now / base;
}

double ii_metric(const UncertaintyTrace& trace, double total_budget) {
    if (trace.empty() || !(total_budget > 0.0)) {
        throw MetricError("ii_metric needs a non-empty trace and a positive budget");
    }
    double area = 0.0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double x0 = trace[i - 1].consumed_budget / total_budget;
        const double x1 = trace[i].consumed_budget / total_budget;
        area += 0.5 * (trace[i - 1].normalized_uncertainty + trace[i].normalized_uncertainty) * (x1 - x0);
    }
    const double last = trace.back().consumed_budget / total_budget;
    if (last < 1.0) {
        area += trace.back().normalized_uncertainty * (1.0 - last);
    }
    return 100.0 * (1.0 - area);
}

double rmse_metric(const GaussianMapBelief& belief, const TerrainField& field, const std::vector<bool>& mask) {
    require_mask(mask, field.values.size());
    double sq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) {
            const double r = belief.mean(static_cast<Eigen::Index>(i)) - field.values[i];
            sq += r * r;
            ++count;
        }
    }
    return 100.0 * std::sqrt(sq / static_cast<double>(count));
}

double mll_metric(const GaussianMapBelief& belief, const TerrainField& field, const std::vector<bool>& mask) {
    require_mask(mask, field.values.size());
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) {
            continue;
        }
        const double var = belief.variance(i);
        if (!(var > 0.0)) {
            throw MetricError("zero posterior variance inside the area of interest");
        }
        const double r = field.values[i] - belief.mean(static_cast<Eigen::Index>(i));
        total += 0.5 * std::log(2.0 * std::numbers::pi * var) + r * r / (2.0 * var);
        ++count;
    }
    return 100.0 * total / static_cast<double>(count);
}

ClassificationScores classification_metrics(const OccupancyMapBelief& belief, const TerrainField& field,
                                            const std::vector<bool>& mask) {
    if (field.kind != FeatureKind::Discrete) {
        throw ConfigError("classification metrics need a discrete field");
    }
    require_mask(mask, field.values.size());
    const int k = belief.classes;
    std::vector<double> tp(static_cast<std::size_t>(k + 1), 0.0);
    std::vector<double> fp(tp);
    std::vector<double> fn(tp);
    std::set<int> present;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (!mask[i]) {
            continue;
        }
        Eigen::Index best = 0;
        belief.probs.row(static_cast<Eigen::Index>(i)).maxCoeff(&best);
        const int predicted = static_cast<int>(best) + 1;
        const int truth = field.label(i);
        present.insert(truth);
        if (predicted == truth) {
            tp[static_cast<std::size_t>(truth)] += 1.0;
        } else {
            fp[static_cast<std::size_t>(predicted)] += 1.0;
            fn[static_cast<std::size_t>(truth)] += 1.0;
        }
    }
    ClassificationScores s;
    for (int c : present) {
        const auto u = static_cast<std::size_t>(c);
        s.miou += tp[u] / (tp[u] + fp[u] + fn[u]);
        s.f1 += 2.0 * tp[u] / (2.0 * tp[u] + fp[u] + fn[u]);
    }
    s.miou = 100.0 * s.miou / static_cast<double>(present.size());
    s.f1 = 100.0 * s.f1 / static_cast<double>(present.size());
    return s;
}

std::string MetricsRecord::to_csv_row() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", ii, unc, rmse, mll, miou, f1);
    return buf;
}

}  // namespace ipp
