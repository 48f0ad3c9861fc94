#pragma once

#include "ipp/belief_maps.hpp"
#include "ipp/grid_world.hpp"
#include "ipp/sensors.hpp"

#include <filesystem>
#include <vector>

namespace ipp {

/// Mission hyperparameters handed to the planner alongside the belief.
/// `lengthscale_encoding` is the GP lengthscale, or 0 for occupancy maps.
struct Hyperparams {
    InterestSpec interest;
    double lengthscale_encoding = 0.0;
};

/// Planning state over the grid: interest probability and state-space
/// uncertainty per cell, plus pose, remaining budget and hyperparameters.
struct UnifiedState {
    GridGeometry geometry;
    std::vector<double> interest;
    std::vector<double> uncertainty;
    Pose pose;
    double remaining_budget = 0.0;
    Hyperparams hyperparams;
};

/// Upper-tail probability 1 - Phi(z) of the standard normal.
[[nodiscard]] double normal_upper_tail(double z);

/// p(F(x) in F_I | belief) at one cell.
///
/// Occupancy maps sum the class probabilities over the interesting set.
/// Gaussian maps integrate the posterior density above the threshold,
/// returning exactly 1 when the threshold sits at the bottom of the feature
/// range and an indicator of mean >= threshold once the posterior standard
/// deviation drops below 1e-12.
[[nodiscard]] double interest_probability(const MapBelief& belief, const InterestSpec& spec, std::size_t cell);

/// Gaussian form from an explicit (mean, std) pair.
[[nodiscard]] double interest_probability(double mean, double stddev, const ContinuousInterest& spec);

[[nodiscard]] std::vector<double> interest_grid(const MapBelief& belief, const InterestSpec& spec);

[[nodiscard]] UnifiedState assemble_state(const MapBelief& belief, const InterestSpec& spec, Pose pose,
                                          double remaining_budget, const Hyperparams& hyperparams);

/// Layered CSV: `height` rows of interest, `height` rows of uncertainty, then
/// one scalar row `pose_x,pose_y,remaining_budget,f_th,lengthscale_encoding`.
/// f_th is written as nan for discrete missions.
void export_state_raster(const UnifiedState& state, const std::filesystem::path& path);

struct StateRaster {
    GridGeometry geometry;
    std::vector<double> interest;
    std::vector<double> uncertainty;
    Pose pose;
    double remaining_budget = 0.0;
    double threshold = 0.0;
    double lengthscale_encoding = 0.0;
};

[[nodiscard]] StateRaster read_state_raster(const std::filesystem::path& path);

}  // namespace ipp
