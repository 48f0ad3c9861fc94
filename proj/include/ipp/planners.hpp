#pragma once

#include "ipp/belief_maps.hpp"
#include "ipp/cmaes.hpp"
#include "ipp/lookahead.hpp"
#include "ipp/unified.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ipp {

/// One-cell compass moves, listed in tie-break order.
enum class Action { N, NE, E, SE, S, SW, W, NW };

inline constexpr std::array<Action, 8> kCompassOrder = {Action::N, Action::NE, Action::E, Action::SE,
                                                        Action::S, Action::SW, Action::W, Action::NW};

[[nodiscard]] const char* action_name(Action a);
[[nodiscard]] std::optional<Action> parse_action(const std::string& name);

/// Applies the move and clamps the result to the grid.
[[nodiscard]] Pose apply_action(Pose pose, Action action, const GridGeometry& geometry);

/// Actions with distinct resulting poses; among clamped duplicates the first
/// in compass order is kept.
[[nodiscard]] std::vector<Action> feasible_actions(Pose pose, const GridGeometry& geometry);

/// Budget bookkeeping with unit-cost actions by default.
class BudgetState {
public:
    explicit BudgetState(double initial, double action_cost = 1.0);

    [[nodiscard]] double initial() const { return initial_; }
    [[nodiscard]] double remaining() const { return remaining_; }
    [[nodiscard]] double consumed() const { return initial_ - remaining_; }
    [[nodiscard]] double action_cost() const { return cost_; }
    [[nodiscard]] bool can_act() const { return remaining_ >= cost_; }
    /// Whole actions still affordable.
    [[nodiscard]] int steps_left() const;
    void spend();

private:
    double initial_;
    double remaining_;
    double cost_;
};

struct MctsConfig {
    int simulations = 300;
    double exploration = 1.0;  // scaled by the observed return range
    double discount = 1.0;
};

struct CmaesPlannerConfig {
    int population = 12;
    double sigma0 = 0.1;
    int generations = 30;
};

struct PlannerConfig {
    int horizon = 5;
    MctsConfig mcts;
    CmaesPlannerConfig cmaes;
    double action_cost = 1.0;
    std::uint64_t seed = 0;
    LookaheadModel lookahead;

    void validate() const;
};

/// Relative margin below which two rewards are treated as tied.
inline constexpr double kRewardTieTolerance = 1e-12;

/// Argmax of the one-step reward over feasible actions. Returns nullopt when
/// the budget cannot pay for another action.
[[nodiscard]] std::optional<Action> greedy_plan(const UnifiedState& state, const MapBelief& belief,
                                                const InterestSpec& spec, const PlannerConfig& config);

/// Greedy action from an existing lookahead (no budget check).
[[nodiscard]] Action greedy_step(const LookaheadBelief& look, Pose pose, double* reward = nullptr);

/// UCT over action sequences up to the horizon (clipped by the budget),
/// uniform random rollouts, returns the most visited root child.
[[nodiscard]] std::optional<Action> mcts_plan(const UnifiedState& state, const MapBelief& belief,
                                              const InterestSpec& spec, const PlannerConfig& config);

/// Waypoint-sequence optimisation with CMA-ES, seeded from the greedy path.
[[nodiscard]] std::optional<Action> cmaes_plan(const UnifiedState& state, const MapBelief& belief,
                                               const InterestSpec& spec, const PlannerConfig& config);

/// Decodes a flat (x0, y0, x1, y1, ...) waypoint vector in unit-square
/// coordinates into one action per waypoint: each waypoint snaps to its
/// nearest cell and the robot steps one cell towards it.
[[nodiscard]] std::vector<Action> decode_waypoints(const Eigen::VectorXd& waypoints, Pose start,
                                                   const GridGeometry& geometry);

/// Boustrophedon sweep from `start`: run to the end of the row, shift `step`
/// rows, reverse; the vertical direction flips at the grid border. Truncated
/// to the affordable number of actions.
[[nodiscard]] std::vector<Action> coverage_plan(const GridGeometry& geometry, int step, Pose start, double budget,
                                                double action_cost = 1.0);

enum class PlannerKind { Greedy, Mcts, Cmaes, Coverage };

[[nodiscard]] const char* planner_name(PlannerKind kind);
[[nodiscard]] PlannerKind parse_planner(const std::string& name);

}  // namespace ipp
