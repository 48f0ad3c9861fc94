#include "ipp/planners.hpp"

#include "ipp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <random>

namespace ipp {

namespace {

struct Offset {
    int dx;
    int dy;
};

constexpr Offset offset_of(Action a) {
    switch (a) {
        case Action::N: return {0, -1};
        case Action::NE: return {1, -1};
        case Action::E: return {1, 0};
        case Action::SE: return {1, 1};
        case Action::S: return {0, 1};
        case Action::SW: return {-1, 1};
        case Action::W: return {-1, 0};
        case Action::NW: return {-1, -1};
    }
    return {0, 0};
}

Action action_from_offset(int dx, int dy) {
    for (Action a : kCompassOrder) {
        const auto o = offset_of(a);
        if (o.dx == dx && o.dy == dy) {
            return a;
        }
    }
    throw ConfigError("no compass action for a zero offset");
}

// First feasible action landing on `target`, if any.
std::optional<Action> canonical_action(Pose from, Pose target, const GridGeometry& geometry) {
    for (Action a : feasible_actions(from, geometry)) {
        if (apply_action(from, a, geometry) == target) {
            return a;
        }
    }
    return std::nullopt;
}

int sign(int v) {
    return (v > 0) - (v < 0);
}

}  // namespace

const char* action_name(Action a) {
    switch (a) {
        case Action::N: return "N";
        case Action::NE: return "NE";
        case Action::E: return "E";
        case Action::SE: return "SE";
        case Action::S: return "S";
        case Action::SW: return "SW";
        case Action::W: return "W";
        case Action::NW: return "NW";
    }
    return "?";
}

std::optional<Action> parse_action(const std::string& name) {
    for (Action a : kCompassOrder) {
        if (name == action_name(a)) {
            return a;
        }
    }
    return std::nullopt;
}

Pose apply_action(Pose pose, Action action, const GridGeometry& geometry) {
    const auto o = offset_of(action);
    return {std::clamp(pose.x + o.dx, 0, geometry.width - 1), std::clamp(pose.y + o.dy, 0, geometry.height - 1)};
}

std::vector<Action> feasible_actions(Pose pose, const GridGeometry& geometry) {
    std::vector<Action> out;
    std::vector<Pose> seen;
    for (Action a : kCompassOrder) {
        const Pose next = apply_action(pose, a, geometry);
        if (std::find(seen.begin(), seen.end(), next) == seen.end()) {
            seen.push_back(next);
            out.push_back(a);
        }
    }
    return out;
}

BudgetState::BudgetState(double initial, double action_cost)
    : initial_(initial), remaining_(initial), cost_(action_cost) {
    if (!(initial > 0.0)) {
        throw ConfigError("budget must be > 0");
    }
    if (!(action_cost > 0.0)) {
        throw ConfigError("action cost must be > 0");
    }
}

int BudgetState::steps_left() const {
    return static_cast<int>(std::floor(remaining_ / cost_ + 1e-9));
}

void BudgetState::spend() {
    if (!can_act()) {
        throw ConfigError("budget exhausted");
    }
    remaining_ -= cost_;
    if (remaining_ < 0.0) {
        remaining_ = 0.0;
    }
}

void PlannerConfig::validate() const {
    if (horizon < 1) {
        throw ConfigError("planner horizon must be >= 1");
    }
    if (mcts.simulations < 1) {
        throw ConfigError("MCTS needs at least one simulation");
    }
    if (!(mcts.discount > 0.0 && mcts.discount <= 1.0)) {
        throw ConfigError("MCTS discount must be in (0, 1]");
    }
    if (cmaes.population < 4) {
        throw ConfigError("CMA-ES population must be >= 4");
    }
    if (cmaes.generations < 0 || !(cmaes.sigma0 > 0.0)) {
        throw ConfigError("CMA-ES needs generations >= 0 and sigma0 > 0");
    }
    if (!(action_cost > 0.0)) {
        throw ConfigError("action cost must be > 0");
    }
}

namespace {

int affordable_steps(const UnifiedState& state, const PlannerConfig& config) {
    return static_cast<int>(std::floor(state.remaining_budget / config.action_cost + 1e-9));
}

}  // namespace

Action greedy_step(const LookaheadBelief& look, Pose pose, double* reward) {
    const auto& geometry = look.geometry();
    double best = -std::numeric_limits<double>::infinity();
    Action best_action = Action::N;
    for (Action a : feasible_actions(pose, geometry)) {
        LookaheadBelief trial = look;
        const double r = trial.advance(apply_action(pose, a, geometry));
        // Rewards equal up to round-off (mirror-symmetric moves) count as
        // ties, so compass order decides them.
        const bool first = best == -std::numeric_limits<double>::infinity();
        if (first || r > best + kRewardTieTolerance * std::max(1.0, std::abs(best))) {
            best = r;
            best_action = a;
        }
    }
    if (reward != nullptr) {
        *reward = best;
    }
    return best_action;
}

std::optional<Action> greedy_plan(const UnifiedState& state, const MapBelief& belief, const InterestSpec& spec,
                                  const PlannerConfig& config) {
    config.validate();
    if (affordable_steps(state, config) < 1) {
        return std::nullopt;
    }
    const LookaheadBelief root(belief, spec, config.lookahead);
    return greedy_step(root, state.pose);
}

namespace {

struct TreeNode {
    Pose pose;
    Action action = Action::N;
    int depth = 0;
    std::vector<int> children;
    std::vector<Action> untried;
    int visits = 0;
    double value_sum = 0.0;
    double edge_reward = 0.0;
    // Lookahead after reaching this node. Expected-measurement updates are
    // deterministic, so the state along a tree path never changes; interior
    // nodes keep it to skip recomputation on later descents.
    std::shared_ptr<const LookaheadBelief> look;

    [[nodiscard]] double mean() const { return visits > 0 ? value_sum / visits : 0.0; }
};

}  // namespace

std::optional<Action> mcts_plan(const UnifiedState& state, const MapBelief& belief, const InterestSpec& spec,
                                const PlannerConfig& config) {
    config.validate();
    const int depth_limit = std::min(config.horizon, affordable_steps(state, config));
    if (depth_limit < 1) {
        return std::nullopt;
    }
    const GridGeometry& geometry = geometry_of(belief);
    const LookaheadBelief root_look(belief, spec, config.lookahead);
    std::mt19937_64 rng(config.seed);

    std::vector<TreeNode> nodes;
    nodes.reserve(static_cast<std::size_t>(config.mcts.simulations) + 1);
    nodes.push_back({state.pose, Action::N, 0, {}, feasible_actions(state.pose, geometry), 0, 0.0, 0.0,
                     std::make_shared<const LookaheadBelief>(root_look)});

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<int> path;
    std::vector<double> rewards;

    for (int sim = 0; sim < config.mcts.simulations; ++sim) {
        path.clear();
        rewards.clear();
        int current = 0;
        std::optional<LookaheadBelief> look;

        while (nodes[static_cast<std::size_t>(current)].depth < depth_limit) {
            auto& node = nodes[static_cast<std::size_t>(current)];
            if (!node.untried.empty()) {
                const Action a = node.untried.front();
                node.untried.erase(node.untried.begin());
                const Pose next = apply_action(node.pose, a, geometry);
                look.emplace(*node.look);
                TreeNode child{next, a, node.depth + 1, {}, {}, 0, 0.0, look->advance(next), nullptr};
                if (child.depth < depth_limit) {
                    child.untried = feasible_actions(next, geometry);
                    child.look = std::make_shared<const LookaheadBelief>(*look);
                }
                const int id = static_cast<int>(nodes.size());
                node.children.push_back(id);
                rewards.push_back(child.edge_reward);
                nodes.push_back(std::move(child));
                path.push_back(id);
                current = id;
                break;
            }
            const double scale = config.mcts.exploration * (hi > lo ? hi - lo : 0.0);
            const double log_n = std::log(static_cast<double>(std::max(1, node.visits)));
            int chosen = -1;
            double best = -std::numeric_limits<double>::infinity();
            for (int c : node.children) {
                const auto& ch = nodes[static_cast<std::size_t>(c)];
                const double ucb = ch.mean() + scale * std::sqrt(log_n / ch.visits);
                if (ucb > best) {
                    best = ucb;
                    chosen = c;
                }
            }
            rewards.push_back(nodes[static_cast<std::size_t>(chosen)].edge_reward);
            path.push_back(chosen);
            current = chosen;
        }
        const auto& leaf = nodes[static_cast<std::size_t>(current)];
        if (leaf.depth < depth_limit && !look) {
            look.emplace(*leaf.look);
        }

        // Uniform random rollout to the horizon.
        Pose pose = nodes[static_cast<std::size_t>(current)].pose;
        for (int d = nodes[static_cast<std::size_t>(current)].depth; d < depth_limit; ++d) {
            const auto actions = feasible_actions(pose, geometry);
            std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
            pose = apply_action(pose, actions[pick(rng)], geometry);
            rewards.push_back(look->advance(pose));
        }

        // Discounted return from each step onward; tree nodes take the return
        // from their incoming edge.
        std::vector<double> returns(rewards.size());
        double acc = 0.0;
        for (std::size_t i = rewards.size(); i-- > 0;) {
            acc = rewards[i] + config.mcts.discount * acc;
            returns[i] = acc;
        }
        nodes[0].visits += 1;
        for (std::size_t j = 0; j < path.size(); ++j) {
            auto& n = nodes[static_cast<std::size_t>(path[j])];
            n.visits += 1;
            n.value_sum += returns[j];
            lo = std::min(lo, returns[j]);
            hi = std::max(hi, returns[j]);
        }
    }

    const auto& root = nodes[0];
    int best = -1;
    for (int c : root.children) {
        if (best < 0) {
            best = c;
            continue;
        }
        const auto& cand = nodes[static_cast<std::size_t>(c)];
        const auto& incumbent = nodes[static_cast<std::size_t>(best)];
        if (cand.visits > incumbent.visits || (cand.visits == incumbent.visits && cand.mean() > incumbent.mean())) {
            best = c;
        }
    }
    return nodes[static_cast<std::size_t>(best)].action;
}

std::vector<Action> decode_waypoints(const Eigen::VectorXd& waypoints, Pose start, const GridGeometry& geometry) {
    if (waypoints.size() % 2 != 0) {
        throw ConfigError("waypoint vector must hold (x, y) pairs");
    }
    const double cs = geometry.cell_size();
    std::vector<Action> actions;
    Pose cur = start;
    for (Eigen::Index k = 0; k < waypoints.size() / 2; ++k) {
        const double wx = std::clamp(waypoints(2 * k), 0.0, 1.0);
        const double wy = std::clamp(waypoints(2 * k + 1), 0.0, 1.0);
        const int tx = std::min(geometry.width - 1, static_cast<int>(std::floor(wx / cs)));
        const int ty = std::min(geometry.height - 1, static_cast<int>(std::floor(wy / cs)));
        const int dx = sign(tx - cur.x);
        const int dy = sign(ty - cur.y);
        Action a;
        if (dx == 0 && dy == 0) {
            // Waypoint in the current cell: prefer a border-clamped move that
            // stays put, otherwise the first feasible move.
            a = canonical_action(cur, cur, geometry).value_or(feasible_actions(cur, geometry).front());
        } else {
            const Pose next{cur.x + dx, cur.y + dy};
            a = canonical_action(cur, next, geometry).value_or(action_from_offset(dx, dy));
        }
        actions.push_back(a);
        cur = apply_action(cur, a, geometry);
    }
    return actions;
}

std::optional<Action> cmaes_plan(const UnifiedState& state, const MapBelief& belief, const InterestSpec& spec,
                                 const PlannerConfig& config) {
    config.validate();
    const int steps = std::min(config.horizon, affordable_steps(state, config));
    if (steps < 1) {
        return std::nullopt;
    }
    const GridGeometry& geometry = geometry_of(belief);
    const LookaheadBelief root(belief, spec, config.lookahead);

    // Greedy path as the initial mean.
    Eigen::VectorXd x0(2 * steps);
    {
        LookaheadBelief look = root;
        Pose pose = state.pose;
        for (int k = 0; k < steps; ++k) {
            pose = apply_action(pose, greedy_step(look, pose), geometry);
            look.advance(pose);
            const auto c = geometry.center(geometry.index(pose.x, pose.y));
            x0(2 * k) = c.x;
            x0(2 * k + 1) = c.y;
        }
    }

    // Many candidates decode to the same action sequence; the lookahead is
    // deterministic, so their fitness is shared.
    std::map<std::vector<Action>, double> memo;
    auto fitness = [&](const Eigen::VectorXd& x) {
        auto actions = decode_waypoints(x, state.pose, geometry);
        if (const auto it = memo.find(actions); it != memo.end()) {
            return it->second;
        }
        LookaheadBelief look = root;
        Pose pose = state.pose;
        double total = 0.0;
        for (Action a : actions) {
            pose = apply_action(pose, a, geometry);
            total += look.advance(pose);
        }
        memo.emplace(std::move(actions), -total);
        return -total;
    };

    CmaEsOptions options;
    options.population = config.cmaes.population;
    options.sigma0 = config.cmaes.sigma0;
    options.max_generations = config.cmaes.generations;
    options.seed = config.seed;
    const CmaEsResult result = cmaes_minimize(fitness, x0, options);
    return decode_waypoints(result.best, state.pose, geometry).front();
}

std::vector<Action> coverage_plan(const GridGeometry& geometry, int step, Pose start, double budget,
                                  double action_cost) {
    if (step < 1) {
        throw ConfigError("coverage step must be >= 1");
    }
    if (!geometry.contains(start.x, start.y)) {
        throw ConfigError("coverage start outside the grid");
    }
    const auto limit = static_cast<std::size_t>(std::floor(budget / action_cost + 1e-9));
    std::vector<Action> actions;
    actions.reserve(limit);
    Pose cur = start;
    int hdir = 2 * start.x <= geometry.width - 1 ? 1 : -1;
    int vdir = 2 * start.y <= geometry.height - 1 ? 1 : -1;

    auto push = [&](int dx, int dy) {
        actions.push_back(action_from_offset(dx, dy));
        cur.x += dx;
        cur.y += dy;
    };

    while (actions.size() < limit) {
        while (actions.size() < limit && geometry.contains(cur.x + hdir, cur.y)) {
            push(hdir, 0);
        }
        for (int s = 0; s < step && actions.size() < limit; ++s) {
            if (!geometry.contains(cur.x, cur.y + vdir)) {
                if (s > 0) {
                    break;
                }
                vdir = -vdir;
            }
            push(0, vdir);
        }
        hdir = -hdir;
    }
    return actions;
}

const char* planner_name(PlannerKind kind) {
    switch (kind) {
        case PlannerKind::Greedy: return "greedy";
        case PlannerKind::Mcts: return "mcts";
        case PlannerKind::Cmaes: return "cmaes";
        case PlannerKind::Coverage: return "coverage";
    }
    return "?";
}

PlannerKind parse_planner(const std::string& name) {
    for (PlannerKind k : {PlannerKind::Greedy, PlannerKind::Mcts, PlannerKind::Cmaes, PlannerKind::Coverage}) {
        if (name == planner_name(k)) {
            return k;
        }
    }
    throw ConfigError("unknown planner '" + name + "' (expected greedy|mcts|cmaes|coverage)");
}

}  // namespace ipp
