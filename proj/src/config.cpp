#include "ipp/config.hpp"

#include "ipp/errors.hpp"

#include <fstream>

namespace ipp {

using nlohmann::json;

ConfusionMatrix MissionConfig::confusion_matrix() const {
    if (confusion) {
        return ConfusionMatrix(*confusion);
    }
    return ConfusionMatrix::uniform_noise(classes, confusion_diagonal);
}

MissionConfig default_mission(FeatureKind kind) {
    MissionConfig c;
    c.kind = kind;
    if (kind == FeatureKind::Continuous) {
        c.interest = ContinuousInterest{0.4, 0.0, 1.0};
        c.fov.half_extent = 1;
    } else {
        c.interest = DiscreteInterest{{1}, c.classes};
        c.fov.half_extent = 2;
    }
    c.planner_config.lookahead.fov = c.fov;
    return c;
}

void MissionConfig::validate() const {
    if (grid.width < 2 || grid.height < 2) {
        throw ConfigError("grid must be at least 2x2");
    }
    if (!(budget > 0.0)) {
        throw ConfigError("budget must be > 0");
    }
    if (kind_of(interest) != kind) {
        throw ConfigError("interest spec does not match the feature kind");
    }
    ipp::validate(interest);
    if (fov.half_extent < 0) {
        throw ConfigError("sensor half_extent must be >= 0");
    }
    if (kind == FeatureKind::Continuous) {
        if (!(kernel.lengthscale > 0.0) || !(kernel.signal_variance > 0.0) || !(noise_variance > 0.0)) {
            throw ConfigError("GP lengthscale, signal variance and noise variance must be > 0");
        }
        if (!(sensor_noise_std >= 0.0)) {
            throw ConfigError("sensor noise_std must be >= 0");
        }
    } else {
        if (classes < 2) {
            throw ConfigError("discrete missions need K >= 2");
        }
        if (std::get<DiscreteInterest>(interest).class_count != classes) {
            throw ConfigError("interest class count does not match K");
        }
        (void)confusion_matrix();
        const double u = 1.0 / classes;
        if (!(0.0 < clamp.p_min && clamp.p_min < u && u < clamp.p_max && clamp.p_max < 1.0)) {
            throw ConfigError("occupancy clamp must satisfy 0 < p_min < 1/K < p_max < 1");
        }
    }
    if (raster.empty() && !(field_correlation > 0.0 && field_correlation <= 2.0)) {
        throw ConfigError("field correlation_length must be in (0, 2]");
    }
    planner_config.validate();
}

const char* protocol_name(Protocol p) {
    return p == Protocol::Static ? "static" : "varying";
}

Protocol parse_protocol(const std::string& name) {
    if (name == "static") {
        return Protocol::Static;
    }
    if (name == "varying") {
        return Protocol::Varying;
    }
    throw ConfigError("unknown protocol '" + name + "' (expected static|varying)");
}

void BenchmarkConfig::validate() const {
    base.validate();
    if (missions < 1 || repeats < 1) {
        throw ConfigError("benchmark needs missions >= 1 and repeats >= 1");
    }
    if (planners.empty() || protocols.empty()) {
        throw ConfigError("benchmark needs at least one planner and one protocol");
    }
    for (const Range& r : {threshold_range, lengthscale_range, field_correlation_range}) {
        if (!(r.lo < r.hi)) {
            throw ConfigError("sampling ranges must be non-degenerate");
        }
    }
    if (threshold_range.lo < 0.0 || threshold_range.hi > 1.0 || lengthscale_range.lo <= 0.0 ||
        field_correlation_range.lo <= 0.0 || field_correlation_range.hi > 2.0) {
        throw ConfigError("sampling range outside its valid domain");
    }
    if (parallel < 1) {
        throw ConfigError("parallel must be >= 1");
    }
}

const char* kind_name(FeatureKind k) {
    return k == FeatureKind::Continuous ? "continuous" : "discrete";
}

FeatureKind parse_kind(const std::string& s) {
    if (s == "continuous") {
        return FeatureKind::Continuous;
    }
    if (s == "discrete") {
        return FeatureKind::Discrete;
    }
    throw ConfigError("unknown feature kind '" + s + "'");
}

namespace {

json range_json(const Range& r) {
    return json::array({r.lo, r.hi});
}

Range parse_range(const json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError("ranges must be two-element arrays");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

void to_json(json& j, const MissionConfig& c) {
    j = json::object();
    j["kind"] = kind_name(c.kind);
    j["grid"] = {{"width", c.grid.width}, {"height", c.grid.height}};
    j["field"] = {{"raster", c.raster}, {"correlation_length", c.field_correlation}, {"classes", c.classes}};
    if (const auto* ci = std::get_if<ContinuousInterest>(&c.interest)) {
        j["interest"] = {{"threshold", ci->threshold}};
    } else {
        j["interest"] = {{"classes", std::get<DiscreteInterest>(c.interest).classes}};
    }
    j["gp"] = {{"lengthscale", c.kernel.lengthscale},
               {"signal_variance", c.kernel.signal_variance},
               {"prior_mean", c.prior_mean},
               {"noise_variance", c.noise_variance}};
    json occ = {{"confusion_diagonal", c.confusion_diagonal}, {"clamp", {c.clamp.p_min, c.clamp.p_max}}};
    if (c.confusion) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < c.confusion->rows(); ++i) {
            json row = json::array();
            for (Eigen::Index k = 0; k < c.confusion->cols(); ++k) {
                row.push_back((*c.confusion)(i, k));
            }
            rows.push_back(row);
        }
        occ["confusion"] = rows;
    }
    j["occupancy"] = occ;
    j["sensor"] = {{"half_extent", c.fov.half_extent}, {"noise_std", c.sensor_noise_std}};
    j["budget"] = c.budget;
    j["planner"] = planner_name(c.planner);
    const auto& p = c.planner_config;
    j["planner_config"] = {
        {"horizon", p.horizon},
        {"action_cost", p.action_cost},
        {"coverage_step", c.coverage_step},
        {"mcts", {{"simulations", p.mcts.simulations}, {"exploration", p.mcts.exploration}, {"discount", p.mcts.discount}}},
        {"cmaes", {{"population", p.cmaes.population}, {"sigma0", p.cmaes.sigma0}, {"generations", p.cmaes.generations}}}};
    j["seed"] = c.seed;
    if (c.start) {
        j["start"] = {c.start->x, c.start->y};
    }
    j["unc_normalization"] = c.unc_normalization == TraceNormalization::Trace ? "trace" : "log_trace";
    j["record_timing"] = c.record_timing;
}

void from_json(const json& j, MissionConfig& c) {
    const FeatureKind kind = parse_kind(j.value("kind", std::string("continuous")));
    c = default_mission(kind);
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        c.grid = GridGeometry(g.value("width", c.grid.width), g.value("height", c.grid.height));
    }
    if (j.contains("field")) {
        const auto& f = j["field"];
        c.raster = f.value("raster", c.raster);
        c.field_correlation = f.value("correlation_length", c.field_correlation);
        c.classes = f.value("classes", c.classes);
    }
    if (kind == FeatureKind::Discrete) {
        c.interest = DiscreteInterest{{1}, c.classes};
    }
    if (j.contains("interest")) {
        const auto& in = j["interest"];
        if (kind == FeatureKind::Continuous) {
            c.interest = ContinuousInterest{in.value("threshold", 0.4), 0.0, 1.0};
        } else {
            c.interest = DiscreteInterest{in.value("classes", std::set<int>{1}), c.classes};
        }
    }
    if (j.contains("gp")) {
        const auto& g = j["gp"];
        c.kernel.lengthscale = g.value("lengthscale", c.kernel.lengthscale);
        c.kernel.signal_variance = g.value("signal_variance", c.kernel.signal_variance);
        c.prior_mean = g.value("prior_mean", c.prior_mean);
        c.noise_variance = g.value("noise_variance", c.noise_variance);
    }
    if (j.contains("occupancy")) {
        const auto& o = j["occupancy"];
        c.confusion_diagonal = o.value("confusion_diagonal", c.confusion_diagonal);
        if (o.contains("clamp")) {
            const Range r = parse_range(o["clamp"]);
            c.clamp = {r.lo, r.hi};
        }
        if (o.contains("confusion")) {
            const auto& rows = o["confusion"];
            const auto k = static_cast<Eigen::Index>(rows.size());
            Eigen::MatrixXd m(k, k);
            for (Eigen::Index i = 0; i < k; ++i) {
                if (rows[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(k)) {
                    throw ConfigError("confusion matrix must be K x K");
                }
                for (Eigen::Index col = 0; col < k; ++col) {
                    m(i, col) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)].get<double>();
                }
            }
            c.confusion = m;
        }
    }
    if (j.contains("sensor")) {
        const auto& s = j["sensor"];
        c.fov.half_extent = s.value("half_extent", c.fov.half_extent);
        c.sensor_noise_std = s.value("noise_std", c.sensor_noise_std);
    }
    c.budget = j.value("budget", c.budget);
    if (j.contains("planner")) {
        c.planner = parse_planner(j["planner"].get<std::string>());
    }
    if (j.contains("planner_config")) {
        const auto& p = j["planner_config"];
        auto& pc = c.planner_config;
        pc.horizon = p.value("horizon", pc.horizon);
        pc.action_cost = p.value("action_cost", pc.action_cost);
        c.coverage_step = p.value("coverage_step", c.coverage_step);
        if (p.contains("mcts")) {
            const auto& m = p["mcts"];
            pc.mcts.simulations = m.value("simulations", pc.mcts.simulations);
            pc.mcts.exploration = m.value("exploration", pc.mcts.exploration);
            pc.mcts.discount = m.value("discount", pc.mcts.discount);
        }
        if (p.contains("cmaes")) {
            const auto& m = p["cmaes"];
            pc.cmaes.population = m.value("population", pc.cmaes.population);
            pc.cmaes.sigma0 = m.value("sigma0", pc.cmaes.sigma0);
            pc.cmaes.generations = m.value("generations", pc.cmaes.generations);
        }
    }
    c.planner_config.lookahead.fov = c.fov;
    c.seed = j.value("seed", c.seed);
    if (j.contains("start")) {
        const auto& s = j["start"];
        if (!s.is_array() || s.size() != 2) {
            throw ConfigError("start must be [x, y]");
        }
        c.start = Pose{s[0].get<int>(), s[1].get<int>()};
    }
    const std::string norm = j.value("unc_normalization", std::string("trace"));
    if (norm == "trace") {
        c.unc_normalization = TraceNormalization::Trace;
    } else if (norm == "log_trace") {
        c.unc_normalization = TraceNormalization::LogTrace;
    } else {
        throw ConfigError("unc_normalization must be trace or log_trace");
    }
    c.record_timing = j.value("record_timing", c.record_timing);
}

void to_json(json& j, const BenchmarkConfig& c) {
    j = json::object();
    j["mission"] = c.base;
    json protocols = json::array();
    for (Protocol p : c.protocols) {
        protocols.push_back(protocol_name(p));
    }
    j["protocols"] = protocols;
    j["missions"] = c.missions;
    j["repeats"] = c.repeats;
    json planners = json::array();
    for (PlannerKind p : c.planners) {
        planners.push_back(planner_name(p));
    }
    j["planners"] = planners;
    j["static"] = {{"threshold", c.static_threshold},
                   {"lengthscale", c.static_lengthscale},
                   {"classes", c.static_classes}};
    j["varying"] = {{"threshold", range_json(c.threshold_range)}, {"lengthscale", range_json(c.lengthscale_range)}};
    j["field_correlation"] = range_json(c.field_correlation_range);
    j["master_seed"] = c.master_seed;
    j["record_timing"] = c.record_timing;
}

void from_json(const json& j, BenchmarkConfig& c) {
    c = BenchmarkConfig{};
    if (j.contains("mission")) {
        c.base = j["mission"].get<MissionConfig>();
    }
    if (j.contains("protocols")) {
        c.protocols.clear();
        for (const auto& p : j["protocols"]) {
            c.protocols.push_back(parse_protocol(p.get<std::string>()));
        }
    }
    c.missions = j.value("missions", c.missions);
    c.repeats = j.value("repeats", c.repeats);
    if (j.contains("planners")) {
        c.planners.clear();
        for (const auto& p : j["planners"]) {
            c.planners.push_back(parse_planner(p.get<std::string>()));
        }
    }
    if (j.contains("static")) {
        const auto& s = j["static"];
        c.static_threshold = s.value("threshold", c.static_threshold);
        c.static_lengthscale = s.value("lengthscale", c.static_lengthscale);
        c.static_classes = s.value("classes", c.static_classes);
    }
    if (j.contains("varying")) {
        const auto& v = j["varying"];
        if (v.contains("threshold")) {
            c.threshold_range = parse_range(v["threshold"]);
        }
        if (v.contains("lengthscale")) {
            c.lengthscale_range = parse_range(v["lengthscale"]);
        }
    }
    if (j.contains("field_correlation")) {
        c.field_correlation_range = parse_range(j["field_correlation"]);
    }
    c.master_seed = j.value("master_seed", c.master_seed);
    c.parallel = j.value("parallel", c.parallel);
    c.record_timing = j.value("record_timing", c.record_timing);
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    // splitmix64 over the concatenated labels
    std::uint64_t state = parent;
    auto mix = [&](std::uint64_t v) {
        state += 0x9e3779b97f4a7c15ull ^ v;
        std::uint64_t z = state;
        z = (z ^ (z >> 30u)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27u)) * 0x94d049bb133111ebull;
        state = z ^ (z >> 31u);
    };
    mix(a);
    mix(b);
    mix(c);
    return state;
}

}  // namespace ipp
