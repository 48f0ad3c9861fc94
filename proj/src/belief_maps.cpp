#include "ipp/belief_maps.hpp"

#include "ipp/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace ipp {

double kernel_eval(GridGeometry::Point a, GridGeometry::Point b, const MaternKernel& kernel) {
    const double d = std::hypot(a.x - b.x, a.y - b.y);
    const double r = std::sqrt(3.0) * d / kernel.lengthscale;
    return kernel.signal_variance * (1.0 + r) * std::exp(-r);
}

double OccupancyMapBelief::effective_floor() const {
    return std::min(clamp.p_min, (1.0 - clamp.p_max) / static_cast<double>(classes - 1));
}

const GridGeometry& geometry_of(const MapBelief& belief) {
    return std::visit([](const auto& b) -> const GridGeometry& { return b.geometry; }, belief);
}

GaussianMapBelief gp_init(const GridGeometry& geometry, const MaternKernel& kernel, double prior_mean,
                          double noise_variance) {
    if (!(noise_variance > 0.0)) {
        throw ConfigError("GP noise variance must be > 0");
    }
    if (!(kernel.lengthscale > 0.0) || !(kernel.signal_variance > 0.0)) {
        throw ConfigError("Matern lengthscale and signal variance must be > 0");
    }
    const auto n = static_cast<Eigen::Index>(geometry.cell_count());
    GaussianMapBelief belief;
    belief.geometry = geometry;
    belief.kernel = kernel;
    belief.noise_variance = noise_variance;
    belief.mean = Eigen::VectorXd::Constant(n, prior_mean);
    belief.covariance.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto ci = geometry.center(static_cast<std::size_t>(i));
        belief.covariance(i, i) = kernel.signal_variance + kGramJitter;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double k = kernel_eval(ci, geometry.center(static_cast<std::size_t>(j)), kernel);
            belief.covariance(i, j) = k;
            belief.covariance(j, i) = k;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(belief.covariance);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("prior Gram matrix is not positive-definite after jitter");
    }
    return belief;
}

void gp_fuse_in_place(GaussianMapBelief& belief, const Measurement& m) {
    if (m.empty()) {
        return;
    }
    const auto n = belief.mean.size();
    const auto k = static_cast<Eigen::Index>(m.samples.size());
    Eigen::MatrixXd cross(n, k);  // P H^T
    Eigen::VectorXd innovation(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto cell = static_cast<Eigen::Index>(m.samples[static_cast<std::size_t>(j)].cell);
        if (cell < 0 || cell >= n) {
            throw ConfigError("measurement cell outside the map");
        }
        cross.col(j) = belief.covariance.col(cell);
        innovation(j) = m.samples[static_cast<std::size_t>(j)].value - belief.mean(cell);
    }
    Eigen::MatrixXd s(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index i = 0; i < k; ++i) {
            s(i, j) = cross(static_cast<Eigen::Index>(m.samples[static_cast<std::size_t>(i)].cell), j);
        }
        s(j, j) += belief.noise_variance;
    }
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("innovation matrix is not positive-definite");
    }
    // W = L^{-1} (P H^T)^T, so that P' = P - W^T W.
    Eigen::MatrixXd w = cross.transpose();
    llt.matrixL().solveInPlace(w);
    Eigen::VectorXd whitened = innovation;
    llt.matrixL().solveInPlace(whitened);

    belief.mean.noalias() += w.transpose() * whitened;
    belief.covariance.noalias() -= w.transpose() * w;
    belief.covariance = 0.5 * (belief.covariance + belief.covariance.transpose()).eval();
}

GaussianMapBelief gp_fuse(const GaussianMapBelief& belief, const Measurement& m) {
    GaussianMapBelief out = belief;
    gp_fuse_in_place(out, m);
    return out;
}

OccupancyMapBelief occ_init(const GridGeometry& geometry, int classes, OccupancyClamp clamp) {
    if (classes < 2) {
        throw ConfigError("occupancy map needs K >= 2");
    }
    const double uniform = 1.0 / classes;
    if (!(0.0 < clamp.p_min && clamp.p_min < uniform && uniform < clamp.p_max && clamp.p_max < 1.0)) {
        throw ConfigError("occupancy clamp must satisfy 0 < p_min < 1/K < p_max < 1");
    }
    OccupancyMapBelief belief;
    belief.geometry = geometry;
    belief.classes = classes;
    belief.clamp = clamp;
    belief.probs = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(geometry.cell_count()), classes, uniform);
    return belief;
}

void clamp_distribution(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> probs, double floor, double ceiling) {
    const auto k = probs.size();
    std::vector<bool> pinned(static_cast<std::size_t>(k), false);
    for (Eigen::Index round = 0; round <= k; ++round) {
        double pinned_mass = 0.0;
        double free_mass = 0.0;
        Eigen::Index free_count = 0;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (pinned[static_cast<std::size_t>(i)]) {
                pinned_mass += probs(i);
            } else {
                free_mass += probs(i);
                ++free_count;
            }
        }
        if (free_count == 0) {
            break;
        }
        const double target = 1.0 - pinned_mass;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (!pinned[static_cast<std::size_t>(i)]) {
                probs(i) = free_mass > 0.0 ? probs(i) * (target / free_mass)
                                           : target / static_cast<double>(free_count);
            }
        }
        // Upper bound first: pinning at the ceiling releases mass that may
        // lift the other entries back above the floor.
        bool changed = false;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (!pinned[static_cast<std::size_t>(i)] && probs(i) > ceiling) {
                probs(i) = ceiling;
                pinned[static_cast<std::size_t>(i)] = true;
                changed = true;
            }
        }
        if (changed) {
            continue;
        }
        for (Eigen::Index i = 0; i < k; ++i) {
            if (!pinned[static_cast<std::size_t>(i)] && probs(i) < floor) {
                probs(i) = floor;
                pinned[static_cast<std::size_t>(i)] = true;
                changed = true;
            }
        }
        if (!changed) {
            break;
        }
    }
}

void occ_update_cell(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> probs, int observed_class, const ConfusionMatrix& confusion,
                     OccupancyClamp clamp) {
    const auto k = probs.size();
    double total = 0.0;
    for (Eigen::Index f = 0; f < k; ++f) {
        probs(f) *= confusion.likelihood(static_cast<int>(f) + 1, observed_class);
        total += probs(f);
    }
    if (total > 0.0) {
        probs /= total;
    } else {
        probs.setConstant(1.0 / static_cast<double>(k));
    }
    const double floor = std::min(clamp.p_min, (1.0 - clamp.p_max) / static_cast<double>(k - 1));
    clamp_distribution(probs, floor, clamp.p_max);
}

void occ_fuse_in_place(OccupancyMapBelief& belief, const Measurement& m, const ConfusionMatrix& confusion) {
    if (confusion.classes() != belief.classes) {
        throw ConfigError("confusion matrix dimension does not match the occupancy map");
    }
    for (const Sample& s : m.samples) {
        const int observed = static_cast<int>(s.value);
        if (observed < 1 || observed > belief.classes || static_cast<double>(observed) != s.value) {
            throw ConfigError("observed class outside 1..K");
        }
        if (s.cell >= belief.geometry.cell_count()) {
            throw ConfigError("measurement cell outside the map");
        }
        occ_update_cell(belief.probs.row(static_cast<Eigen::Index>(s.cell)), observed, confusion, belief.clamp);
    }
}

OccupancyMapBelief occ_fuse(const OccupancyMapBelief& belief, const Measurement& m, const ConfusionMatrix& confusion) {
    OccupancyMapBelief out = belief;
    occ_fuse_in_place(out, m, confusion);
    return out;
}

double shannon_entropy(const Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>& probs) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        const double p = probs(i);
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    return h;
}

double cell_uncertainty(const MapBelief& belief, std::size_t cell, UncertaintyVariant variant) {
    if (const auto* g = std::get_if<GaussianMapBelief>(&belief)) {
        return std::max(0.0, g->variance(cell));
    }
    const auto& o = std::get<OccupancyMapBelief>(belief);
    const double h = shannon_entropy(o.probs.row(static_cast<Eigen::Index>(cell)));
    return variant == UncertaintyVariant::StateSpace ? h : std::exp(h);
}

std::vector<double> uncertainty_grid(const MapBelief& belief, UncertaintyVariant variant) {
    const std::size_t n = geometry_of(belief).cell_count();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = cell_uncertainty(belief, i, variant);
    }
    return out;
}

namespace {

void write_layer(std::ofstream& out, const GridGeometry& g, const char* name, auto value_at) {
    out << "# " << name << '\n';
    char buf[32];
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            std::snprintf(buf, sizeof buf, "%.17g", value_at(g.index(x, y)));
            out << (x ? "," : "") << buf;
        }
        out << '\n';
    }
}

}  // namespace

void write_belief_csv(const MapBelief& belief, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    if (const auto* g = std::get_if<GaussianMapBelief>(&belief)) {
        write_layer(out, g->geometry, "mean", [&](std::size_t i) { return g->mean(static_cast<Eigen::Index>(i)); });
        write_layer(out, g->geometry, "variance", [&](std::size_t i) { return g->variance(i); });
    } else {
        const auto& o = std::get<OccupancyMapBelief>(belief);
        for (int c = 0; c < o.classes; ++c) {
            const std::string name = "class " + std::to_string(c + 1);
            write_layer(out, o.geometry, name.c_str(),
                        [&](std::size_t i) { return o.probs(static_cast<Eigen::Index>(i), c); });
        }
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

}  // namespace ipp
