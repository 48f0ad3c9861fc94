#include "ipp/lookahead.hpp"

#include "ipp/errors.hpp"
#include "ipp/unified.hpp"

#include <cmath>

namespace ipp {

LookaheadBelief::LookaheadBelief(const MapBelief& live, const InterestSpec& spec, const LookaheadModel& model) {
    auto shared = std::make_shared<Shared>();
    shared->geometry = geometry_of(live);
    shared->interest = interest_grid(live, spec);
    shared->model = model;
    if (const auto* g = std::get_if<GaussianMapBelief>(&live)) {
        shared->gaussian = g;
    } else {
        const auto& o = std::get<OccupancyMapBelief>(live);
        if (!model.confusion || model.confusion->classes() != o.classes) {
            throw ConfigError("occupancy lookahead needs a confusion matrix matching K");
        }
        shared->occupancy = &o;
        probs_ = o.probs;
    }
    uncertainty_ = uncertainty_grid(live, UncertaintyVariant::Reward);
    shared_ = std::move(shared);
}

double LookaheadBelief::advance(Pose pose) {
    const auto cells = fov_cells(shared_->geometry, pose, shared_->model.fov);
    return is_gaussian() ? advance_gaussian(cells) : advance_occupancy(cells);
}

double LookaheadBelief::advance_gaussian(const std::vector<std::size_t>& cells) {
    const GaussianMapBelief& base = *shared_->gaussian;
    const auto n = static_cast<Eigen::Index>(uncertainty_.size());
    const auto m = static_cast<Eigen::Index>(cells.size());
    const auto used = factor_.rows();

    // Current covariance rows at the sensed cells: P(B, :) - G(:, B)^T G.
    RowMatrix cross(m, n);
    for (Eigen::Index j = 0; j < m; ++j) {
        cross.row(j) = base.covariance.col(static_cast<Eigen::Index>(cells[static_cast<std::size_t>(j)])).transpose();
    }
    if (used > 0) {
        Eigen::MatrixXd gb(used, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            gb.col(j) = factor_.col(static_cast<Eigen::Index>(cells[static_cast<std::size_t>(j)]));
        }
        cross.noalias() -= gb.transpose() * factor_;
    }

    Eigen::MatrixXd s(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            s(i, j) = cross(i, static_cast<Eigen::Index>(cells[static_cast<std::size_t>(j)]));
        }
        s(j, j) += base.noise_variance;
    }
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("lookahead innovation matrix is not positive-definite");
    }
    // m is a handful of cells; an explicit L^-1 turns the wide triangular
    // solve into one small dense product.
    Eigen::MatrixXd l_inv = Eigen::MatrixXd::Identity(m, m);
    llt.matrixL().solveInPlace(l_inv);

    factor_.conservativeResize(used + m, n);
    auto w = factor_.bottomRows(m);
    w.noalias() = l_inv.triangularView<Eigen::Lower>() * cross;

    const auto& interest = shared_->interest;
    double reward = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double before = uncertainty_[u];
        const double after = std::max(0.0, before - w.col(i).squaredNorm());
        uncertainty_[u] = after;
        if (before != 0.0) {
            reward += (before - after) / before * interest[u];
        }
    }
    return reward;
}

double LookaheadBelief::advance_occupancy(const std::vector<std::size_t>& cells) {
    const OccupancyMapBelief& base = *shared_->occupancy;
    const ConfusionMatrix& confusion = *shared_->model.confusion;
    const auto& interest = shared_->interest;
    double reward = 0.0;
    for (std::size_t cell : cells) {
        auto row = probs_.row(static_cast<Eigen::Index>(cell));
        Eigen::Index best = 0;
        row.maxCoeff(&best);
        occ_update_cell(row, static_cast<int>(best) + 1, confusion, base.clamp);
        const double before = uncertainty_[cell];
        const double after = std::exp(shannon_entropy(row));
        uncertainty_[cell] = after;
        if (before != 0.0) {
            reward += (before - after) / before * interest[cell];
        }
    }
    return reward;
}

double LookaheadBelief::mean(std::size_t cell) const {
    if (is_gaussian()) {
        return shared_->gaussian->mean(static_cast<Eigen::Index>(cell));
    }
    throw ConfigError("mean() is only defined for Gaussian lookaheads");
}

double LookaheadBelief::variance(std::size_t cell) const {
    if (is_gaussian()) {
        return uncertainty_[cell];
    }
    throw ConfigError("variance() is only defined for Gaussian lookaheads");
}

Eigen::RowVectorXd LookaheadBelief::class_probs(std::size_t cell) const {
    if (is_gaussian()) {
        throw ConfigError("class_probs() is only defined for occupancy lookaheads");
    }
    return probs_.row(static_cast<Eigen::Index>(cell));
}

LookaheadBelief simulate_update(const LookaheadBelief& look, Pose pose) {
    LookaheadBelief next = look;
    next.advance(pose);
    return next;
}

}  // namespace ipp
