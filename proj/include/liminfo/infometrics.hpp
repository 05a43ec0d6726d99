#pragma once

// Information content of a state summed over a complete set of mutually
// complementary measurements, for the alpha-entropy family
//   I(p+, p-) = 1 - k (1 - p+^alpha - p-^alpha) / (alpha - 1).
// Only alpha = 2 (with k = 2, I = (n.m)^2) is invariant under a change of frame.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "liminfo/geometry.hpp"
#include "liminfo/random.hpp"

namespace liminfo {

class InfoMeasureParams {
public:
    InfoMeasureParams(double alpha, double k) : alpha_(alpha), k_(k) {
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be a positive real");
        if (alpha == 1.0) throw std::invalid_argument("alpha = 1 requires InfoMeasureParams::shannon()");
        if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("k must be a positive real");
    }

    /// The quadratic measure, I = (n.m)^2.
    static InfoMeasureParams quadratic() { return {2.0, 2.0}; }

    /// k chosen so that an unbiased outcome (p = 1/2) carries zero information.
    static InfoMeasureParams normalized(double alpha) {
        if (alpha == 1.0) return shannon();
        return {alpha, (alpha - 1.0) / (1.0 - std::pow(2.0, 1.0 - alpha))};
    }

    /// alpha -> 1 limit: I = 1 - H(p) in bits (k = 1/ln 2 on natural logs).
    static InfoMeasureParams shannon() { return InfoMeasureParams(); }

    double alpha() const { return alpha_; }
    double k() const { return k_; }
    bool is_shannon() const { return shannon_; }

    std::string describe() const {
        return shannon_ ? std::string("shannon") : "alpha=" + std::to_string(alpha_) + ",k=" + std::to_string(k_);
    }

private:
    InfoMeasureParams() : alpha_(1.0), k_(1.0 / std::numbers::ln2), shannon_(true) {}

    double alpha_;
    double k_;
    bool shannon_ = false;
};

inline double single_info(double p_plus, const InfoMeasureParams& params) {
    if (!(p_plus >= 0.0 && p_plus <= 1.0)) throw std::domain_error("probability must lie in [0, 1]");
    const double p_minus = 1.0 - p_plus;
    if (params.is_shannon()) {
        const auto plogp = [](double p) { return p > 0.0 ? p * std::log(p) : 0.0; };
        return 1.0 + params.k() * (plogp(p_plus) + plogp(p_minus));
    }
    const double a = params.alpha();
    return 1.0 - params.k() * (1.0 - std::pow(p_plus, a) - std::pow(p_minus, a)) / (a - 1.0);
}

/// D mutually orthonormal measurement axes, stored as matrix columns.
class ComplementaryFrame {
public:
    explicit ComplementaryFrame(Eigen::MatrixXd axes) : axes_(std::move(axes)) {
        if (axes_.rows() == 0 || axes_.rows() != axes_.cols()) throw std::invalid_argument("frame must be D x D");
        const auto n = axes_.rows();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(axes_.col(j).norm() - 1.0) > kNormTolerance) throw std::invalid_argument("frame axis not unit");
        }
        const Eigen::MatrixXd gram = axes_.transpose() * axes_;
        if ((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > kOrthogonalityTolerance) {
            throw std::invalid_argument("frame axes are not mutually orthogonal");
        }
    }

    static ComplementaryFrame canonical(std::size_t dim) {
        const auto n = static_cast<Eigen::Index>(dim);
        return ComplementaryFrame(Eigen::MatrixXd::Identity(n, n));
    }

    ComplementaryFrame rotated(const Rotation& r) const {
        detail::require_same_dim(r.dim(), dim(), "frame rotation");
        Eigen::MatrixXd m = r.matrix() * axes_;
        // Re-normalize columns that drifted past the construction tolerance.
        for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j).normalize();
        return ComplementaryFrame(std::move(m));
    }

    std::size_t dim() const { return static_cast<std::size_t>(axes_.cols()); }
    const Eigen::MatrixXd& axes() const { return axes_; }
    MeasurementAxis axis(std::size_t j) const { return MeasurementAxis(axes_.col(static_cast<Eigen::Index>(j))); }

private:
    Eigen::MatrixXd axes_;
};

inline double total_info(const StateVector& n, const ComplementaryFrame& frame, const InfoMeasureParams& params) {
    detail::require_same_dim(n.dim(), frame.dim(), "total_info");
    double total = 0.0;
    for (std::size_t j = 0; j < frame.dim(); ++j) total += single_info(measure_prob(n, frame.axis(j)), params);
    return total;
}

struct InvarianceScan {
    double base_info = 0.0;
    double max_deviation = 0.0;
    Eigen::MatrixXd witness;  // frame attaining max_deviation (canonical frame if none deviates)
};

/// Compares the canonical frame against `trials` Haar-random frames. Trial t
/// draws its rotation from rng.derive(t).
inline InvarianceScan invariance_scan(const StateVector& n, const InfoMeasureParams& params, int trials,
                                      const RandomStream& rng) {
    if (trials < 1) throw std::invalid_argument("invariance_scan needs at least one trial");
    const auto base = ComplementaryFrame::canonical(n.dim());
    InvarianceScan scan{total_info(n, base, params), 0.0, base.axes()};
    for (int t = 0; t < trials; ++t) {
        auto stream = rng.derive(static_cast<std::uint64_t>(t));
        const auto frame = base.rotated(Rotation::random(n.dim(), stream));
        const double dev = std::abs(total_info(n, frame, params) - scan.base_info);
        if (dev > scan.max_deviation) {
            scan.max_deviation = dev;
            scan.witness = frame.axes();
        }
    }
    return scan;
}

}  // namespace liminfo
