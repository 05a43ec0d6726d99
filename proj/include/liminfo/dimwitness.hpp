#pragma once

// Dimension witness: for states drawn uniformly from a D-ball of radius R,
// the mean value m = n.x along a fixed axis has density
//   F_D(m) = V_{D-1}(sqrt(R^2 - m^2)) / V_D(R)
//          = (R^2 - m^2)^{(D-1)/2} / (R^D B((D+1)/2, 1/2)),
// whose shape reveals D. Also the purity drift of a qubit projection and the
// disc / half-disc comparison.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/minima.hpp>

#include "liminfo/geometry.hpp"
#include "liminfo/random.hpp"

namespace liminfo {

namespace detail {

inline void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error(std::string(what) + " must be a positive real");
}

inline double log_ball_volume(double D, double R) {
    return 0.5 * D * std::log(std::numbers::pi) + D * std::log(R) - std::lgamma(0.5 * D + 1.0);
}

/// ln B(x, 1/2).
inline double log_beta_half(double x) {
    return std::lgamma(x) + std::lgamma(0.5) - std::lgamma(x + 0.5);
}

}  // namespace detail

/// V_D(R) = pi^{D/2} R^D / Gamma(D/2 + 1); D may be any positive real.
inline double ball_volume(double D, double R) {
    detail::require_positive(D, "dimension");
    detail::require_positive(R, "radius");
    return std::exp(detail::log_ball_volume(D, R));
}

inline double analytic_freq(double m, double D, double R) {
    detail::require_positive(D, "dimension");
    detail::require_positive(R, "radius");
    if (!(std::abs(m) <= R)) throw std::domain_error("|m| must not exceed R");
    const double chord2 = std::max(R * R - m * m, 0.0);
    const double norm = std::exp(-D * std::log(R) - detail::log_beta_half(0.5 * D + 0.5));
    if (chord2 == 0.0) return std::pow(0.0, 0.5 * (D - 1.0)) * norm;
    return std::exp(0.5 * (D - 1.0) * std::log(chord2)) * norm;
}

/// P(projection <= m): (1 + m/R)/2 is Beta((D+1)/2, (D+1)/2) distributed.
inline double analytic_cdf(double m, double D, double R) {
    detail::require_positive(D, "dimension");
    detail::require_positive(R, "radius");
    if (m <= -R) return 0.0;
    if (m >= R) return 1.0;
    const double a = 0.5 * (D + 1.0);
    return boost::math::ibeta(a, a, 0.5 * (1.0 + m / R));
}

/// Joint density of projections onto d < D orthonormal axes:
/// V_{D-d}(r) / V_D(R), r = sqrt(R^2 - |m|^2).
inline double analytic_freq_multi(std::span<const double> m, double D, double R) {
    detail::require_positive(D, "dimension");
    detail::require_positive(R, "radius");
    const double d = static_cast<double>(m.size());
    if (m.empty() || !(d < D)) throw std::domain_error("need 1 <= d < D projections");
    double sq = 0.0;
    for (double v : m) sq += v * v;
    if (!(sq <= R * R * (1.0 + 1e-15))) throw std::domain_error("projection vector lies outside the ball");
    const double r2 = std::max(R * R - sq, 0.0);
    const double rest = D - d;
    // V_{D-d}(r) written with r^{D-d} = (r^2)^{(D-d)/2} so r = 0 gives 0.
    const double log_v = 0.5 * rest * std::log(std::numbers::pi) + 0.5 * rest * std::log(r2) - std::lgamma(0.5 * rest + 1.0);
    return std::exp(log_v - detail::log_ball_volume(D, R));
}

/// Uniform points of the closed D-ball of radius R: Gaussian direction scaled
/// by R u^{1/D}.
class BallSampler {
public:
    static constexpr const char* sampler_id = "gaussian-direction+radius-u^(1/D)";

    BallSampler(int D, double R, RandomStream rng) : D_(D), R_(R), rng_(std::move(rng)) {
        if (D < 1) throw std::invalid_argument("ball dimension must be >= 1");
        detail::require_positive(R, "radius");
    }

    int dim() const { return D_; }
    double radius() const { return R_; }
    const RandomStream& stream() const { return rng_; }

    Eigen::VectorXd draw() { return draw(rng_); }

    Eigen::VectorXd draw(RandomStream& rng) const {
        Eigen::VectorXd v(D_);
        double norm = 0.0;
        do {
            for (int i = 0; i < D_; ++i) v[i] = rng.normal();
            norm = v.norm();
        } while (norm == 0.0);
        const double radius = R_ * std::pow(rng.uniform(), 1.0 / D_);
        return v * (radius / norm);
    }

private:
    int D_;
    double R_;
    RandomStream rng_;
};

inline constexpr std::size_t kSampleBlock = std::size_t{1} << 16;

namespace detail {

/// Runs body(block) for every block, spread over hardware threads. Blocks
/// write disjoint output, so results do not depend on scheduling.
inline void for_each_block(std::size_t blocks, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(blocks, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) body(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t b = next++; b < blocks; b = next++) body(b);
        });
    }
}

}  // namespace detail

/// Projections of `count` ball samples onto the columns of `axes` (D x d,
/// orthonormal). Row i is sample i. Block b of kSampleBlock samples uses
/// sampler.stream().derive(b).
inline Eigen::MatrixXd sample_projections(const BallSampler& sampler, const Eigen::MatrixXd& axes, std::size_t count) {
    if (axes.rows() != sampler.dim() || axes.cols() < 1) throw std::invalid_argument("axes must be D x d with d >= 1");
    const auto d = axes.cols();
    if ((axes.transpose() * axes - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > kOrthogonalityTolerance) {
        throw std::invalid_argument("projection axes must be orthonormal");
    }
    if (count < 1) throw std::invalid_argument("sample count must be >= 1");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(count), d);
    const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
    detail::for_each_block(blocks, [&](std::size_t b) {
        RandomStream rng = sampler.stream().derive(b);
        const std::size_t end = std::min(count, (b + 1) * kSampleBlock);
        for (std::size_t i = b * kSampleBlock; i < end; ++i) {
            out.row(static_cast<Eigen::Index>(i)) = (axes.transpose() * sampler.draw(rng)).transpose();
        }
    });
    return out;
}

inline Eigen::MatrixXd canonical_axes(int D, int d) {
    if (d < 1 || d > D) throw std::invalid_argument("need 1 <= d <= D axes");
    return Eigen::MatrixXd::Identity(D, D).leftCols(d);
}

/// Histogram of projections on [-R, R]^d with equal-width bins per axis;
/// counts are row-major over the d bin indices.
class MeanHistogram {
public:
    static constexpr int kDefaultBins = 101;

    MeanHistogram(double R, int bins, int d = 1) : R_(R), bins_(bins), d_(d) {
        detail::require_positive(R, "radius");
        if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
        if (d < 1 || std::pow(double(bins), d) > 1e8) throw std::invalid_argument("unsupported histogram shape");
        std::size_t cells = 1;
        for (int k = 0; k < d; ++k) cells *= static_cast<std::size_t>(bins);
        counts_.assign(cells, 0);
        edges_.resize(static_cast<std::size_t>(bins) + 1);
        for (int i = 0; i <= bins; ++i) edges_[static_cast<std::size_t>(i)] = -R + 2.0 * R * i / bins;
        edges_.back() = R;
    }

    /// Rebuilds a histogram from explicit edges and counts (d = 1).
    MeanHistogram(std::vector<double> edges, std::vector<std::uint64_t> counts)
        : R_(edges.empty() ? 0.0 : edges.back()), bins_(static_cast<int>(counts.size())), d_(1),
          edges_(std::move(edges)), counts_(std::move(counts)) {
        if (edges_.size() != counts_.size() + 1 || counts_.empty()) throw std::invalid_argument("need bins + 1 edges");
        for (std::size_t i = 1; i < edges_.size(); ++i)
            if (!(edges_[i] > edges_[i - 1])) throw std::invalid_argument("histogram edges must increase strictly");
        detail::require_positive(R_, "radius");
        if (std::abs(edges_.front() + R_) > 1e-12 * R_) throw std::invalid_argument("histogram edges must cover [-R, R]");
        for (auto c : counts_) total_ += c;
    }

    double radius() const { return R_; }
    int bins() const { return bins_; }
    int axes() const { return d_; }
    const std::vector<double>& edges() const { return edges_; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::uint64_t total() const { return total_; }

    std::size_t bin_of(double v) const {
        const auto it = std::upper_bound(edges_.begin(), edges_.end(), v);
        const auto idx = static_cast<std::ptrdiff_t>(it - edges_.begin()) - 1;
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, bins_ - 1));
    }

    void add(std::span<const double> point) {
        if (point.size() != static_cast<std::size_t>(d_)) throw std::invalid_argument("point has the wrong axis count");
        std::size_t cell = 0;
        for (double v : point) {
            if (!(std::abs(v) <= R_ * (1.0 + 1e-12))) throw std::domain_error("projection outside [-R, R]");
            cell = cell * static_cast<std::size_t>(bins_) + bin_of(v);
        }
        ++counts_[cell];
        ++total_;
    }

    void merge(const MeanHistogram& other) {
        if (other.edges_ != edges_ || other.d_ != d_) throw std::invalid_argument("histogram shapes differ");
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
        total_ += other.total_;
    }

    friend bool operator==(const MeanHistogram&, const MeanHistogram&) = default;

private:
    double R_;
    int bins_;
    int d_;
    std::vector<double> edges_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

inline MeanHistogram histogram_of(const Eigen::MatrixXd& projections, double R, int bins = MeanHistogram::kDefaultBins) {
    MeanHistogram h(R, bins, static_cast<int>(projections.cols()));
    std::vector<double> point(static_cast<std::size_t>(projections.cols()));
    for (Eigen::Index i = 0; i < projections.rows(); ++i) {
        for (Eigen::Index k = 0; k < projections.cols(); ++k) point[static_cast<std::size_t>(k)] = projections(i, k);
        h.add(point);
    }
    return h;
}

inline MeanHistogram sample_means(const BallSampler& sampler, const Eigen::MatrixXd& axes, std::size_t count,
                                  int bins = MeanHistogram::kDefaultBins) {
    return histogram_of(sample_projections(sampler, axes, count), sampler.radius(), bins);
}

/// Exact probability of each bin under F_D.
inline std::vector<double> bin_probabilities(std::span<const double> edges, double D, double R) {
    std::vector<double> p(edges.size() - 1);
    double prev = analytic_cdf(edges[0], D, R);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double next = analytic_cdf(edges[i + 1], D, R);
        p[i] = next - prev;
        prev = next;
    }
    return p;
}

struct FitResult {
    double D_hat = 0.0;
    double log_likelihood = 0.0;
    double std_error = 0.0;
    std::size_t bins = 0;
    double total = 0.0;
};

inline double binned_log_likelihood(std::span<const double> edges, std::span<const double> weights, double D, double R) {
    const auto p = bin_probabilities(edges, D, R);
    double ll = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (weights[i] == 0.0) continue;
        if (!(p[i] > 0.0)) return -std::numeric_limits<double>::infinity();
        ll += weights[i] * std::log(p[i]);
    }
    return ll;
}

/// Maximum-likelihood D for binned projections (weights may be fractional).
/// Coarse scan over log D, Brent refinement, curvature-based standard error.
inline FitResult fit_dimension(std::span<const double> edges, std::span<const double> weights, double R) {
    detail::require_positive(R, "radius");
    if (edges.size() != weights.size() + 1 || weights.empty()) throw std::invalid_argument("need bins + 1 edges");
    double total = 0.0;
    std::size_t occupied = 0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("bin weights must be non-negative");
        total += w;
        if (w > 0.0) ++occupied;
    }
    if (occupied < 2) throw std::domain_error("degenerate histogram: all mass in one bin");

    const auto nll = [&](double logD) { return -binned_log_likelihood(edges, weights, std::exp(logD), R); };
    constexpr double lo = -4.0, hi = 9.0;  // D in [0.018, 8100]
    constexpr int grid = 131;
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        const double v = nll(lo + (hi - lo) * i / (grid - 1));
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double step = (hi - lo) / (grid - 1);
    const double a = lo + step * std::max(best - 1, 0);
    const double b = lo + step * std::min(best + 1, grid - 1);
    const auto [log_hat, min_val] = boost::math::tools::brent_find_minima(nll, a, b, std::numeric_limits<double>::digits);

    FitResult fit;
    fit.D_hat = std::exp(log_hat);
    fit.log_likelihood = -min_val;
    fit.bins = weights.size();
    fit.total = total;
    const double h = 1e-2 * fit.D_hat;
    const auto ll = [&](double D) { return binned_log_likelihood(edges, weights, D, R); };
    const double curvature = (ll(fit.D_hat + h) - 2.0 * fit.log_likelihood + ll(fit.D_hat - h)) / (h * h);
    fit.std_error = curvature < 0.0 ? 1.0 / std::sqrt(-curvature) : std::numeric_limits<double>::infinity();
    return fit;
}

inline FitResult fit_dimension(const MeanHistogram& h, double R) {
    if (h.axes() != 1) throw std::invalid_argument("dimension fit needs a single-axis histogram");
    if (h.total() < 1000) throw std::domain_error("dimension fit needs at least 1000 samples");
    std::vector<double> weights(h.counts().begin(), h.counts().end());
    return fit_dimension(h.edges(), weights, R);
}

/// Moment cross-check: <m^2> = R^2 / (D + 2).
inline double moment_dimension_estimate(std::span<const double> projections, double R) {
    double sq = 0.0;
    for (double v : projections) sq += v * v;
    return R * R * static_cast<double>(projections.size()) / sq - 2.0;
}

/// Length of the qubit-triple projection after k = 0..steps applications of R.
inline std::vector<double> purity_drift(const TheoryLevel& level, const StateVector& n0, const Rotation& R, int steps,
                                        const QubitSubspace& triple) {
    detail::require_same_dim(n0.dim(), level.dim(), "purity_drift state");
    detail::require_same_dim(R.dim(), level.dim(), "purity_drift rotation");
    detail::require_same_dim(triple.dim(), level.dim(), "purity_drift subspace");
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(steps) + 1);
    StateVector n = n0;
    trace.push_back(triple.project(n).norm());
    for (int k = 0; k < steps; ++k) {
        n = apply_rotation(R, n);
        trace.push_back(triple.project(n).norm());
    }
    return trace;
}

// --- goodness-of-fit helpers -------------------------------------------------

/// sup |F_empirical - F| for sorted samples.
inline double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

inline double ks_two_sample(std::span<const double> a_sorted, std::span<const double> b_sorted) {
    const double na = static_cast<double>(a_sorted.size()), nb = static_cast<double>(b_sorted.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a_sorted.size() && j < b_sorted.size()) {
        const double v = std::min(a_sorted[i], b_sorted[j]);
        while (i < a_sorted.size() && a_sorted[i] <= v) ++i;
        while (j < b_sorted.size() && b_sorted[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

enum class PlanarRegion { disc, half_disc };

inline const char* to_string(PlanarRegion r) { return r == PlanarRegion::disc ? "disc" : "half_disc"; }

/// Uniform points of the unit disc, or of its y >= 0 half (reflected).
inline Eigen::MatrixXd sample_planar(PlanarRegion region, std::size_t count, const RandomStream& rng) {
    BallSampler disc(2, 1.0, rng);
    Eigen::MatrixXd pts = sample_projections(disc, canonical_axes(2, 2), count);
    if (region == PlanarRegion::half_disc) pts.col(1) = pts.col(1).cwiseAbs();
    return pts;
}

struct PlanarComparison {
    double single_axis_distance;  // two-sample KS of the x projections
    double two_axis_distance;     // total variation of binned (x, y)
};

/// Region a draws from rng.derive(0), region b from rng.derive(1). The (x, y)
/// grid has `grid` equal cells per axis over [-1, 1].
inline PlanarComparison compare_planar(PlanarRegion a, PlanarRegion b, std::size_t samples, const RandomStream& rng,
                                       int grid = 2) {
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    const auto pa = sample_planar(a, samples, rng.derive(0));
    const auto pb = sample_planar(b, samples, rng.derive(1));
    std::vector<double> xa(pa.col(0).begin(), pa.col(0).end()), xb(pb.col(0).begin(), pb.col(0).end());
    std::sort(xa.begin(), xa.end());
    std::sort(xb.begin(), xb.end());
    const auto ha = histogram_of(pa, 1.0, grid), hb = histogram_of(pb, 1.0, grid);
    double tv = 0.0;
    for (std::size_t c = 0; c < ha.counts().size(); ++c) {
        tv += std::abs(static_cast<double>(ha.counts()[c]) / ha.total() - static_cast<double>(hb.counts()[c]) / hb.total());
    }
    return {ks_two_sample(xa, xb), 0.5 * tv};
}

inline PlanarComparison disc_halfdisc_demo(std::size_t samples, const RandomStream& rng) {
    if (samples < 10000) throw std::invalid_argument("disc/half-disc demo needs at least 10^4 samples");
    return compare_planar(PlanarRegion::disc, PlanarRegion::half_disc, samples, rng);
}

}  // namespace liminfo
