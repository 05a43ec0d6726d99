#include "liminfo/dimwitness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gtest/gtest.h"

using namespace liminfo;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

// Volume-ratio form of the projection density, from closed-form ball volumes.
double volume_ratio_density(double m, double D, double R) {
    const auto volume = [](double dim, double r) {
        return std::pow(std::numbers::pi, dim / 2) * std::pow(r, dim) / std::tgamma(dim / 2 + 1);
    };
    return volume(D - 1, std::sqrt(R * R - m * m)) / volume(D, R);
}

std::vector<double> sorted_column(const Eigen::MatrixXd& m, Eigen::Index col) {
    std::vector<double> v(m.col(col).begin(), m.col(col).end());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST(BallVolume, low_dimensions) {
    EXPECT_NEAR(ball_volume(1, 1), 2.0, 1e-14);
    EXPECT_NEAR(ball_volume(2, 1), std::numbers::pi, 1e-14);
    EXPECT_NEAR(ball_volume(3, 1), 4.0 * std::numbers::pi / 3.0, 1e-14);
    EXPECT_NEAR(ball_volume(3, 2), 32.0 * std::numbers::pi / 3.0, 1e-12);
    EXPECT_THROW(ball_volume(0, 1), std::domain_error);
}

TEST(AnalyticFreq, examples) {
    EXPECT_NEAR(analytic_freq(0.0, 2, 1), 2.0 / std::numbers::pi, 1e-14);
    EXPECT_NEAR(analytic_freq(0.0, 3, 1), 0.75, 1e-14);
    for (double m : {-0.9, -0.3, 0.2, 0.7}) EXPECT_NEAR(analytic_freq(m, 3, 1), 0.75 * (1 - m * m), 1e-14);
    for (double D : {1.5, 2.0, 3.0, 7.0}) {
        EXPECT_EQ(analytic_freq(1.0, D, 1.0), 0.0);
        EXPECT_EQ(analytic_freq(-1.0, D, 1.0), 0.0);
    }
    EXPECT_NEAR(analytic_freq(1.0, 1.0, 1.0), 0.5, 1e-14);
    EXPECT_THROW(analytic_freq(1.1, 3, 1), std::domain_error);
}

TEST(AnalyticFreq, integrates_to_one) {
    for (double D : {1.0, 2.0, 3.0, 7.0, 4.5}) {
        for (double R : {1.0, 0.5}) {
            const double total = integrate([&](double m) { return analytic_freq(m, D, R); }, -R, R);
            EXPECT_NEAR(total, 1.0, 1e-8) << "D=" << D;
        }
    }
}

TEST(AnalyticFreq, matches_volume_ratio_form) {
    for (double D : {2.0, 3.0, 4.5, 7.0, 12.0})
        for (double m = -0.95; m < 0.96; m += 0.05) EXPECT_NEAR(analytic_freq(m, D, 1.0), volume_ratio_density(m, D, 1.0), 1e-10);
    EXPECT_NEAR(analytic_freq(0.4, 3.0, 2.0), volume_ratio_density(0.4, 3.0, 2.0), 1e-12);
}

TEST(AnalyticCdf, matches_quadrature_of_density) {
    for (double D : {1.0, 2.0, 3.0, 7.0, 4.5})
        for (double m : {-0.8, -0.25, 0.0, 0.33, 0.9}) {
            const double q = integrate([&](double t) { return analytic_freq(t, D, 1.0); }, -1.0, m);
            EXPECT_NEAR(analytic_cdf(m, D, 1.0), q, 1e-10) << "D=" << D << " m=" << m;
        }
}

TEST(AnalyticFreqMulti, reduces_and_examples) {
    const double m[] = {0.3};
    EXPECT_NEAR(analytic_freq_multi(m, 7, 1), analytic_freq(0.3, 7, 1), 1e-12);
    const double origin[] = {0.0, 0.0};
    EXPECT_NEAR(analytic_freq_multi(origin, 3, 1), 3.0 / (2.0 * std::numbers::pi), 1e-14);
    const double edge[] = {0.6, 0.8};
    EXPECT_EQ(analytic_freq_multi(edge, 3, 1), 0.0);
    const double outside[] = {0.8, 0.8};
    EXPECT_THROW(analytic_freq_multi(outside, 3, 1), std::domain_error);
    EXPECT_THROW(analytic_freq_multi(origin, 2, 1), std::domain_error);
}

TEST(AnalyticFreqMulti, integrates_to_one_over_the_disc) {
    // d = 2 projections of a D = 5 ball: integrate in polar coordinates.
    const double total = integrate(
        [](double r) {
            const double pt[] = {r, 0.0};
            return 2 * std::numbers::pi * r * analytic_freq_multi(pt, 5, 1);
        },
        0.0, 1.0);
    EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(BallSampler, radius_power_is_uniform) {
    for (int D : {1, 2, 3, 7}) {
        const BallSampler sampler(D, 1.0, RandomStream(31));
        const auto pts = sample_projections(sampler, Eigen::MatrixXd::Identity(D, D), 100000);
        std::vector<double> u(static_cast<std::size_t>(pts.rows()));
        for (Eigen::Index i = 0; i < pts.rows(); ++i) u[static_cast<std::size_t>(i)] = std::pow(pts.row(i).norm(), D);
        std::sort(u.begin(), u.end());
        // 1.95/sqrt(n) is the 0.1% critical value of the KS statistic.
        EXPECT_LT(ks_statistic(u, [](double x) { return x; }), 1.95 / std::sqrt(100000.0)) << D;
        EXPECT_LE(u.back(), 1.0);
    }
}

TEST(SampleMeans, interval_is_flat) {
    const BallSampler sampler(1, 1.0, RandomStream(2));
    const auto h = sample_means(sampler, canonical_axes(1, 1), 100000);
    ASSERT_EQ(h.total(), 100000u);
    double chi2 = 0.0;
    const double expected = 100000.0 / h.bins();
    for (auto c : h.counts()) chi2 += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared dist(h.bins() - 1);
    EXPECT_LT(chi2, boost::math::quantile(boost::math::complement(dist, 0.001)));
}

TEST(SampleMeans, three_ball_matches_parabola) {
    const BallSampler sampler(3, 1.0, RandomStream(42));
    const auto proj = sample_projections(sampler, canonical_axes(3, 1), 1000000);
    const auto sorted = sorted_column(proj, 0);
    EXPECT_LT(ks_statistic(sorted, [](double m) { return analytic_cdf(m, 3, 1); }), 0.002);
    const auto h = histogram_of(proj, 1.0);
    EXPECT_EQ(h, sample_means(sampler, canonical_axes(3, 1), 1000000));
}

TEST(SampleMeans, same_seed_same_histogram) {
    const Eigen::MatrixXd axes = canonical_axes(7, 1);
    const auto a = sample_means(BallSampler(7, 1.0, RandomStream(5)), axes, 200000);
    const auto b = sample_means(BallSampler(7, 1.0, RandomStream(5)), axes, 200000);
    const auto c = sample_means(BallSampler(7, 1.0, RandomStream(6)), axes, 200000);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(SampleMeans, multi_axis_histogram_shape) {
    const auto h = sample_means(BallSampler(4, 1.0, RandomStream(3)), canonical_axes(4, 2), 5000, 11);
    EXPECT_EQ(h.axes(), 2);
    EXPECT_EQ(h.counts().size(), 121u);
    EXPECT_EQ(h.total(), 5000u);
    EXPECT_THROW(sample_means(BallSampler(4, 1.0, RandomStream(3)), Eigen::MatrixXd::Ones(4, 1), 10), std::invalid_argument);
}

TEST(FitDimension, recovers_exact_bin_probabilities) {
    for (double D : {1.0, 2.0, 3.0, 4.5, 7.0, 20.0}) {
        const MeanHistogram shape(1.0, 101);
        auto weights = bin_probabilities(shape.edges(), D, 1.0);
        for (auto& w : weights) w *= 1e6;
        const auto fit = fit_dimension(shape.edges(), weights, 1.0);
        EXPECT_NEAR(fit.D_hat, D, 1e-6) << D;
    }
}

TEST(FitDimension, monte_carlo_self_consistency) {
    for (auto [D, tol] : std::initializer_list<std::pair<int, double>>{{3, 0.1}, {7, 0.2}}) {
        const auto h = sample_means(BallSampler(D, 1.0, RandomStream(42)), canonical_axes(D, 1), 1000000);
        const auto fit = fit_dimension(h, 1.0);
        EXPECT_NEAR(fit.D_hat, D, tol);
        EXPECT_GT(fit.std_error, 0.0);
        EXPECT_LT(std::abs(fit.D_hat - D), 5 * fit.std_error + 1e-3);
    }
}

TEST(FitDimension, standard_error_shrinks_like_root_n) {
    const Eigen::MatrixXd axes = canonical_axes(3, 1);
    std::vector<double> errors;
    for (std::size_t n : {10000u, 100000u, 1000000u}) {
        errors.push_back(fit_dimension(sample_means(BallSampler(3, 1.0, RandomStream(n)), axes, n), 1.0).std_error);
    }
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        const double ratio = errors[k] / errors[k + 1];
        EXPECT_GT(ratio, std::sqrt(10.0) / 1.5);
        EXPECT_LT(ratio, std::sqrt(10.0) * 1.5);
    }
}

TEST(FitDimension, rejects_degenerate_input) {
    MeanHistogram h(1.0, 11);
    for (int i = 0; i < 2000; ++i) {
        const double v[] = {0.01};
        h.add(v);
    }
    EXPECT_THROW(fit_dimension(h, 1.0), std::domain_error);
    MeanHistogram small(1.0, 11);
    const double v[] = {0.5};
    small.add(v);
    EXPECT_THROW(fit_dimension(small, 1.0), std::domain_error);
}

TEST(MomentEstimate, cross_checks_the_fit) {
    const auto proj = sample_projections(BallSampler(7, 1.0, RandomStream(12)), canonical_axes(7, 1), 200000);
    std::vector<double> v(proj.col(0).begin(), proj.col(0).end());
    EXPECT_NEAR(moment_dimension_estimate(v, 1.0), 7.0, 0.15);
}

TEST(PurityDrift, block_rotation_keeps_length) {
    const TheoryLevel level(3);
    const auto q = qubit_embedding(level, {0, 1, 2});
    RandomStream rng(6);
    const auto r = q.block_rotation(Rotation::random(3, rng).matrix());
    const auto trace = purity_drift(level, q.inject(Eigen::Vector3d(0, 0.6, 0.8)), r, 1000, q);
    ASSERT_EQ(trace.size(), 1001u);
    for (double v : trace) EXPECT_NEAR(v, 1.0, 1e-10);
}

TEST(PurityDrift, planar_mixing_follows_cosine_profile) {
    const TheoryLevel level(3);
    const auto q = qubit_embedding(level, {0, 1, 2});
    const double theta = 0.1;
    const auto r = Rotation::plane(7, 2, 3, theta);  // in-triple axis 2 with out-of-triple axis 3
    const Eigen::Vector3d bloch(0.0, 0.6, 0.8);
    const auto trace = purity_drift(level, q.inject(bloch), r, 1000, q);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        const double c = std::cos(theta * static_cast<double>(k));
        EXPECT_NEAR(trace[k], std::sqrt(0.36 + 0.64 * c * c), 1e-9) << k;
        EXPECT_LE(trace[k], 1.0 + 1e-12);
    }
}

TEST(PurityDrift, random_rotation_stays_in_unit_interval) {
    const TheoryLevel level(3);
    const auto q = qubit_embedding(level, {3, 5, 6});
    RandomStream rng(8);
    const auto trace = purity_drift(level, q.inject(Eigen::Vector3d(1, 0, 0)), Rotation::random(7, rng), 500, q);
    for (double v : trace) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0 + 1e-12);
    }
    EXPECT_LT(*std::min_element(trace.begin(), trace.end()), 0.99);
    EXPECT_THROW(purity_drift(level, StateVector::axis(3, 0), Rotation::identity(7), 3, q), std::invalid_argument);
}

TEST(Planar, half_disc_hides_from_one_axis_only) {
    const auto demo = disc_halfdisc_demo(100000, RandomStream(2));
    EXPECT_LT(demo.single_axis_distance, 0.01);
    EXPECT_GT(demo.two_axis_distance, 0.4);
    const auto control = compare_planar(PlanarRegion::disc, PlanarRegion::disc, 100000, RandomStream(2));
    EXPECT_LT(control.single_axis_distance, 0.01);
    EXPECT_LT(control.two_axis_distance, 0.01);
    EXPECT_THROW(disc_halfdisc_demo(100, RandomStream(2)), std::invalid_argument);
}

TEST(Planar, half_disc_projection_follows_disc_density) {
    const auto pts = sample_planar(PlanarRegion::half_disc, 100000, RandomStream(77));
    EXPECT_GE(pts.col(1).minCoeff(), 0.0);
    const auto xs = sorted_column(pts, 0);
    EXPECT_LT(ks_statistic(xs, [](double m) { return analytic_cdf(m, 2, 1); }), 1.95 / std::sqrt(100000.0));
}

TEST(KolmogorovSmirnov, two_sample_statistic) {
    const std::vector<double> a = {0.1, 0.2, 0.3, 0.4};
    const std::vector<double> b = {0.5, 0.6, 0.7, 0.8};
    EXPECT_DOUBLE_EQ(ks_two_sample(a, b), 1.0);
    EXPECT_DOUBLE_EQ(ks_two_sample(a, a), 0.0);
    const std::vector<double> c = {0.1, 0.2, 0.6, 0.7};
    EXPECT_DOUBLE_EQ(ks_two_sample(a, c), 0.5);
}
