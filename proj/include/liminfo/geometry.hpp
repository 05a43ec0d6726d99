#pragma once

// State-space geometry of a level-s theory: pure states on the unit sphere in
// D = 2^s - 1 dimensions, mixed states inside the ball, probability rule
// P(m|n) = (1 + n.m)/2, collapse onto +m or -m, and SO(D) transformations.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liminfo/random.hpp"

namespace liminfo {

/// Bit pattern over positions 0..s-1. Position x lives at bit (s-1-x), so the
/// same integer encodes both a parity mask c and a function index j.
using Mask = std::uint32_t;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kDotTolerance = 1e-9;
inline constexpr double kOrthogonalityTolerance = 1e-10;

class TheoryLevel {
public:
    static constexpr int kMaxLevel = 20;

    explicit TheoryLevel(int s) : s_(s) {
        if (s < 1 || s > kMaxLevel) {
            throw std::invalid_argument("theory level s must lie in [1, " + std::to_string(kMaxLevel) +
                                        "], got " + std::to_string(s));
        }
    }

    int s() const { return s_; }
    std::size_t dim() const { return (std::size_t{1} << s_) - 1; }

    friend bool operator==(const TheoryLevel&, const TheoryLevel&) = default;

private:
    int s_;
};

inline Mask position_bit(int s, int x) { return Mask{1} << (s - 1 - x); }

/// Nonzero masks in canonical axis order: Hamming weight ascending, then the
/// position sets in lexicographic order (f(0) before f(1), f(0)+f(1) before
/// f(0)+f(2), ...). With c_0 as the most significant bit that is descending
/// numeric value within a weight class.
inline const std::vector<Mask>& canonical_masks(int s) {
    static std::array<std::once_flag, TheoryLevel::kMaxLevel + 1> once;
    static std::array<std::vector<Mask>, TheoryLevel::kMaxLevel + 1> table;
    const TheoryLevel level(s);
    std::call_once(once[static_cast<std::size_t>(s)], [&] {
        std::vector<Mask> masks(level.dim());
        for (Mask c = 1; c <= level.dim(); ++c) masks[c - 1] = c;
        std::sort(masks.begin(), masks.end(), [](Mask a, Mask b) {
            const int wa = std::popcount(a), wb = std::popcount(b);
            return wa != wb ? wa < wb : a > b;
        });
        table[static_cast<std::size_t>(s)] = std::move(masks);
    });
    return table[static_cast<std::size_t>(s)];
}

/// Inverse of canonical_masks: entry c holds the axis index of mask c (entry 0 unused).
inline const std::vector<std::size_t>& canonical_axis_lookup(int s) {
    static std::array<std::once_flag, TheoryLevel::kMaxLevel + 1> once;
    static std::array<std::vector<std::size_t>, TheoryLevel::kMaxLevel + 1> table;
    const auto& masks = canonical_masks(s);
    std::call_once(once[static_cast<std::size_t>(s)], [&] {
        std::vector<std::size_t> lookup(masks.size() + 1, 0);
        for (std::size_t i = 0; i < masks.size(); ++i) lookup[masks[i]] = i;
        table[static_cast<std::size_t>(s)] = std::move(lookup);
    });
    return table[static_cast<std::size_t>(s)];
}

namespace detail {

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                                    std::to_string(b) + ")");
    }
}

}  // namespace detail

/// Point of the closed unit D-ball. Norm 1 is a pure state.
class StateVector {
public:
    explicit StateVector(Eigen::VectorXd coords) : coords_(std::move(coords)) {
        if (coords_.size() == 0) throw std::invalid_argument("state vector must be non-empty");
        if (!coords_.allFinite()) throw std::invalid_argument("state vector has non-finite coordinates");
        if (coords_.norm() > 1.0 + kNormTolerance) {
            throw std::invalid_argument("state vector norm exceeds 1: " + std::to_string(coords_.norm()));
        }
    }

    static StateVector maximally_mixed(std::size_t dim) { return StateVector(Eigen::VectorXd::Zero(dim)); }

    static StateVector axis(std::size_t dim, std::size_t index, double sign = 1.0) {
        if (index >= dim) throw std::out_of_range("axis index out of range");
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        v[index] = sign;
        return StateVector(std::move(v));
    }

    std::size_t dim() const { return static_cast<std::size_t>(coords_.size()); }
    const Eigen::VectorXd& coords() const { return coords_; }
    double operator[](std::size_t i) const { return coords_[i]; }
    double norm() const { return coords_.norm(); }
    bool is_pure(double tol = kNormTolerance) const { return std::abs(norm() - 1.0) <= tol; }

private:
    Eigen::VectorXd coords_;
};

/// Unit direction labelling a two-outcome measurement.
class MeasurementAxis {
public:
    explicit MeasurementAxis(Eigen::VectorXd direction) : direction_(std::move(direction)) {
        if (direction_.size() == 0) throw std::invalid_argument("measurement axis must be non-empty");
        if (!direction_.allFinite() || std::abs(direction_.norm() - 1.0) > kNormTolerance) {
            throw std::invalid_argument("measurement axis must have unit norm");
        }
    }

    static MeasurementAxis canonical(std::size_t dim, std::size_t index) {
        if (index >= dim) throw std::out_of_range("axis index out of range");
        return MeasurementAxis(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(index)));
    }

    /// Normalizes an arbitrary nonzero vector.
    static MeasurementAxis along(const Eigen::VectorXd& v) {
        const double n = v.norm();
        if (!(n > 0.0)) throw std::invalid_argument("cannot build an axis from a zero vector");
        return MeasurementAxis(v / n);
    }

    static MeasurementAxis from_state(const StateVector& pure) { return along(pure.coords()); }

    std::size_t dim() const { return static_cast<std::size_t>(direction_.size()); }
    const Eigen::VectorXd& direction() const { return direction_; }

    MeasurementAxis operator-() const { return MeasurementAxis(-direction_); }

private:
    Eigen::VectorXd direction_;
};

/// Element of SO(D).
class Rotation {
public:
    explicit Rotation(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
        if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
            throw std::invalid_argument("rotation must be a non-empty square matrix");
        }
        const Eigen::MatrixXd gram = matrix_ * matrix_.transpose();
        const auto n = matrix_.rows();
        if ((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > kOrthogonalityTolerance) {
            throw std::invalid_argument("rotation matrix is not orthogonal");
        }
        if (std::abs(matrix_.determinant() - 1.0) > kOrthogonalityTolerance) {
            throw std::invalid_argument("rotation matrix must have determinant +1");
        }
    }

    static Rotation identity(std::size_t dim) {
        const auto n = static_cast<Eigen::Index>(dim);
        return Rotation(Eigen::MatrixXd::Identity(n, n));
    }

    /// Rotation by `angle` in the plane spanned by axes i and j (e_i -> cos e_i + sin e_j).
    static Rotation plane(std::size_t dim, std::size_t i, std::size_t j, double angle) {
        if (i >= dim || j >= dim || i == j) throw std::invalid_argument("plane rotation needs two distinct axes");
        const auto n = static_cast<Eigen::Index>(dim);
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
        const double c = std::cos(angle), s = std::sin(angle);
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        m(a, a) = c;
        m(b, b) = c;
        m(b, a) = s;
        m(a, b) = -s;
        return Rotation(std::move(m));
    }

    /// Haar-distributed element of SO(D): QR of a Gaussian matrix with the
    /// sign convention fixed so Q is uniform on O(D), then one column flipped
    /// if needed to land in SO(D).
    static Rotation random(std::size_t dim, RandomStream& rng) {
        const auto n = static_cast<Eigen::Index>(dim);
        Eigen::MatrixXd g(n, n);
        for (Eigen::Index c = 0; c < n; ++c)
            for (Eigen::Index r = 0; r < n; ++r) g(r, c) = rng.normal();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ();
        const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Eigen::Index k = 0; k < n; ++k) {
            if (r(k, k) < 0) q.col(k) *= -1.0;
        }
        if (q.determinant() < 0) q.col(0) *= -1.0;
        return Rotation(std::move(q));
    }

    std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
    const Eigen::MatrixXd& matrix() const { return matrix_; }

    /// Composition: (a * b) applies b first.
    friend Rotation operator*(const Rotation& a, const Rotation& b) {
        detail::require_same_dim(a.dim(), b.dim(), "rotation composition");
        return Rotation(a.matrix_ * b.matrix_);
    }

private:
    Eigen::MatrixXd matrix_;
};

/// Returns (1 + n.m)/2.
inline double measure_prob(const StateVector& n, const MeasurementAxis& m) {
    detail::require_same_dim(n.dim(), m.dim(), "measure_prob");
    const double dot = n.coords().dot(m.direction());
    if (std::abs(dot) > 1.0 + kDotTolerance) {
        throw std::domain_error("invalid state/axis pair: |n.m| = " + std::to_string(std::abs(dot)));
    }
    return std::clamp(0.5 + 0.5 * dot, 0.0, 1.0);
}

inline StateVector collapse(const StateVector& n, const MeasurementAxis& m, int outcome) {
    detail::require_same_dim(n.dim(), m.dim(), "collapse");
    if (outcome != 1 && outcome != -1) throw std::invalid_argument("outcome must be +1 or -1");
    return StateVector(static_cast<double>(outcome) * m.direction());
}

struct Outcome {
    int value;  // +1 or -1
    StateVector post_state;
};

inline Outcome sample_outcome(const StateVector& n, const MeasurementAxis& m, RandomStream& rng) {
    const double p = measure_prob(n, m);
    const int value = rng.uniform() < p ? 1 : -1;
    return {value, collapse(n, m, value)};
}

inline StateVector apply_rotation(const Rotation& r, const StateVector& n) {
    detail::require_same_dim(r.dim(), n.dim(), "apply_rotation");
    Eigen::VectorXd out = r.matrix() * n.coords();
    // Rounding can push a pure state a few ulps past the unit sphere.
    const double norm = out.norm();
    if (norm > 1.0) out /= norm;
    return StateVector(std::move(out));
}

/// Qubit (two-sphere) embedded in a level-s state space on three canonical axes.
class QubitSubspace {
public:
    QubitSubspace(std::size_t dim, std::array<std::size_t, 3> triple) : dim_(dim), triple_(triple) {
        if (dim < 3) throw std::invalid_argument("qubit embedding needs D >= 3");
        for (std::size_t a = 0; a < 3; ++a) {
            if (triple[a] >= dim) throw std::out_of_range("qubit embedding axis index out of range");
            for (std::size_t b = a + 1; b < 3; ++b) {
                if (triple[a] == triple[b]) throw std::invalid_argument("qubit embedding axes must be distinct");
            }
        }
    }

    std::size_t dim() const { return dim_; }
    const std::array<std::size_t, 3>& triple() const { return triple_; }

    bool contains(std::size_t axis) const {
        return std::find(triple_.begin(), triple_.end(), axis) != triple_.end();
    }

    StateVector inject(const Eigen::Vector3d& bloch) const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
        for (std::size_t k = 0; k < 3; ++k) v[static_cast<Eigen::Index>(triple_[k])] = bloch[static_cast<Eigen::Index>(k)];
        return StateVector(std::move(v));
    }

    Eigen::Vector3d project(const StateVector& n) const {
        detail::require_same_dim(n.dim(), dim_, "qubit projection");
        return {n[triple_[0]], n[triple_[1]], n[triple_[2]]};
    }

    /// Acts as `block` on the triple and as the identity elsewhere.
    Rotation block_rotation(const Eigen::Matrix3d& block) const {
        const auto n = static_cast<Eigen::Index>(dim_);
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c)
                m(static_cast<Eigen::Index>(triple_[r]), static_cast<Eigen::Index>(triple_[c])) =
                    block(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        return Rotation(std::move(m));
    }

private:
    std::size_t dim_;
    std::array<std::size_t, 3> triple_;
};

inline QubitSubspace qubit_embedding(const TheoryLevel& level, std::array<std::size_t, 3> triple) {
    return QubitSubspace(level.dim(), triple);
}

}  // namespace liminfo
