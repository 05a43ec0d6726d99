#pragma once

// Black-box encoding of Boolean functions f: {0..s-1} -> {0,1} as diagonal
// +-1 rotations, the single-query protocol and the classical-bit baseline.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "liminfo/geometry.hpp"

namespace liminfo {

namespace detail {

inline Mask parse_bits(std::string_view bits, const char* what) {
    if (bits.empty() || bits.size() > static_cast<std::size_t>(TheoryLevel::kMaxLevel)) {
        throw std::invalid_argument(std::string(what) + ": expected 1.." + std::to_string(TheoryLevel::kMaxLevel) +
                                    " binary digits");
    }
    Mask value = 0;
    for (char ch : bits) {
        if (ch != '0' && ch != '1') throw std::invalid_argument(std::string(what) + ": not a binary string");
        value = (value << 1) | static_cast<Mask>(ch - '0');
    }
    return value;
}

inline std::string format_bits(Mask value, int s) {
    std::string out(static_cast<std::size_t>(s), '0');
    for (int x = 0; x < s; ++x)
        if (value & position_bit(s, x)) out[static_cast<std::size_t>(x)] = '1';
    return out;
}

inline bool parity(Mask v) { return (std::popcount(v) & 1) != 0; }

}  // namespace detail

/// Configuration of an s-position black box. index() = sum_x 2^{s-1-x} f(x).
class BooleanFunction {
public:
    BooleanFunction(int s, Mask index) : s_(TheoryLevel(s).s()), index_(index) {
        if (index >> s) throw std::out_of_range("function index out of range for s=" + std::to_string(s));
    }

    static BooleanFunction from_values(const std::vector<int>& values) {
        Mask j = 0;
        for (int v : values) {
            if (v != 0 && v != 1) throw std::invalid_argument("function values must be bits");
            j = (j << 1) | static_cast<Mask>(v);
        }
        return BooleanFunction(static_cast<int>(values.size()), j);
    }

    /// Binary string with f(0) leftmost, e.g. "101".
    static BooleanFunction parse(std::string_view bits) {
        return BooleanFunction(static_cast<int>(bits.size()), detail::parse_bits(bits, "function"));
    }

    int s() const { return s_; }
    Mask index() const { return index_; }
    int operator()(int x) const {
        if (x < 0 || x >= s_) throw std::out_of_range("position out of range");
        return (index_ & position_bit(s_, x)) ? 1 : 0;
    }
    std::vector<int> values() const {
        std::vector<int> v(static_cast<std::size_t>(s_));
        for (int x = 0; x < s_; ++x) v[static_cast<std::size_t>(x)] = (*this)(x);
        return v;
    }
    std::string str() const { return detail::format_bits(index_, s_); }

private:
    int s_;
    Mask index_;
};

/// "Is the parity of f over the positions in c equal to a?"
class ParityQuestion {
public:
    ParityQuestion(int s, Mask mask) : s_(TheoryLevel(s).s()), mask_(mask) {
        if (mask == 0) throw std::invalid_argument("parity question mask must be nonzero");
        if (mask >> s) throw std::out_of_range("parity mask out of range for s=" + std::to_string(s));
    }

    static ParityQuestion parse(std::string_view bits) {
        return ParityQuestion(static_cast<int>(bits.size()), detail::parse_bits(bits, "mask"));
    }

    int s() const { return s_; }
    Mask mask() const { return mask_; }

    int evaluate(const BooleanFunction& f) const {
        detail::require_same_dim(static_cast<std::size_t>(s_), static_cast<std::size_t>(f.s()), "parity question");
        return detail::parity(mask_ & f.index()) ? 1 : 0;
    }

    std::string str() const { return detail::format_bits(mask_, s_); }

private:
    int s_;
    Mask mask_;
};

/// Diagonal +-1 matrix over the canonical axes, kept as integers so the
/// protocol involves no rounding.
class OracleRotation {
public:
    explicit OracleRotation(std::vector<int> diag) : diag_(std::move(diag)) {
        for (int d : diag_)
            if (d != 1 && d != -1) throw std::invalid_argument("oracle diagonal entries must be +1 or -1");
    }

    static OracleRotation identity(std::size_t dim) { return OracleRotation(std::vector<int>(dim, 1)); }

    std::size_t dim() const { return diag_.size(); }
    const std::vector<int>& diag() const { return diag_; }
    int operator[](std::size_t i) const { return diag_[i]; }

    friend OracleRotation operator*(const OracleRotation& a, const OracleRotation& b) {
        detail::require_same_dim(a.dim(), b.dim(), "oracle product");
        std::vector<int> d(a.dim());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.diag_[i] * b.diag_[i];
        return OracleRotation(std::move(d));
    }

    friend bool operator==(const OracleRotation&, const OracleRotation&) = default;

    Rotation to_rotation() const {
        Eigen::VectorXd d(static_cast<Eigen::Index>(diag_.size()));
        for (std::size_t i = 0; i < diag_.size(); ++i) d[static_cast<Eigen::Index>(i)] = diag_[i];
        return Rotation(d.asDiagonal().toDenseMatrix());
    }

    StateVector apply(const StateVector& n) const {
        detail::require_same_dim(dim(), n.dim(), "oracle application");
        Eigen::VectorXd out = n.coords();
        for (std::size_t i = 0; i < diag_.size(); ++i) out[static_cast<Eigen::Index>(i)] *= diag_[i];
        return StateVector(std::move(out));
    }

private:
    std::vector<int> diag_;
};

/// Transformation applied when position x is occupied: (-1)^{c_x} on axis c.
inline OracleRotation position_oracle(int s, int x) {
    const TheoryLevel level(s);
    if (x < 0 || x >= s) throw std::out_of_range("position " + std::to_string(x) + " out of range for s=" + std::to_string(s));
    const Mask bit = position_bit(s, x);
    const auto& masks = canonical_masks(s);
    std::vector<int> d(level.dim());
    for (std::size_t i = 0; i < masks.size(); ++i) d[i] = (masks[i] & bit) ? -1 : 1;
    return OracleRotation(std::move(d));
}

/// Whole-box transformation: (-1)^{c.f} on axis c.
inline OracleRotation black_box_transform(const BooleanFunction& f) {
    const auto& masks = canonical_masks(f.s());
    std::vector<int> d(masks.size());
    for (std::size_t i = 0; i < masks.size(); ++i) d[i] = detail::parity(masks[i] & f.index()) ? -1 : 1;
    return OracleRotation(std::move(d));
}

struct QueryResult {
    int answer;          // q.f
    int outcome;         // +1 or -1
    double probability;  // probability of the observed outcome; exactly 1
};

/// Prepares +e_q, sends it through the box once, measures along e_q.
inline QueryResult single_query(const ParityQuestion& q, const BooleanFunction& f) {
    detail::require_same_dim(static_cast<std::size_t>(q.s()), static_cast<std::size_t>(f.s()), "single_query");
    const std::size_t dim = TheoryLevel(q.s()).dim();
    const std::size_t axis = canonical_axis_lookup(q.s())[q.mask()];
    const auto input = StateVector::axis(dim, axis);
    const auto output = black_box_transform(f).apply(input);
    const double p_plus = measure_prob(output, MeasurementAxis::canonical(dim, axis));
    int outcome = 0;
    if (p_plus == 1.0) {
        outcome = 1;
    } else if (p_plus == 0.0) {
        outcome = -1;
    } else {
        throw std::logic_error("single query outcome is not deterministic");
    }
    return {(1 - outcome) / 2, outcome, outcome == 1 ? p_plus : 1.0 - p_plus};
}

/// Classical bit (the s=1 theory) flipped at every occupied position x with
/// g_x = 1. Returns final XOR initial = g.f.
inline int classical_query(Mask design, const BooleanFunction& f) {
    if (design >> f.s()) throw std::out_of_range("classical design out of range");
    int bit = 0;
    for (int x = 0; x < f.s(); ++x) {
        if ((design & position_bit(f.s(), x)) && f(x)) bit ^= 1;
    }
    return bit;
}

/// Exhaustively lists the nonzero masks whose parity is a function of the
/// one-bit output of classical_query(design, .) over all 2^s functions.
inline std::vector<Mask> classical_answerable_masks(int s, Mask design) {
    const Mask count = Mask{1} << TheoryLevel(s).s();
    std::vector<Mask> answerable;
    for (Mask c = 1; c < count; ++c) {
        // seen[output] = parity of c observed with that output, or -1.
        int seen[2] = {-1, -1};
        bool determined = true;
        for (Mask j = 0; j < count && determined; ++j) {
            const BooleanFunction f(s, j);
            const int out = classical_query(design, f);
            const int answer = detail::parity(c & j) ? 1 : 0;
            if (seen[out] < 0) {
                seen[out] = answer;
            } else if (seen[out] != answer) {
                determined = false;
            }
        }
        if (determined) answerable.push_back(c);
    }
    return answerable;
}

/// Number of complementary questions about an s_box-position box answerable
/// by one system of the given level. Beyond s = 2 this extrapolates by
/// subspace confinement.
inline std::uint64_t query_capability(const TheoryLevel& level, int s_box) {
    if (s_box < 1 || s_box > 63) throw std::invalid_argument("box size must lie in [1, 63]");
    const std::uint64_t system = (std::uint64_t{1} << level.s()) - 1;
    const std::uint64_t box = (std::uint64_t{1} << s_box) - 1;
    return system < box ? system : box;
}

}  // namespace liminfo
