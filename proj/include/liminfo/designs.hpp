#pragma once

// Complementarity tables for N systems of level s: every row partitions the
// 2^{Ns} box configurations into 2^N equal columns, and any column of one
// row meets any column of another row in exactly 2^{N(s-2)} items.
//
// Items are integers whose base-2^s digits (j_1, ..., j_N) are the function
// indices of the N boxes, j_1 most significant. Rows come from projective
// points lambda of PG(s-1, GF(2^N)): an item maps to the column
// sum_x lambda_x * g(x), where g(x) has bit k-1 equal to f_k(x).

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "liminfo/geometry.hpp"
#include "liminfo/gf2n.hpp"

namespace liminfo {

using Item = std::uint32_t;

inline constexpr std::size_t kDefaultMaxItems = std::size_t{1} << 15;

/// Column assignment for every item of a row, packed at N bits per item.
class Partition {
public:
    Partition(int column_bits, std::size_t items)
        : bits_(column_bits), items_(items), words_((items * static_cast<std::size_t>(column_bits) + 63) / 64 + 1, 0) {
        if (column_bits < 1 || column_bits > 16) throw std::invalid_argument("column bits must lie in [1, 16]");
    }

    int column_bits() const { return bits_; }
    std::size_t items() const { return items_; }
    std::size_t columns() const { return std::size_t{1} << bits_; }

    std::uint32_t operator[](std::size_t item) const {
        const std::size_t offset = item * static_cast<std::size_t>(bits_);
        const std::size_t w = offset >> 6, shift = offset & 63;
        std::uint64_t v = words_[w] >> shift;
        if (shift + static_cast<std::size_t>(bits_) > 64) v |= words_[w + 1] << (64 - shift);
        return static_cast<std::uint32_t>(v & mask());
    }

    void set(std::size_t item, std::uint32_t column) {
        if (item >= items_ || column >= columns()) throw std::out_of_range("partition entry out of range");
        const std::size_t offset = item * static_cast<std::size_t>(bits_);
        const std::size_t w = offset >> 6, shift = offset & 63;
        words_[w] = (words_[w] & ~(mask() << shift)) | (std::uint64_t{column} << shift);
        if (shift + static_cast<std::size_t>(bits_) > 64) {
            const std::size_t spill = 64 - shift;
            words_[w + 1] = (words_[w + 1] & ~(mask() >> spill)) | (std::uint64_t{column} >> spill);
        }
    }

    /// Items of each column, ascending.
    std::vector<std::vector<Item>> column_lists() const {
        std::vector<std::vector<Item>> cols(columns());
        for (std::size_t i = 0; i < items_; ++i) cols[(*this)[i]].push_back(static_cast<Item>(i));
        return cols;
    }

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::uint64_t mask() const { return (std::uint64_t{1} << bits_) - 1; }

    int bits_;
    std::size_t items_;
    std::vector<std::uint64_t> words_;
};

struct TableRow {
    std::vector<FieldElement> label;  // lambda, projective normal form
    Partition columns;
};

struct ComplementarityTable {
    int s = 0;
    int N = 0;
    std::vector<TableRow> rows;

    std::size_t items() const { return std::size_t{1} << (s * N); }
    std::size_t columns() const { return std::size_t{1} << N; }
};

/// r_s(N) = (2^{Ns} - 1) / (2^N - 1).
inline std::uint64_t bose_bush_bound(int s, int N) {
    if (s < 1 || N < 1) throw std::invalid_argument("bose_bush_bound needs s, N >= 1");
    if (static_cast<long long>(s) * N > 64) throw std::overflow_error("2^{Ns} exceeds 64-bit range");
    const int ns = s * N;
    const std::uint64_t numerator = ns == 64 ? std::numeric_limits<std::uint64_t>::max() : (std::uint64_t{1} << ns) - 1;
    return numerator / ((std::uint64_t{1} << N) - 1);
}

struct ParameterCounts {
    std::uint64_t joint;  // r_s(N) (2^N - 1): joint complementary measurements
    std::uint64_t local;  // (2^s)^N - 1: correlations of local measurements
};

inline ParameterCounts parameter_counts(int s, int N) {
    const std::uint64_t rows = bose_bush_bound(s, N);
    const std::uint64_t per_row = (std::uint64_t{1} << N) - 1;
    std::uint64_t joint = 0;
    if (__builtin_mul_overflow(rows, per_row, &joint)) throw std::overflow_error("joint parameter count overflows");
    if (s >= 64) throw std::overflow_error("local parameter count overflows");
    const std::uint64_t base = std::uint64_t{1} << s;
    std::uint64_t power = 1;
    for (int k = 0; k < N; ++k) {
        if (__builtin_mul_overflow(power, base, &power)) throw std::overflow_error("local parameter count overflows");
    }
    return {joint, power - 1};
}

/// Composite question: projective point lambda over GF(2^N).
class CompositeQuestion {
public:
    CompositeQuestion(int N, std::vector<FieldElement> lambda) : N_(N), lambda_(std::move(lambda)) {
        const GF2N field(N);
        if (lambda_.empty()) throw std::invalid_argument("question needs at least one coordinate");
        for (auto v : lambda_)
            if (!field.contains(v)) throw std::out_of_range("question coordinate outside the field");
        const auto first = std::find_if(lambda_.begin(), lambda_.end(), [](FieldElement v) { return v != 0; });
        if (first == lambda_.end()) throw std::invalid_argument("question vector must be nonzero");
        const FieldElement scale = field.inv(*first);
        for (auto& v : lambda_) v = field.mul(v, scale);
    }

    int s() const { return static_cast<int>(lambda_.size()); }
    int N() const { return N_; }
    const std::vector<FieldElement>& lambda() const { return lambda_; }

    /// Column (field element) of an item.
    FieldElement column_of(Item item) const {
        const GF2N field(N_);
        const int s = this->s();
        FieldElement acc = 0;
        for (int k = 1; k <= N_; ++k) {
            const Item digit = (item >> (s * (N_ - k))) & ((Item{1} << s) - 1);
            for (int x = 0; x < s; ++x)
                if (digit & position_bit(s, x)) acc ^= field.mul(lambda_[static_cast<std::size_t>(x)], FieldElement{1} << (k - 1));
        }
        return acc;
    }

private:
    int N_;
    std::vector<FieldElement> lambda_;
};

enum class QuestionKind { product, entangled };

inline const char* to_string(QuestionKind k) { return k == QuestionKind::product ? "product" : "entangled"; }

/// Product iff some nonzero mu puts every mu*lambda_x in the prime field {0, 1}.
inline QuestionKind classify_question(const CompositeQuestion& q) {
    const GF2N field(q.N());
    for (FieldElement mu = 1; mu < field.size(); ++mu) {
        const bool prime = std::all_of(q.lambda().begin(), q.lambda().end(),
                                       [&](FieldElement v) { return field.mul(mu, v) <= 1; });
        if (prime) return QuestionKind::product;
    }
    return QuestionKind::entangled;
}

/// Projective points of PG(s-1, GF(2^N)) in normal form, ordered by support
/// (canonical axis order of the support mask), then lexicographically.
inline std::vector<std::vector<FieldElement>> projective_points(int s, int N) {
    const GF2N field(N);
    const auto& supports = canonical_masks(s);
    std::vector<std::vector<FieldElement>> points;
    for (Mask support : supports) {
        std::vector<int> positions;
        for (int x = 0; x < s; ++x)
            if (support & position_bit(s, x)) positions.push_back(x);
        // First support position is 1; the others range over nonzero elements.
        const std::size_t free = positions.size() - 1;
        const std::uint64_t nonzero = field.size() - 1;
        std::uint64_t combos = 1;
        for (std::size_t k = 0; k < free; ++k) combos *= nonzero;
        for (std::uint64_t code = 0; code < combos; ++code) {
            std::vector<FieldElement> p(static_cast<std::size_t>(s), 0);
            p[static_cast<std::size_t>(positions[0])] = 1;
            std::uint64_t rest = code;
            for (std::size_t k = free; k >= 1; --k) {
                p[static_cast<std::size_t>(positions[k])] = static_cast<FieldElement>(rest % nonzero) + 1;
                rest /= nonzero;
            }
            points.push_back(std::move(p));
        }
    }
    return points;
}

/// One row per projective point; row count equals bose_bush_bound(s, N).
inline ComplementarityTable build_table(int s, int N, std::size_t max_items = kDefaultMaxItems) {
    if (s < 1 || N < 1 || N > 16) throw std::invalid_argument("build_table needs s >= 1 and 1 <= N <= 16");
    if (static_cast<long long>(s) * N > 31 || (std::size_t{1} << (s * N)) > max_items) {
        throw std::length_error("table with 2^" + std::to_string(s * N) + " items exceeds the item limit of " +
                                std::to_string(max_items));
    }
    const GF2N field(N);
    ComplementarityTable table{s, N, {}};
    const std::size_t items = table.items();
    const int bits = s * N;
    std::vector<std::uint32_t> cols(items);
    for (auto& lambda : projective_points(s, N)) {
        // Column map is GF(2)-linear in the item bits; tabulate basis images.
        std::vector<std::uint32_t> image(static_cast<std::size_t>(bits));
        for (int k = 1; k <= N; ++k)
            for (int x = 0; x < s; ++x) {
                const int bit = s * (N - k) + (s - 1 - x);
                image[static_cast<std::size_t>(bit)] = field.mul(lambda[static_cast<std::size_t>(x)], FieldElement{1} << (k - 1));
            }
        cols[0] = 0;
        Partition part(N, items);
        for (std::size_t i = 1; i < items; ++i) {
            cols[i] = cols[i & (i - 1)] ^ image[static_cast<std::size_t>(std::countr_zero(i))];
            part.set(i, cols[i]);
        }
        table.rows.push_back({std::move(lambda), std::move(part)});
    }
    return table;
}

namespace detail {

/// GF(2) vector space spanned by bit vectors, kept in reduced row echelon
/// form indexed by pivot bit.
class XorBasis {
public:
    explicit XorBasis(int bits) : rows_(static_cast<std::size_t>(bits), 0) {}

    bool insert(std::uint32_t v) {
        v = reduce(v);
        if (v == 0) return false;
        const int pivot = 31 - std::countl_zero(v);
        for (auto& r : rows_)
            if ((r >> pivot) & 1) r ^= v;
        rows_[static_cast<std::size_t>(pivot)] = v;
        ++rank_;
        return true;
    }

    int rank() const { return rank_; }

    /// v minus its component in the span; linear in v.
    std::uint32_t reduce(std::uint32_t v) const {
        std::uint32_t out = v;
        for (std::size_t b = 0; b < rows_.size(); ++b)
            if (rows_[b] && ((v >> b) & 1)) out ^= rows_[b];
        return out;
    }

    std::vector<std::uint32_t> vectors() const {
        std::vector<std::uint32_t> out;
        for (auto r : rows_)
            if (r) out.push_back(r);
        return out;
    }

    /// Basis of {w : parity(w & k) = 0 for every k in the span}.
    std::vector<std::uint32_t> annihilator() const {
        std::vector<std::uint32_t> out;
        for (std::size_t f = 0; f < rows_.size(); ++f) {
            if (rows_[f]) continue;
            std::uint32_t w = std::uint32_t{1} << f;
            for (std::size_t p = 0; p < rows_.size(); ++p)
                if (rows_[p] && ((rows_[p] >> f) & 1)) w |= std::uint32_t{1} << p;
            out.push_back(w);
        }
        return out;
    }

private:
    std::vector<std::uint32_t> rows_;
    int rank_ = 0;
};

/// Forms constant on every column, when the row is a linear partition.
inline std::optional<std::vector<std::uint32_t>> linear_row_forms(const Partition& part, int bits) {
    const std::uint32_t zero_col = part[0];
    XorBasis kernel(bits);
    std::size_t kernel_size = 0;
    for (std::size_t i = 0; i < part.items(); ++i) {
        if (part[i] != zero_col) continue;
        ++kernel_size;
        kernel.insert(static_cast<std::uint32_t>(i));
    }
    if ((std::size_t{1} << kernel.rank()) != kernel_size) return std::nullopt;
    for (std::size_t i = 0; i < part.items(); ++i) {
        if (part[i] != part[kernel.reduce(static_cast<std::uint32_t>(i))]) return std::nullopt;
    }
    return kernel.annihilator();
}

}  // namespace detail

struct Violation {
    enum class Kind { wrong_shape, unequal_columns, uneven_intersection, too_many_rows };
    Kind kind;
    std::size_t row_a = 0, row_b = 0;
    std::uint32_t column_a = 0, column_b = 0;
    std::uint64_t found = 0, expected = 0;

    std::string describe() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::wrong_shape:
                os << "row " << row_a << " has the wrong item or column count";
                break;
            case Kind::unequal_columns:
                os << "row " << row_a << " column " << column_a << " has " << found << " items, expected " << expected;
                break;
            case Kind::uneven_intersection:
                os << "rows " << row_a << " and " << row_b << ": columns " << column_a << " and " << column_b
                   << " share " << found << " items, expected " << expected;
                break;
            case Kind::too_many_rows:
                os << found << " rows exceed the Bose-Bush bound " << expected;
                break;
        }
        return os.str();
    }
};

struct VerificationReport {
    std::optional<Violation> violation;
    std::size_t rows = 0;
    std::size_t linear_rows = 0;
    std::size_t pairs_checked = 0;
    std::uint64_t intersection_size = 0;  // 2^{N(s-2)} for s >= 2

    bool ok() const { return !violation.has_value(); }
};

namespace detail {

inline std::optional<Violation> count_intersections(const Partition& a, const Partition& b, std::size_t ia,
                                                    std::size_t ib, std::uint64_t expected) {
    const std::size_t cols = a.columns();
    std::vector<std::uint64_t> counts(cols * cols, 0);
    for (std::size_t i = 0; i < a.items(); ++i) ++counts[a[i] * cols + b[i]];
    for (std::size_t ca = 0; ca < cols; ++ca)
        for (std::size_t cb = 0; cb < cols; ++cb)
            if (counts[ca * cols + cb] != expected) {
                return Violation{Violation::Kind::uneven_intersection, ia, ib, static_cast<std::uint32_t>(ca),
                                 static_cast<std::uint32_t>(cb), counts[ca * cols + cb], expected};
            }
    return std::nullopt;
}

}  // namespace detail

/// Checks partition shape, equal column sizes, the row bound and exact
/// pairwise intersection sizes. Pairs of linear rows are decided by rank
/// (columns are cosets of kernels K1, K2; every intersection has size
/// |K1 n K2| = 2^{N(s-2)} iff the column forms of both rows are independent);
/// any pair involving a non-linear row is counted item by item.
inline VerificationReport verify_table(const ComplementarityTable& t) {
    VerificationReport report;
    report.rows = t.rows.size();
    const int bits = t.s * t.N;
    const std::size_t items = t.items();
    const std::uint64_t column_size = std::uint64_t{1} << (t.N * (t.s - 1));

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& part = t.rows[r].columns;
        if (part.items() != items || part.column_bits() != t.N || t.rows[r].label.size() != static_cast<std::size_t>(t.s)) {
            report.violation = Violation{Violation::Kind::wrong_shape, r};
            return report;
        }
        std::vector<std::uint64_t> sizes(part.columns(), 0);
        for (std::size_t i = 0; i < items; ++i) ++sizes[part[i]];
        for (std::size_t c = 0; c < sizes.size(); ++c) {
            if (sizes[c] != column_size) {
                report.violation =
                    Violation{Violation::Kind::unequal_columns, r, 0, static_cast<std::uint32_t>(c), 0, sizes[c], column_size};
                return report;
            }
        }
    }
    const std::uint64_t bound = bose_bush_bound(t.s, t.N);
    if (t.rows.size() > bound) {
        report.violation = Violation{Violation::Kind::too_many_rows, 0, 0, 0, 0, t.rows.size(), bound};
        return report;
    }
    if (t.s < 2) return report;

    report.intersection_size = std::uint64_t{1} << (t.N * (t.s - 2));
    std::vector<std::optional<std::vector<std::uint32_t>>> forms;
    forms.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        forms.push_back(detail::linear_row_forms(row.columns, bits));
        if (forms.back()) ++report.linear_rows;
    }
    for (std::size_t a = 0; a < t.rows.size(); ++a) {
        for (std::size_t b = a + 1; b < t.rows.size(); ++b) {
            ++report.pairs_checked;
            if (forms[a] && forms[b]) {
                detail::XorBasis span(bits);
                for (auto w : *forms[a]) span.insert(w);
                bool independent = true;
                for (auto w : *forms[b]) independent = span.insert(w) && independent;
                if (independent) continue;
            }
            auto v = detail::count_intersections(t.rows[a].columns, t.rows[b].columns, a, b, report.intersection_size);
            if (v) {
                report.violation = v;
                return report;
            }
        }
    }
    return report;
}

/// Classifies a row from its partition alone: product iff its columns can be
/// labelled by N answer bits, each a parity of one subsystem's function bits.
inline QuestionKind classify_by_dependency(const Partition& part, int s, int N) {
    int dims = 0;
    std::vector<int> value(part.columns());
    for (int k = 1; k <= N; ++k) {
        const int shift = s * (N - k);
        std::size_t constant_forms = 0;
        for (std::uint32_t local = 1; local < (std::uint32_t{1} << s); ++local) {
            const std::uint32_t w = local << shift;
            std::fill(value.begin(), value.end(), -1);
            bool constant = true;
            for (std::size_t i = 0; i < part.items() && constant; ++i) {
                const int p = std::popcount(w & static_cast<std::uint32_t>(i)) & 1;
                int& v = value[part[i]];
                if (v < 0) {
                    v = p;
                } else if (v != p) {
                    constant = false;
                }
            }
            if (constant) ++constant_forms;
        }
        dims += std::countr_zero(constant_forms + 1);
    }
    return dims == N ? QuestionKind::product : QuestionKind::entangled;
}

/// Rows as column item lists; columns sorted by minimum item, rows sorted.
using CanonicalTable = std::vector<std::vector<std::vector<Item>>>;

inline CanonicalTable canonical_form(CanonicalTable rows) {
    for (auto& row : rows) {
        for (auto& col : row) std::sort(col.begin(), col.end());
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) {
            if (a.empty() || b.empty()) return a.size() < b.size();
            return a.front() < b.front();
        });
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

inline CanonicalTable canonical_form(const ComplementarityTable& t) {
    CanonicalTable rows;
    rows.reserve(t.rows.size());
    for (const auto& row : t.rows) rows.push_back(row.columns.column_lists());
    return canonical_form(std::move(rows));
}

inline constexpr const char* kTableHeader = "s,N,rows,columns";

/// Header line, a value line, then per row: lambda (comma separated), a
/// comma, and the columns in field-value order joined by ';' with items
/// ascending and space separated.
inline void write_table_csv(std::ostream& os, const ComplementarityTable& t) {
    os << kTableHeader << '\n' << t.s << ',' << t.N << ',' << t.rows.size() << ',' << t.columns() << '\n';
    for (const auto& row : t.rows) {
        for (auto v : row.label) os << v << ',';
        const auto cols = row.columns.column_lists();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) os << ';';
            for (std::size_t i = 0; i < cols[c].size(); ++i) {
                if (i) os << ' ';
                os << cols[c][i];
            }
        }
        os << '\n';
    }
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline std::uint64_t parse_uint(const std::string& s, const char* what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw std::runtime_error(std::string("table import: bad ") + what + " '" + s + "'");
    }
    return std::stoull(s);
}

}  // namespace detail

/// Inverse of write_table_csv. Malformed partitions (missing, repeated or
/// out-of-range items) are rejected; structural properties are left to
/// verify_table.
inline ComplementarityTable read_table_csv(std::istream& is, std::size_t max_items = kDefaultMaxItems) {
    std::string line;
    if (!std::getline(is, line) || line != kTableHeader) throw std::runtime_error("table import: missing header line");
    if (!std::getline(is, line)) throw std::runtime_error("table import: missing size line");
    const auto head = detail::split(line, ',');
    if (head.size() != 4) throw std::runtime_error("table import: size line needs 4 fields");
    const auto s = detail::parse_uint(head[0], "s");
    const auto N = detail::parse_uint(head[1], "N");
    const auto nrows = detail::parse_uint(head[2], "row count");
    const auto ncols = detail::parse_uint(head[3], "column count");
    if (s < 1 || N < 1 || N > 16 || s * N > 31 || (std::size_t{1} << (s * N)) > max_items) {
        throw std::runtime_error("table import: unsupported s, N");
    }
    if (ncols != (std::uint64_t{1} << N)) throw std::runtime_error("table import: column count must be 2^N");

    ComplementarityTable t{static_cast<int>(s), static_cast<int>(N), {}};
    const std::size_t items = t.items();
    const GF2N field(t.N);
    for (std::uint64_t r = 0; r < nrows; ++r) {
        if (!std::getline(is, line)) throw std::runtime_error("table import: fewer rows than declared");
        const auto fields = detail::split(line, ',');
        if (fields.size() != s + 1) throw std::runtime_error("table import: row " + std::to_string(r) + " has a bad label");
        std::vector<FieldElement> label;
        for (std::size_t x = 0; x < s; ++x) {
            const auto v = detail::parse_uint(fields[x], "label");
            if (v >= field.size()) throw std::runtime_error("table import: label outside the field");
            label.push_back(static_cast<FieldElement>(v));
        }
        const auto cols = detail::split(fields[s], ';');
        if (cols.size() != ncols) throw std::runtime_error("table import: row " + std::to_string(r) + " column count");
        Partition part(t.N, items);
        std::vector<bool> seen(items, false);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            for (const auto& tok : detail::split(cols[c], ' ')) {
                const auto item = detail::parse_uint(tok, "item");
                if (item >= items || seen[item]) {
                    throw std::runtime_error("table import: row " + std::to_string(r) + " repeats or overflows item " + tok);
                }
                seen[item] = true;
                part.set(item, static_cast<std::uint32_t>(c));
            }
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
            throw std::runtime_error("table import: row " + std::to_string(r) + " misses an item");
        }
        t.rows.push_back({std::move(label), std::move(part)});
    }
    return t;
}

}  // namespace liminfo
