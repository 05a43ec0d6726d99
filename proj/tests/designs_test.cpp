#include "liminfo/designs.hpp"

#include <sstream>
#include <utility>

#include "gtest/gtest.h"
#include "reference_tables.hpp"

using namespace liminfo;
using reference::kThreePositionTable;
using reference::kTwoPositionTable;
using reference::two_qubit_table;

namespace {

// Test-only oracle: counts every column intersection of every row pair.
bool brute_force_even(const ComplementarityTable& t) {
    const std::uint64_t expected = std::uint64_t{1} << (t.N * (t.s - 2));
    for (std::size_t a = 0; a < t.rows.size(); ++a)
        for (std::size_t b = a + 1; b < t.rows.size(); ++b) {
            std::vector<std::uint64_t> counts(t.columns() * t.columns(), 0);
            for (std::size_t i = 0; i < t.items(); ++i) ++counts[t.rows[a].columns[i] * t.columns() + t.rows[b].columns[i]];
            for (auto c : counts)
                if (c != expected) return false;
        }
    return true;
}

Mask label_mask(const std::vector<FieldElement>& label) {
    Mask m = 0;
    for (auto v : label) m = (m << 1) | v;
    return m;
}

}  // namespace

TEST(Partition, packs_arbitrary_widths) {
    for (int bits : {1, 3, 5, 7, 13, 16}) {
        Partition p(bits, 300);
        for (std::size_t i = 0; i < 300; ++i) p.set(i, static_cast<std::uint32_t>((i * 2654435761u) % p.columns()));
        for (std::size_t i = 0; i < 300; ++i) ASSERT_EQ(p[i], (i * 2654435761u) % p.columns()) << bits;
    }
}

TEST(BoseBushBound, examples_and_overflow) {
    EXPECT_EQ(bose_bush_bound(2, 2), 5u);
    EXPECT_EQ(bose_bush_bound(3, 1), 7u);
    EXPECT_EQ(bose_bush_bound(3, 2), 21u);
    EXPECT_EQ(bose_bush_bound(1, 5), 1u);
    EXPECT_EQ(bose_bush_bound(32, 2), 6148914691236517205u);
    EXPECT_THROW(bose_bush_bound(33, 2), std::overflow_error);
    EXPECT_THROW(bose_bush_bound(0, 2), std::invalid_argument);
}

TEST(ParameterCounts, joint_equals_local) {
    EXPECT_EQ(parameter_counts(2, 2).joint, 15u);
    EXPECT_EQ(parameter_counts(2, 2).local, 15u);
    EXPECT_EQ(parameter_counts(2, 1).joint, 3u);
    EXPECT_EQ(parameter_counts(3, 3).joint, 511u);
    EXPECT_EQ(parameter_counts(3, 3).local, 511u);
    for (int s = 1; s <= 8; ++s)
        for (int n = 1; n <= 4; ++n) {
            const auto c = parameter_counts(s, n);
            EXPECT_EQ(c.joint, c.local);
            EXPECT_EQ(c.joint, (std::uint64_t{1} << (s * n)) - 1);
        }
    EXPECT_THROW(parameter_counts(13, 5), std::overflow_error);
}

TEST(BuildTable, reproduces_reference_tables) {
    EXPECT_EQ(canonical_form(build_table(2, 1)), canonical_form(kTwoPositionTable));
    EXPECT_EQ(canonical_form(build_table(3, 1)), canonical_form(kThreePositionTable));
    EXPECT_EQ(canonical_form(build_table(2, 2)), canonical_form(two_qubit_table()));
    EXPECT_EQ(build_table(3, 2).rows.size(), 21u);
}

TEST(BuildTable, two_qubit_rows_follow_reference_order) {
    const auto t = build_table(2, 2);
    const auto expected = two_qubit_table();
    ASSERT_EQ(t.rows.size(), expected.size());
    for (std::size_t r = 0; r < expected.size(); ++r) {
        auto row = t.rows[r].columns.column_lists();
        EXPECT_EQ(canonical_form({row}), canonical_form({expected[r]})) << "row " << r;
    }
}

TEST(BuildTable, single_system_rows_are_canonical_parity_masks) {
    for (int s = 1; s <= 8; ++s) {
        const auto t = build_table(s, 1);
        const auto& masks = canonical_masks(s);
        ASSERT_EQ(t.rows.size(), masks.size());
        for (std::size_t r = 0; r < masks.size(); ++r) {
            EXPECT_EQ(label_mask(t.rows[r].label), masks[r]);
            for (Item j = 0; j < t.items(); ++j) ASSERT_EQ(t.rows[r].columns[j], static_cast<std::uint32_t>(std::popcount(masks[r] & j) & 1));
        }
    }
}

TEST(BuildTable, columns_agree_with_field_evaluation) {
    const auto t = build_table(3, 2);
    for (const auto& row : t.rows) {
        const CompositeQuestion q(2, row.label);
        for (Item i = 0; i < t.items(); ++i) ASSERT_EQ(row.columns[i], q.column_of(i));
    }
}

TEST(BuildTable, saturates_bound_and_passes_verification) {
    for (int n = 1; n <= 4; ++n)
        for (int s = 1; s * n <= 12; ++s) {
            const auto t = build_table(s, n);
            EXPECT_EQ(t.rows.size(), bose_bush_bound(s, n));
            const auto report = verify_table(t);
            EXPECT_TRUE(report.ok()) << "s=" << s << " N=" << n << ": " << report.violation->describe();
            // s = 1 has no row pairs, so rows are not classified.
            if (s >= 2) {
                EXPECT_EQ(report.linear_rows, t.rows.size());
            }
        }
}

TEST(BuildTable, item_limit) {
    EXPECT_THROW(build_table(4, 4), std::length_error);
    EXPECT_NO_THROW(build_table(4, 4, std::size_t{1} << 16));
}

TEST(VerifyTable, agrees_with_brute_force_counting) {
    for (auto [s, n] : {std::pair{2, 1}, {3, 1}, {4, 1}, {2, 2}, {3, 2}, {4, 2}, {2, 3}, {2, 4}}) {
        const auto t = build_table(s, n);
        EXPECT_TRUE(brute_force_even(t));
        EXPECT_TRUE(verify_table(t).ok());
    }
}

TEST(VerifyTable, intersection_sizes) {
    EXPECT_EQ(verify_table(build_table(2, 2)).intersection_size, 1u);
    const auto r = verify_table(build_table(3, 2));
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.rows, 21u);
    EXPECT_EQ(r.intersection_size, 4u);
}

TEST(VerifyTable, locates_items_swapped_across_columns) {
    auto t = build_table(2, 2);
    auto& row = t.rows[3].columns;
    const auto lists = row.column_lists();
    const Item a = lists[0][1], b = lists[1][2];
    row.set(a, 1);
    row.set(b, 0);
    EXPECT_FALSE(brute_force_even(t));
    const auto report = verify_table(t);
    ASSERT_FALSE(report.ok());
    EXPECT_EQ(report.violation->kind, Violation::Kind::uneven_intersection);
    EXPECT_TRUE(report.violation->row_a == 3 || report.violation->row_b == 3);
    EXPECT_EQ(report.linear_rows, 4u);
    EXPECT_FALSE(report.violation->describe().empty());
}

TEST(VerifyTable, relabelled_items_take_the_counting_path) {
    // An item permutation keeps every intersection size but breaks linearity.
    auto t = build_table(3, 2);
    for (auto& row : t.rows) {
        const auto c0 = row.columns[0], c1 = row.columns[1];
        row.columns.set(0, c1);
        row.columns.set(1, c0);
    }
    const auto report = verify_table(t);
    EXPECT_TRUE(report.ok());
    EXPECT_LT(report.linear_rows, t.rows.size());
    EXPECT_TRUE(brute_force_even(t));
}

TEST(VerifyTable, shape_violations) {
    auto t = build_table(2, 1);
    t.rows.push_back(t.rows.front());
    EXPECT_EQ(verify_table(t).violation->kind, Violation::Kind::too_many_rows);

    auto u = build_table(2, 1);
    u.rows[0].columns.set(1, 1);
    EXPECT_EQ(verify_table(u).violation->kind, Violation::Kind::unequal_columns);
}

TEST(ClassifyQuestion, examples) {
    EXPECT_EQ(classify_question(CompositeQuestion(2, {1, 1})), QuestionKind::product);
    EXPECT_EQ(classify_question(CompositeQuestion(2, {1, 2})), QuestionKind::entangled);
    EXPECT_EQ(classify_question(CompositeQuestion(2, {3, 0})), QuestionKind::product);
    // (3, 1) scaled by 3^{-1} = 2 in GF(4).
    EXPECT_EQ(CompositeQuestion(2, {3, 1}).lambda(), (std::vector<FieldElement>{1, 2}));
    EXPECT_THROW(CompositeQuestion(2, {0, 0}), std::invalid_argument);
    for (Mask c = 1; c < 16; ++c) {
        std::vector<FieldElement> lambda;
        for (int x = 3; x >= 0; --x) lambda.push_back((c >> x) & 1);
        EXPECT_EQ(classify_question(CompositeQuestion(1, lambda)), QuestionKind::product);
    }
}

TEST(ClassifyQuestion, two_qubit_census) {
    const auto t = build_table(2, 2);
    std::vector<QuestionKind> kinds;
    for (const auto& row : t.rows) kinds.push_back(classify_question(CompositeQuestion(2, row.label)));
    EXPECT_EQ(kinds, (std::vector<QuestionKind>{QuestionKind::product, QuestionKind::product, QuestionKind::product,
                                                QuestionKind::entangled, QuestionKind::entangled}));
}

TEST(ClassifyQuestion, subfield_criterion_matches_dependency_oracle) {
    for (int n = 1; n <= 12; ++n)
        for (int s = 1; s * n <= 12; ++s) {
            const auto t = build_table(s, n);
            for (const auto& row : t.rows) {
                ASSERT_EQ(classify_question(CompositeQuestion(n, row.label)), classify_by_dependency(row.columns, s, n))
                    << "s=" << s << " N=" << n;
            }
        }
}

TEST(TableCsv, round_trip) {
    for (auto [s, n] : {std::pair{2, 1}, {3, 1}, {2, 2}, {3, 2}, {2, 3}}) {
        const auto t = build_table(s, n);
        std::stringstream ss;
        write_table_csv(ss, t);
        const auto back = read_table_csv(ss);
        ASSERT_EQ(back.rows.size(), t.rows.size());
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            EXPECT_EQ(back.rows[r].label, t.rows[r].label);
            EXPECT_EQ(back.rows[r].columns, t.rows[r].columns);
        }
        EXPECT_TRUE(verify_table(back).ok());
    }
}

TEST(TableCsv, exact_layout) {
    std::stringstream ss;
    write_table_csv(ss, build_table(2, 1));
    EXPECT_EQ(ss.str(), "s,N,rows,columns\n2,1,3,2\n1,0,0 1;2 3\n0,1,0 2;1 3\n1,1,0 3;1 2\n");
}

TEST(TableCsv, rejects_malformed_input) {
    const auto parse = [](const std::string& text) {
        std::istringstream is(text);
        return read_table_csv(is);
    };
    EXPECT_THROW(parse("nope\n"), std::runtime_error);
    EXPECT_THROW(parse("s,N,rows,columns\n2,1,1,3\n"), std::runtime_error);
    EXPECT_THROW(parse("s,N,rows,columns\n2,1,1,2\n1,0,0 1;2 2\n"), std::runtime_error);
    EXPECT_THROW(parse("s,N,rows,columns\n2,1,1,2\n1,0,0 1;2\n"), std::runtime_error);
    EXPECT_THROW(parse("s,N,rows,columns\n2,1,2,2\n1,0,0 1;2 3\n"), std::runtime_error);
    EXPECT_THROW(parse("s,N,rows,columns\n2,1,1,2\n1,0,0 1;2 9\n"), std::runtime_error);
}
