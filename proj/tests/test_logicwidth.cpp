#include "doctest.h"

#include <random>
#include <sstream>

#include "nsp/logicwidth.hpp"
#include "oracles.hpp"

using namespace nsp;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an nsp::Error");
    return ErrorCode::invalid_argument;
}

TruthTable single_output(int inputs, std::uint32_t truth, std::uint32_t dc = 0) {
    TruthTable t(inputs, 1);
    for (std::uint32_t r = 0; r < t.row_count(); ++r) t.set_row(r, (truth >> r) & 1, (dc >> r) & 1);
    return t;
}

oracle::Fn to_fn(const TruthTable& t) {
    oracle::Fn f;
    f.inputs = t.input_bits();
    f.outputs = t.output_bits();
    for (std::uint32_t r = 0; r < t.row_count(); ++r) {
        f.on.push_back(t.on(r));
        f.dc.push_back(t.dc(r));
    }
    return f;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

TEST_CASE("half adder table") {
    const auto t = build_digit_op_table({1, 1}, 2, false);
    CHECK(t.input_bits() == 2);
    CHECK(t.output_bits() == 2);
    // rows: a = bit 0, b = bit 1; outputs: sum bit 0, carry bit 1
    CHECK(t.on(0) == 0b00);
    CHECK(t.on(1) == 0b01);
    CHECK(t.on(2) == 0b01);
    CHECK(t.on(3) == 0b10);
    for (std::uint32_t r = 0; r < 4; ++r) CHECK(t.dc(r) == 0);
    CHECK(minimize_sop(t).term_count == 3);
}

TEST_CASE("decimal addition table shape") {
    const auto t = build_digit_op_table({1, 1}, 10, false);
    CHECK(t.input_bits() == 8);
    REQUIRE(t.encoding());
    CHECK(t.encoding()->bits_per_digit == 4);
    // 10..15 codes are don't-care rows
    std::size_t dc_rows = 0;
    for (std::uint32_t r = 0; r < t.row_count(); ++r)
        if (t.dc(r) == t.output_mask()) ++dc_rows;
    CHECK(dc_rows == 256 - 100);
    CHECK(build_digit_op_table({1, 1}, 10, true).input_bits() == 9);
}

TEST_CASE("property: digit-op tables agree with direct evaluation") {
    const std::vector<std::vector<std::int64_t>> ops{{1, 1}, {2, -1}, {3, -2}, {1, 2}, {1, 0, 1}, {2, -1, 1}, {-7, 5}, {1}};
    for (const auto& c : ops) {
        for (int base : {2, 3, 4, 5, 7, 10}) {
            for (bool carry : {false, true}) {
                TruthTable t;
                try {
                    t = build_digit_op_table(c, base, carry);
                } catch (const Error& e) {
                    REQUIRE(e.code() == ErrorCode::budget_exceeded);
                    continue;
                }
                const auto& enc = *t.encoding();
                const int bpd = bits_for(base);
                for (std::uint32_t r = 0; r < t.row_count(); ++r) {
                    bool valid = true;
                    std::int64_t v = 0;
                    for (std::size_t i = 0; i < c.size(); ++i) {
                        const int d = static_cast<int>((r >> (static_cast<int>(i) * bpd)) & ((1u << bpd) - 1));
                        if (d >= base) valid = false;
                        v += c[i] * d;
                    }
                    if (carry) {
                        const int code = static_cast<int>(r >> (static_cast<int>(c.size()) * bpd));
                        const int cin = code + enc.carry_in_min;
                        if (cin > enc.carry_in_max) valid = false;
                        v += cin;
                    }
                    if (!valid) {
                        REQUIRE(t.dc(r) == t.output_mask());
                        continue;
                    }
                    const auto digit = static_cast<std::uint32_t>(v - floor_div(v, base) * base);
                    const auto cout = floor_div(v, base);
                    REQUIRE(cout >= enc.carry_out_min);
                    REQUIRE(cout <= enc.carry_out_max);
                    const std::uint32_t expect = digit | (static_cast<std::uint32_t>(cout - enc.carry_out_min) << bpd);
                    REQUIRE(t.dc(r) == 0);
                    REQUIRE(t.on(r) == expect);
                }
            }
        }
    }
}

TEST_CASE("table budget") {
    CHECK(code_of([] { build_digit_op_table({1, 1, 1, 1, 1}, 16, false); }) == ErrorCode::budget_exceeded);
    CHECK(code_of([] { minimize_sop(TruthTable(17, 1)); }) == ErrorCode::budget_exceeded);
    CHECK(code_of([] { build_digit_op_table({}, 10, false); }) == ErrorCode::invalid_argument);
}

TEST_CASE("minimize_sop: small named functions") {
    CHECK(minimize_sop(single_output(2, 0b0110)).term_count == 2);        // xor
    CHECK(minimize_sop(single_output(3, 0b11101000)).term_count == 3);    // majority
    CHECK(minimize_sop(single_output(3, 0b10010110)).term_count == 4);    // parity
    CHECK(minimize_sop(single_output(3, 0)).term_count == 0);
    CHECK(minimize_sop(single_output(3, 0xFF)).term_count == 1);
    // a don't-care can merge two terms into one
    CHECK(minimize_sop(single_output(2, 0b0001, 0b0010)).term_count == 1);
}

TEST_CASE("property: exact minimality against brute force, all functions of <= 3 inputs") {
    for (int n = 1; n <= 3; ++n) {
        const std::uint32_t rows = 1u << n;
        for (std::uint32_t f = 0; f < (1u << rows); ++f) {
            const auto t = single_output(n, f);
            const auto cover = minimize_sop(t);
            REQUIRE(cover_matches(cover, t));
            REQUIRE(cover.term_count == static_cast<std::size_t>(oracle::min_cover(to_fn(t))));
        }
    }
}

TEST_CASE("property: exact minimality against brute force, sampled 4-input functions") {
    // the acceptance binary covers all 65536 of them
    std::mt19937_64 gen(4);
    for (int k = 0; k < 4000; ++k) {
        const auto f = static_cast<std::uint32_t>(gen() & 0xFFFF);
        const auto t = single_output(4, f);
        const auto cover = minimize_sop(t);
        REQUIRE(cover_matches(cover, t));
        REQUIRE(cover.term_count == static_cast<std::size_t>(oracle::min_cover(to_fn(t))));
    }
}

TEST_CASE("property: multi-output functions with don't-cares against brute force") {
    std::mt19937_64 gen(5);
    for (int k = 0; k < 1500; ++k) {
        const int n = 2 + static_cast<int>(gen() % 3);
        const int m = 1 + static_cast<int>(gen() % 3);
        TruthTable t(n, m);
        for (std::uint32_t r = 0; r < t.row_count(); ++r) {
            const auto dc = static_cast<std::uint32_t>(gen() % 4 == 0 ? gen() & t.output_mask() : 0);
            t.set_row(r, static_cast<std::uint32_t>(gen()) & t.output_mask() & ~dc, dc);
        }
        const auto cover = minimize_sop(t);
        REQUIRE(cover_matches(cover, t));
        REQUIRE(cover.term_count == static_cast<std::size_t>(oracle::min_cover(to_fn(t))));
        const auto greedy = minimize_sop(t, MinimizeMode::heuristic);
        REQUIRE(cover_matches(greedy, t));
        REQUIRE_FALSE(greedy.exact);
        REQUIRE(greedy.term_count >= cover.term_count);
    }
}

TEST_CASE("property: adding a don't-care never increases the exact count") {
    std::mt19937_64 gen(6);
    for (int k = 0; k < 1500; ++k) {
        const int n = 3 + static_cast<int>(gen() % 3);
        const int m = 1 + static_cast<int>(gen() % 2);
        TruthTable t(n, m);
        for (std::uint32_t r = 0; r < t.row_count(); ++r) t.set_row(r, static_cast<std::uint32_t>(gen()) & t.output_mask(), 0);
        const auto before = minimize_sop(t).term_count;
        auto t2 = t;
        t2.set_dont_care(static_cast<std::uint32_t>(gen() % t.row_count()));
        REQUIRE(minimize_sop(t2).term_count <= before);
    }
}

TEST_CASE("property: covers of digit-op tables are valid") {
    for (auto c : {std::vector<std::int64_t>{1, 1}, {2, -1}, {3, -2}, {1, 2}, {2, -1, 1}}) {
        for (int base = 2; base <= 4; ++base) {
            for (bool carry : {false, true}) {
                const auto t = build_digit_op_table(c, base, carry);
                if (t.input_bits() > 9) continue;
                CHECK(cover_matches(minimize_sop(t), t));
                CHECK(cover_matches(minimize_sop(t, MinimizeMode::heuristic), t));
            }
        }
    }
}

TEST_CASE("prime implicants are implicants") {
    const auto t = build_digit_op_table({1, 1}, 3, true);
    const auto primes = prime_implicants(t);
    CHECK_FALSE(primes.empty());
    for (const auto& p : primes) {
        for (std::uint32_t r = 0; r < t.row_count(); ++r) {
            if (!p.contains(r)) continue;
            REQUIRE(((t.on(r) | t.dc(r)) & p.outputs) == p.outputs);
        }
    }
}

TEST_CASE("combinatorial width tags and the unary copy") {
    CHECK(combinatorial_width({{1, 1}, 10, false}).asymptotic_tag == "Theta(b^2)");
    CHECK(combinatorial_width({{2, -1, 1}, 2, false}).asymptotic_tag == "Theta(b^3)");
    CHECK(asymptotic_tag({1}) == "Theta(log b)");
    CHECK(asymptotic_tag({4, -6, 4, -1}) == "Theta(b^4)");
    // copying a digit needs one term per output bit
    for (int k = 1; k <= 4; ++k) CHECK(combinatorial_width({{1}, 1 << k, false}).term_count == static_cast<std::size_t>(k));
}

TEST_CASE("width growth of digit addition") {
    const auto g = estimate_width_growth({1, 1}, {2, 3, 4, 5});
    REQUIRE(g.counts.size() == 4);
    CHECK(g.strictly_increasing);
    for (std::size_t i = 1; i < g.counts.size(); ++i) CHECK(g.counts[i] > g.counts[i - 1]);
    CHECK(g.slope >= 1.5);
    CHECK(g.slope <= 2.5);
    CHECK(code_of([] { estimate_width_growth({1, 1}, {4}); }) == ErrorCode::degenerate_fit);
    CHECK(code_of([] { log_log_slope({3, 3}, {5, 9}); }) == ErrorCode::degenerate_fit);
    CHECK(log_log_slope({2, 4}, {4, 16}) == doctest::Approx(2.0));
}

TEST_CASE("compound width") {
    CHECK(compound_width({100, 100}) == 200);
    CHECK(compound_width({7}) == 7);
    CHECK(code_of([] { compound_width({}); }) == ErrorCode::empty_list);
    // two binary blocks against one ternary block at base 4
    const auto w2a = combinatorial_width({{2, -1}, 4, true}).term_count;
    const auto w2b = combinatorial_width({{1, 1}, 4, true}).term_count;
    const auto w3 = combinatorial_width({{2, -1, 1}, 4, true}).term_count;
    CHECK(compound_width({w2a, w2b}) < w3);
}

TEST_CASE("truth table text format") {
    const auto t = build_digit_op_table({2, -1}, 3, true);
    std::stringstream ss;
    write_truth_table(ss, t);
    const auto back = read_truth_table(ss);
    CHECK(back == t);

    std::stringstream xor_text("# xor\n00 0\n10 1\n01 1\n11 0\n");
    const auto x = read_truth_table(xor_text);
    CHECK(x.input_bits() == 2);
    CHECK(x.on(1) == 1);
    CHECK(x.on(3) == 0);
    CHECK(minimize_sop(x).term_count == 2);

    std::stringstream dc_text("0 -\n1 1\n");
    const auto d = read_truth_table(dc_text);
    CHECK(d.dc(0) == 1);
    CHECK(minimize_sop(d).term_count == 1);

    std::stringstream missing("00 0\n10 1\n01 1\n");
    CHECK(code_of([&] { read_truth_table(missing); }) == ErrorCode::parse_error);
    std::stringstream dup("0 1\n0 1\n");
    CHECK(code_of([&] { read_truth_table(dup); }) == ErrorCode::parse_error);
    std::stringstream junk("0x 1\n1 1\n");
    CHECK(code_of([&] { read_truth_table(junk); }) == ErrorCode::parse_error);
}
