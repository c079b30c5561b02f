#include "doctest.h"

#include <algorithm>
#include <random>

#include "nsp/automata.hpp"
#include "oracles.hpp"

using namespace nsp;

namespace {

std::vector<Term> T(std::initializer_list<long long> xs) {
    std::vector<Term> out;
    for (auto x : xs) out.emplace_back(x);
    return out;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an nsp::Error");
    return ErrorCode::invalid_argument;
}

constexpr int B = 10;
constexpr int D = 11;

std::unique_ptr<Transducer> oracle_for(TaskKind kind, const DigitTaskEntry& e, const StreamConfig& cfg,
                                       const SplitSpec& split) {
    std::size_t regs = 0;
    if (kind == TaskKind::fixed_difference) regs = counter_registers_for(split, e.rule.difference, cfg.n + cfg.s, cfg.b);
    return build_oracle(kind, e.rule, cfg.b, regs);
}

}  // namespace

TEST_CASE("counter transducer: difference 17 from 100") {
    auto m = build_counter_transducer(17, 10, 4);
    const std::vector<int> in{0, 0, 1, B, 7, 1, D, D, D, D};
    CHECK(run_transducer(*m, in) == std::vector<int>{D, D, D, D, D, D, 1, B, 4, 3});
    CHECK(m->machine_class() == MachineClass::finite);
}

TEST_CASE("counter transducer: unit counter from 0") {
    const auto inst = make_digit_instance_from_terms(TaskKind::fixed_difference, SequenceRule::fixed_difference(1),
                                                     T({0}), StreamConfig{4, 8, 10});
    CHECK(std::vector<int>(inst.input.begin(), inst.input.begin() + 4) == std::vector<int>{0, B, 1, B});
    auto m = build_counter_transducer(1, 10, 2);
    CHECK(run_transducer(*m, inst.input) == inst.target);
}

TEST_CASE("counter transducer: register accounting") {
    auto m = build_counter_transducer(17, 10, 4);
    CHECK(m->register_count() == 40);
    const auto st = m->storage();
    CHECK(st.medium == "registers");
    REQUIRE(st.bound);
    CHECK(code_of([] { build_counter_transducer(0, 10, 4); }) == ErrorCode::invalid_argument);
}

TEST_CASE("counter transducer: register overflow") {
    auto m = build_counter_transducer(17, 10, 2);
    const auto inst = make_digit_instance_from_terms(TaskKind::fixed_difference, SequenceRule::fixed_difference(17),
                                                     T({95}), StreamConfig{3, 6, 10});
    CHECK(code_of([&] { run_transducer(*m, inst.input); }) == ErrorCode::register_overflow);
}

TEST_CASE("counter registers cover the validation window") {
    // 9899 + 24 * 17 = 10307 needs five digits
    CHECK(counter_registers_for({9000, 9900, SplitRole::validation}, 17, 24, 10) == 5);
    CHECK(counter_registers_for({0, 10, SplitRole::train}, 1, 4, 10) == 2);
}

TEST_CASE("property: counter storage is constant across input lengths") {
    std::optional<std::size_t> cells;
    for (std::size_t n : {12, 24, 48}) {
        auto m = build_counter_transducer(17, 10, 6);
        const auto inst = make_digit_instance(TaskKind::fixed_difference, StreamConfig{n, n, 10},
                                              {0, 9000, SplitRole::train}, {1, n});
        CHECK(run_transducer(*m, inst.input) == inst.target);
        const auto st = m->storage();
        CHECK(st.peak_cells <= *st.bound);
        if (!cells) cells = st.cells;
        CHECK(st.cells == *cells);
    }
}

TEST_CASE("reverse pda") {
    auto m = build_reverse_pda(10);
    CHECK(run_transducer(*m, std::vector<int>{4, 0, 7, D, D, D}) == std::vector<int>{D, D, D, 7, 0, 4});
    CHECK(run_transducer(*m, std::vector<int>{5, D}) == std::vector<int>{D, 5});
    CHECK(m->machine_class() == MachineClass::pushdown);
    CHECK(code_of([&] { run_transducer(*m, std::vector<int>{5, D, D}); }) == ErrorCode::stack_underflow);

    const auto inst = make_reverse_instance(16, 10, {3, 3});
    CHECK(run_transducer(*m, inst.input) == inst.target);
    CHECK(m->storage().peak_cells == 16);
}

TEST_CASE("property: pda on random reverse instances, m in 1..64") {
    auto m = build_reverse_pda(10);
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const std::size_t len = 1 + i % 64;
        const auto inst = make_reverse_instance(len, 10, {17, i});
        REQUIRE(run_transducer(*m, inst.input) == inst.target);
        REQUIRE(m->storage().peak_cells == len);
    }
}

TEST_CASE("bounded reverse machine") {
    auto m = build_bounded_reverse_fsm(10, 12);
    CHECK(m->machine_class() == MachineClass::finite);
    for (std::size_t len = 1; len <= 12; ++len) {
        const auto inst = make_reverse_instance(len, 10, {1, len});
        CHECK(run_transducer(*m, inst.input) == inst.target);
    }
    const auto long_inst = make_reverse_instance(16, 10, {1, 16});
    CHECK(code_of([&] { run_transducer(*m, long_inst.input); }) == ErrorCode::register_overflow);
    // states: 2 * (1 + b + ... + b^m)
    auto tiny = build_bounded_reverse_fsm(2, 2);
    CHECK(tiny->state_count_estimate().find("14") != std::string::npos);
}

TEST_CASE("queue transducer: fibonacci from 2,3") {
    const auto inst = make_digit_instance_from_terms(TaskKind::fibonacci, SequenceRule::linear({1, 1}), T({2, 3}),
                                                     StreamConfig{6, 18, 10});
    auto m = build_queue_transducer({TaskKind::fibonacci}, 10);
    CHECK(run_transducer(*m, inst.input) == inst.target);
    CHECK(m->machine_class() == MachineClass::queue);
}

TEST_CASE("queue transducer: arithmetic with difference 0 repeats") {
    const auto inst = make_digit_instance_from_terms(TaskKind::arithmetic, SequenceRule::linear({2, -1}), T({47, 47}),
                                                     StreamConfig{6, 9, 10});
    auto m = build_queue_transducer({TaskKind::arithmetic}, 10);
    const auto out = run_transducer(*m, inst.input);
    CHECK(out == inst.target);
    CHECK(std::vector<int>(out.begin() + 6, out.end()) == std::vector<int>{7, 4, B, 7, 4, B, 7, 4, B});
}

TEST_CASE("queue transducer: geometric 13/10 from 10") {
    const auto inst = make_digit_instance_from_terms(TaskKind::geometric, SequenceRule::rounded_geometric(13, 10),
                                                     T({10}), StreamConfig{3, 9, 10});
    auto m = build_queue_transducer({TaskKind::geometric, 13, 10}, 10);
    const auto out = run_transducer(*m, inst.input);
    CHECK(out == inst.target);
    CHECK(std::vector<int>(out.begin() + 3, out.end()) == std::vector<int>{3, 1, B, 6, 1, B, 0, 2, B});
    CHECK(code_of([] { build_queue_transducer({TaskKind::geometric, 13, 7}, 10); }) == ErrorCode::invalid_argument);
}

TEST_CASE("queue transducer: malformed streams") {
    auto m = build_queue_transducer({TaskKind::fibonacci}, 10);
    CHECK(code_of([&] { run_transducer(*m, std::vector<int>{B, B, D, D}); }) == ErrorCode::malformed_stream);
    CHECK(code_of([&] { run_transducer(*m, std::vector<int>{1, B, 2, B, D, 3}); }) == ErrorCode::malformed_stream);
}

TEST_CASE("run_transducer: empty input and alphabet check") {
    auto m = build_reverse_pda(10);
    CHECK(run_transducer(*m, std::vector<int>{}).empty());
    CHECK_THROWS_AS(run_transducer(*m, std::vector<int>{12}), Error);
}

TEST_CASE("classify_task") {
    CHECK(classify_task(TaskKind::fixed_difference).grammar == Grammar::regular);
    CHECK(classify_task(TaskKind::fixed_difference).machine == MachineClass::finite);
    CHECK(classify_task(TaskKind::reverse).grammar == Grammar::context_free);
    CHECK(classify_task(TaskKind::reverse).machine == MachineClass::pushdown);
    for (auto k : {TaskKind::arithmetic, TaskKind::fibonacci, TaskKind::geometric}) {
        CHECK(classify_task(k).grammar == Grammar::context_sensitive);
        CHECK(classify_task(k).machine == MachineClass::queue);
    }
    CHECK(classify_task("reverse").machine == MachineClass::pushdown);
    CHECK(code_of([] { classify_task("bogus"); }) == ErrorCode::unknown_kind);
    CHECK(MachineClass::finite < MachineClass::pushdown);
    CHECK(MachineClass::pushdown < MachineClass::queue);
}

TEST_CASE("property: every oracle reproduces generated targets (10^4 per kind)") {
    for (const auto& e : list_digit_catalog()) {
        for (auto role : {SplitRole::train, SplitRole::validation}) {
            const StreamConfig cfg;
            const auto& split = e.split(role);
            auto m = e.kind == TaskKind::reverse ? std::unique_ptr<Transducer>(build_reverse_pda(10))
                                                 : oracle_for(e.kind, e, cfg, split);
            for (std::uint64_t i = 0; i < 5000; ++i) {
                const auto inst = e.kind == TaskKind::reverse ? make_reverse_instance(split, 10, {31, i})
                                                              : make_digit_instance(e.kind, cfg, split, {31, i});
                REQUIRE(run_transducer(*m, inst.input) == inst.target);
            }
        }
    }
}

TEST_CASE("property: queue oracles on other shapes and bases") {
    // longer windows, other bases and wider start ranges than the catalog
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 3000; ++trial) {
        const int base = std::vector<int>{2, 3, 7, 10, 16}[gen() % 5];
        const StreamConfig cfg{1 + gen() % 40, 1 + gen() % 40, base};
        const SplitSpec split{0, static_cast<std::int64_t>(1 + gen() % 100000), SplitRole::train};
        const auto kind = std::vector<TaskKind>{TaskKind::arithmetic, TaskKind::fibonacci}[gen() % 2];
        const auto rule = kind == TaskKind::fibonacci ? SequenceRule::linear({1, 1}) : SequenceRule::linear({2, -1});
        CounterRng rng({static_cast<std::uint64_t>(trial), 0});
        const auto init = sample_initial_terms(split, 2, rng);
        DigitInstance inst;
        try {
            inst = make_digit_instance_from_terms(kind, rule, init, cfg);
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::negative_term);
            continue;
        }
        auto m = build_queue_transducer({kind}, base);
        // the continuation is only determined once two whole terms are visible
        if (decode_stream_terms(inst.input, base).size() < 2) {
            CHECK(code_of([&] { run_transducer(*m, inst.input); }) == ErrorCode::malformed_stream);
            continue;
        }
        REQUIRE(run_transducer(*m, inst.input) == inst.target);
    }
    // geometric needs den == base
    for (int base : {2, 5, 10, 16}) {
        for (std::uint64_t num : {1ull, 3ull, 13ull, 25ull}) {
            for (std::uint64_t i = 0; i < 200; ++i) {
                const auto rule = SequenceRule::rounded_geometric(num, static_cast<std::uint64_t>(base));
                CounterRng rng({i, num});
                const auto init = sample_initial_terms({0, 50000, SplitRole::train}, 1, rng);
                const StreamConfig cfg{1 + i % 30, 1 + (i * 7) % 30, base};
                const auto inst = make_digit_instance_from_terms(TaskKind::geometric, rule, init, cfg);
                auto m = build_queue_transducer({TaskKind::geometric, num, static_cast<std::uint64_t>(base)}, base);
                if (decode_stream_terms(inst.input, base).empty()) continue;
                REQUIRE(run_transducer(*m, inst.input) == inst.target);
            }
        }
    }
}

TEST_CASE("property: counter oracle on other differences and bases") {
    for (std::int64_t d : {1, 2, 9, 17, 99, 1000}) {
        for (int base : {2, 10, 16}) {
            const StreamConfig cfg{20, 20, base};
            const SplitSpec split{0, 5000, SplitRole::train};
            auto m = build_counter_transducer(d, base, counter_registers_for(split, d, 40, base));
            for (std::uint64_t i = 0; i < 200; ++i) {
                CounterRng rng({i, static_cast<std::uint64_t>(d)});
                const auto init = sample_initial_terms(split, 1, rng);
                const auto inst = make_digit_instance_from_terms(TaskKind::fixed_difference,
                                                                 SequenceRule::fixed_difference(d), init, cfg);
                REQUIRE(run_transducer(*m, inst.input) == inst.target);
            }
        }
    }
}
