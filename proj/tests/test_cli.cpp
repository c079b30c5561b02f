#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nsp/cli.hpp"
#include "nsp/dataset.hpp"

using namespace nsp;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("nsp_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json first_json_line(const std::string& text) {
    return nlohmann::json::parse(text.substr(0, text.find('\n')));
}

}  // namespace

TEST_CASE("generate: fib-number, 32 instances, seed 7") {
    const auto r = run({"generate", "--task", "fib-number", "--count", "32", "--seed", "7"});
    REQUIRE(r.code == kExitOk);
    std::istringstream in(r.out);
    const auto ds = read_dataset(in);
    CHECK(ds.header.count == 32);
    CHECK(ds.header.master_seed == 7);
    CHECK(ds.header.split.role == SplitRole::train);
    for (const auto& inst : ds.instances) {
        CHECK(inst.input.size() == 64);
        CHECK(inst.target.size() == 32);
    }
    // repeated runs are byte-identical
    CHECK(run({"generate", "--task", "fib-number", "--count", "32", "--seed", "7"}).out == r.out);

    const auto path = scratch() / "fib.jsonl";
    REQUIRE(run({"generate", "--task", "fib-number", "--count", "32", "--seed", "7", "--out", path.string()}).code == 0);
    CHECK(slurp(path) == r.out);
}

TEST_CASE("generate: validation default count and reverse length") {
    const auto r = run({"generate", "--task", "reverse", "--split", "val", "--seed", "1"});
    REQUIRE(r.code == kExitOk);
    std::istringstream in(r.out);
    const auto ds = read_dataset(in);
    CHECK(ds.instances.size() == 1024);
    for (const auto& inst : ds.instances) CHECK(inst.m == 16u);
}

TEST_CASE("generate: NSP_SEED supplies the default seed") {
    ::setenv("NSP_SEED", "41", 1);
    const auto a = run({"generate", "--task", "arith-digit", "--count", "4"});
    ::unsetenv("NSP_SEED");
    const auto b = run({"generate", "--task", "arith-digit", "--count", "4", "--seed", "41"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(run({"generate", "--task", "arith-digit", "--count", "4"}).out != a.out);
}

TEST_CASE("exit codes") {
    CHECK(run({"generate", "--task", "nope"}).code == kExitBadArguments);
    CHECK(run({"generate"}).code == kExitBadArguments);
    CHECK(run({"generate", "--task", "fib-number", "--count", "abc"}).code == kExitBadArguments);
    CHECK(run({"frobnicate"}).code == kExitBadArguments);
    CHECK(run({"generate", "--task", "fib-number", "--split", "test"}).code == kExitBadArguments);
    CHECK(run({"generate", "--task", "fib-number", "--split", "val", "--l", "1"}).code == kExitUnsatisfiable);
    CHECK(run({"--help"}).code == 0);

    const auto num = scratch() / "num.jsonl";
    REQUIRE(run({"generate", "--task", "arith-number", "--count", "4", "--out", num.string()}).code == 0);
    CHECK(run({"oracle", num.string()}).code == kExitNoOracle);
    CHECK(run({"evaluate", (scratch() / "missing.jsonl").string(), num.string()}).code == kExitBadArguments);
}

TEST_CASE("oracle predictions score zero; truncated predictions are a shape mismatch") {
    for (std::string task : {"diff17-digit", "arith-digit", "fib-digit", "geometric-digit", "reverse"}) {
        const auto ds = scratch() / (task + ".jsonl");
        const auto pr = scratch() / (task + ".pred.jsonl");
        REQUIRE(run({"generate", "--task", task, "--split", "val", "--count", "200", "--seed", "9", "--out",
                     ds.string()})
                    .code == 0);
        REQUIRE(run({"oracle", ds.string(), "--out", pr.string()}).code == 0);
        const auto r = run({"evaluate", ds.string(), pr.string(), "--breakdown"});
        REQUIRE(r.code == kExitOk);
        const auto j = first_json_line(r.out);
        CHECK(j["wrong_predictions"] == 0);
        CHECK(j["error_rate"] == "0/1");
        CHECK(j["level"] == "digit");

        auto text = slurp(pr);
        text.erase(text.rfind('\n', text.size() - 2) + 1);  // drop the last record
        const auto cut = scratch() / (task + ".cut.jsonl");
        std::ofstream(cut, std::ios::binary) << text;
        CHECK(run({"evaluate", ds.string(), cut.string()}).code == kExitShapeMismatch);
    }
}

TEST_CASE("finite reverse machine") {
    const auto ds = scratch() / "rev_train.jsonl";
    REQUIRE(run({"generate", "--task", "reverse", "--count", "50", "--out", ds.string()}).code == 0);
    const auto pr = scratch() / "rev_train.pred.jsonl";
    REQUIRE(run({"oracle", ds.string(), "--finite-reverse", "13", "--out", pr.string()}).code == 0);
    CHECK(first_json_line(run({"evaluate", ds.string(), pr.string()}).out)["wrong_predictions"] == 0);
    // validation reverse (m = 16) exceeds a machine built for 13
    const auto dv = scratch() / "rev_val.jsonl";
    REQUIRE(run({"generate", "--task", "reverse", "--split", "val", "--count", "5", "--out", dv.string()}).code == 0);
    const auto over = run({"oracle", dv.string(), "--finite-reverse", "13"});
    CHECK(over.code == kExitFailure);
    CHECK(over.err.find("RegisterOverflow") != std::string::npos);
}

TEST_CASE("analyze") {
    const auto r = run({"analyze", "--coeffs", "1,1", "--json"});
    REQUIRE(r.code == 0);
    const auto j = first_json_line(r.out);
    CHECK(j["strictly_increasing"] == true);
    CHECK(j["complexity"] == 1);
    CHECK(j["asymptotic"] == "Theta(b^2)");
    CHECK(j["widths"].size() == 4);
    const double slope = j["slope"];
    CHECK(slope >= 1.5);
    CHECK(slope <= 2.5);

    const auto q = run({"analyze", "--coeffs", "4,-6,4,-1", "--bases", "2", "--json"});
    REQUIRE(q.code == 0);
    CHECK(first_json_line(q.out)["complexity"] == 3);

    const auto text = run({"analyze", "--coeffs", "2,-1,1", "--bases", "2,3"});
    REQUIRE(text.code == 0);
    CHECK(text.out.find("complexity: 2") != std::string::npos);

    const auto table = scratch() / "add.tt";
    REQUIRE(run({"analyze", "--coeffs", "1,1", "--bases", "3", "--no-search", "--export-table", table.string()}).code ==
            0);
    const auto imp = run({"analyze", "--import-table", table.string(), "--json"});
    REQUIRE(imp.code == 0);
    CHECK(first_json_line(imp.out)["term_count"] == 17);

    CHECK(run({"analyze"}).code == kExitBadArguments);
    CHECK(run({"analyze", "--coeffs", "1,x"}).code == kExitBadArguments);
}

TEST_CASE("splitcheck") {
    const auto clean = scratch() / "clean.jsonl";
    REQUIRE(run({"generate", "--task", "fib-number", "--split", "val", "--count", "20", "--out", clean.string()}).code ==
            0);
    CHECK(run({"splitcheck", clean.string()}).code == kExitOk);

    // replace instance 3 with a well-formed instance whose terms are train-range
    auto ds = read_dataset_file(clean.string());
    const std::vector<Term> low{Term(100), Term(200)};
    const auto grid = make_number_grid_from_terms(ds.instances[3].rule, low, GridConfig{});
    ds.instances[3].initial_terms = grid.initial_terms;
    ds.instances[3].input = grid.input.cells;
    ds.instances[3].target = grid.target.cells;
    const auto dirty = scratch() / "dirty.jsonl";
    {
        std::ofstream f(dirty, std::ios::binary);
        write_dataset(f, ds);
    }
    const auto r = run({"splitcheck", dirty.string()});
    CHECK(r.code == kExitSplitViolations);
    CHECK(r.out.find("id 3") != std::string::npos);

    CHECK(run({"splitcheck", "--catalog", "--count", "16"}).code == kExitOk);
}
