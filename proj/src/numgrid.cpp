#include "nsp/numgrid.hpp"

namespace nsp {

void validate(const GridConfig& config, std::size_t rule_order) {
    if (config.n < rule_order || config.n == 0)
        throw Error(ErrorCode::invalid_argument, "n must be at least the rule order");
    if (config.l < 1 || config.s < 1)
        throw Error(ErrorCode::invalid_argument, "l and s must be positive");
    if (config.b < 2 || config.b > 36)
        throw Error(ErrorCode::invalid_argument, "base must lie in [2, 36]");
}

const std::vector<RuleCatalogEntry>& list_rule_catalog() {
    static const std::vector<RuleCatalogEntry> catalog = [] {
        const SplitSpec train{0, 20000, SplitRole::train};
        const SplitSpec val{20000, 30000, SplitRole::validation};
        auto single = [&](std::string name, std::vector<std::int64_t> coeffs, int complexity) {
            RuleCatalogEntry e;
            e.name = std::move(name);
            e.rules = {SequenceRule::linear(std::move(coeffs))};
            e.declared_complexity = complexity;
            e.train = train;
            e.validation = val;
            return e;
        };
        std::vector<RuleCatalogEntry> c;
        c.push_back(single("fib-number", {1, 1}, 1));
        c.push_back(single("arith-number", {2, -1}, 1));
        c.push_back(single("binary-3-m2-number", {3, -2}, 1));
        c.push_back(single("binary-1-2-number", {1, 2}, 1));
        // One binary op, but a 3x3 kernel needs two layers to relate rows n-1 and n-3.
        c.push_back(single("skip-1-0-1-number", {1, 0, 1}, 2));

        RuleCatalogEntry mix;
        mix.name = "mixture-number";
        mix.mixture = true;
        mix.declared_complexity = 1;
        mix.train = train;
        mix.validation = val;
        for (std::size_t i = 0; i < 4; ++i) mix.rules.push_back(c[i].rules.front());
        c.push_back(std::move(mix));

        c.push_back(single("ternary-number", {2, -1, 1}, 2));
        auto quaternary = single("quaternary-number", {4, -6, 4, -1}, 3);
        quaternary.base_variants = {5};
        c.push_back(std::move(quaternary));
        return c;
    }();
    return catalog;
}

const RuleCatalogEntry* find_rule_entry(std::string_view name) {
    for (const auto& entry : list_rule_catalog())
        if (entry.name == name) return &entry;
    return nullptr;
}

NumberGridInstance make_number_grid_from_terms(const SequenceRule& rule,
                                               std::span<const Term> initial_terms,
                                               const GridConfig& config) {
    validate(config, rule.order());
    const auto terms = eval_recurrence(rule, initial_terms, config.n + config.s);

    NumberGridInstance instance;
    instance.rule = rule;
    instance.initial_terms.assign(initial_terms.begin(), initial_terms.end());
    instance.input = DigitMatrix(config.n, config.l);
    instance.target = DigitMatrix(config.s, config.l);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const auto digits = digits_le(terms[i], config.b, config.l);
        DigitMatrix& grid = i < config.n ? instance.input : instance.target;
        const std::size_t row = i < config.n ? i : i - config.n;
        std::copy(digits.begin(), digits.end(), grid.cells.begin() + row * config.l);
    }
    return instance;
}

NumberGridInstance make_number_grid_instance(const RuleCatalogEntry& entry, const GridConfig& config,
                                             const SplitSpec& split, SeedContext seed) {
    if (entry.rules.empty()) throw Error(ErrorCode::invalid_argument, "catalog entry has no rule");
    CounterRng rng(seed);
    std::optional<std::size_t> choice;
    const SequenceRule* rule = &entry.rules.front();
    if (entry.mixture) {
        choice = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(entry.rules.size())));
        rule = &entry.rules[*choice];
    }
    validate(config, rule->order());

    for (std::size_t attempt = 0; attempt < kMaxResamples; ++attempt) {
        const auto init = sample_initial_terms(split, rule->order(), rng);
        try {
            auto instance = make_number_grid_from_terms(*rule, init, config);
            instance.role = split.role;
            instance.seed = seed;
            instance.mixture_choice = choice;
            return instance;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::negative_term && e.code() != ErrorCode::overflow) throw;
        }
    }
    throw Error(ErrorCode::unsatisfiable_config,
                entry.name + ": no representable sequence after " + std::to_string(kMaxResamples) +
                    " draws");
}

OneHotTensor onehot_encode(const DigitMatrix& digits, int base) {
    if (base < 2) throw Error(ErrorCode::invalid_argument, "base must be >= 2");
    OneHotTensor t;
    t.rows = digits.rows;
    t.cols = digits.cols;
    t.channels = static_cast<std::size_t>(base);
    t.data.assign(t.rows * t.cols * t.channels, 0);
    for (std::size_t r = 0; r < digits.rows; ++r) {
        for (std::size_t c = 0; c < digits.cols; ++c) {
            const int d = digits.at(r, c);
            if (d < 0 || d >= base)
                throw Error(ErrorCode::invalid_argument, "digit " + std::to_string(d) + " out of range");
            t.at(r, c, static_cast<std::size_t>(d)) = 1;
        }
    }
    return t;
}

DigitMatrix onehot_decode(const OneHotTensor& tensor) {
    if (tensor.data.size() != tensor.rows * tensor.cols * tensor.channels)
        throw Error(ErrorCode::malformed_one_hot, "tensor size does not match its shape");
    DigitMatrix digits(tensor.rows, tensor.cols);
    for (std::size_t r = 0; r < tensor.rows; ++r) {
        for (std::size_t c = 0; c < tensor.cols; ++c) {
            int hot = -1;
            for (std::size_t ch = 0; ch < tensor.channels; ++ch) {
                const auto v = tensor.at(r, c, ch);
                if (v == 0) continue;
                if (v != 1 || hot >= 0) {
                    throw Error(ErrorCode::malformed_one_hot,
                                "cell (" + std::to_string(r) + ", " + std::to_string(c) +
                                    ") has several active channels");
                }
                hot = static_cast<int>(ch);
            }
            if (hot < 0) {
                throw Error(ErrorCode::malformed_one_hot, "cell (" + std::to_string(r) + ", " +
                                                              std::to_string(c) + ") has no active channel");
            }
            digits.at(r, c) = hot;
        }
    }
    return digits;
}

}  // namespace nsp
