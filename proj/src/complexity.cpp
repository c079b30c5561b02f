#include "nsp/complexity.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

#include "nsp/logicwidth.hpp"

namespace nsp {

namespace {

using Form = std::vector<std::int64_t>;

std::string leaf_name(std::size_t variable) {
    return std::string(1, static_cast<char>('A' + variable));
}

std::string scaled(std::int64_t c, const std::string& operand) {
    if (c == 1) return operand;
    if (c == -1) return "-" + operand;
    return std::to_string(c) + operand;
}

std::string render(const PlanPtr& node) {
    if (node->is_leaf()) return leaf_name(node->variable);
    std::string out = "(" + scaled(node->op_p, render(node->left));
    if (node->op_q < 0)
        out += " - " + scaled(-node->op_q, render(node->right));
    else
        out += " + " + scaled(node->op_q, render(node->right));
    return out + ")";
}

void collect_form(const PlanPtr& node, std::int64_t scale, Form& form) {
    if (node->is_leaf()) {
        form[node->variable] += scale;
        return;
    }
    collect_form(node->left, scale * node->op_p, form);
    collect_form(node->right, scale * node->op_q, form);
}

struct FormHash {
    std::size_t operator()(const Form& f) const noexcept {
        std::uint64_t h = 0x84222325CBF29CE4ULL;
        for (auto v : f) h = mix64(h ^ static_cast<std::uint64_t>(v));
        return static_cast<std::size_t>(h);
    }
};

std::size_t minus_count(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '-'));
}

std::size_t leading_negatives(const std::string& s) {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i] == '(' && s[i + 1] == '-') ++n;
    return n + (!s.empty() && s[0] == '-');
}

struct Best {
    std::size_t width = 0;
    PlanPtr plan;
    std::string text;

    bool better_than(const Best& other) const {
        if (width != other.width) return width < other.width;
        // Among equal widths prefer fewer minus signs, then fewer leading
        // negatives, then the smaller string.
        if (minus_count(text) != minus_count(other.text)) return minus_count(text) < minus_count(other.text);
        if (leading_negatives(text) != leading_negatives(other.text))
            return leading_negatives(text) < leading_negatives(other.text);
        return text < other.text;
    }
};

std::size_t support(const Form& f) {
    return static_cast<std::size_t>(std::count_if(f.begin(), f.end(), [](auto v) { return v != 0; }));
}

class Searcher {
public:
    Searcher(std::size_t arity, const ComplexityOptions& options) : arity_(arity), options_(options) {
        if (options.catalog.empty()) {
            for (std::int64_t p = -options.coeff_bound; p <= options.coeff_bound; ++p)
                for (std::int64_t q = -options.coeff_bound; q <= options.coeff_bound; ++q)
                    if (p != 0 && q != 0) ops_.emplace_back(p, q);
        } else {
            for (auto [p, q] : options.catalog) {
                if (p == 0 || q == 0) throw Error(ErrorCode::invalid_argument, "catalog operations need p, q != 0");
                ops_.emplace_back(p, q);
            }
        }
        if (ops_.empty()) throw Error(ErrorCode::invalid_argument, "empty operation catalog");
    }

    std::optional<Best> solve(const Form& g, std::size_t ops, bool chain) {
        if (ops == 0) {
            if (support(g) == 1) {
                const auto var = static_cast<std::size_t>(
                    std::find_if(g.begin(), g.end(), [](auto v) { return v != 0; }) - g.begin());
                if (g[var] == 1) return leaf(var);
            }
            return std::nullopt;
        }
        // A tree with `ops` binary nodes has ops + 1 leaf slots.
        if (support(g) > ops + 1) return std::nullopt;
        if (ops == 1) {
            const auto& known = level(1, chain);
            if (auto it = known.find(g); it != known.end()) return it->second;
            return std::nullopt;
        }

        auto& memo = memo_[chain ? 1 : 0][ops];
        if (auto it = memo.find(g); it != memo.end()) return it->second;

        std::optional<Best> best;
        auto consider = std::function<void(std::int64_t, std::int64_t, const Best&, const Best&)>(
            [&](std::int64_t p, std::int64_t q, const Best& left, const Best& right) {
                auto node = std::make_shared<PlanNode>();
                node->op_p = p;
                node->op_q = q;
                node->width = op_width(p, q);
                node->left = left.plan;
                node->right = right.plan;
                Best candidate{node->width + left.width + right.width, node, ""};
                candidate.text = render(node);
                if (!best || candidate.better_than(*best)) best = std::move(candidate);
            });

        for (std::size_t a = 0; a < ops; ++a) {
            const std::size_t b = ops - 1 - a;
            if (chain && a != 0 && b != 0) continue;
            const bool enumerate_left = a <= b;
            const auto& known = level(enumerate_left ? a : b, chain);
            for (const auto& [f, f_best] : known) {
                for (auto [p, q] : ops_) {
                    // g = p * left + q * right; solve for the other side.
                    const std::int64_t mul = enumerate_left ? p : q;
                    const std::int64_t div = enumerate_left ? q : p;
                    Form other(arity_);
                    bool integral = true;
                    for (std::size_t i = 0; i < arity_ && integral; ++i) {
                        const std::int64_t rest = g[i] - mul * f[i];
                        if (rest % div != 0) integral = false;
                        other[i] = rest / div;
                    }
                    if (!integral) continue;
                    auto other_best = solve(other, enumerate_left ? b : a, chain);
                    if (!other_best) continue;
                    if (enumerate_left)
                        consider(p, q, f_best, *other_best);
                    else
                        consider(p, q, *other_best, f_best);
                }
            }
        }
        memo.emplace(g, best);
        return best;
    }

private:
    Best leaf(std::size_t var) const {
        auto node = std::make_shared<PlanNode>();
        node->variable = var;
        return {0, node, leaf_name(var)};
    }

    std::size_t op_width(std::int64_t p, std::int64_t q) {
        const auto key = std::make_pair(p, q);
        if (auto it = widths_.find(key); it != widths_.end()) return it->second;
        const auto w = combinatorial_width({{p, q}, options_.width_base, options_.width_carry_in}).term_count;
        widths_.emplace(key, w);
        return w;
    }

    // Every form computable with exactly `ops` operations, with its best plan.
    const std::unordered_map<Form, Best, FormHash>& level(std::size_t ops, bool chain) {
        auto& slot = levels_[chain ? 1 : 0];
        if (slot.size() <= ops) slot.resize(ops + 1);
        if (slot[ops]) return *slot[ops];
        std::unordered_map<Form, Best, FormHash> out;
        auto keep = [&](Form f, Best b) {
            auto it = out.find(f);
            if (it == out.end())
                out.emplace(std::move(f), std::move(b));
            else if (b.better_than(it->second))
                it->second = std::move(b);
        };
        if (ops == 0) {
            for (std::size_t v = 0; v < arity_; ++v) {
                Form f(arity_, 0);
                f[v] = 1;
                keep(std::move(f), leaf(v));
            }
        } else {
            for (std::size_t a = 0; a < ops; ++a) {
                const std::size_t b = ops - 1 - a;
                if (chain && a != 0 && b != 0) continue;
                const auto& left = level(a, chain);
                const auto& right = level(b, chain);
                for (const auto& [lf, lb] : left) {
                    for (const auto& [rf, rb] : right) {
                        for (auto [p, q] : ops_) {
                            Form f(arity_);
                            for (std::size_t i = 0; i < arity_; ++i) f[i] = p * lf[i] + q * rf[i];
                            auto node = std::make_shared<PlanNode>();
                            node->op_p = p;
                            node->op_q = q;
                            node->width = op_width(p, q);
                            node->left = lb.plan;
                            node->right = rb.plan;
                            Best b_{node->width + lb.width + rb.width, node, render(node)};
                            keep(std::move(f), std::move(b_));
                        }
                    }
                }
            }
        }
        slot[ops] = std::make_unique<std::unordered_map<Form, Best, FormHash>>(std::move(out));
        return *slot[ops];
    }

    std::size_t arity_;
    const ComplexityOptions& options_;
    std::vector<std::pair<std::int64_t, std::int64_t>> ops_;
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> widths_;
    std::map<std::size_t, std::unordered_map<Form, std::optional<Best>, FormHash>> memo_[2];
    std::vector<std::unique_ptr<std::unordered_map<Form, Best, FormHash>>> levels_[2];
};

}  // namespace

std::size_t DecompositionPlan::function_count() const {
    std::function<std::size_t(const PlanPtr&)> count = [&](const PlanPtr& n) -> std::size_t {
        return n->is_leaf() ? 0 : 1 + count(n->left) + count(n->right);
    };
    return root ? count(root) : 0;
}

std::vector<std::size_t> DecompositionPlan::widths() const {
    std::vector<std::size_t> out;
    std::function<void(const PlanPtr&)> walk = [&](const PlanPtr& n) {
        if (n->is_leaf()) return;
        walk(n->left);
        walk(n->right);
        out.push_back(n->width);
    };
    if (root) walk(root);
    return out;
}

std::size_t DecompositionPlan::compound_width() const {
    const auto w = widths();
    return w.empty() ? 0 : nsp::compound_width(w);
}

std::vector<std::int64_t> DecompositionPlan::form() const {
    Form f(arity, 0);
    if (root) collect_form(root, 1, f);
    return f;
}

BigInt DecompositionPlan::evaluate(std::span<const BigInt> inputs) const {
    if (inputs.size() != arity) throw Error(ErrorCode::arity_mismatch, "plan arity differs from inputs");
    std::function<BigInt(const PlanPtr&)> eval = [&](const PlanPtr& n) -> BigInt {
        if (n->is_leaf()) return inputs[n->variable];
        return eval(n->left) * n->op_p + eval(n->right) * n->op_q;
    };
    return eval(root);
}

bool DecompositionPlan::is_chain() const {
    std::function<bool(const PlanPtr&)> chain = [&](const PlanPtr& n) -> bool {
        if (n->is_leaf()) return true;
        if (!n->left->is_leaf() && !n->right->is_leaf()) return false;
        return chain(n->left) && chain(n->right);
    };
    return !root || chain(root);
}

std::string DecompositionPlan::to_string() const {
    return root ? render(root) : "";
}

ComplexityResult complexity_search(const std::vector<std::int64_t>& target, const ComplexityOptions& options) {
    if (target.empty() || target.size() > 4)
        throw Error(ErrorCode::invalid_argument, "target arity must lie in [1, 4]");
    if (support(target) == 0) throw Error(ErrorCode::invalid_argument, "zero target form");
    if (options.coeff_bound < 1 && options.catalog.empty())
        throw Error(ErrorCode::invalid_argument, "coefficient bound must be >= 1");

    Searcher searcher(target.size(), options);
    ComplexityResult result;
    bool found = false;
    for (std::size_t ops = 0; ops <= options.max_functions && !found; ++ops) {
        if (auto best = searcher.solve(target, ops, false)) {
            result.complexity = ops;
            result.difficulty = best->width;
            result.plan = {target.size(), best->plan};
            found = true;
        }
    }
    if (!found) {
        throw Error(ErrorCode::no_plan_found,
                    "no composition of at most " + std::to_string(options.max_functions) + " operations");
    }
    for (std::size_t ops = result.complexity; ops <= options.max_functions; ++ops) {
        if (auto best = searcher.solve(target, ops, true)) {
            result.chain_complexity = ops;
            result.chain_difficulty = best->width;
            break;
        }
    }
    return result;
}

}  // namespace nsp
