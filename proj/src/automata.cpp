#include "nsp/automata.hpp"

#include <algorithm>

namespace nsp {

std::string_view to_string(MachineClass c) {
    switch (c) {
    case MachineClass::finite: return "finite";
    case MachineClass::pushdown: return "pushdown";
    case MachineClass::queue: return "queue";
    }
    return "unknown";
}

std::string_view to_string(Grammar g) {
    switch (g) {
    case Grammar::regular: return "regular";
    case Grammar::context_free: return "context-free";
    case Grammar::context_sensitive: return "context-sensitive";
    }
    return "unknown";
}

Classification classify_task(TaskKind kind) {
    switch (kind) {
    case TaskKind::fixed_difference: return {MachineClass::finite, Grammar::regular};
    case TaskKind::reverse: return {MachineClass::pushdown, Grammar::context_free};
    // A queue machine is Turing-equivalent; the output length bounds the run
    // time, so the machine is linearly bounded.
    case TaskKind::arithmetic:
    case TaskKind::fibonacci:
    case TaskKind::geometric: return {MachineClass::queue, Grammar::context_sensitive};
    }
    throw Error(ErrorCode::unknown_kind, "unhandled task kind");
}

Classification classify_task(std::string_view kind) {
    return classify_task(parse_task_kind(kind));
}

std::vector<Token> run_transducer(Transducer& machine, std::span<const Token> input) {
    machine.reset();
    std::vector<Token> output;
    output.reserve(input.size());
    const Token max_token = delimiter_token(machine.base());
    for (Token t : input) {
        if (t < 0 || t > max_token)
            throw Error(ErrorCode::malformed_stream, "token " + std::to_string(t) + " outside the alphabet");
        output.push_back(machine.step(t));
    }
    return output;
}

// ---------------------------------------------------------------- counter

CounterTransducer::CounterTransducer(std::int64_t difference, int base, std::size_t max_digits)
    : base_(base), max_digits_(max_digits) {
    if (difference < 1) throw Error(ErrorCode::invalid_argument, "counter difference must be >= 1");
    if (base < 2) throw Error(ErrorCode::invalid_argument, "base must be >= 2");
    if (max_digits < 1) throw Error(ErrorCode::invalid_argument, "counter needs at least one register");
    try {
        difference_digits_ = digits_le(Term(difference), base, max_digits);
    } catch (const Error&) {
        throw Error(ErrorCode::invalid_argument, "difference does not fit in the registers");
    }
    reset();
}

void CounterTransducer::reset() {
    registers_.assign(max_digits_, 0);
    position_ = 0;
    carry_ = 0;
    phase_ = Phase::first_term;
}

// True while the term A + difference still has a digit at position_.
// Positions >= position_ still hold the digits of A.
bool CounterTransducer::term_continues() const {
    if (carry_ != 0) return true;
    for (std::size_t q = position_; q < max_digits_; ++q)
        if (registers_[q] != 0 || difference_digits_[q] != 0) return true;
    return false;
}

int CounterTransducer::advance_digit() {
    if (position_ >= max_digits_)
        throw Error(ErrorCode::register_overflow, "term exceeds " + std::to_string(max_digits_) + " digits");
    const int sum = registers_[position_] + difference_digits_[position_] + carry_;
    registers_[position_] = sum % base_;
    carry_ = sum / base_;
    return registers_[position_++];
}

Token CounterTransducer::step(Token input) {
    const Token blank = blank_token(base_);
    const Token delim = delimiter_token(base_);
    switch (phase_) {
    case Phase::first_term:
        if (input == delim) throw Error(ErrorCode::malformed_stream, "no complete term before the delimiters");
        if (input == blank) {
            if (position_ == 0) throw Error(ErrorCode::malformed_stream, "empty term");
            phase_ = Phase::read;
            position_ = 0;
            carry_ = 0;
        } else {
            if (position_ >= max_digits_)
                throw Error(ErrorCode::register_overflow, "term exceeds " + std::to_string(max_digits_) + " digits");
            registers_[position_++] = input;
        }
        return delim;
    case Phase::read:
        if (input == delim) {
            phase_ = Phase::emit;
            return step(input);
        }
        if (input == blank) {
            if (position_ == 0 || term_continues())
                throw Error(ErrorCode::malformed_stream, "term ended early for the difference");
            position_ = 0;
            carry_ = 0;
        } else {
            if (!term_continues())
                throw Error(ErrorCode::malformed_stream, "term longer than the difference allows");
            if (advance_digit() != input)
                throw Error(ErrorCode::malformed_stream, "digit inconsistent with the difference");
        }
        return delim;
    case Phase::emit:
        if (input != delim) throw Error(ErrorCode::malformed_stream, "input resumed after the delimiters");
        if (term_continues()) return advance_digit();
        position_ = 0;
        carry_ = 0;
        return blank;
    }
    return delim;
}

StorageReport CounterTransducer::storage() const {
    // Digit registers plus position, carry and phase.
    const std::size_t cells = max_digits_ + 3;
    return {"registers", cells, cells, cells};
}

std::string CounterTransducer::state_count_estimate() const {
    BigInt states = 1;
    for (std::size_t i = 0; i < max_digits_; ++i) states *= base_;
    states *= (max_digits_ + 1) * 2 * 3;
    return to_decimal(states);
}

// ---------------------------------------------------------------- reversal

ReversePda::ReversePda(int base) : base_(base) {
    if (base < 2) throw Error(ErrorCode::invalid_argument, "base must be >= 2");
}

void ReversePda::reset() {
    stack_.clear();
    peak_ = 0;
    popping_ = false;
}

Token ReversePda::step(Token input) {
    const Token delim = delimiter_token(base_);
    if (input == delim) {
        popping_ = true;
        if (stack_.empty()) throw Error(ErrorCode::stack_underflow, "more delimiters than digits");
        const Token top = stack_.back();
        stack_.pop_back();
        return top;
    }
    if (input == blank_token(base_) || popping_)
        throw Error(ErrorCode::malformed_stream, "expected digits then delimiters");
    stack_.push_back(input);
    peak_ = std::max(peak_, stack_.size());
    return delim;
}

StorageReport ReversePda::storage() const {
    return {"stack", stack_.size(), peak_, std::nullopt};
}

BoundedReverseFsm::BoundedReverseFsm(int base, std::size_t max_m) : base_(base), max_m_(max_m) {
    if (base < 2) throw Error(ErrorCode::invalid_argument, "base must be >= 2");
    if (max_m < 1) throw Error(ErrorCode::invalid_argument, "max_m must be >= 1");
}

void BoundedReverseFsm::reset() {
    buffer_.clear();
    peak_ = 0;
    popping_ = false;
}

Token BoundedReverseFsm::step(Token input) {
    const Token delim = delimiter_token(base_);
    if (input == delim) {
        popping_ = true;
        if (buffer_.empty()) throw Error(ErrorCode::stack_underflow, "more delimiters than digits");
        const Token top = buffer_.back();
        buffer_.pop_back();
        return top;
    }
    if (input == blank_token(base_) || popping_)
        throw Error(ErrorCode::malformed_stream, "expected digits then delimiters");
    if (buffer_.size() == max_m_)
        throw Error(ErrorCode::register_overflow, "more than " + std::to_string(max_m_) + " digits");
    buffer_.push_back(input);
    peak_ = std::max(peak_, buffer_.size());
    return delim;
}

StorageReport BoundedReverseFsm::storage() const {
    return {"registers", buffer_.size(), peak_, max_m_};
}

std::string BoundedReverseFsm::state_count_estimate() const {
    // One state per buffered word of length 0..max_m, in each of two phases.
    BigInt states = 0, power = 1;
    for (std::size_t j = 0; j <= max_m_; ++j) {
        states += power;
        power *= base_;
    }
    return to_decimal(states * 2);
}

// ---------------------------------------------------------------- queue

namespace {

using Block = std::vector<int>;

void strip_high_zeros(Block& digits) {
    while (digits.size() > 1 && digits.back() == 0) digits.pop_back();
    if (digits.empty()) digits.push_back(0);
}

Block add_digits(const Block& a, const Block& b, int base) {
    Block out;
    int carry = 0;
    for (std::size_t k = 0; k < std::max(a.size(), b.size()); ++k) {
        const int v = (k < a.size() ? a[k] : 0) + (k < b.size() ? b[k] : 0) + carry;
        out.push_back(v % base);
        carry = v / base;
    }
    if (carry != 0) out.push_back(carry);
    strip_high_zeros(out);
    return out;
}

// a - b; nullopt when the result is negative.
std::optional<Block> sub_digits(const Block& a, const Block& b, int base) {
    Block out;
    int borrow = 0;
    for (std::size_t k = 0; k < std::max(a.size(), b.size()); ++k) {
        int v = (k < a.size() ? a[k] : 0) - (k < b.size() ? b[k] : 0) - borrow;
        borrow = v < 0 ? 1 : 0;
        out.push_back(v + borrow * base);
    }
    if (borrow != 0) return std::nullopt;
    strip_high_zeros(out);
    return out;
}

// floor(num * a / base): multiply digit-serially, then drop the lowest digit.
Block scale_drop_digit(const Block& a, std::uint64_t num, int base) {
    Block product;
    std::uint64_t carry = 0;
    for (int d : a) {
        const std::uint64_t v = num * static_cast<std::uint64_t>(d) + carry;
        product.push_back(static_cast<int>(v % static_cast<std::uint64_t>(base)));
        carry = v / static_cast<std::uint64_t>(base);
    }
    while (carry != 0) {
        product.push_back(static_cast<int>(carry % static_cast<std::uint64_t>(base)));
        carry /= static_cast<std::uint64_t>(base);
    }
    Block out(product.begin() + 1, product.end());
    strip_high_zeros(out);
    return out;
}

}  // namespace

QueueTransducer::QueueTransducer(QueueRule rule, int base) : rule_(rule), base_(base) {
    if (base < 2) throw Error(ErrorCode::invalid_argument, "base must be >= 2");
    switch (rule.kind) {
    case TaskKind::arithmetic:
    case TaskKind::fibonacci: break;
    case TaskKind::geometric:
        if (rule.ratio_den != static_cast<std::uint64_t>(base) || rule.ratio_num == 0)
            throw Error(ErrorCode::invalid_argument, "geometric queue machine needs ratio_den == base");
        break;
    default: throw Error(ErrorCode::invalid_argument, "no queue machine for this task kind");
    }
    reset();
}

void QueueTransducer::reset() {
    queue_.clear();
    blanks_in_queue_ = 0;
    partial_digits_ = 0;
    peak_ = 0;
    emitting_ = false;
    difference_negative_ = false;
    skip_ = 0;
    skipped_.clear();
    pending_.clear();
}

std::size_t QueueTransducer::retained_terms() const {
    return rule_.kind == TaskKind::geometric ? 1 : 2;
}

QueueTransducer::Block QueueTransducer::dequeue_block() {
    Block block;
    while (!queue_.empty()) {
        const Token t = queue_.front();
        queue_.pop_front();
        if (t == blank_token(base_)) {
            --blanks_in_queue_;
            return block;
        }
        block.push_back(t);
    }
    throw Error(ErrorCode::malformed_stream, "queue ran out inside a term");
}

void QueueTransducer::enqueue_block(const Block& block) {
    queue_.insert(queue_.end(), block.begin(), block.end());
    queue_.push_back(blank_token(base_));
    ++blanks_in_queue_;
    peak_ = std::max(peak_, queue_.size());
}

void QueueTransducer::on_blank() {
    if (partial_digits_ == 0) throw Error(ErrorCode::malformed_stream, "blank without digits");
    queue_.push_back(blank_token(base_));
    ++blanks_in_queue_;
    partial_digits_ = 0;
    peak_ = std::max(peak_, queue_.size());
    while (blanks_in_queue_ > retained_terms()) dequeue_block();
}

void QueueTransducer::begin_emit() {
    emitting_ = true;
    if (blanks_in_queue_ < retained_terms())
        throw Error(ErrorCode::malformed_stream, "too few complete terms before the delimiters");
    // One rotation separates the digits of the unfinished term from the
    // retained blocks.
    const std::size_t total = queue_.size();
    const std::size_t complete = total - partial_digits_;
    skipped_.clear();
    for (std::size_t i = 0; i < total; ++i) {
        const Token t = queue_.front();
        queue_.pop_front();
        if (i < complete)
            queue_.push_back(t);
        else
            skipped_.push_back(t);
    }
    skip_ = partial_digits_;
    partial_digits_ = 0;

    if (rule_.kind == TaskKind::arithmetic) {
        // Keep the last term and the digits of |difference|, sign in control.
        const Block older = dequeue_block();
        const Block last = dequeue_block();
        auto diff = sub_digits(last, older, base_);
        difference_negative_ = !diff.has_value();
        if (!diff) diff = sub_digits(older, last, base_);
        enqueue_block(last);
        enqueue_block(*diff);
    }
}

void QueueTransducer::produce_next_term() {
    Block next;
    switch (rule_.kind) {
    case TaskKind::fibonacci: {
        const Block older = dequeue_block();
        const Block last = dequeue_block();
        next = add_digits(older, last, base_);
        enqueue_block(last);
        enqueue_block(next);
        break;
    }
    case TaskKind::arithmetic: {
        const Block last = dequeue_block();
        const Block diff = dequeue_block();
        if (difference_negative_) {
            auto r = sub_digits(last, diff, base_);
            if (!r) throw Error(ErrorCode::negative_term, "arithmetic continuation went negative");
            next = std::move(*r);
        } else {
            next = add_digits(last, diff, base_);
        }
        enqueue_block(next);
        enqueue_block(diff);
        break;
    }
    case TaskKind::geometric: {
        const Block last = dequeue_block();
        next = scale_drop_digit(last, rule_.ratio_num, base_);
        enqueue_block(next);
        break;
    }
    default: break;
    }

    std::size_t first = 0;
    if (skip_ > 0) {
        if (skip_ > next.size() || !std::equal(skipped_.begin(), skipped_.end(), next.begin()))
            throw Error(ErrorCode::malformed_stream, "unfinished term disagrees with the rule");
        first = skip_;
        skip_ = 0;
    }
    pending_.insert(pending_.end(), next.begin() + static_cast<std::ptrdiff_t>(first), next.end());
    pending_.push_back(blank_token(base_));
}

Token QueueTransducer::step(Token input) {
    const Token blank = blank_token(base_);
    const Token delim = delimiter_token(base_);
    if (!emitting_) {
        if (input == delim) {
            begin_emit();
        } else if (input == blank) {
            on_blank();
            return delim;
        } else {
            queue_.push_back(input);
            ++partial_digits_;
            peak_ = std::max(peak_, queue_.size());
            return delim;
        }
    } else if (input != delim) {
        throw Error(ErrorCode::malformed_stream, "input resumed after the delimiters");
    }
    if (pending_.empty()) produce_next_term();
    const Token out = pending_.front();
    pending_.pop_front();
    return out;
}

StorageReport QueueTransducer::storage() const {
    return {"queue", queue_.size(), peak_, std::nullopt};
}

// ---------------------------------------------------------------- builders

std::unique_ptr<CounterTransducer> build_counter_transducer(std::int64_t difference, int base,
                                                            std::size_t max_digits) {
    return std::make_unique<CounterTransducer>(difference, base, max_digits);
}

std::unique_ptr<ReversePda> build_reverse_pda(int base) {
    return std::make_unique<ReversePda>(base);
}

std::unique_ptr<BoundedReverseFsm> build_bounded_reverse_fsm(int base, std::size_t max_m) {
    return std::make_unique<BoundedReverseFsm>(base, max_m);
}

std::unique_ptr<QueueTransducer> build_queue_transducer(QueueRule rule, int base) {
    return std::make_unique<QueueTransducer>(rule, base);
}

std::size_t counter_registers_for(const SplitSpec& split, std::int64_t difference,
                                  std::size_t stream_tokens, int base) {
    const Term largest = Term(split.upper - 1) + Term(difference) * stream_tokens;
    return digits_le_minimal(largest < 0 ? Term(0) : largest, base).size();
}

std::unique_ptr<Transducer> build_oracle(TaskKind kind, const SequenceRule& rule, int base,
                                         std::size_t counter_registers) {
    switch (kind) {
    case TaskKind::fixed_difference:
        if (rule.kind != RuleKind::fixed_difference)
            throw Error(ErrorCode::invalid_argument, "fixed_difference task needs a fixed_difference rule");
        return build_counter_transducer(rule.difference, base, counter_registers);
    case TaskKind::reverse: return build_reverse_pda(base);
    case TaskKind::arithmetic:
        if (rule != SequenceRule::linear({2, -1}))
            throw Error(ErrorCode::invalid_argument, "arithmetic task needs the rule (2, -1)");
        return build_queue_transducer({TaskKind::arithmetic}, base);
    case TaskKind::fibonacci:
        if (rule != SequenceRule::linear({1, 1}))
            throw Error(ErrorCode::invalid_argument, "fibonacci task needs the rule (1, 1)");
        return build_queue_transducer({TaskKind::fibonacci}, base);
    case TaskKind::geometric:
        if (rule.kind != RuleKind::rounded_geometric)
            throw Error(ErrorCode::invalid_argument, "geometric task needs a rounded_geometric rule");
        return build_queue_transducer({TaskKind::geometric, rule.ratio_num, rule.ratio_den}, base);
    }
    throw Error(ErrorCode::unknown_kind, "unhandled task kind");
}

}  // namespace nsp
