#pragma once

// Reference machines that map a digit-level input sequence to its target,
// one output token per input token, in a single left-to-right pass.

#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nsp/digitstream.hpp"

namespace nsp {

enum class MachineClass { finite = 0, pushdown = 1, queue = 2 };
enum class Grammar { regular, context_free, context_sensitive };

std::string_view to_string(MachineClass c);
std::string_view to_string(Grammar g);

struct Classification {
    MachineClass machine;
    Grammar grammar;
};

// Throws unknown_kind for names outside the task catalog.
Classification classify_task(TaskKind kind);
Classification classify_task(std::string_view kind);

struct StorageReport {
    std::string medium;  // "registers", "stack" or "queue"
    std::size_t cells = 0;
    std::size_t peak_cells = 0;
    std::optional<std::size_t> bound;  // set for finite machines
};

class Transducer {
public:
    virtual ~Transducer() = default;

    virtual MachineClass machine_class() const = 0;
    virtual int base() const = 0;
    virtual void reset() = 0;
    virtual Token step(Token input) = 0;
    virtual StorageReport storage() const = 0;
    // Equivalent finite-control size, or a tag for unbounded storage.
    virtual std::string state_count_estimate() const = 0;
};

// Resets the machine, then feeds every token. Output length equals input length.
std::vector<Token> run_transducer(Transducer& machine, std::span<const Token> input);

// Shift-register counter for A_{i+1} = A_i + difference. Holds L digit
// registers that are advanced in place, one digit position per time step.
class CounterTransducer final : public Transducer {
public:
    CounterTransducer(std::int64_t difference, int base, std::size_t max_digits);

    MachineClass machine_class() const override { return MachineClass::finite; }
    int base() const override { return base_; }
    void reset() override;
    Token step(Token input) override;
    StorageReport storage() const override;
    std::string state_count_estimate() const override;

    // One-hot equivalent register count, L * b.
    std::size_t register_count() const { return max_digits_ * static_cast<std::size_t>(base_); }
    std::size_t max_digits() const { return max_digits_; }

private:
    enum class Phase { first_term, read, emit };

    bool term_continues() const;
    int advance_digit();

    int base_;
    std::size_t max_digits_;
    std::vector<int> difference_digits_;
    std::vector<int> registers_;
    std::size_t position_ = 0;
    int carry_ = 0;
    Phase phase_ = Phase::first_term;
};

// Pushes digits, answers every delimiter with a pop. Exact for any m.
class ReversePda final : public Transducer {
public:
    explicit ReversePda(int base);

    MachineClass machine_class() const override { return MachineClass::pushdown; }
    int base() const override { return base_; }
    void reset() override;
    Token step(Token input) override;
    StorageReport storage() const override;
    std::string state_count_estimate() const override { return "unbounded (stack)"; }

private:
    int base_;
    std::vector<Token> stack_;
    std::size_t peak_ = 0;
    bool popping_ = false;
};

// The same reversal with a buffer capped at max_m digits: a finite machine
// whose state count grows as b^max_m. Throws register_overflow past the cap.
class BoundedReverseFsm final : public Transducer {
public:
    BoundedReverseFsm(int base, std::size_t max_m);

    MachineClass machine_class() const override { return MachineClass::finite; }
    int base() const override { return base_; }
    void reset() override;
    Token step(Token input) override;
    StorageReport storage() const override;
    std::string state_count_estimate() const override;

private:
    int base_;
    std::size_t max_m_;
    std::vector<Token> buffer_;
    std::size_t peak_ = 0;
    bool popping_ = false;
};

struct QueueRule {
    TaskKind kind = TaskKind::fibonacci;  // arithmetic, fibonacci or geometric
    std::uint64_t ratio_num = 13;
    std::uint64_t ratio_den = 10;
};

// One-queue machine. While reading it enqueues digits and blanks, keeping
// only the terms the rule needs; after the first delimiter it dequeues the
// retained blocks and writes the next term back digit-serially with a carry.
class QueueTransducer final : public Transducer {
public:
    QueueTransducer(QueueRule rule, int base);

    MachineClass machine_class() const override { return MachineClass::queue; }
    int base() const override { return base_; }
    void reset() override;
    Token step(Token input) override;
    StorageReport storage() const override;
    std::string state_count_estimate() const override { return "unbounded (queue)"; }

private:
    using Block = std::vector<int>;

    Block dequeue_block();
    void enqueue_block(const Block& block);
    std::size_t retained_terms() const;
    void on_blank();
    void begin_emit();
    void produce_next_term();

    QueueRule rule_;
    int base_;
    std::deque<Token> queue_;
    std::size_t blanks_in_queue_ = 0;
    std::size_t partial_digits_ = 0;
    std::size_t peak_ = 0;
    bool emitting_ = false;
    bool difference_negative_ = false;  // arithmetic only
    std::size_t skip_ = 0;
    Block skipped_;
    std::deque<Token> pending_;
};

std::unique_ptr<CounterTransducer> build_counter_transducer(std::int64_t difference, int base,
                                                            std::size_t max_digits);
std::unique_ptr<ReversePda> build_reverse_pda(int base);
std::unique_ptr<BoundedReverseFsm> build_bounded_reverse_fsm(int base, std::size_t max_m);
// Geometric requires ratio_den == base. Throws invalid_argument otherwise.
std::unique_ptr<QueueTransducer> build_queue_transducer(QueueRule rule, int base);

// Smallest register count L that holds every term a counter instance can
// reach: the split's largest start plus one difference per stream token.
std::size_t counter_registers_for(const SplitSpec& split, std::int64_t difference,
                                  std::size_t stream_tokens, int base);

// Picks the machine for a task kind. Throws invalid_argument when the rule
// has no oracle (e.g. geometric with den != base).
std::unique_ptr<Transducer> build_oracle(TaskKind kind, const SequenceRule& rule, int base,
                                         std::size_t counter_registers);

}  // namespace nsp
