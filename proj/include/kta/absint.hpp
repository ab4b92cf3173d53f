#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kta/cfg.hpp"
#include "kta/inputs.hpp"
#include "kta/interval.hpp"
#include "kta/loader.hpp"
#include "kta/sim.hpp"
#include "kta/timing.hpp"

namespace kta {

class AbsError : public std::runtime_error {
  public:
    enum class Kind { UnsupportedInstruction, UnresolvableMemoryWrite, CallDepthExceeded, ReturnMismatch };

    AbsError(Kind kind, Address pc, const std::string& what) : std::runtime_error(what), kind_(kind), pc_(pc) {}
    Kind kind() const { return kind_; }
    Address pc() const { return pc_; }

  private:
    Kind kind_;
    Address pc_;
};

enum class MergePolicy { None, BlockEntry };
enum class WritePolicy { Smash, Fail };

std::string_view merge_policy_name(MergePolicy p);

// Bounds on elapsed cycles.
struct TimeRange {
    Cycles lo = 0;
    Cycles hi = 0;
    bool operator==(const TimeRange&) const = default;
};

// A register or constant operand recorded by an origin.
struct OriginOperand {
    bool is_reg = false;
    uint8_t reg = 0;
    Word value = 0;
    bool operator==(const OriginOperand&) const = default;
};

// What is known about how a register's current value was produced. Used to
// carry branch refinements back to the values a comparison read.
struct Origin {
    enum class Kind : uint8_t { None, Compare, Mem, Offset };
    Kind kind = Kind::None;
    // Compare: the register holds (a < b) under cond Lt or Ltu.
    BranchCond cond = BranchCond::Lt;
    OriginOperand a;
    OriginOperand b;
    // Mem: the register equals the memory word at addr.
    Address addr = 0;
    // Offset: the register equals regs[base] + delta (mod 2^32).
    uint8_t base = 0;
    int64_t delta = 0;
    bool operator==(const Origin&) const = default;
};

// Word-granular overlay over the concrete initial image and the zeroed
// stack. Once smashed, every word not in the overlay reads as Top.
struct AbstractMemory {
    std::map<Address, Interval> overlay;
    bool smashed = false;
    bool operator==(const AbstractMemory&) const = default;
};

struct AbstractState {
    // Start of the next block to execute; kExitSentinel once returned.
    Address pc = 0;
    std::array<Interval, 32> regs;
    Interval hi;
    Interval lo;
    AbstractMemory mem;
    TimeRange time;
    bool exact = true;
    // Return addresses expected by inlined calls, innermost last.
    std::vector<Address> frames;
    uint64_t path_hash = 0xcbf29ce484222325ull;
    std::array<Origin, 32> origins;

    unsigned call_depth() const { return static_cast<unsigned>(frames.size()); }
    bool operator==(const AbstractState&) const = default;
};

using AbstractBinding = std::vector<std::pair<Location, Interval>>;

// The machine state at entry: $sp at the stack top, $ra at the exit
// sentinel, inputs bound, every other register zero.
AbstractState initial_state(const LoadedProgram& prog, Address entry, const AbstractBinding& inputs,
                            const SimConfig& config = {});

struct AbsOptions {
    MergePolicy merge = MergePolicy::None;
    WritePolicy write = WritePolicy::Smash;
    unsigned max_call_depth = 16;
    bool diagnostics = false;
    SimConfig config;
};

enum class AbsStatus { Finished, BudgetExceeded };

std::string_view abs_status_name(AbsStatus s);

struct AbsResult {
    AbsStatus status = AbsStatus::Finished;
    Cycles wcet_upper = 0;
    Cycles bcet_lower = 0;
    bool exact = false;
    uint64_t states_explored = 0;
    // Some concrete input of the binding may fault (overflow trap, division
    // by zero, bad access). Paths that fault for every input are dropped.
    bool may_fault = false;
    // One `pc_path_hash time_lo time_hi exact` line per terminal state, when
    // requested.
    std::vector<std::string> diagnostics;
    bool operator==(const AbsResult&) const = default;
};

struct BlockOutcome {
    std::vector<AbstractState> successors;
    bool may_fault = false;
};

struct ExecContext;

// Per-block transfer functions for one function and everything it calls,
// built once and executed many times. Immutable after stage(); executions
// may run concurrently.
class StagedInterpreter {
  public:
    using Continuation = std::function<void(AbstractState&&)>;
    using BlockFn = std::function<void(AbstractState&&, ExecContext&, const Continuation&)>;

    const LoadedProgram& program() const { return *prog_; }
    const TimingModel& model() const { return model_; }
    Address entry() const { return entry_; }
    size_t size() const { return blocks_.size(); }
    bool contains(Address block) const { return blocks_.contains(block); }
    const BlockFn& block(Address start) const { return blocks_.at(start); }

  private:
    friend StagedInterpreter stage(const LoadedProgram&, const Cfg&, const TimingModel&);

    const LoadedProgram* prog_ = nullptr;
    TimingModel model_;
    Address entry_ = 0;
    std::map<Address, BlockFn> blocks_;
};

StagedInterpreter stage(const LoadedProgram& prog, const Cfg& cfg, const TimingModel& model);

AbsResult abs_execute(const StagedInterpreter& staged, const AbstractBinding& inputs, Cycles max_time,
                      const AbsOptions& options = {});

// Direct per-instruction interpretation of the same semantics, walking the
// CFG's instruction lists on every visit.
AbsResult abs_execute_unstaged(const LoadedProgram& prog, const Cfg& cfg, const TimingModel& model,
                               const AbstractBinding& inputs, Cycles max_time, const AbsOptions& options = {});

// One block from `state.pc`, without the time cut.
BlockOutcome step_block(const StagedInterpreter& staged, AbstractState state, const AbsOptions& options = {});
BlockOutcome step_block_unstaged(const LoadedProgram& prog, const Cfg& cfg, const TimingModel& model,
                                 AbstractState state, const AbsOptions& options = {});

} // namespace kta
