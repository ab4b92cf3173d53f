#pragma once

#include <optional>

#include "kta/absint.hpp"

namespace kta {

struct ExecContext {
    const LoadedProgram* prog = nullptr;
    SimConfig config;
    WritePolicy write = WritePolicy::Smash;
    unsigned max_call_depth = 16;
    bool may_fault = false;
};

namespace detail {

// Decoded instruction fields, with the immediate already extended.
struct Operands {
    uint8_t rd = 0;
    uint8_t rs = 0;
    uint8_t rt = 0;
    uint8_t shamt = 0;
    Word imm = 0;
    Address pc = 0;
};

Operands operands_of(const Instruction& in, Address pc);

// Abstract transfer of one non-control instruction. Returns false when
// every concrete state of `s` faults, which ends the path.
using OpImpl = bool (*)(AbstractState& s, ExecContext& ctx, const Operands& o);

// Table lookup used when staging.
OpImpl op_impl(Mnemonic m);
// Switch on the mnemonic on every call.
bool exec_op(const Instruction& in, Address pc, AbstractState& s, ExecContext& ctx);

struct BranchSpec {
    Mnemonic op = Mnemonic::Beq;
    uint8_t rs = 0;
    uint8_t rt = 0;
};

struct BranchSplit {
    std::optional<AbstractState> taken;
    std::optional<AbstractState> not_taken;
};

// Both outcomes of a conditional branch, each refined by its condition;
// an infeasible outcome is empty.
BranchSplit split_branch(const BranchSpec& b, const AbstractState& s, ExecContext& ctx);

Interval reg_value(const AbstractState& s, unsigned r);
void write_reg(AbstractState& s, unsigned r, const Interval& v);

// Current abstract contents of an aligned word; empty when unmapped.
std::optional<Interval> mem_word(const AbstractState& s, const ExecContext& ctx, Address a);

// Least upper bound of two states at the same block and call stack.
AbstractState join_states(const AbstractState& a, const AbstractState& b, const ExecContext& ctx);

} // namespace detail
} // namespace kta
