#include "kta/absint.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <set>

#include "transfer.hpp"
#include "util.hpp"

namespace kta {

using detail::BranchSpec;
using detail::Operands;
using detail::OpImpl;

std::string_view merge_policy_name(MergePolicy p) { return p == MergePolicy::None ? "none" : "block-entry"; }

std::string_view abs_status_name(AbsStatus s) {
    return s == AbsStatus::Finished ? "finished" : "budget-exceeded";
}

AbstractState initial_state(const LoadedProgram& prog, Address entry, const AbstractBinding& inputs,
                            const SimConfig& config) {
    const Section* sec = prog.section_at(entry);
    if (sec == nullptr || !sec->executable) {
        throw SimError(SimError::Kind::BadEntry, "entry " + hex32(entry) + " is not in an executable section");
    }
    AbstractState s;
    s.pc = entry;
    s.regs.fill(Interval::constant(0));
    s.hi = s.lo = Interval::constant(0);
    s.regs[29] = Interval::constant(config.stack_top);
    s.regs[31] = Interval::constant(kExitSentinel);
    for (const auto& [loc, value] : inputs) {
        if (value.is_bottom()) {
            throw InputError("empty abstract value for " + loc.to_string());
        }
        if (loc.kind() == Location::Kind::Reg) {
            s.regs[loc.reg_index()] = value;
            continue;
        }
        for (unsigned i = 0; i < 4; ++i) {
            const Address a = loc.address() + i;
            if (!prog.is_mapped(a) && !config.in_stack(a)) {
                throw SimError(SimError::Kind::UnmappedAddress,
                               "memory input " + loc.to_string() + " is outside every section and the stack");
            }
        }
        s.mem.overlay[loc.address()] = value;
    }
    return s;
}

namespace {

// How a block ends, with the control transfer's and delay slot's cost
// folded into the taken and not-taken costs.
struct Terminator {
    ControlClass kind = ControlClass::Sequential;
    Address pc = 0;
    BranchSpec branch;
    Address target = 0;
    Address fallthrough = 0;
    Cycles cost_taken = 0;
    Cycles cost_not_taken = 0;
};

using DelayFn = std::function<bool(AbstractState&, ExecContext&)>;
using Continuation = StagedInterpreter::Continuation;

void advance(AbstractState& s, Cycles c) {
    s.time.lo += c;
    s.time.hi += c;
}

void finish_block(AbstractState&& s, ExecContext& ctx, const Terminator& t, const DelayFn& delay,
                  const Continuation& k) {
    auto leave = [&](AbstractState& st, Address next, Cycles cost) {
        if (!delay(st, ctx)) {
            return false;
        }
        advance(st, cost);
        st.pc = next;
        return true;
    };
    switch (t.kind) {
    case ControlClass::Sequential:
        s.pc = t.fallthrough;
        k(std::move(s));
        return;
    case ControlClass::CondBranch: {
        detail::BranchSplit split = detail::split_branch(t.branch, s, ctx);
        if (split.taken && split.not_taken) {
            split.taken->exact = false;
            split.not_taken->exact = false;
        }
        if (split.taken && leave(*split.taken, t.target, t.cost_taken)) {
            k(std::move(*split.taken));
        }
        if (split.not_taken && leave(*split.not_taken, t.fallthrough, t.cost_not_taken)) {
            k(std::move(*split.not_taken));
        }
        return;
    }
    case ControlClass::UncondJump:
        if (leave(s, t.target, t.cost_taken)) {
            k(std::move(s));
        }
        return;
    case ControlClass::Call:
        if (s.frames.size() >= ctx.max_call_depth) {
            throw AbsError(AbsError::Kind::CallDepthExceeded, t.pc,
                           "call at " + hex32(t.pc) + " exceeds the call depth bound of " +
                               std::to_string(ctx.max_call_depth));
        }
        detail::write_reg(s, 31, Interval::constant(t.pc + 8));
        if (leave(s, t.target, t.cost_taken)) {
            s.frames.push_back(t.pc + 8);
            k(std::move(s));
        }
        return;
    case ControlClass::Return: {
        const auto ra = s.regs[31].singleton();
        const Address expected = s.frames.empty() ? kExitSentinel : s.frames.back();
        if (!ra || *ra != expected) {
            throw AbsError(AbsError::Kind::ReturnMismatch, t.pc,
                           "return at " + hex32(t.pc) + " goes to " + s.regs[31].to_string() + ", expected " +
                               hex32(expected));
        }
        if (leave(s, expected, t.cost_taken)) {
            if (!s.frames.empty()) {
                s.frames.pop_back();
            }
            k(std::move(s));
        }
        return;
    }
    default:
        throw AbsError(AbsError::Kind::UnsupportedInstruction, t.pc,
                       "unsupported control transfer at " + hex32(t.pc));
    }
}

Terminator terminator_of(const BasicBlock& bb, const TimingModel& model) {
    Terminator t;
    t.kind = bb.terminator;
    if (bb.terminator == ControlClass::Sequential) {
        t.fallthrough = bb.succs.at(0);
        return t;
    }
    const size_t ti = *bb.transfer_index();
    const PlacedInstruction& tr = bb.instrs[ti];
    const PlacedInstruction& slot = bb.instrs.at(ti + 1);
    t.pc = tr.pc;
    const Cycles slot_cost = model.cost(slot.instr, false);
    t.cost_taken = model.cost(tr.instr, true) + slot_cost;
    t.cost_not_taken = model.cost(tr.instr, false) + slot_cost;
    switch (bb.terminator) {
    case ControlClass::CondBranch: {
        const auto& in = std::get<IType>(tr.instr);
        t.branch = BranchSpec{in.op, in.rs, in.rt};
        t.target = bb.succs.at(0);
        t.fallthrough = bb.succs.at(1);
        break;
    }
    case ControlClass::UncondJump:
        t.target = bb.succs.at(0);
        break;
    case ControlClass::Call:
        t.target = *bb.callee;
        break;
    default:
        break;
    }
    return t;
}

void require_supported(const BasicBlock& bb) {
    for (const auto& pi : bb.instrs) {
        if (!is_supported(pi.instr)) {
            throw AbsError(AbsError::Kind::UnsupportedInstruction, pi.pc,
                           "unsupported instruction " + disassemble(pi.instr, pi.pc) + " at " + hex32(pi.pc));
        }
    }
}

struct StagedOp {
    OpImpl fn;
    Operands operands;
};

StagedInterpreter::BlockFn stage_block(const BasicBlock& bb, const TimingModel& model) {
    require_supported(bb);
    const size_t body_len = bb.transfer_index().value_or(bb.instrs.size());
    std::vector<StagedOp> body;
    Cycles body_cost = 0;
    for (size_t i = 0; i < body_len; ++i) {
        const auto& pi = bb.instrs[i];
        body.push_back({detail::op_impl(*mnemonic_of(pi.instr)), detail::operands_of(pi.instr, pi.pc)});
        body_cost += model.cost(pi.instr, false);
    }
    const Terminator term = terminator_of(bb, model);
    std::optional<StagedOp> slot;
    if (body_len + 1 < bb.instrs.size()) {
        const auto& pi = bb.instrs[body_len + 1];
        slot = StagedOp{detail::op_impl(*mnemonic_of(pi.instr)), detail::operands_of(pi.instr, pi.pc)};
    }
    DelayFn delay = [slot](AbstractState& s, ExecContext& ctx) {
        return !slot || slot->fn(s, ctx, slot->operands);
    };
    return [body = std::move(body), body_cost, term, delay = std::move(delay)](
               AbstractState&& s, ExecContext& ctx, const Continuation& k) {
        for (const StagedOp& op : body) {
            if (!op.fn(s, ctx, op.operands)) {
                return;
            }
        }
        advance(s, body_cost);
        finish_block(std::move(s), ctx, term, delay, k);
    };
}

// Walks the block's instruction list and looks up costs on every visit.
void interpret_block(const BasicBlock& bb, const TimingModel& model, AbstractState&& s, ExecContext& ctx,
                     const Continuation& k) {
    const size_t body_len = bb.transfer_index().value_or(bb.instrs.size());
    for (size_t i = 0; i < body_len; ++i) {
        const auto& pi = bb.instrs[i];
        if (!detail::exec_op(pi.instr, pi.pc, s, ctx)) {
            return;
        }
        advance(s, model.cost(pi.instr, false));
    }
    const PlacedInstruction* slot = body_len + 1 < bb.instrs.size() ? &bb.instrs[body_len + 1] : nullptr;
    DelayFn delay = [slot](AbstractState& st, ExecContext& c) {
        return slot == nullptr || detail::exec_op(slot->instr, slot->pc, st, c);
    };
    finish_block(std::move(s), ctx, terminator_of(bb, model), delay, k);
}

ExecContext make_context(const LoadedProgram& prog, const AbsOptions& options) {
    ExecContext ctx;
    ctx.prog = &prog;
    ctx.config = options.config;
    ctx.write = options.write;
    ctx.max_call_depth = options.max_call_depth;
    return ctx;
}

uint64_t mix_hash(uint64_t h, Address a) {
    for (int i = 0; i < 4; ++i) {
        h ^= (a >> (8 * i)) & 0xff;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string diagnostic_line(const AbstractState& s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%016" PRIx64 " %" PRIu64 " %" PRIu64 " %d", s.path_hash, s.time.lo, s.time.hi,
                  s.exact ? 1 : 0);
    return buf;
}

class Driver {
  public:
    using Runner = std::function<void(AbstractState&&, ExecContext&, const Continuation&)>;

    Driver(const LoadedProgram& prog, Cycles max_time, const AbsOptions& options, Runner run)
        : ctx_(make_context(prog, options)), max_time_(max_time), options_(options), run_(std::move(run)) {}

    AbsResult execute(AbstractState init) {
        if (options_.merge == MergePolicy::None) {
            run_paths(std::move(init));
        } else {
            run_merged(std::move(init));
        }
        return finish();
    }

  private:
    // Returns false once the time bound has been hit.
    bool accept(AbstractState&& s) {
        if (s.time.lo >= max_time_) {
            cut_ = true;
            note_bounds(s);
            return false;
        }
        if (s.pc == kExitSentinel) {
            terminals_.push_back(std::move(s));
            return true;
        }
        pending_.push_back(std::move(s));
        return true;
    }

    void note_bounds(const AbstractState& s) {
        wcet_ = std::max(wcet_, s.time.hi);
        bcet_ = std::min(bcet_, s.time.lo);
    }

    void visit(AbstractState&& s) {
        s.path_hash = mix_hash(s.path_hash, s.pc);
        ++explored_;
        run_(std::move(s), ctx_, [this](AbstractState&& next) { accept(std::move(next)); });
    }

    void run_paths(AbstractState init) {
        accept(std::move(init));
        while (!pending_.empty() && !cut_) {
            AbstractState s = std::move(pending_.back());
            pending_.pop_back();
            visit(std::move(s));
        }
        note_unexplored(pending_);
    }

    // States left behind by a cut can still finish early, so they bound
    // the BCET from below.
    template <typename States>
    void note_unexplored(const States& states) {
        for (const auto& s : states) {
            if constexpr (requires { s.second; }) {
                bcet_ = std::min(bcet_, s.second.time.lo);
            } else {
                bcet_ = std::min(bcet_, s.time.lo);
            }
        }
    }

    using Key = std::pair<Address, std::vector<Address>>;

    // States wait per (block, call stack); the earliest-starting one runs
    // next, so states that reach a block together are joined before it runs.
    void run_merged(AbstractState init) {
        std::map<Key, AbstractState> waiting;
        std::set<std::tuple<Cycles, Key>> order;
        auto enqueue = [&]() {
            for (AbstractState& s : pending_) {
                Key key{s.pc, s.frames};
                auto it = waiting.find(key);
                if (it == waiting.end()) {
                    order.emplace(s.time.lo, key);
                    waiting.emplace(std::move(key), std::move(s));
                    continue;
                }
                order.erase({it->second.time.lo, key});
                it->second = detail::join_states(it->second, s, ctx_);
                order.emplace(it->second.time.lo, key);
            }
            pending_.clear();
        };
        accept(std::move(init));
        enqueue();
        while (!order.empty() && !cut_) {
            const Key key = std::get<1>(*order.begin());
            order.erase(order.begin());
            auto node = waiting.extract(key);
            visit(std::move(node.mapped()));
            enqueue();
        }
        note_unexplored(pending_);
        note_unexplored(waiting);
    }

    AbsResult finish() {
        AbsResult r;
        r.states_explored = explored_;
        r.may_fault = ctx_.may_fault;
        bool all_exact = !terminals_.empty();
        for (const AbstractState& t : terminals_) {
            note_bounds(t);
            all_exact = all_exact && t.exact && t.time.lo == t.time.hi && t.time == terminals_.front().time;
            if (options_.diagnostics) {
                r.diagnostics.push_back(diagnostic_line(t));
            }
        }
        std::sort(r.diagnostics.begin(), r.diagnostics.end());
        r.status = cut_ ? AbsStatus::BudgetExceeded : AbsStatus::Finished;
        r.wcet_upper = wcet_;
        r.bcet_lower = bcet_ == kNoTime ? 0 : bcet_;
        r.exact = !cut_ && all_exact;
        return r;
    }

    static constexpr Cycles kNoTime = ~Cycles{0};

    ExecContext ctx_;
    Cycles max_time_;
    AbsOptions options_;
    Runner run_;
    std::vector<AbstractState> pending_;
    std::vector<AbstractState> terminals_;
    bool cut_ = false;
    Cycles wcet_ = 0;
    Cycles bcet_ = kNoTime;
    uint64_t explored_ = 0;
};

void require_positive(Cycles max_time) {
    if (max_time == 0) {
        throw std::invalid_argument("max_time must be positive");
    }
}

// Blocks of a function and its callees, with CFGs built on first use.
class UnstagedProgram {
  public:
    UnstagedProgram(const LoadedProgram& prog, const Cfg& cfg) : prog_(prog) { add(cfg); }

    const BasicBlock& block(Address start) {
        auto it = blocks_.find(start);
        if (it == blocks_.end()) {
            add(build_cfg_at(prog_, start));
            it = blocks_.find(start);
        }
        return *it->second;
    }

  private:
    void add(Cfg cfg) {
        cfgs_.push_back(std::make_unique<Cfg>(std::move(cfg)));
        for (const auto& [start, bb] : cfgs_.back()->blocks) {
            blocks_.emplace(start, &bb);
        }
    }

    const LoadedProgram& prog_;
    std::vector<std::unique_ptr<Cfg>> cfgs_;
    std::map<Address, const BasicBlock*> blocks_;
};

} // namespace

StagedInterpreter stage(const LoadedProgram& prog, const Cfg& cfg, const TimingModel& model) {
    StagedInterpreter out;
    out.prog_ = &prog;
    out.model_ = model;
    out.entry_ = cfg.entry;
    std::set<Address> seen{cfg.entry};
    std::vector<Cfg> todo{cfg};
    while (!todo.empty()) {
        Cfg c = std::move(todo.back());
        todo.pop_back();
        for (const auto& [start, bb] : c.blocks) {
            out.blocks_.emplace(start, stage_block(bb, model));
        }
        for (Address callee : c.callees()) {
            if (seen.insert(callee).second) {
                todo.push_back(build_cfg_at(prog, callee));
            }
        }
    }
    return out;
}

AbsResult abs_execute(const StagedInterpreter& staged, const AbstractBinding& inputs, Cycles max_time,
                      const AbsOptions& options) {
    require_positive(max_time);
    AbstractState init = initial_state(staged.program(), staged.entry(), inputs, options.config);
    Driver driver(staged.program(), max_time, options,
                  [&staged](AbstractState&& s, ExecContext& ctx, const Continuation& k) {
                      staged.block(s.pc)(std::move(s), ctx, k);
                  });
    return driver.execute(std::move(init));
}

AbsResult abs_execute_unstaged(const LoadedProgram& prog, const Cfg& cfg, const TimingModel& model,
                               const AbstractBinding& inputs, Cycles max_time, const AbsOptions& options) {
    require_positive(max_time);
    AbstractState init = initial_state(prog, cfg.entry, inputs, options.config);
    UnstagedProgram code(prog, cfg);
    Driver driver(prog, max_time, options, [&](AbstractState&& s, ExecContext& ctx, const Continuation& k) {
        interpret_block(code.block(s.pc), model, std::move(s), ctx, k);
    });
    return driver.execute(std::move(init));
}

BlockOutcome step_block(const StagedInterpreter& staged, AbstractState state, const AbsOptions& options) {
    ExecContext ctx = make_context(staged.program(), options);
    BlockOutcome out;
    staged.block(state.pc)(std::move(state), ctx,
                           [&](AbstractState&& s) { out.successors.push_back(std::move(s)); });
    out.may_fault = ctx.may_fault;
    return out;
}

BlockOutcome step_block_unstaged(const LoadedProgram& prog, const Cfg& cfg, const TimingModel& model,
                                 AbstractState state, const AbsOptions& options) {
    ExecContext ctx = make_context(prog, options);
    BlockOutcome out;
    interpret_block(cfg.block(state.pc), model, std::move(state), ctx,
                    [&](AbstractState&& s) { out.successors.push_back(std::move(s)); });
    out.may_fault = ctx.may_fault;
    return out;
}

} // namespace kta
