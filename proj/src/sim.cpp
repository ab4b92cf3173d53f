#include "kta/sim.hpp"

#include <limits>

#include "util.hpp"

namespace kta {

std::string_view fault_kind_name(FaultKind k) {
    switch (k) {
    case FaultKind::UnsupportedInstruction: return "unsupported-instruction";
    case FaultKind::Overflow: return "overflow";
    case FaultKind::UnmappedAddress: return "unmapped-address";
    case FaultKind::MisalignedAccess: return "misaligned-access";
    case FaultKind::DivideByZero: return "divide-by-zero";
    case FaultKind::BranchInDelaySlot: return "branch-in-delay-slot";
    }
    return "?";
}

std::string_view run_status_name(RunStatus s) {
    switch (s) {
    case RunStatus::Finished: return "finished";
    case RunStatus::StepBudgetExceeded: return "step-budget-exceeded";
    case RunStatus::Fault: return "fault";
    }
    return "?";
}

std::string format_trace_line(const TraceEntry& e) {
    return hex32(e.pc) + " " + std::string(mnemonic_name(e.mnemonic)) + " " + std::to_string(e.cycles_after);
}

TimingPointTable timing_points_from_symbols(const LoadedProgram& prog) {
    TimingPointTable table;
    for (const auto& [name, sym] : prog.symbols()) {
        if (name.starts_with("tp_")) {
            table.emplace(name, sym.address);
        }
    }
    return table;
}

Simulator::Simulator(const LoadedProgram& prog, const TimingModel& model, SimConfig config)
    : prog_(prog), model_(model), config_(config) {
    for (const auto& sec : prog_.sections()) {
        if (!sec.executable) {
            continue;
        }
        DecodedSection d{sec.vaddr, {}};
        d.instrs.reserve(sec.bytes.size() / 4);
        for (size_t off = 0; off + 4 <= sec.bytes.size(); off += 4) {
            d.instrs.push_back(decode(load_be32(sec.bytes.data() + off)));
        }
        decoded_.push_back(std::move(d));
    }
}

const Instruction& Simulator::fetch(Address pc) const {
    if (pc % 4 != 0) {
        throw SimFault(FaultKind::MisalignedAccess, pc, "misaligned pc " + hex32(pc));
    }
    for (const auto& d : decoded_) {
        if (pc >= d.base && (pc - d.base) / 4 < d.instrs.size()) {
            return d.instrs[(pc - d.base) / 4];
        }
    }
    throw SimFault(FaultKind::UnmappedAddress, pc, "pc " + hex32(pc) + " is not in an executable section");
}

uint8_t Simulator::load_byte(const MachineState& s, Address a, Address pc) const {
    if (auto it = s.memory.find(a); it != s.memory.end()) {
        return it->second;
    }
    if (const Section* sec = prog_.section_at(a)) {
        return sec->bytes[a - sec->vaddr];
    }
    if (config_.in_stack(a)) {
        return 0;
    }
    throw SimFault(FaultKind::UnmappedAddress, pc, "load from unmapped address " + hex32(a));
}

void Simulator::store_byte(MachineState& s, Address a, uint8_t v, Address pc) const {
    if (!is_mapped(a)) {
        throw SimFault(FaultKind::UnmappedAddress, pc, "store to unmapped address " + hex32(a));
    }
    s.memory[a] = v;
}

Word Simulator::load(const MachineState& s, Address a, unsigned width, Address pc) const {
    if (a % width != 0) {
        throw SimFault(FaultKind::MisalignedAccess, pc, "misaligned load from " + hex32(a));
    }
    Word v = 0;
    for (unsigned i = 0; i < width; ++i) {
        v = v << 8 | load_byte(s, a + i, pc);
    }
    return v;
}

void Simulator::store(MachineState& s, Address a, Word v, unsigned width, Address pc) const {
    if (a % width != 0) {
        throw SimFault(FaultKind::MisalignedAccess, pc, "misaligned store to " + hex32(a));
    }
    for (unsigned i = 0; i < width; ++i) {
        if (!is_mapped(a + i)) {
            throw SimFault(FaultKind::UnmappedAddress, pc, "store to unmapped address " + hex32(a + i));
        }
    }
    for (unsigned i = 0; i < width; ++i) {
        s.memory[a + i] = static_cast<uint8_t>(v >> (8 * (width - 1 - i)));
    }
}

MachineState Simulator::init_state(Address entry, const InputBinding& inputs) const {
    const Section* sec = prog_.section_at(entry);
    if (sec == nullptr || !sec->executable) {
        throw SimError(SimError::Kind::BadEntry, "entry " + hex32(entry) + " is not in an executable section");
    }
    MachineState s;
    s.pc = entry;
    s.next_pc = entry + 4;
    s.regs[29] = config_.stack_top;
    s.regs[31] = kExitSentinel;
    for (const auto& [loc, value] : inputs) {
        if (loc.kind() == Location::Kind::Reg) {
            s.regs[loc.reg_index()] = value;
            continue;
        }
        const Address a = loc.address();
        for (unsigned i = 0; i < 4; ++i) {
            if (!is_mapped(a + i)) {
                throw SimError(SimError::Kind::UnmappedAddress,
                               "memory input " + loc.to_string() + " is outside every section and the stack");
            }
            s.memory[a + i] = static_cast<uint8_t>(value >> (8 * (3 - i)));
        }
    }
    return s;
}

StepInfo Simulator::step(MachineState& s) const {
    const Address pc = s.pc;
    const Instruction& instr = fetch(pc);
    const auto mnemonic = mnemonic_of(instr);
    if (!mnemonic) {
        throw SimFault(FaultKind::UnsupportedInstruction, pc,
                       "unsupported instruction " + disassemble(instr, pc) + " at " + hex32(pc));
    }
    const Mnemonic m = *mnemonic;
    const bool transfers = is_cond_branch(m) || is_jump(m);
    if (transfers && s.in_delay_slot) {
        throw SimFault(FaultKind::BranchInDelaySlot, pc, "control transfer in delay slot at " + hex32(pc));
    }

    auto& r = s.regs;
    bool taken = false;
    Address target = 0;
    auto set = [&](unsigned idx, Word v) { r[idx] = v; };

    if (const auto* in = std::get_if<RType>(&instr)) {
        const Word a = r[in->rs];
        const Word b = r[in->rt];
        switch (m) {
        case Mnemonic::Add: {
            int64_t sum = int64_t{static_cast<int32_t>(a)} + static_cast<int32_t>(b);
            if (sum < kSignedMin || sum > kSignedMax) {
                throw SimFault(FaultKind::Overflow, pc, "add overflow at " + hex32(pc));
            }
            set(in->rd, static_cast<Word>(sum));
            break;
        }
        case Mnemonic::Addu: set(in->rd, a + b); break;
        case Mnemonic::Sub: {
            int64_t diff = int64_t{static_cast<int32_t>(a)} - static_cast<int32_t>(b);
            if (diff < kSignedMin || diff > kSignedMax) {
                throw SimFault(FaultKind::Overflow, pc, "sub overflow at " + hex32(pc));
            }
            set(in->rd, static_cast<Word>(diff));
            break;
        }
        case Mnemonic::Subu: set(in->rd, a - b); break;
        case Mnemonic::And: set(in->rd, a & b); break;
        case Mnemonic::Or: set(in->rd, a | b); break;
        case Mnemonic::Xor: set(in->rd, a ^ b); break;
        case Mnemonic::Nor: set(in->rd, ~(a | b)); break;
        case Mnemonic::Sll: set(in->rd, b << in->shamt); break;
        case Mnemonic::Srl: set(in->rd, b >> in->shamt); break;
        case Mnemonic::Sra: set(in->rd, static_cast<Word>(static_cast<int32_t>(b) >> in->shamt)); break;
        case Mnemonic::Sllv: set(in->rd, b << (a & 31)); break;
        case Mnemonic::Srlv: set(in->rd, b >> (a & 31)); break;
        case Mnemonic::Srav: set(in->rd, static_cast<Word>(static_cast<int32_t>(b) >> (a & 31))); break;
        case Mnemonic::Slt: set(in->rd, static_cast<int32_t>(a) < static_cast<int32_t>(b) ? 1 : 0); break;
        case Mnemonic::Sltu: set(in->rd, a < b ? 1 : 0); break;
        case Mnemonic::Mult: {
            const int64_t p = int64_t{static_cast<int32_t>(a)} * static_cast<int32_t>(b);
            s.lo = static_cast<Word>(p);
            s.hi = static_cast<Word>(static_cast<uint64_t>(p) >> 32);
            break;
        }
        case Mnemonic::Multu: {
            const uint64_t p = uint64_t{a} * b;
            s.lo = static_cast<Word>(p);
            s.hi = static_cast<Word>(p >> 32);
            break;
        }
        case Mnemonic::Div: {
            if (b == 0) {
                throw SimFault(FaultKind::DivideByZero, pc, "division by zero at " + hex32(pc));
            }
            const auto sa = static_cast<int32_t>(a);
            const auto sb = static_cast<int32_t>(b);
            if (sa == std::numeric_limits<int32_t>::min() && sb == -1) {
                s.lo = a;
                s.hi = 0;
            } else {
                s.lo = static_cast<Word>(sa / sb);
                s.hi = static_cast<Word>(sa % sb);
            }
            break;
        }
        case Mnemonic::Divu:
            if (b == 0) {
                throw SimFault(FaultKind::DivideByZero, pc, "division by zero at " + hex32(pc));
            }
            s.lo = a / b;
            s.hi = a % b;
            break;
        case Mnemonic::Mfhi: set(in->rd, s.hi); break;
        case Mnemonic::Mflo: set(in->rd, s.lo); break;
        case Mnemonic::Jr:
            taken = true;
            target = a;
            break;
        case Mnemonic::Jalr:
            taken = true;
            target = a;
            set(in->rd, pc + 8);
            break;
        default:
            break;
        }
    } else if (const auto* in = std::get_if<IType>(&instr)) {
        const Word a = r[in->rs];
        const Word b = r[in->rt];
        const auto imm = static_cast<Word>(immediate_value(*in));
        const Address ea = a + imm;
        switch (m) {
        case Mnemonic::Addi: {
            int64_t sum = int64_t{static_cast<int32_t>(a)} + immediate_value(*in);
            if (sum < kSignedMin || sum > kSignedMax) {
                throw SimFault(FaultKind::Overflow, pc, "addi overflow at " + hex32(pc));
            }
            set(in->rt, static_cast<Word>(sum));
            break;
        }
        case Mnemonic::Addiu: set(in->rt, a + imm); break;
        case Mnemonic::Andi: set(in->rt, a & imm); break;
        case Mnemonic::Ori: set(in->rt, a | imm); break;
        case Mnemonic::Xori: set(in->rt, a ^ imm); break;
        case Mnemonic::Lui: set(in->rt, imm); break;
        case Mnemonic::Slti: set(in->rt, static_cast<int32_t>(a) < static_cast<int32_t>(imm) ? 1 : 0); break;
        case Mnemonic::Sltiu: set(in->rt, a < imm ? 1 : 0); break;
        case Mnemonic::Lw: set(in->rt, load(s, ea, 4, pc)); break;
        case Mnemonic::Lh: set(in->rt, static_cast<Word>(static_cast<int16_t>(load(s, ea, 2, pc)))); break;
        case Mnemonic::Lhu: set(in->rt, load(s, ea, 2, pc)); break;
        case Mnemonic::Lb: set(in->rt, static_cast<Word>(static_cast<int8_t>(load(s, ea, 1, pc)))); break;
        case Mnemonic::Lbu: set(in->rt, load(s, ea, 1, pc)); break;
        case Mnemonic::Sw: store(s, ea, b, 4, pc); break;
        case Mnemonic::Sh: store(s, ea, b & 0xffff, 2, pc); break;
        case Mnemonic::Sb: store(s, ea, b & 0xff, 1, pc); break;
        case Mnemonic::Beq: taken = a == b; break;
        case Mnemonic::Bne: taken = a != b; break;
        case Mnemonic::Blez: taken = static_cast<int32_t>(a) <= 0; break;
        case Mnemonic::Bgtz: taken = static_cast<int32_t>(a) > 0; break;
        case Mnemonic::Bltz: taken = static_cast<int32_t>(a) < 0; break;
        case Mnemonic::Bgez: taken = static_cast<int32_t>(a) >= 0; break;
        default: break;
        }
        if (is_cond_branch(m)) {
            target = branch_target(*in, pc);
        }
    } else if (const auto* in = std::get_if<JType>(&instr)) {
        taken = true;
        target = jump_target(*in, pc);
        if (m == Mnemonic::Jal) {
            set(31, pc + 8);
        }
    }
    r[0] = 0;

    const Cycles c = model_.cost(m, taken);
    s.cycles += c;
    ++s.steps;
    s.pc = s.next_pc;
    s.next_pc = transfers && taken ? target : s.next_pc + 4;
    s.in_delay_slot = transfers;
    return StepInfo{pc, m, taken, c};
}

RunResult Simulator::run(Address entry, const InputBinding& inputs, uint64_t step_budget,
                         const TimingPointTable& tp_table, const TraceSink& trace) const {
    std::multimap<Address, const std::string*> tp_at;
    for (const auto& [id, addr] : tp_table) {
        tp_at.emplace(addr, &id);
    }
    MachineState s = init_state(entry, inputs);
    RunResult result;
    while (true) {
        if (s.pc == kExitSentinel && !s.in_delay_slot) {
            result.status = RunStatus::Finished;
            break;
        }
        if (s.steps >= step_budget) {
            result.status = RunStatus::StepBudgetExceeded;
            break;
        }
        if (!tp_at.empty()) {
            auto [lo, hi] = tp_at.equal_range(s.pc);
            for (auto it = lo; it != hi; ++it) {
                s.tp_events.push_back(TimingEvent{*it->second, s.cycles});
            }
        }
        try {
            const StepInfo info = step(s);
            if (trace) {
                trace(TraceEntry{info.pc, info.mnemonic, info.taken, s.cycles});
            }
        } catch (const SimFault& f) {
            result.status = RunStatus::Fault;
            result.fault = FaultInfo{f.kind(), f.pc(), f.what()};
            break;
        }
    }
    result.total_cycles = s.cycles;
    result.steps = s.steps;
    result.tp_events = std::move(s.tp_events);
    result.return_value = s.regs[2];
    return result;
}

MachineState init_state(const LoadedProgram& prog, Address entry, const InputBinding& inputs,
                        const SimConfig& config) {
    static const TimingModel kDefault;
    return Simulator(prog, kDefault, config).init_state(entry, inputs);
}

void step(MachineState& state, const LoadedProgram& prog, const TimingModel& model) {
    Simulator(prog, model).step(state);
}

RunResult run(const LoadedProgram& prog, const TimingModel& model, Address entry, const InputBinding& inputs,
              uint64_t step_budget, const TimingPointTable& tp_table) {
    return Simulator(prog, model).run(entry, inputs, step_budget, tp_table);
}

} // namespace kta
