#include "kta/cfg.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "util.hpp"

namespace kta {

std::optional<size_t> BasicBlock::transfer_index() const {
    for (size_t i = 0; i < instrs.size(); ++i) {
        if (classify(instrs[i].instr) != ControlClass::Sequential) {
            return i;
        }
    }
    return std::nullopt;
}

Address function_extent_end(const LoadedProgram& prog, const Symbol& sym) {
    if (sym.size > 0) {
        return sym.address + sym.size;
    }
    for (const Symbol* f : prog.functions()) {
        if (f->address > sym.address) {
            return f->address;
        }
    }
    const Section* sec = prog.section_at(sym.address);
    if (sec == nullptr) {
        throw CfgError(CfgError::Kind::UnknownSymbol, sym.address,
                       "function " + sym.name + " is not inside a loaded section");
    }
    return static_cast<Address>(sec->end());
}

std::vector<Address> Cfg::callees() const {
    std::set<Address> out;
    for (const auto& [start, bb] : blocks) {
        if (bb.callee) {
            out.insert(*bb.callee);
        }
    }
    return {out.begin(), out.end()};
}

namespace {

class Builder {
  public:
    Builder(const LoadedProgram& prog, const Symbol& sym) : prog_(prog) {
        cfg_.function = sym.name;
        cfg_.entry = sym.address;
        cfg_.extent_begin = sym.address;
        cfg_.extent_end = function_extent_end(prog_, sym);
    }

    Cfg build() {
        explore();
        partition();
        return std::move(cfg_);
    }

  private:

    bool in_extent(Address a) const { return a >= cfg_.extent_begin && a < cfg_.extent_end; }

    void require_in_extent(Address target, Address from) const {
        if (!in_extent(target)) {
            throw CfgError(CfgError::Kind::BranchTargetOutsideFunction, from,
                           "control flow from " + hex32(from) + " leaves " + cfg_.function + " (to " + hex32(target) +
                               ")");
        }
    }

    const Instruction& fetch(Address a) {
        auto it = decoded_.find(a);
        if (it == decoded_.end()) {
            it = decoded_.emplace(a, decode(read_word(prog_, a))).first;
        }
        if (!is_supported(it->second)) {
            throw CfgError(CfgError::Kind::UnknownInstructionOnPath, a,
                           "unsupported instruction " + disassemble(it->second, a) + " at " + hex32(a));
        }
        return it->second;
    }

    void explore() {
        std::vector<Address> work{cfg_.entry};
        leaders_.insert(cfg_.entry);
        while (!work.empty()) {
            Address a = work.back();
            work.pop_back();
            while (!visited_.contains(a)) {
                require_in_extent(a, a == cfg_.entry ? a : a - 4);
                const Instruction& in = fetch(a);
                visited_.insert(a);
                const ControlClass cls = classify(in);
                if (cls == ControlClass::Sequential) {
                    a += 4;
                    continue;
                }
                if (cls == ControlClass::IndirectJump || (cls == ControlClass::Call && std::holds_alternative<RType>(in))) {
                    throw CfgError(CfgError::Kind::UnsupportedIndirectJump, a,
                                   "indirect control transfer '" + disassemble(in, a) + "' at " + hex32(a));
                }
                const Address slot = a + 4;
                require_in_extent(slot, a);
                if (classify(fetch(slot)) != ControlClass::Sequential) {
                    throw CfgError(CfgError::Kind::BranchInDelaySlot, slot,
                                   "control transfer in the delay slot at " + hex32(slot));
                }
                visited_.insert(slot);
                delay_slots_.insert(slot);
                auto add_leader = [&](Address t) {
                    require_in_extent(t, a);
                    leaders_.insert(t);
                    work.push_back(t);
                };
                switch (cls) {
                case ControlClass::CondBranch:
                    add_leader(branch_target(std::get<IType>(in), a));
                    add_leader(a + 8);
                    break;
                case ControlClass::UncondJump:
                    add_leader(jump_target(std::get<JType>(in), a));
                    break;
                case ControlClass::Call:
                    add_leader(a + 8);
                    break;
                default:
                    break;
                }
                break;
            }
        }
        for (Address l : leaders_) {
            if (delay_slots_.contains(l)) {
                throw CfgError(CfgError::Kind::DelaySlotIsBranchTarget, l,
                               "delay slot at " + hex32(l) + " is also a branch target");
            }
        }
    }

    void partition() {
        for (Address leader : leaders_) {
            BasicBlock bb;
            bb.start = leader;
            Address a = leader;
            while (true) {
                const Instruction& in = decoded_.at(a);
                bb.instrs.push_back({a, in});
                const ControlClass cls = classify(in);
                if (cls != ControlClass::Sequential) {
                    bb.instrs.push_back({a + 4, decoded_.at(a + 4)});
                    bb.terminator = cls;
                    switch (cls) {
                    case ControlClass::CondBranch:
                        bb.succs = {branch_target(std::get<IType>(in), a), a + 8};
                        break;
                    case ControlClass::UncondJump:
                        bb.succs = {jump_target(std::get<JType>(in), a)};
                        break;
                    case ControlClass::Call:
                        bb.succs = {a + 8};
                        bb.callee = jump_target(std::get<JType>(in), a);
                        break;
                    case ControlClass::Return:
                        bb.is_exit = true;
                        break;
                    default:
                        break;
                    }
                    break;
                }
                a += 4;
                if (leaders_.contains(a)) {
                    bb.terminator = ControlClass::Sequential;
                    bb.succs = {a};
                    break;
                }
            }
            cfg_.blocks.emplace(leader, std::move(bb));
        }
    }

    const LoadedProgram& prog_;
    Cfg cfg_;
    std::map<Address, Instruction> decoded_;
    std::set<Address> leaders_;
    std::set<Address> visited_;
    std::set<Address> delay_slots_;
};

} // namespace

Cfg build_cfg(const LoadedProgram& prog, const std::string& func_symbol) {
    auto it = prog.symbols().find(func_symbol);
    if (it == prog.symbols().end()) {
        throw CfgError(CfgError::Kind::UnknownSymbol, 0, "unknown function symbol '" + func_symbol + "'");
    }
    return Builder(prog, it->second).build();
}

Cfg build_cfg_at(const LoadedProgram& prog, Address function_start) {
    const Symbol* sym = prog.function_at(function_start);
    if (sym == nullptr) {
        throw CfgError(CfgError::Kind::UnknownSymbol, function_start,
                       "no function symbol starts at " + hex32(function_start));
    }
    return Builder(prog, *sym).build();
}

std::string to_dot(const Cfg& cfg) {
    std::ostringstream out;
    out << "digraph \"" << cfg.function << "\" {\n";
    out << "  node [shape=box, fontname=\"monospace\"];\n";
    for (const auto& [start, bb] : cfg.blocks) {
        out << "  \"" << hex32(start) << "\" [label=\"" << hex32(start) << ":\\l";
        for (const auto& pi : bb.instrs) {
            out << hex32(pi.pc) << "  " << disassemble(pi.instr, pi.pc) << "\\l";
        }
        out << "\"];\n";
    }
    for (const auto& [start, bb] : cfg.blocks) {
        for (size_t i = 0; i < bb.succs.size(); ++i) {
            out << "  \"" << hex32(start) << "\" -> \"" << hex32(bb.succs[i]) << "\"";
            if (bb.terminator == ControlClass::CondBranch) {
                out << " [label=\"" << (i == 0 ? "T" : "F") << "\"]";
            } else if (bb.terminator == ControlClass::Call) {
                out << " [style=dashed]";
            }
            out << ";\n";
        }
    }
    out << "}\n";
    return out.str();
}

} // namespace kta
