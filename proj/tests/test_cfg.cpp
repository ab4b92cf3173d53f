#include <algorithm>

#include "doctest.h"
#include "elf_builder.hpp"
#include "fixtures.hpp"
#include "kta/cfg.hpp"

using namespace kta;
using namespace kta::test;
using namespace kta::asm_;
using M = Mnemonic;

namespace {

CfgError::Kind cfg_error(const LoadedProgram& p, const std::string& fn) {
    try {
        build_cfg(p, fn);
    } catch (const CfgError& e) {
        return e.kind();
    }
    FAIL("cfg built");
    return CfgError::Kind::UnknownSymbol;
}

size_t count(const std::string& text, const std::string& needle) {
    size_t n = 0;
    for (size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) {
        ++n;
    }
    return n;
}

} // namespace

TEST_SUITE("cfg") {

TEST_CASE("straight line") {
    const Cfg c = build_cfg(fixture("ops"), "straight");
    REQUIRE(c.blocks.size() == 1);
    const BasicBlock& b = c.blocks.begin()->second;
    CHECK(b.terminator == ControlClass::Return);
    CHECK(b.succs.empty());
    CHECK(b.is_exit);
    CHECK(b.instrs.size() == 4);
    const std::string dot = to_dot(c);
    CHECK(count(dot, "[label=\"0x") == 1);
    CHECK(count(dot, "->") == 0);
}

TEST_CASE("diamond") {
    const Cfg c = build_cfg(fixture("ops"), "diamond");
    CHECK(c.blocks.size() == 4);
    CHECK(c.block(c.entry).succs.size() == 2);
    CHECK(c.block(c.entry).terminator == ControlClass::CondBranch);
    CHECK(c.block(c.entry).succs[0] == 0x400154);
    CHECK(c.block(c.entry).succs[1] == 0x400144);
    const std::string dot = to_dot(c);
    CHECK(count(dot, "[label=\"0x") == 4);
    CHECK(count(dot, "->") == 4);
}

TEST_CASE("loop has a back edge") {
    const Cfg c = build_cfg(fixture("countdown"), "countdown");
    bool back = false;
    for (const auto& [start, b] : c.blocks) {
        for (Address s : b.succs) {
            back = back || s <= start;
        }
    }
    CHECK(back);
    CHECK(to_dot(c).find("\"0x0040000c\" -> \"0x0040000c\"") != std::string::npos);
}

TEST_CASE("rejected control flow") {
    const LoadedProgram& ops = fixture("ops");
    CHECK(cfg_error(ops, "uses_jalr") == CfgError::Kind::UnsupportedIndirectJump);
    CHECK(cfg_error(ops, "uses_indirect") == CfgError::Kind::UnsupportedIndirectJump);
    CHECK(cfg_error(ops, "uses_syscall") == CfgError::Kind::UnknownInstructionOnPath);
    CHECK(cfg_error(ops, "nothing_here") == CfgError::Kind::UnknownSymbol);
    CHECK(cfg_error(assemble({branch(M::Beq, 4, 0, 8), nop(), jr(31), nop()}), "f") ==
          CfgError::Kind::BranchTargetOutsideFunction);
    CHECK(cfg_error(assemble({jr(31), branch(M::Beq, 4, 0, -1), nop()}), "f") == CfgError::Kind::BranchInDelaySlot);
    CHECK(cfg_error(assemble({branch(M::Beq, 4, 0, 0), nop(), jr(31), nop()}), "f") ==
          CfgError::Kind::DelaySlotIsBranchTarget);
}

TEST_CASE("unreachable unknown words are ignored") {
    const Cfg c = build_cfg(assemble({jr(31), nop(), Unknown{0xFC000000}}), "f");
    CHECK(c.blocks.size() == 1);
}

TEST_CASE("calls") {
    const LoadedProgram& p = fixture("calls");
    const Cfg c = build_cfg(p, "calls");
    const std::vector<Address> callees = c.callees();
    CHECK(callees.size() == 2);
    CHECK(std::find(callees.begin(), callees.end(), symbol_address(p, "twice")) != callees.end());
    CHECK(std::find(callees.begin(), callees.end(), symbol_address(p, "fact")) != callees.end());
    for (const auto& [start, b] : c.blocks) {
        if (b.terminator == ControlClass::Call) {
            REQUIRE(b.callee.has_value());
            CHECK(b.succs == std::vector<Address>{b.end()});
        }
    }
    const Cfg fact = build_cfg_at(p, symbol_address(p, "fact"));
    CHECK(fact.function == "fact");
    CHECK_THROWS_AS(build_cfg_at(p, symbol_address(p, "fact") + 4), CfgError);
}

TEST_CASE("blocks partition reachable code on every fixture") {
    for (const auto& name : kFixtureNames) {
        const LoadedProgram& p = fixture(name);
        for (const Symbol* f : p.functions()) {
            Cfg c;
            try {
                c = build_cfg(p, f->name);
            } catch (const CfgError&) {
                continue;
            }
            CAPTURE(f->name);
            CHECK(c.blocks.count(c.entry) == 1);
            Address prev_end = 0;
            for (const auto& [start, b] : c.blocks) {
                CHECK(start >= prev_end);
                CHECK(start >= c.extent_begin);
                CHECK(b.end() <= c.extent_end);
                prev_end = b.end();
                for (size_t k = 0; k < b.instrs.size(); ++k) {
                    CHECK(b.instrs[k].pc == start + 4 * k);
                    CHECK(b.instrs[k].instr == decode(read_word(p, b.instrs[k].pc)));
                }
                for (Address s : b.succs) {
                    CHECK(c.blocks.count(s) == 1);
                }
                if (auto t = b.transfer_index()) {
                    CHECK(*t + 2 == b.instrs.size());
                }
            }
        }
    }
}

} // TEST_SUITE
