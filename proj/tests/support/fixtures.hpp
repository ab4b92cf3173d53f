#pragma once

#include <string>
#include <vector>

#include "kta/loader.hpp"

namespace kta::test {

inline const std::vector<std::string> kFixtureNames = {"bits",  "branches", "calls",    "classify", "countdown",
                                                       "isort", "nested",   "saturate", "ops",      "tpoints"};

std::string fixture_path(const std::string& name);
// Loaded once and cached for the life of the process.
const LoadedProgram& fixture(const std::string& name);

// Reference dumps produced by fixtures/gen_refs.py.
struct RefSection {
    std::string name;
    Address vaddr = 0;
    uint32_t size = 0;
    bool executable = false;
};
struct RefSymbol {
    std::string name;
    Address value = 0;
    uint32_t size = 0;
    std::string type;
};
struct RefInstruction {
    Address pc = 0;
    Word word = 0;
    std::string mnemonic;
    std::string operands;
};

std::vector<RefSection> ref_sections(const std::string& name);
std::vector<RefSymbol> ref_symbols(const std::string& name);
std::vector<RefInstruction> ref_disassembly(const std::string& name);

} // namespace kta::test
