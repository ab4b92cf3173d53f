#include "fixtures.hpp"

#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace kta::test {

namespace {

std::ifstream open_ref(const std::string& name, const std::string& ext) {
    const std::string path = std::string(KTA_FIXTURE_DIR) + "/ref/" + name + "." + ext;
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("missing reference dump " + path);
    }
    return in;
}

uint32_t parse_u32(const std::string& s) { return static_cast<uint32_t>(std::stoul(s, nullptr, 0)); }

} // namespace

std::string fixture_path(const std::string& name) { return std::string(KTA_FIXTURE_DIR) + "/bin/" + name + ".elf"; }

const LoadedProgram& fixture(const std::string& name) {
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<LoadedProgram>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[name];
    if (!slot) {
        slot = std::make_unique<LoadedProgram>(load_file(fixture_path(name)));
    }
    return *slot;
}

std::vector<RefSection> ref_sections(const std::string& name) {
    auto in = open_ref(name, "sections");
    std::vector<RefSection> out;
    std::string sec, addr, size, exec;
    while (in >> sec >> addr >> size >> exec) {
        out.push_back({sec, parse_u32(addr), parse_u32(size), exec == "1"});
    }
    return out;
}

std::vector<RefSymbol> ref_symbols(const std::string& name) {
    auto in = open_ref(name, "syms");
    std::vector<RefSymbol> out;
    std::string sym, addr, size, type;
    while (in >> sym >> addr >> size >> type) {
        out.push_back({sym, parse_u32(addr), parse_u32(size), type});
    }
    return out;
}

std::vector<RefInstruction> ref_disassembly(const std::string& name) {
    auto in = open_ref(name, "dis");
    std::vector<RefInstruction> out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string pc, word;
        RefInstruction r;
        if (!(ls >> pc >> word >> r.mnemonic)) {
            continue;
        }
        r.pc = parse_u32(pc);
        r.word = parse_u32(word);
        std::getline(ls >> std::ws, r.operands);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace kta::test
