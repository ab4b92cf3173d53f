#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kta {

using Address = uint32_t;
using Word = uint32_t;

class LoadError : public std::runtime_error {
  public:
    enum class Kind {
        BadMagic,
        UnsupportedClass,
        UnsupportedEndianness,
        UnsupportedMachine,
        MalformedHeader,
        UnknownSymbol,
        UnmappedAddress,
        MisalignedAddress,
        Io,
    };

    LoadError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

struct Section {
    std::string name;
    Address vaddr = 0;
    std::vector<uint8_t> bytes;
    bool executable = false;
    bool writable = false;

    uint64_t end() const { return uint64_t{vaddr} + bytes.size(); }
    bool contains(Address addr) const { return addr >= vaddr && addr < end(); }
};

enum class SymbolKind { NoType, Object, Function };

struct Symbol {
    std::string name;
    Address address = 0;
    uint32_t size = 0;
    SymbolKind kind = SymbolKind::NoType;
    // Set for SHN_ABS symbols and for symbols that do not fall inside any
    // loaded section (linker-defined markers such as _gp).
    bool absolute = false;
};

// A fully linked ELF32 big-endian MIPS executable, reduced to its allocatable
// sections and symbol table. Immutable after load.
class LoadedProgram {
  public:
    LoadedProgram(std::vector<Section> sections, std::map<std::string, Symbol> symbols, Address entry);

    const std::vector<Section>& sections() const { return sections_; }
    const std::map<std::string, Symbol>& symbols() const { return symbols_; }
    Address entry_point() const { return entry_; }
    bool big_endian() const { return true; }

    // nullptr when addr is not mapped by any section.
    const Section* section_at(Address addr) const;
    bool is_mapped(Address addr) const { return section_at(addr) != nullptr; }
    uint8_t byte_at(Address addr) const;

    // Function symbols ordered by address.
    std::vector<const Symbol*> functions() const;
    // The function symbol starting exactly at addr, if any.
    const Symbol* function_at(Address addr) const;

  private:
    std::vector<Section> sections_;
    std::map<std::string, Symbol> symbols_;
    Address entry_;
};

LoadedProgram load_image(std::span<const uint8_t> raw);
LoadedProgram load_file(const std::filesystem::path& path);

Address symbol_address(const LoadedProgram& prog, std::string_view name);

// Big-endian word at a 4-aligned mapped address.
Word read_word(const LoadedProgram& prog, Address addr);

} // namespace kta
