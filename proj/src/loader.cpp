#include "kta/loader.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "util.hpp"

namespace kta {

namespace {

constexpr uint8_t ELFCLASS32 = 1;
constexpr uint8_t ELFDATA2MSB = 2;
constexpr uint16_t EM_MIPS = 8;

constexpr uint32_t SHT_SYMTAB = 2;
constexpr uint32_t SHT_NOBITS = 8;
constexpr uint32_t SHF_WRITE = 0x1;
constexpr uint32_t SHF_ALLOC = 0x2;
constexpr uint32_t SHF_EXECINSTR = 0x4;

constexpr uint16_t SHN_UNDEF = 0;
constexpr uint16_t SHN_ABS = 0xfff1;

constexpr uint8_t STT_NOTYPE = 0;
constexpr uint8_t STT_OBJECT = 1;
constexpr uint8_t STT_FUNC = 2;
constexpr uint8_t STB_LOCAL = 0;

constexpr size_t kEhdrSize = 52;
constexpr size_t kShdrSize = 40;
constexpr size_t kSymSize = 16;

struct SectionHeader {
    uint32_t name;
    uint32_t type;
    uint32_t flags;
    uint32_t addr;
    uint32_t offset;
    uint32_t size;
    uint32_t link;
};

// Bounds-checked big-endian reader over the raw file image.
class Reader {
  public:
    explicit Reader(std::span<const uint8_t> raw) : raw_(raw) {}

    uint8_t u8(size_t off) const {
        check(off, 1);
        return raw_[off];
    }
    uint16_t u16(size_t off) const {
        check(off, 2);
        return static_cast<uint16_t>(raw_[off] << 8 | raw_[off + 1]);
    }
    uint32_t u32(size_t off) const {
        check(off, 4);
        return load_be32(raw_.data() + off);
    }
    std::span<const uint8_t> bytes(size_t off, size_t len) const {
        check(off, len);
        return raw_.subspan(off, len);
    }
    std::string cstr(size_t table_off, size_t table_size, size_t index) const {
        if (index >= table_size) {
            throw LoadError(LoadError::Kind::MalformedHeader, "string index out of bounds");
        }
        auto table = bytes(table_off, table_size);
        auto begin = table.begin() + static_cast<std::ptrdiff_t>(index);
        auto end = std::find(begin, table.end(), uint8_t{0});
        return std::string(begin, end);
    }

  private:
    void check(size_t off, size_t len) const {
        if (off > raw_.size() || len > raw_.size() - off) {
            throw LoadError(LoadError::Kind::MalformedHeader,
                            "read of " + std::to_string(len) + " bytes at offset " + std::to_string(off) +
                                " exceeds file size " + std::to_string(raw_.size()));
        }
    }

    std::span<const uint8_t> raw_;
};

SectionHeader read_section_header(const Reader& rd, size_t off) {
    return SectionHeader{
        .name = rd.u32(off),
        .type = rd.u32(off + 4),
        .flags = rd.u32(off + 8),
        .addr = rd.u32(off + 12),
        .offset = rd.u32(off + 16),
        .size = rd.u32(off + 20),
        .link = rd.u32(off + 24),
    };
}

} // namespace

LoadedProgram::LoadedProgram(std::vector<Section> sections, std::map<std::string, Symbol> symbols, Address entry)
    : sections_(std::move(sections)), symbols_(std::move(symbols)), entry_(entry) {
    std::sort(sections_.begin(), sections_.end(),
              [](const Section& a, const Section& b) { return a.vaddr < b.vaddr; });
    for (size_t i = 1; i < sections_.size(); ++i) {
        if (sections_[i - 1].end() > sections_[i].vaddr) {
            throw LoadError(LoadError::Kind::MalformedHeader,
                            "sections " + sections_[i - 1].name + " and " + sections_[i].name + " overlap");
        }
    }
    for (auto& [name, sym] : symbols_) {
        if (!sym.absolute && section_at(sym.address) == nullptr) {
            sym.absolute = true;
        }
    }
}

const Section* LoadedProgram::section_at(Address addr) const {
    auto it = std::upper_bound(sections_.begin(), sections_.end(), addr,
                               [](Address a, const Section& s) { return a < s.vaddr; });
    if (it == sections_.begin()) {
        return nullptr;
    }
    --it;
    return it->contains(addr) ? &*it : nullptr;
}

uint8_t LoadedProgram::byte_at(Address addr) const {
    const Section* sec = section_at(addr);
    if (sec == nullptr) {
        throw LoadError(LoadError::Kind::UnmappedAddress, "address " + hex32(addr) + " is not mapped");
    }
    return sec->bytes[addr - sec->vaddr];
}

std::vector<const Symbol*> LoadedProgram::functions() const {
    std::vector<const Symbol*> out;
    for (const auto& [name, sym] : symbols_) {
        if (sym.kind == SymbolKind::Function) {
            out.push_back(&sym);
        }
    }
    std::sort(out.begin(), out.end(), [](const Symbol* a, const Symbol* b) {
        return a->address != b->address ? a->address < b->address : a->name < b->name;
    });
    return out;
}

const Symbol* LoadedProgram::function_at(Address addr) const {
    for (const Symbol* sym : functions()) {
        if (sym->address == addr) {
            return sym;
        }
    }
    return nullptr;
}

LoadedProgram load_image(std::span<const uint8_t> raw) {
    static constexpr uint8_t kMagic[4] = {0x7f, 'E', 'L', 'F'};
    if (raw.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), raw.begin())) {
        throw LoadError(LoadError::Kind::BadMagic, "not an ELF file");
    }
    Reader rd(raw);
    if (rd.u8(4) != ELFCLASS32) {
        throw LoadError(LoadError::Kind::UnsupportedClass, "only 32-bit ELF is supported");
    }
    if (rd.u8(5) != ELFDATA2MSB) {
        throw LoadError(LoadError::Kind::UnsupportedEndianness, "only big-endian ELF is supported");
    }
    if (raw.size() < kEhdrSize) {
        throw LoadError(LoadError::Kind::MalformedHeader, "truncated ELF header");
    }
    if (rd.u16(18) != EM_MIPS) {
        throw LoadError(LoadError::Kind::UnsupportedMachine,
                        "e_machine " + std::to_string(rd.u16(18)) + " is not MIPS");
    }
    const Address entry = rd.u32(24);
    const uint32_t shoff = rd.u32(32);
    const uint16_t shentsize = rd.u16(46);
    const uint16_t shnum = rd.u16(48);
    const uint16_t shstrndx = rd.u16(50);
    if (shnum != 0 && shentsize < kShdrSize) {
        throw LoadError(LoadError::Kind::MalformedHeader, "section header entry too small");
    }

    std::vector<SectionHeader> headers;
    headers.reserve(shnum);
    for (size_t i = 0; i < shnum; ++i) {
        headers.push_back(read_section_header(rd, shoff + i * size_t{shentsize}));
    }
    auto section_name = [&](const SectionHeader& sh) -> std::string {
        if (shstrndx == SHN_UNDEF || shstrndx >= headers.size()) {
            return {};
        }
        const auto& strtab = headers[shstrndx];
        return rd.cstr(strtab.offset, strtab.size, sh.name);
    };

    std::vector<Section> sections;
    std::vector<int> loaded_index(headers.size(), -1);
    for (size_t i = 0; i < headers.size(); ++i) {
        const auto& sh = headers[i];
        if ((sh.flags & SHF_ALLOC) == 0 || sh.size == 0) {
            continue;
        }
        if (uint64_t{sh.addr} + sh.size > (uint64_t{1} << 32)) {
            throw LoadError(LoadError::Kind::MalformedHeader, "section " + section_name(sh) + " wraps the address space");
        }
        Section sec;
        sec.name = section_name(sh);
        sec.vaddr = sh.addr;
        sec.executable = (sh.flags & SHF_EXECINSTR) != 0;
        sec.writable = (sh.flags & SHF_WRITE) != 0;
        if (sh.type == SHT_NOBITS) {
            sec.bytes.assign(sh.size, 0);
        } else {
            auto data = rd.bytes(sh.offset, sh.size);
            sec.bytes.assign(data.begin(), data.end());
        }
        loaded_index[i] = static_cast<int>(sections.size());
        sections.push_back(std::move(sec));
    }

    std::map<std::string, Symbol> symbols;
    for (const auto& sh : headers) {
        if (sh.type != SHT_SYMTAB) {
            continue;
        }
        if (sh.link >= headers.size()) {
            throw LoadError(LoadError::Kind::MalformedHeader, "symbol table has invalid string table link");
        }
        const auto& strtab = headers[sh.link];
        for (size_t off = 0; off + kSymSize <= sh.size; off += kSymSize) {
            const size_t base = size_t{sh.offset} + off;
            const uint32_t name_idx = rd.u32(base);
            const uint8_t info = rd.u8(base + 12);
            const uint16_t shndx = rd.u16(base + 14);
            const uint8_t type = info & 0xf;
            const uint8_t bind = info >> 4;
            if (name_idx == 0 || shndx == SHN_UNDEF) {
                continue;
            }
            if (type != STT_NOTYPE && type != STT_OBJECT && type != STT_FUNC) {
                continue;
            }
            Symbol sym;
            sym.name = rd.cstr(strtab.offset, strtab.size, name_idx);
            sym.address = rd.u32(base + 4);
            sym.size = rd.u32(base + 8);
            sym.kind = type == STT_FUNC ? SymbolKind::Function
                       : type == STT_OBJECT ? SymbolKind::Object
                                            : SymbolKind::NoType;
            sym.absolute = shndx == SHN_ABS;
            auto [it, inserted] = symbols.emplace(sym.name, sym);
            // Globals win over same-named locals from other translation units.
            if (!inserted && bind != STB_LOCAL) {
                it->second = sym;
            }
        }
    }
    return LoadedProgram(std::move(sections), std::move(symbols), entry);
}

LoadedProgram load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError(LoadError::Kind::Io, "cannot open " + path.string());
    }
    std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_image(raw);
}

Address symbol_address(const LoadedProgram& prog, std::string_view name) {
    auto it = prog.symbols().find(std::string(name));
    if (it == prog.symbols().end()) {
        throw LoadError(LoadError::Kind::UnknownSymbol, "unknown symbol '" + std::string(name) + "'");
    }
    return it->second.address;
}

Word read_word(const LoadedProgram& prog, Address addr) {
    if (addr % 4 != 0) {
        throw LoadError(LoadError::Kind::MisalignedAddress, "misaligned word address " + hex32(addr));
    }
    const Section* sec = prog.section_at(addr);
    if (sec == nullptr || uint64_t{addr} + 4 > sec->end()) {
        throw LoadError(LoadError::Kind::UnmappedAddress, "address " + hex32(addr) + " is not mapped");
    }
    return load_be32(sec->bytes.data() + (addr - sec->vaddr));
}

} // namespace kta
