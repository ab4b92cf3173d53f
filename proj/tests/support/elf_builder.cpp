#include "elf_builder.hpp"

namespace kta::test {

namespace {

class Writer {
  public:
    explicit Writer(bool big) : big_(big) {}
    void u8(uint8_t v) { out.push_back(v); }
    void u16(uint16_t v) {
        if (big_) {
            u8(static_cast<uint8_t>(v >> 8));
            u8(static_cast<uint8_t>(v));
        } else {
            u8(static_cast<uint8_t>(v));
            u8(static_cast<uint8_t>(v >> 8));
        }
    }
    void u32(uint32_t v) {
        if (big_) {
            u16(static_cast<uint16_t>(v >> 16));
            u16(static_cast<uint16_t>(v));
        } else {
            u16(static_cast<uint16_t>(v));
            u16(static_cast<uint16_t>(v >> 16));
        }
    }
    void bytes(const std::vector<uint8_t>& b) { out.insert(out.end(), b.begin(), b.end()); }
    void align(size_t a) {
        while (out.size() % a != 0) {
            u8(0);
        }
    }
    void patch32(size_t at, uint32_t v) {
        Writer w(big_);
        w.u32(v);
        std::copy(w.out.begin(), w.out.end(), out.begin() + static_cast<std::ptrdiff_t>(at));
    }
    std::vector<uint8_t> out;

  private:
    bool big_;
};

uint32_t add_string(std::vector<uint8_t>& table, const std::string& s) {
    const auto at = static_cast<uint32_t>(table.size());
    table.insert(table.end(), s.begin(), s.end());
    table.push_back(0);
    return at;
}

} // namespace

int ElfBuilder::section(SectionSpec s) {
    sections_.push_back(std::move(s));
    return static_cast<int>(sections_.size()) - 1;
}

int ElfBuilder::text(Address vaddr, const std::vector<Instruction>& code) {
    SectionSpec s{".text", vaddr, {}, true, false, false};
    for (const auto& instr : code) {
        const auto* raw = std::get_if<Unknown>(&instr);
        const Word w = raw != nullptr ? raw->word : encode(instr);
        s.bytes.push_back(static_cast<uint8_t>(w >> 24));
        s.bytes.push_back(static_cast<uint8_t>(w >> 16));
        s.bytes.push_back(static_cast<uint8_t>(w >> 8));
        s.bytes.push_back(static_cast<uint8_t>(w));
    }
    return section(std::move(s));
}

ElfBuilder& ElfBuilder::symbol(SymbolSpec s) {
    symbols_.push_back(std::move(s));
    return *this;
}

std::vector<uint8_t> ElfBuilder::build() const {
    // Layout: header, section contents, .symtab, .strtab, .shstrtab, section headers.
    Writer w(data_ != 1);
    const uint8_t ident[16] = {0x7f, 'E', 'L', 'F', class_, data_, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    for (uint8_t b : ident) {
        w.u8(b);
    }
    w.u16(2); // ET_EXEC
    w.u16(machine_);
    w.u32(1);
    w.u32(entry_);
    w.u32(0); // phoff
    const size_t shoff_at = w.out.size();
    w.u32(0);
    w.u32(0x1000); // flags: arch mips2
    w.u16(52);
    w.u16(0);
    w.u16(0);
    w.u16(40);
    const auto shnum = static_cast<uint16_t>(sections_.size() + 4);
    w.u16(shnum);
    w.u16(static_cast<uint16_t>(shnum - 1));

    std::vector<uint32_t> offsets;
    for (const auto& s : sections_) {
        w.align(4);
        offsets.push_back(static_cast<uint32_t>(w.out.size()));
        if (!s.nobits) {
            w.bytes(s.bytes);
        }
    }

    std::vector<uint8_t> strtab{0};
    w.align(4);
    const auto symtab_off = static_cast<uint32_t>(w.out.size());
    for (int i = 0; i < 4; ++i) {
        w.u32(0);
    }
    for (const auto& sym : symbols_) {
        w.u32(add_string(strtab, sym.name));
        w.u32(sym.value);
        w.u32(sym.size);
        w.u8(static_cast<uint8_t>((1 << 4) | sym.type)); // STB_GLOBAL
        w.u8(0);
        w.u16(sym.section < 0 ? 0xfff1 : static_cast<uint16_t>(sym.section + 1));
    }
    const auto symtab_size = static_cast<uint32_t>(w.out.size()) - symtab_off;

    const auto strtab_off = static_cast<uint32_t>(w.out.size());
    w.bytes(strtab);

    std::vector<uint8_t> shstrtab{0};
    std::vector<uint32_t> names;
    for (const auto& s : sections_) {
        names.push_back(add_string(shstrtab, s.name));
    }
    const uint32_t symtab_name = add_string(shstrtab, ".symtab");
    const uint32_t strtab_name = add_string(shstrtab, ".strtab");
    const uint32_t shstrtab_name = add_string(shstrtab, ".shstrtab");
    const auto shstrtab_off = static_cast<uint32_t>(w.out.size());
    w.bytes(shstrtab);

    w.align(4);
    w.patch32(shoff_at, static_cast<uint32_t>(w.out.size()));
    auto header = [&](uint32_t name, uint32_t type, uint32_t flags, uint32_t addr, uint32_t off, uint32_t size,
                      uint32_t link, uint32_t info, uint32_t entsize) {
        w.u32(name);
        w.u32(type);
        w.u32(flags);
        w.u32(addr);
        w.u32(off);
        w.u32(size);
        w.u32(link);
        w.u32(info);
        w.u32(4);
        w.u32(entsize);
    };
    header(0, 0, 0, 0, 0, 0, 0, 0, 0);
    for (size_t i = 0; i < sections_.size(); ++i) {
        const auto& s = sections_[i];
        uint32_t flags = 0x2; // SHF_ALLOC
        if (s.executable) {
            flags |= 0x4;
        }
        if (s.writable) {
            flags |= 0x1;
        }
        header(names[i], s.nobits ? 8 : 1, flags, s.vaddr, offsets[i], static_cast<uint32_t>(s.bytes.size()), 0, 0,
               0);
    }
    const auto strtab_index = static_cast<uint32_t>(sections_.size() + 2);
    header(symtab_name, 2, 0, 0, symtab_off, symtab_size, strtab_index, 1, 16);
    header(strtab_name, 3, 0, 0, strtab_off, static_cast<uint32_t>(strtab.size()), 0, 0, 0);
    header(shstrtab_name, 3, 0, 0, shstrtab_off, static_cast<uint32_t>(shstrtab.size()), 0, 0, 0);
    return w.out;
}

LoadedProgram assemble(const std::vector<Instruction>& code) {
    ElfBuilder b;
    b.entry(kCodeBase);
    const int text = b.text(kCodeBase, code);
    const int data = b.section({".data", kDataBase, std::vector<uint8_t>(64, 0), false, true, false});
    b.symbol({"f", kCodeBase, static_cast<uint32_t>(4 * code.size()), kSttFunc, text});
    b.symbol({"data", kDataBase, 64, kSttObject, data});
    return load_image(b.build());
}

} // namespace kta::test
