"""Writes reference dumps for each fixture ELF using third-party tools.

For every bin/<name>.elf this produces, in the output directory:
  <name>.sections  allocatable sections: name vaddr size exec(0/1)
  <name>.syms      named symbols: name value size type
  <name>.dis       capstone disassembly: addr word mnemonic operands
"""
import pathlib
import sys

import capstone
from elftools.elf.constants import SH_FLAGS
from elftools.elf.elffile import ELFFile


def dump(elf_path: pathlib.Path, out_dir: pathlib.Path) -> None:
    name = elf_path.stem
    with elf_path.open("rb") as fh:
        elf = ELFFile(fh)
        sections = []
        text = []
        for sec in elf.iter_sections():
            flags = sec["sh_flags"]
            if not flags & SH_FLAGS.SHF_ALLOC or sec["sh_size"] == 0:
                continue
            exe = 1 if flags & SH_FLAGS.SHF_EXECINSTR else 0
            sections.append(f"{sec.name} 0x{sec['sh_addr']:08x} {sec['sh_size']} {exe}")
            if exe:
                text.append((sec["sh_addr"], sec.data()))
        syms = []
        for sym in elf.get_section_by_name(".symtab").iter_symbols():
            kind = sym["st_info"]["type"]
            if not sym.name or kind in ("STT_FILE", "STT_SECTION"):
                continue
            syms.append(f"{sym.name} 0x{sym['st_value']:08x} {sym['st_size']} {kind[4:]}")
    md = capstone.Cs(capstone.CS_ARCH_MIPS, capstone.CS_MODE_MIPS32 + capstone.CS_MODE_BIG_ENDIAN)
    md.skipdata = True
    lines = []
    for base, data in text:
        for insn in md.disasm(data, base):
            word = int.from_bytes(insn.bytes, "big")
            lines.append(f"0x{insn.address:08x} 0x{word:08x} {insn.mnemonic} {insn.op_str}".rstrip())
    (out_dir / f"{name}.sections").write_text("\n".join(sections) + "\n")
    (out_dir / f"{name}.syms").write_text("\n".join(sorted(syms)) + "\n")
    (out_dir / f"{name}.dis").write_text("\n".join(lines) + "\n")


def main() -> None:
    bin_dir = pathlib.Path(sys.argv[1])
    out_dir = pathlib.Path(sys.argv[2])
    out_dir.mkdir(parents=True, exist_ok=True)
    for elf_path in sorted(bin_dir.glob("*.elf")):
        dump(elf_path, out_dir)


if __name__ == "__main__":
    main()
