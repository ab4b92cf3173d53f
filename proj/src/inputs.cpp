#include "kta/inputs.hpp"

#include <charconv>

#include "util.hpp"

namespace kta {

std::string_view view_name(View v) { return v == View::Signed ? "signed" : "unsigned"; }

Location Location::reg(unsigned index) {
    if (index < 4 || index > 7) {
        throw InputError("input register must be one of a0-a3 (4-7), got " + std::to_string(index));
    }
    return Location(Kind::Reg, index);
}

Location Location::mem(Address addr) {
    if (addr % 4 != 0) {
        throw InputError("memory input address " + hex32(addr) + " is not 4-aligned");
    }
    return Location(Kind::Mem, addr);
}

std::string Location::to_string() const {
    if (kind_ == Kind::Reg) {
        return "a" + std::to_string(value_ - 4);
    }
    return "mem:" + hex32(value_);
}

Location Location::parse(std::string_view text) {
    if (text.size() == 2 && text[0] == 'a' && text[1] >= '0' && text[1] <= '3') {
        return reg(4u + static_cast<unsigned>(text[1] - '0'));
    }
    if (text.starts_with("mem:0x") || text.starts_with("mem:0X")) {
        auto digits = text.substr(6);
        uint32_t addr = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), addr, 16);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && !digits.empty()) {
            return mem(addr);
        }
    }
    throw InputError("bad input location '" + std::string(text) + "' (expected a0-a3 or mem:0xADDR)");
}

std::string binding_to_string(const InputBinding& binding) {
    std::string out = "{";
    for (size_t i = 0; i < binding.size(); ++i) {
        if (i != 0) {
            out += ", ";
        }
        out += binding[i].first.to_string() + "=" + hex32(binding[i].second);
    }
    return out + "}";
}

} // namespace kta
