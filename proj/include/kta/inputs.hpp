#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kta/loader.hpp"

namespace kta {

// Signedness under which a 32-bit pattern is read as an integer.
enum class View : uint8_t { Signed, Unsigned };

std::string_view view_name(View v);

inline constexpr int64_t kSignedMin = -(int64_t{1} << 31);
inline constexpr int64_t kSignedMax = (int64_t{1} << 31) - 1;
inline constexpr int64_t kUnsignedMax = (int64_t{1} << 32) - 1;

inline constexpr int64_t view_min(View v) { return v == View::Signed ? kSignedMin : 0; }
inline constexpr int64_t view_max(View v) { return v == View::Signed ? kSignedMax : kUnsignedMax; }

// The integer a word denotes under a view, and back.
inline constexpr int64_t word_value(Word w, View v) {
    return v == View::Signed ? int64_t{static_cast<int32_t>(w)} : int64_t{w};
}
inline constexpr Word value_word(int64_t value) { return static_cast<Word>(value); }

// An input location: one of the argument registers a0-a3, or a 4-aligned
// memory word.
class Location {
  public:
    enum class Kind : uint8_t { Reg, Mem };

    static Location reg(unsigned index);
    static Location mem(Address addr);

    Kind kind() const { return kind_; }
    unsigned reg_index() const { return static_cast<unsigned>(value_); }
    Address address() const { return value_; }

    // "a0".."a3" or "mem:0x........".
    std::string to_string() const;
    static Location parse(std::string_view text);

    auto operator<=>(const Location&) const = default;

  private:
    Location(Kind kind, uint32_t value) : kind_(kind), value_(value) {}
    Kind kind_;
    uint32_t value_;
};

class InputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Concrete input assignment, in dimension order.
using InputBinding = std::vector<std::pair<Location, Word>>;

std::string binding_to_string(const InputBinding& binding);

} // namespace kta
