#pragma once

#include <cstdint>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kta/inputs.hpp"
#include "kta/sim.hpp"

namespace kta {

struct Dimension {
    Location location;
    int64_t lo = 0;
    int64_t hi = 0;
    View view = View::Signed;

    uint64_t cardinality() const { return static_cast<uint64_t>(hi - lo) + 1; }
    bool operator==(const Dimension&) const = default;
};

// Rectangular concrete input space. Row-major: the last dimension varies
// fastest.
class InputSpace {
  public:
    InputSpace() = default;
    explicit InputSpace(std::vector<Dimension> dims);

    const std::vector<Dimension>& dims() const { return dims_; }
    uint64_t cardinality() const { return cardinality_; }

    // The index-th binding in enumeration order.
    InputBinding binding_at(uint64_t index) const;

    // Parses `<loc>=<lo>..<hi>[:signed|:unsigned]` or `<loc>=<v>[:view]`.
    static Dimension parse_dimension(std::string_view text);

    bool operator==(const InputSpace&) const = default;

  private:
    std::vector<Dimension> dims_;
    uint64_t cardinality_ = 1;
};

// Lazy range over every binding of a space, in row-major order.
class Enumeration {
  public:
    class iterator {
      public:
        using iterator_category = std::input_iterator_tag;
        using value_type = InputBinding;
        using difference_type = std::ptrdiff_t;

        iterator(const InputSpace* space, uint64_t index) : space_(space), index_(index) {}
        InputBinding operator*() const { return space_->binding_at(index_); }
        iterator& operator++() {
            ++index_;
            return *this;
        }
        bool operator==(const iterator& o) const { return index_ == o.index_; }

      private:
        const InputSpace* space_;
        uint64_t index_;
    };

    explicit Enumeration(const InputSpace& space) : space_(&space) {}
    iterator begin() const { return {space_, 0}; }
    iterator end() const { return {space_, space_->cardinality()}; }

  private:
    const InputSpace* space_;
};

inline Enumeration enumerate(const InputSpace& space) { return Enumeration(space); }
// The range refers to the space, so it must not be a temporary.
Enumeration enumerate(const InputSpace&&) = delete;

class ExhaustiveError : public std::runtime_error {
  public:
    enum class Kind { FaultyInput, BudgetExceeded, NoObservation, UnknownTimingPoint };

    ExhaustiveError(Kind kind, const std::string& what, InputBinding binding = {})
        : std::runtime_error(what), kind_(kind), binding_(std::move(binding)) {}
    Kind kind() const { return kind_; }
    const InputBinding& binding() const { return binding_; }

  private:
    Kind kind_;
    InputBinding binding_;
};

struct PairReport {
    std::string from;
    std::string to;
    Cycles wcet = 0;
    Cycles bcet = 0;
    InputBinding wcet_witness;
    InputBinding bcet_witness;
    uint64_t samples = 0;
    bool operator==(const PairReport&) const = default;
};

struct TotalReport {
    Cycles wcet = 0;
    Cycles bcet = 0;
    InputBinding wcet_witness;
    InputBinding bcet_witness;
    bool operator==(const TotalReport&) const = default;
};

struct FineGrainedReport {
    std::string function;
    InputSpace space;
    std::vector<PairReport> pairs;
    TotalReport total;
    uint64_t runs = 0;
    bool operator==(const FineGrainedReport&) const = default;
};

using TimingQuery = std::pair<std::string, std::string>;

// Each occurrence of `from` paired with the next later occurrence of `to`.
std::vector<Cycles> pair_deltas(const std::vector<TimingEvent>& events, const std::string& from,
                                const std::string& to);

struct ExhaustiveOptions {
    uint64_t step_budget = 10'000'000;
    unsigned jobs = 1;
};

FineGrainedReport analyze(const Simulator& sim, const std::string& function, Address entry,
                          const InputSpace& space, const TimingPointTable& tp_table,
                          const std::vector<TimingQuery>& queries, const ExhaustiveOptions& options = {});

FineGrainedReport analyze(const LoadedProgram& prog, const TimingModel& model, const std::string& function,
                          const InputSpace& space, const TimingPointTable& tp_table,
                          const std::vector<TimingQuery>& queries, const ExhaustiveOptions& options = {});

} // namespace kta
