#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace vlbench {

// Integer identifier tagged by the entity it names, so that image and point
// ids cannot be mixed up at call sites.
template <typename Tag>
struct Id {
  std::uint64_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint64_t v) : value(v) {}

  friend constexpr auto operator<=>(const Id&, const Id&) = default;
};

struct ImageTag {};
struct PointTag {};

using ImageId = Id<ImageTag>;
using PointId = Id<PointTag>;

// Raised when input data breaks a documented precondition or invariant.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace vlbench

template <typename Tag>
struct std::hash<vlbench::Id<Tag>> {
  std::size_t operator()(const vlbench::Id<Tag>& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
