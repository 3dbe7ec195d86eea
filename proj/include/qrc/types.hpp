#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qrc {

using Index = std::uint32_t;

// Node class a score vector belongs to.
enum class Side { User, Item, Author };

std::string_view to_string(Side side);

// Raised for malformed inputs: duplicate edges, bad weights, dimension
// mismatches, unknown ids.
class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScoreVector {
  Side side = Side::User;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

}  // namespace qrc
