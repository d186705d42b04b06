#pragma once

#include <string>
#include <vector>

namespace skewtest {

/// An i.i.d. sample. At least three finite values.
struct Dataset {
  std::vector<double> values;
  std::string label;

  std::size_t size() const noexcept { return values.size(); }
  // Throws insufficient-data or invalid-argument.
  void validate() const;
};

}  // namespace skewtest
