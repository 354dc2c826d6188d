#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sq2lt/errors.hpp"

namespace sq2lt {

// Ordered list of server capacities (bytes/sec), K >= 1, each strictly
// positive and finite. Reciprocals are precomputed: every light-traffic
// formula is a polynomial in 1/C_k.
class CapacityVector {
 public:
  explicit CapacityVector(std::vector<double> capacities) : caps_(std::move(capacities)) {
    require(!caps_.empty(), errc::invalid_capacity, "need at least one capacity");
    recip_.reserve(caps_.size());
    for (double c : caps_) {
      require(c > 0 && std::isfinite(c), errc::invalid_capacity,
              "capacities must be positive and finite");
      recip_.push_back(1.0 / c);
    }
  }

  std::size_t size() const { return caps_.size(); }
  double operator[](std::size_t k) const { return caps_[k]; }
  const std::vector<double>& values() const { return caps_; }
  const std::vector<double>& reciprocals() const { return recip_; }

  bool operator==(const CapacityVector& o) const { return caps_ == o.caps_; }

 private:
  std::vector<double> caps_;
  std::vector<double> recip_;
};

}  // namespace sq2lt
