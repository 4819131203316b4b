#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pbeam/diagnostics.hpp"

namespace pbeam {

/// Partition of an interval [a, b] into consecutive elements.
///
/// Node coordinates are stored explicitly so graded meshes use the same
/// type as uniform ones. Immutable after construction.
class Mesh1D {
 public:
  explicit Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw InvalidMesh("mesh needs at least two nodes");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      if (!(nodes_[i] > nodes_[i - 1])) {
        throw InvalidMesh("mesh nodes must be strictly increasing (node " + std::to_string(i) + ")");
      }
    }
  }

  [[nodiscard]] double a() const noexcept { return nodes_.front(); }
  [[nodiscard]] double b() const noexcept { return nodes_.back(); }
  [[nodiscard]] std::size_t n_elements() const noexcept { return nodes_.size() - 1; }
  [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }

  [[nodiscard]] std::pair<double, double> element_interval(std::size_t k) const {
    if (k >= n_elements()) {
      throw std::out_of_range("element index " + std::to_string(k) + " out of range");
    }
    return {nodes_[k], nodes_[k + 1]};
  }

  [[nodiscard]] double element_length(std::size_t k) const {
    auto [lo, hi] = element_interval(k);
    return hi - lo;
  }

  [[nodiscard]] double h_max() const noexcept {
    double h = 0.0;
    for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) h = std::max(h, nodes_[k + 1] - nodes_[k]);
    return h;
  }

  [[nodiscard]] bool contains(double x) const noexcept { return x >= a() && x <= b(); }

  /// Index of the element containing x; the right endpoint maps to the last element.
  [[nodiscard]] std::size_t locate(double x) const {
    if (!contains(x)) throw std::out_of_range("point " + std::to_string(x) + " outside mesh domain");
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    auto k = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
    return k == 0 ? 0 : std::min(k - 1, n_elements() - 1);
  }

 private:
  std::vector<double> nodes_;
};

[[nodiscard]] inline Mesh1D build_uniform(double a, double b, std::size_t n) {
  if (!(a < b)) throw InvalidMesh("uniform mesh requires a < b");
  if (n == 0) throw InvalidMesh("uniform mesh requires at least one element");
  std::vector<double> nodes(n + 1);
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t k = 0; k <= n; ++k) nodes[k] = a + static_cast<double>(k) * h;
  nodes.back() = b;
  return Mesh1D(std::move(nodes));
}

}  // namespace pbeam
