#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace coagfuse {

/// Fenwick (binary indexed) prefix-sum tree over nonnegative leaf weights,
/// supporting O(log n) point updates and O(log n) sampling of an index with
/// probability proportional to its weight. Incremental updates accumulate
/// float drift; rebuild() restores exact sums from the leaf array.
class PrefixSumTree {
 public:
  explicit PrefixSumTree(std::span<const double> leaves) { rebuild(leaves); }

  std::size_t size() const { return n_; }

  double total() const { return total_; }

  void set(std::size_t i, double w) {
    if (i >= n_) throw std::out_of_range("PrefixSumTree::set");
    const double delta = w - leaves_[i];
    leaves_[i] = w;
    total_ += delta;
    for (std::size_t k = i + 1; k <= n_; k += k & (~k + 1)) {
      tree_[k] += delta;
    }
  }

  double leaf(std::size_t i) const { return leaves_[i]; }

  /// Smallest index i with (prefix sum through i) > u; requires 0 <= u < total().
  std::size_t sample(double u) const {
    std::size_t pos = 0;
    std::size_t mask = top_bit_;
    double rest = u;
    while (mask != 0) {
      const std::size_t next = pos + mask;
      if (next <= n_ && tree_[next] <= rest) {
        rest -= tree_[next];
        pos = next;
      }
      mask >>= 1;
    }
    // pos is the count of leaves whose cumulative sum is <= u
    if (pos >= n_) pos = n_ - 1;
    return pos;
  }

  void rebuild(std::span<const double> leaves) {
    n_ = leaves.size();
    leaves_.assign(leaves.begin(), leaves.end());
    tree_.assign(n_ + 1, 0.0);
    for (std::size_t i = 1; i <= n_; ++i) {
      tree_[i] += leaves_[i - 1];
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= n_) tree_[parent] += tree_[i];
    }
    total_ = 0.0;
    double comp = 0.0;
    for (double w : leaves_) {  // compensated total
      const double t = total_ + w;
      comp += (std::abs(total_) >= std::abs(w)) ? (total_ - t) + w : (w - t) + total_;
      total_ = t;
    }
    total_ += comp;
    top_bit_ = 1;
    while ((top_bit_ << 1) <= n_) top_bit_ <<= 1;
  }

  /// Re-derives internal sums from the stored leaves (drift control).
  void rebuild() { rebuild(std::vector<double>(leaves_)); }

 private:
  std::size_t n_ = 0;
  std::size_t top_bit_ = 1;
  double total_ = 0.0;
  std::vector<double> leaves_;
  std::vector<double> tree_;
};

}  // namespace coagfuse
