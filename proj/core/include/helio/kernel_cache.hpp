#pragma once

#include <cstddef>
#include <functional>
#include <list>
#include <span>
#include <vector>

namespace helio {

/// Least-recently-used cache of kernel-matrix rows under a byte budget.
/// At least two rows are always kept so the solver can hold a pair.
class KernelCache {
 public:
  using RowFill = std::function<void(std::size_t row, std::span<double> out)>;

  KernelCache(std::size_t n, std::size_t budget_bytes, RowFill fill);

  /// Valid until two further distinct rows have been requested.
  std::span<const double> row(std::size_t i);

  std::size_t capacity_rows() const { return capacity_; }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::size_t n_;
  std::size_t capacity_;
  RowFill fill_;
  std::vector<double> storage_;
  std::vector<long> slot_of_row_;
  std::vector<std::size_t> row_of_slot_;
  std::list<std::size_t> lru_;  // slots, most recent at front
  std::vector<std::list<std::size_t>::iterator> lru_pos_;
  std::size_t used_ = 0;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace helio
