#include "helio/kernel_cache.hpp"

#include <algorithm>

namespace helio {

KernelCache::KernelCache(std::size_t n, std::size_t budget_bytes, RowFill fill)
    : n_(n), fill_(std::move(fill)), slot_of_row_(n, -1) {
  const std::size_t row_bytes = std::max<std::size_t>(n, 1) * sizeof(double);
  capacity_ = std::clamp<std::size_t>(budget_bytes / row_bytes, 2, std::max<std::size_t>(n, 2));
  storage_.resize(capacity_ * n_);
  row_of_slot_.assign(capacity_, 0);
  lru_pos_.resize(capacity_);
}

std::span<const double> KernelCache::row(std::size_t i) {
  std::size_t slot = 0;
  if (slot_of_row_[i] >= 0) {
    ++hits_;
    slot = static_cast<std::size_t>(slot_of_row_[i]);
    lru_.splice(lru_.begin(), lru_, lru_pos_[slot]);
  } else {
    ++misses_;
    if (used_ < capacity_) {
      slot = used_++;
      lru_.push_front(slot);
      lru_pos_[slot] = lru_.begin();
    } else {
      slot = lru_.back();
      slot_of_row_[row_of_slot_[slot]] = -1;
      lru_.splice(lru_.begin(), lru_, lru_pos_[slot]);
    }
    row_of_slot_[slot] = i;
    slot_of_row_[i] = static_cast<long>(slot);
    fill_(i, std::span<double>(storage_.data() + slot * n_, n_));
  }
  return {storage_.data() + slot * n_, n_};
}

}  // namespace helio
