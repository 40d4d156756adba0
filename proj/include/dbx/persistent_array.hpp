// SPDX-License-Identifier: MIT
#pragma once

#include <atomic>
#include <cstddef>
#include <iterator>
#include <memory>
#include <utility>
#include <vector>

namespace dbx {

// Functional array. A view is (store, length); the store only ever grows at
// its end and elements never move once written, so every view keeps
// observing exactly its own prefix. Appending to a view whose length equals
// the store's claimed length extends the store in place, anything else
// copies the prefix first.
template <class T>
class PersistentArray {
  static constexpr int kMaxSegments = 56;

  struct Store {
    std::unique_ptr<T[]> seg[kMaxSegments];
    std::size_t start[kMaxSegments + 1] = {0};
    int nseg = 0;
    std::atomic<std::size_t> claimed{0};

    std::size_t capacity() const { return start[nseg]; }

    void reserve(std::size_t n) {
      while (capacity() < n) {
        std::size_t cap = nseg == 0 ? std::max<std::size_t>(n, 8)
                                    : std::max(capacity(), n - capacity());
        seg[nseg] = std::make_unique<T[]>(cap);
        start[nseg + 1] = start[nseg] + cap;
        ++nseg;
      }
    }

    T& at(std::size_t i) {
      int k = 0;
      while (start[k + 1] <= i) ++k;
      return seg[k][i - start[k]];
    }
    const T& at(std::size_t i) const { return const_cast<Store*>(this)->at(i); }
  };

 public:
  class const_iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = T;
    using difference_type = std::ptrdiff_t;
    using pointer = const T*;
    using reference = const T&;

    const_iterator() = default;
    const_iterator(const Store* s, std::size_t pos) : s_(s), pos_(pos) {
      if (s_ && s_->nseg > 0) {
        while (k_ + 1 < s_->nseg && s_->start[k_ + 1] <= pos_) ++k_;
      }
    }
    reference operator*() const { return s_->seg[k_][pos_ - s_->start[k_]]; }
    pointer operator->() const { return &**this; }
    const_iterator& operator++() {
      ++pos_;
      if (pos_ >= s_->start[k_ + 1] && k_ + 1 < s_->nseg) ++k_;
      return *this;
    }
    const_iterator operator++(int) {
      auto c = *this;
      ++*this;
      return c;
    }
    bool operator==(const const_iterator& o) const { return pos_ == o.pos_; }
    bool operator!=(const const_iterator& o) const { return pos_ != o.pos_; }

   private:
    const Store* s_ = nullptr;
    std::size_t pos_ = 0;
    int k_ = 0;
  };

  PersistentArray() = default;

  explicit PersistentArray(std::vector<T> items) {
    if (items.empty()) return;
    store_ = std::make_shared<Store>();
    store_->reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i)
      store_->seg[0][i] = std::move(items[i]);
    store_->claimed.store(items.size());
    len_ = items.size();
  }

  std::size_t size() const { return len_; }
  bool empty() const { return len_ == 0; }

  const T& operator[](std::size_t i) const { return store_->at(i); }
  const T& front() const { return (*this)[0]; }

  const_iterator begin() const { return const_iterator(store_.get(), 0); }
  const_iterator end() const { return const_iterator(store_.get(), len_); }

  PersistentArray push(T v) const {
    T* p = &v;
    return append_range(std::make_move_iterator(p), 1);
  }

  PersistentArray append(const PersistentArray& other) const {
    if (other.empty()) return *this;
    if (empty()) return other;
    return append_range(other.begin(), other.size());
  }

  std::vector<T> to_vector() const { return std::vector<T>(begin(), end()); }

  // True when the two views share a store, used by tests only.
  bool shares_store_with(const PersistentArray& o) const {
    return store_ && store_ == o.store_;
  }

 private:
  PersistentArray(std::shared_ptr<Store> s, std::size_t n)
      : store_(std::move(s)), len_(n) {}

  template <class It>
  PersistentArray append_range(It it, std::size_t m) const {
    if (m == 0) return *this;
    if (store_) {
      std::size_t expected = len_;
      if (store_->claimed.compare_exchange_strong(expected, len_ + m)) {
        store_->reserve(len_ + m);
        for (std::size_t i = 0; i < m; ++i, ++it) store_->at(len_ + i) = *it;
        return PersistentArray(store_, len_ + m);
      }
    }
    auto s = std::make_shared<Store>();
    s->reserve(std::max<std::size_t>(2 * (len_ + m), 8));
    std::size_t i = 0;
    for (auto& x : *this) s->seg[0][i++] = x;
    for (std::size_t j = 0; j < m; ++j, ++it) s->seg[0][i++] = *it;
    s->claimed.store(len_ + m);
    return PersistentArray(std::move(s), len_ + m);
  }

  std::shared_ptr<Store> store_;
  std::size_t len_ = 0;
};

}  // namespace dbx
