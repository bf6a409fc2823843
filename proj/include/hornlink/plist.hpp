#pragma once

#include <cstddef>
#include <iterator>
#include <memory>
#include <utility>
#include <vector>

namespace hornlink {

// Immutable singly linked list with shared tails. Copying is O(1) and never
// touches the original; push_front returns a new list. The engine leans on
// this: every implication node extends the program for the scope of one
// subgoal without copying it, and backtracking out restores the old value by
// simply dropping the extension.
template <typename T>
class PList {
  struct Node {
    T value;
    std::shared_ptr<const Node> next;
  };
  using NodePtr = std::shared_ptr<const Node>;

public:
  PList() = default;

  PList push_front(T value) const {
    return PList(std::make_shared<const Node>(Node{std::move(value), head_}),
                 size_ + 1);
  }

  // Builds a list whose iteration order matches `items`.
  static PList from(std::vector<T> items) {
    PList out;
    for (auto it = items.rbegin(); it != items.rend(); ++it)
      out = out.push_front(std::move(*it));
    return out;
  }

  bool empty() const noexcept { return head_ == nullptr; }
  std::size_t size() const noexcept { return size_; }

  const T& front() const { return head_->value; }
  PList rest() const { return PList(head_->next, size_ - 1); }

  // Node identity, not element equality; used to assert that a scope exit
  // really restored the same structure.
  bool same_nodes(const PList& other) const noexcept {
    return head_ == other.head_;
  }

  class iterator {
  public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = T;
    using difference_type = std::ptrdiff_t;
    using pointer = const T*;
    using reference = const T&;

    iterator() = default;
    explicit iterator(const Node* node) : node_(node) {}

    reference operator*() const { return node_->value; }
    pointer operator->() const { return &node_->value; }
    iterator& operator++() {
      node_ = node_->next.get();
      return *this;
    }
    iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    bool operator==(const iterator& o) const { return node_ == o.node_; }
    bool operator!=(const iterator& o) const { return node_ != o.node_; }

  private:
    const Node* node_ = nullptr;
  };

  iterator begin() const { return iterator(head_.get()); }
  iterator end() const { return iterator(); }

private:
  PList(NodePtr head, std::size_t size) : head_(std::move(head)), size_(size) {}

  NodePtr head_;
  std::size_t size_ = 0;
};

}  // namespace hornlink
