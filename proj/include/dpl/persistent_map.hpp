#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <utility>

namespace dpl {

/// Immutable ordered map. `insert` returns a new map sharing all untouched
/// nodes with the original (AVL tree with path copying), so extending an
/// environment never disturbs the environments captured by closures or
/// saved on the machine stack.
template <class Key, class Value, class Compare = std::less<Key>>
class PersistentMap {
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Node {
    Key key;
    Value value;
    NodePtr left;
    NodePtr right;
    int height;
  };

 public:
  PersistentMap() = default;

  [[nodiscard]] PersistentMap insert(Key key, Value value) const {
    bool added = false;
    NodePtr root = insert(root_, std::move(key), std::move(value), added);
    return PersistentMap(std::move(root), size_ + (added ? 1 : 0));
  }

  const Value* find(const Key& key) const {
    const Node* n = root_.get();
    Compare less;
    while (n != nullptr) {
      if (less(key, n->key)) {
        n = n->left.get();
      } else if (less(n->key, key)) {
        n = n->right.get();
      } else {
        return &n->value;
      }
    }
    return nullptr;
  }

  bool contains(const Key& key) const { return find(key) != nullptr; }
  bool empty() const { return size_ == 0; }
  std::size_t size() const { return size_; }

  /// Visits bindings in key order.
  template <class F>
  void for_each(F&& f) const {
    visit(root_.get(), f);
  }

 private:
  PersistentMap(NodePtr root, std::size_t size) : root_(std::move(root)), size_(size) {}

  static int height(const NodePtr& n) { return n ? n->height : 0; }

  static NodePtr make(Key key, Value value, NodePtr left, NodePtr right) {
    int h = 1 + std::max(height(left), height(right));
    return std::make_shared<const Node>(
        Node{std::move(key), std::move(value), std::move(left), std::move(right), h});
  }

  static NodePtr rotate_right(const NodePtr& n) {
    const NodePtr& l = n->left;
    return make(l->key, l->value, l->left, make(n->key, n->value, l->right, n->right));
  }

  static NodePtr rotate_left(const NodePtr& n) {
    const NodePtr& r = n->right;
    return make(r->key, r->value, make(n->key, n->value, n->left, r->left), r->right);
  }

  static NodePtr balance(NodePtr n) {
    int diff = height(n->left) - height(n->right);
    if (diff > 1) {
      if (height(n->left->left) < height(n->left->right)) {
        n = make(n->key, n->value, rotate_left(n->left), n->right);
      }
      return rotate_right(n);
    }
    if (diff < -1) {
      if (height(n->right->right) < height(n->right->left)) {
        n = make(n->key, n->value, n->left, rotate_right(n->right));
      }
      return rotate_left(n);
    }
    return n;
  }

  static NodePtr insert(const NodePtr& n, Key&& key, Value&& value, bool& added) {
    if (!n) {
      added = true;
      return make(std::move(key), std::move(value), nullptr, nullptr);
    }
    Compare less;
    if (less(key, n->key)) {
      return balance(make(n->key, n->value, insert(n->left, std::move(key), std::move(value), added),
                          n->right));
    }
    if (less(n->key, key)) {
      return balance(make(n->key, n->value, n->left,
                          insert(n->right, std::move(key), std::move(value), added)));
    }
    return make(std::move(key), std::move(value), n->left, n->right);
  }

  template <class F>
  static void visit(const Node* n, F& f) {
    if (n == nullptr) return;
    visit(n->left.get(), f);
    f(n->key, n->value);
    visit(n->right.get(), f);
  }

  NodePtr root_;
  std::size_t size_ = 0;
};

}  // namespace dpl
