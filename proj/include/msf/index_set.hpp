#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <vector>

#include "msf/errors.hpp"

namespace msf {

struct PointTag {};
struct ElementTag {};

/// Dense index into a finite carrier (points of X, or points of E).
template <class Tag>
struct Index {
  std::uint32_t value = 0;

  constexpr Index() = default;
  constexpr explicit Index(std::uint32_t v) : value(v) {}
  constexpr auto operator<=>(const Index&) const = default;
};

using PointId = Index<PointTag>;
using ElementId = Index<ElementTag>;

/// Subset of a carrier with at most 64 members, stored as a bit mask.
template <class Tag>
class IndexSet {
 public:
  using value_type = Index<Tag>;
  static constexpr std::size_t capacity = 64;

  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = Index<Tag>;
    using difference_type = std::ptrdiff_t;
    using pointer = void;
    using reference = Index<Tag>;

    constexpr iterator() = default;
    constexpr explicit iterator(std::uint64_t rest) : rest_(rest) {}
    constexpr Index<Tag> operator*() const {
      return Index<Tag>(static_cast<std::uint32_t>(std::countr_zero(rest_)));
    }
    constexpr iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    constexpr iterator operator++(int) {
      auto copy = *this;
      ++*this;
      return copy;
    }
    constexpr bool operator==(const iterator&) const = default;

   private:
    std::uint64_t rest_ = 0;
  };

  constexpr IndexSet() = default;
  constexpr IndexSet(std::initializer_list<Index<Tag>> members) {
    for (auto m : members) insert(m);
  }

  static constexpr IndexSet from_bits(std::uint64_t bits) {
    IndexSet s;
    s.bits_ = bits;
    return s;
  }
  static constexpr IndexSet full(std::size_t n) {
    if (n > capacity) throw Error("carrier larger than 64 members");
    return from_bits(n == capacity ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
  }
  static constexpr IndexSet singleton(Index<Tag> i) { return from_bits(std::uint64_t{1} << i.value); }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool contains(Index<Tag> i) const { return (bits_ >> i.value) & 1U; }
  constexpr void insert(Index<Tag> i) { bits_ |= std::uint64_t{1} << i.value; }
  constexpr void erase(Index<Tag> i) { bits_ &= ~(std::uint64_t{1} << i.value); }
  constexpr bool subset_of(IndexSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool intersects(IndexSet other) const { return (bits_ & other.bits_) != 0; }
  constexpr Index<Tag> front() const { return *begin(); }

  constexpr iterator begin() const { return iterator(bits_); }
  constexpr iterator end() const { return iterator(0); }

  std::vector<Index<Tag>> members() const { return {begin(), end()}; }

  friend constexpr IndexSet operator|(IndexSet a, IndexSet b) { return from_bits(a.bits_ | b.bits_); }
  friend constexpr IndexSet operator&(IndexSet a, IndexSet b) { return from_bits(a.bits_ & b.bits_); }
  /// Set difference.
  friend constexpr IndexSet operator-(IndexSet a, IndexSet b) { return from_bits(a.bits_ & ~b.bits_); }
  constexpr IndexSet& operator|=(IndexSet o) { bits_ |= o.bits_; return *this; }
  constexpr IndexSet& operator&=(IndexSet o) { bits_ &= o.bits_; return *this; }

  // Ordered by (cardinality, bits) so that listings go from small to large sets.
  friend constexpr std::strong_ordering operator<=>(IndexSet a, IndexSet b) {
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    return a.bits_ <=> b.bits_;
  }
  friend constexpr bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::uint64_t bits_ = 0;
};

using PointSet = IndexSet<PointTag>;
using ElementSet = IndexSet<ElementTag>;

}  // namespace msf
