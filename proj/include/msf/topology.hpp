#pragma once

// Finite topological spaces.
//
// A finite topology is determined by the minimal open neighbourhood of each
// point; interior, closure and openness are all computed from those.  The
// explicit open-set list is kept for the base space because filters, regular
// opens and coverings quantify over it.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "msf/errors.hpp"
#include "msf/index_set.hpp"

namespace msf {

template <class Tag>
class BasicTopology {
 public:
  using Id = Index<Tag>;
  using Set = IndexSet<Tag>;

  BasicTopology() = default;

  /// Builds a topology from its complete list of open sets.  The list must
  /// contain the empty set and the whole carrier and be closed under pairwise
  /// union and intersection; nothing is completed silently.
  static BasicTopology from_opens(std::size_t n, std::vector<Set> opens) {
    BasicTopology t;
    t.n_ = n;
    const Set whole = Set::full(n);
    std::sort(opens.begin(), opens.end());
    opens.erase(std::unique(opens.begin(), opens.end()), opens.end());
    auto listed = [&](Set s) { return std::binary_search(opens.begin(), opens.end(), s); };
    for (Set o : opens) {
      if (!o.subset_of(whole)) throw TopologyError("open set mentions a point outside the space");
    }
    if (!listed(Set{})) throw TopologyError("the empty set is not listed as open");
    if (!listed(whole)) throw TopologyError("the whole space is not listed as open");
    for (Set a : opens) {
      for (Set b : opens) {
        if (!listed(a | b)) throw TopologyError("opens are not closed under union");
        if (!listed(a & b)) throw TopologyError("opens are not closed under intersection");
      }
    }
    t.opens_ = std::move(opens);
    t.minimal_.resize(n, whole);
    for (Set o : t.opens_) {
      for (Id x : o) t.minimal_[x.value] &= o;
    }
    return t;
  }

  /// Smallest topology containing every member of `family`.  The open-set
  /// list is materialised only for carriers of at most 16 points.
  static BasicTopology generated_by(std::size_t n, const std::vector<Set>& family) {
    BasicTopology t;
    t.n_ = n;
    const Set whole = Set::full(n);
    t.minimal_.assign(n, whole);
    for (Set b : family) {
      if (!b.subset_of(whole)) throw TopologyError("generating set mentions a point outside the space");
      for (Id x : b) t.minimal_[x.value] &= b;
    }
    if (n <= 16) {
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        const Set s = Set::from_bits(bits);
        if (t.is_open(s)) t.opens_.push_back(s);
      }
      std::sort(t.opens_.begin(), t.opens_.end());
    }
    return t;
  }

  std::size_t size() const { return n_; }
  Set full() const { return Set::full(n_); }

  bool is_open(Set s) const {
    for (Id x : s) {
      if (!minimal_[x.value].subset_of(s)) return false;
    }
    return true;
  }

  /// Intersection of all opens containing `x`.
  Set minimal_nbhd(Id x) const { return minimal_.at(x.value); }

  /// Smallest open set containing `s`.
  Set open_hull(Set s) const {
    Set hull;
    for (Id x : s) hull |= minimal_[x.value];
    return hull;
  }

  Set interior(Set s) const {
    Set inner;
    for (Id x : s) {
      if (minimal_[x.value].subset_of(s)) inner.insert(x);
    }
    return inner;
  }

  Set closure(Set s) const { return full() - interior(full() - s); }

  bool has_open_list() const { return !opens_.empty(); }

  /// All open sets, ordered by (cardinality, bits).
  const std::vector<Set>& opens() const {
    if (opens_.empty()) throw TopologyError("open-set list not materialised for this space");
    return opens_;
  }

  /// Open subsets of `u`, ordered by (cardinality, bits).
  std::vector<Set> opens_within(Set u) const {
    std::vector<Set> out;
    for (Set o : opens()) {
      if (o.subset_of(u)) out.push_back(o);
    }
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Set> minimal_;
  std::vector<Set> opens_;
};

using FiniteTopology = BasicTopology<PointTag>;
using ElementTopology = BasicTopology<ElementTag>;

inline PointSet interior(const FiniteTopology& t, PointSet s) { return t.interior(s); }
inline PointSet closure(const FiniteTopology& t, PointSet s) { return t.closure(s); }
inline PointSet minimal_nbhd(const FiniteTopology& t, PointId x) { return t.minimal_nbhd(x); }

/// int(cl(U)); `u` is regular open iff this returns `u`.
inline PointSet regularize(const FiniteTopology& t, PointSet u) { return t.interior(t.closure(u)); }

inline bool is_regular_open(const FiniteTopology& t, PointSet u) {
  return t.is_open(u) && regularize(t, u) == u;
}

/// Boolean complement in the algebra of regular opens.
inline PointSet regular_complement(const FiniteTopology& t, PointSet u) {
  return t.interior(t.full() - u);
}

/// Every point can be separated from every closed set not containing it by
/// disjoint opens.  For a closed set C and x outside it the best candidates are
/// the minimal neighbourhood of x and the open hull of C, so checking those is
/// exhaustive.
inline bool is_regular_space(const FiniteTopology& t) {
  for (PointSet open : t.opens()) {
    const PointSet closed = t.full() - open;
    for (PointId x : open) {
      if (t.minimal_nbhd(x).intersects(t.open_hull(closed))) return false;
    }
  }
  return true;
}

inline std::vector<PointSet> regular_opens(const FiniteTopology& t) {
  std::vector<PointSet> out;
  for (PointSet o : t.opens()) {
    if (regularize(t, o) == o) out.push_back(o);
  }
  return out;
}

/// Minimal nonempty regular opens.
inline std::vector<PointSet> regular_open_atoms(const FiniteTopology& t) {
  const auto regular = regular_opens(t);
  std::vector<PointSet> atoms;
  for (PointSet a : regular) {
    if (a.empty()) continue;
    const bool minimal = std::none_of(regular.begin(), regular.end(), [&](PointSet b) {
      return !b.empty() && b != a && b.subset_of(a);
    });
    if (minimal) atoms.push_back(a);
  }
  return atoms;
}

/// A filter of open sets, either in the lattice of all opens or in the Boolean
/// algebra of regular opens.
class OpenFilter {
 public:
  OpenFilter() = default;
  OpenFilter(std::vector<PointSet> members, bool regular_only, std::optional<PointSet> atom = std::nullopt)
      : members_(std::move(members)), regular_only_(regular_only), atom_(atom) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  const std::vector<PointSet>& members() const { return members_; }
  bool regular_only() const { return regular_only_; }
  /// Generating atom for principal ultrafilters of regular opens.
  std::optional<PointSet> atom() const { return atom_; }

  bool contains(PointSet u) const { return std::binary_search(members_.begin(), members_.end(), u); }

  /// Filter axioms inside the carrier family (all opens, or regular opens).
  bool is_filter(const FiniteTopology& t) const {
    if (members_.empty()) return false;
    const auto carrier = regular_only_ ? regular_opens(t) : t.opens();
    for (PointSet m : members_) {
      if (m.empty()) return false;
      if (std::find(carrier.begin(), carrier.end(), m) == carrier.end()) return false;
      for (PointSet c : carrier) {
        if (m.subset_of(c) && !contains(c)) return false;
      }
      for (PointSet n : members_) {
        if (!contains(m & n)) return false;
      }
    }
    return true;
  }

  /// For every regular open U exactly one of U and int(X \ U) is a member.
  bool is_ultra_over_regular(const FiniteTopology& t) const {
    if (!regular_only_ || !is_filter(t)) return false;
    for (PointSet u : regular_opens(t)) {
      if (contains(u) == contains(regular_complement(t, u))) return false;
    }
    return true;
  }

 private:
  std::vector<PointSet> members_;
  bool regular_only_ = false;
  std::optional<PointSet> atom_;
};

/// All ultrafilters of the regular-open algebra.  A finite Boolean algebra has
/// only principal ultrafilters, one per atom.
inline std::vector<OpenFilter> enumerate_regular_ultrafilters(const FiniteTopology& t) {
  const auto regular = regular_opens(t);
  std::vector<OpenFilter> out;
  for (PointSet atom : regular_open_atoms(t)) {
    std::vector<PointSet> members;
    for (PointSet u : regular) {
      if (atom.subset_of(u)) members.push_back(u);
    }
    out.emplace_back(std::move(members), true, atom);
  }
  return out;
}

/// { U ∩ dom₁ ∩ … ∩ domₖ : U ∈ F }.  Throws EmptyTrace when some intersection
/// is empty.
inline std::vector<PointSet> filter_trace(const OpenFilter& f, const std::vector<PointSet>& doms) {
  std::vector<PointSet> out;
  for (PointSet u : f.members()) {
    PointSet v = u;
    for (PointSet d : doms) v &= d;
    if (v.empty()) throw EmptyTrace();
    out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace msf
