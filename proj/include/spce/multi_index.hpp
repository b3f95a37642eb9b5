#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace spce {

/// Degree multi-index alpha in N^d.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& alpha);

/// q-(quasi-)norm (sum_i alpha_i^q)^(1/q), 0 < q <= 1.
double qnorm(const MultiIndex& alpha, double q);

/// Graded lexicographic order: lower total degree first; within a degree,
/// the index with the larger entry at the first differing position first.
bool grlex_less(const MultiIndex& a, const MultiIndex& b);

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& a) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (int v : a) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b9ULL;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Ordered, duplicate-free set of d-dimensional multi-indices in graded
/// lexicographic order. Immutable after construction.
class MultiIndexSet {
 public:
  MultiIndexSet() = default;

  /// Sorts the given indices into canonical order and rejects duplicates.
  MultiIndexSet(int d, std::vector<MultiIndex> indices);

  /// All alpha with sum_i alpha_i <= p. Cardinality binomial(d+p, p).
  static MultiIndexSet total_degree(int d, int p);

  /// Hyperbolic truncation { alpha : qnorm(alpha, q) <= p }. Equals the
  /// total-degree set for q = 1 (tested with integer arithmetic); boundary
  /// membership for q < 1 uses a 1e-9 relative tolerance.
  static MultiIndexSet hyperbolic(int d, int p, double q);

  /// Anisotropic degree set { alpha : sum_i alpha_i / p_vec[i] <= 1 },
  /// generated recursively with a per-dimension slack budget rather than by
  /// box enumeration.
  static MultiIndexSet anisotropic(const std::vector<int>& p_vec);

  int dim() const { return d_; }
  int size() const { return static_cast<int>(indices_.size()); }
  bool empty() const { return indices_.empty(); }
  const MultiIndex& operator[](int j) const { return indices_[static_cast<std::size_t>(j)]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  bool contains(const MultiIndex& alpha) const { return position_.count(alpha) > 0; }
  /// Position in canonical order, or -1 if absent.
  int position(const MultiIndex& alpha) const;

  /// Subset by positions (re-sorted into canonical order).
  MultiIndexSet subset(const std::vector<int>& positions) const;
  MultiIndexSet unite(const MultiIndexSet& other) const;

  bool is_downward_closed() const;

  /// Largest entry per dimension over all members (zero vector if empty).
  std::vector<int> max_degrees() const;

  bool operator==(const MultiIndexSet& other) const { return indices_ == other.indices_; }

  nlohmann::json to_json() const;
  static MultiIndexSet from_json(const nlohmann::json& j);

 private:
  void build_lookup();

  int d_ = 0;
  std::vector<MultiIndex> indices_;
  std::unordered_map<MultiIndex, int, MultiIndexHash> position_;
};

/// The d forward neighbors alpha + e_i.
std::vector<MultiIndex> forward_neighbors(const MultiIndex& alpha);

/// Forward neighbors of `active` members that are not in `active` and whose
/// backward neighbors all lie in `active` (the admissible frontier).
MultiIndexSet admissible_frontier(const MultiIndexSet& active);

}  // namespace spce
