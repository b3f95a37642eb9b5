#include "spce/multi_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spce {

int total_degree(const MultiIndex& alpha) {
  int g = 0;
  for (int v : alpha) g += v;
  return g;
}

double qnorm(const MultiIndex& alpha, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("qnorm: q must be in (0,1]");
  if (q == 1.0) return static_cast<double>(total_degree(alpha));
  double s = 0.0;
  for (int v : alpha)
    if (v > 0) s += std::pow(static_cast<double>(v), q);
  return std::pow(s, 1.0 / q);
}

bool grlex_less(const MultiIndex& a, const MultiIndex& b) {
  int ga = total_degree(a), gb = total_degree(b);
  if (ga != gb) return ga < gb;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

MultiIndexSet::MultiIndexSet(int d, std::vector<MultiIndex> indices)
    : d_(d), indices_(std::move(indices)) {
  if (d_ < 1) throw std::invalid_argument("MultiIndexSet: d must be >= 1");
  for (const auto& a : indices_) {
    if (static_cast<int>(a.size()) != d_)
      throw std::invalid_argument("MultiIndexSet: index of wrong dimension");
    for (int v : a)
      if (v < 0) throw std::invalid_argument("MultiIndexSet: negative degree");
  }
  std::sort(indices_.begin(), indices_.end(), grlex_less);
  auto dup = std::adjacent_find(indices_.begin(), indices_.end());
  if (dup != indices_.end()) throw std::invalid_argument("MultiIndexSet: duplicate index");
  build_lookup();
}

void MultiIndexSet::build_lookup() {
  position_.clear();
  position_.reserve(indices_.size());
  for (std::size_t j = 0; j < indices_.size(); ++j)
    position_.emplace(indices_[j], static_cast<int>(j));
}

int MultiIndexSet::position(const MultiIndex& alpha) const {
  auto it = position_.find(alpha);
  return it == position_.end() ? -1 : it->second;
}

namespace {

// Enumerates, in graded lexicographic order, all alpha with total degree g
// whose prefix passes `prefix_ok` and emits those passing `accept`.
template <typename PrefixOk, typename Accept>
void enumerate_degree(int d, int g, MultiIndex& alpha, int pos, int remaining, PrefixOk&& prefix_ok,
                      Accept&& accept) {
  if (pos == d - 1) {
    alpha[static_cast<std::size_t>(pos)] = remaining;
    if (prefix_ok(alpha, pos)) accept(alpha);
    alpha[static_cast<std::size_t>(pos)] = 0;
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    alpha[static_cast<std::size_t>(pos)] = v;
    if (!prefix_ok(alpha, pos)) continue;
    enumerate_degree(d, g, alpha, pos + 1, remaining - v, prefix_ok, accept);
  }
  alpha[static_cast<std::size_t>(pos)] = 0;
}

}  // namespace

MultiIndexSet MultiIndexSet::total_degree(int d, int p) {
  if (d < 1 || p < 0) throw std::invalid_argument("total_degree: need d >= 1, p >= 0");
  std::vector<MultiIndex> out;
  MultiIndex alpha(static_cast<std::size_t>(d), 0);
  for (int g = 0; g <= p; ++g)
    enumerate_degree(
        d, g, alpha, 0, g, [](const MultiIndex&, int) { return true; },
        [&](const MultiIndex& a) { out.push_back(a); });
  MultiIndexSet s;
  s.d_ = d;
  s.indices_ = std::move(out);  // generated in canonical order already
  s.build_lookup();
  return s;
}

MultiIndexSet MultiIndexSet::hyperbolic(int d, int p, double q) {
  if (d < 1 || p < 0) throw std::invalid_argument("hyperbolic: need d >= 1, p >= 0");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("hyperbolic: q must be in (0,1]");
  if (q == 1.0) return total_degree(d, p);

  // Membership test sum_i alpha_i^q <= p^q with relative tolerance; q <= 1
  // implies qnorm >= total degree, so degree-g enumeration up to p suffices.
  const double budget = std::pow(static_cast<double>(p), q) * (1.0 + 1e-9);
  std::vector<MultiIndex> out;
  MultiIndex alpha(static_cast<std::size_t>(d), 0);
  auto prefix_ok = [&](const MultiIndex& a, int pos) {
    double s = 0.0;
    for (int i = 0; i <= pos; ++i)
      if (a[static_cast<std::size_t>(i)] > 0)
        s += std::pow(static_cast<double>(a[static_cast<std::size_t>(i)]), q);
    return s <= budget;
  };
  for (int g = 0; g <= p; ++g)
    enumerate_degree(d, g, alpha, 0, g, prefix_ok,
                     [&](const MultiIndex& a) { out.push_back(a); });
  MultiIndexSet s;
  s.d_ = d;
  s.indices_ = std::move(out);
  s.build_lookup();
  return s;
}

namespace {

void anisotropic_recurse(const std::vector<int>& p_vec, std::size_t pos, double slack,
                         MultiIndex& alpha, std::vector<MultiIndex>& out) {
  if (pos == p_vec.size()) {
    out.push_back(alpha);
    return;
  }
  const double pi = static_cast<double>(p_vec[pos]);
  const int vmax = static_cast<int>(std::floor(slack * pi + 1e-9));
  for (int v = 0; v <= vmax; ++v) {
    alpha[pos] = v;
    anisotropic_recurse(p_vec, pos + 1, slack - static_cast<double>(v) / pi, alpha, out);
  }
  alpha[pos] = 0;
}

}  // namespace

MultiIndexSet MultiIndexSet::anisotropic(const std::vector<int>& p_vec) {
  if (p_vec.empty()) throw std::invalid_argument("anisotropic: empty degree vector");
  for (int p : p_vec)
    if (p < 1) throw std::invalid_argument("anisotropic: degrees must be >= 1");
  std::vector<MultiIndex> out;
  MultiIndex alpha(p_vec.size(), 0);
  anisotropic_recurse(p_vec, 0, 1.0, alpha, out);
  std::sort(out.begin(), out.end(), grlex_less);
  MultiIndexSet s;
  s.d_ = static_cast<int>(p_vec.size());
  s.indices_ = std::move(out);
  s.build_lookup();
  return s;
}

MultiIndexSet MultiIndexSet::subset(const std::vector<int>& positions) const {
  std::vector<MultiIndex> sel;
  sel.reserve(positions.size());
  for (int p : positions) {
    if (p < 0 || p >= size()) throw std::out_of_range("subset: position out of range");
    sel.push_back(indices_[static_cast<std::size_t>(p)]);
  }
  return MultiIndexSet(d_, std::move(sel));
}

MultiIndexSet MultiIndexSet::unite(const MultiIndexSet& other) const {
  if (other.d_ != d_) throw std::invalid_argument("unite: dimension mismatch");
  std::vector<MultiIndex> all = indices_;
  for (const auto& a : other.indices_)
    if (!contains(a)) all.push_back(a);
  return MultiIndexSet(d_, std::move(all));
}

bool MultiIndexSet::is_downward_closed() const {
  for (const auto& a : indices_) {
    MultiIndex b = a;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i] == 0) continue;
      b[i] -= 1;
      if (!contains(b)) return false;
      b[i] += 1;
    }
  }
  return true;
}

std::vector<int> MultiIndexSet::max_degrees() const {
  std::vector<int> m(static_cast<std::size_t>(d_), 0);
  for (const auto& a : indices_)
    for (std::size_t i = 0; i < a.size(); ++i) m[i] = std::max(m[i], a[i]);
  return m;
}

nlohmann::json MultiIndexSet::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& a : indices_) arr.push_back(a);
  return arr;
}

MultiIndexSet MultiIndexSet::from_json(const nlohmann::json& j) {
  std::vector<MultiIndex> idx;
  for (const auto& a : j) idx.push_back(a.get<MultiIndex>());
  if (idx.empty()) throw std::invalid_argument("MultiIndexSet::from_json: empty set");
  return MultiIndexSet(static_cast<int>(idx.front().size()), std::move(idx));
}

std::vector<MultiIndex> forward_neighbors(const MultiIndex& alpha) {
  std::vector<MultiIndex> out;
  out.reserve(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    MultiIndex b = alpha;
    b[i] += 1;
    out.push_back(std::move(b));
  }
  return out;
}

MultiIndexSet admissible_frontier(const MultiIndexSet& active) {
  if (active.empty()) throw std::invalid_argument("admissible_frontier: empty active set");
  std::vector<MultiIndex> frontier;
  std::unordered_map<MultiIndex, bool, MultiIndexHash> seen;
  for (const auto& a : active.indices()) {
    for (auto& b : forward_neighbors(a)) {
      if (active.contains(b) || seen.count(b)) continue;
      seen.emplace(b, true);
      bool admissible = true;
      MultiIndex back = b;
      for (std::size_t i = 0; i < back.size() && admissible; ++i) {
        if (back[i] == 0) continue;
        back[i] -= 1;
        admissible = active.contains(back);
        back[i] += 1;
      }
      if (admissible) frontier.push_back(b);
    }
  }
  return MultiIndexSet(active.dim(), std::move(frontier));
}

}  // namespace spce
