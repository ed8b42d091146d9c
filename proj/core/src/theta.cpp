#include "toeplitz_forge/theta.hpp"

#include <algorithm>

#include "toeplitz_forge/errors.hpp"

namespace toeplitz_forge {

LatticeVector ThetaDecomposition::component(int i) const {
  if (i <= first_index) throw InvalidArgument("theta index must exceed the trivial level");
  if (i > depth) return LatticeVector(components.empty() ? 0 : components.front().dim());
  return components[static_cast<std::size_t>(i - first_index - 1)];
}

LatticeVector ThetaDecomposition::sum() const {
  LatticeVector s(components.empty() ? 0 : components.front().dim());
  for (const auto& c : components) s += c;
  return s;
}

LatticeVector theta(const DomainFamily& family, int i, const LatticeVector& g) {
  if (i <= family.first_index()) throw InvalidArgument("theta index must exceed the trivial level");
  // θ_i vanishes once g lies in D_{i−1}, even when level i is not computed.
  auto inside = family.contains(i - 1, g);
  if (inside && *inside) return LatticeVector(g.dim());
  return family.project(i, g) - family.project(i - 1, g);
}

ThetaDecomposition decompose(const DomainFamily& family, const LatticeVector& g,
                             int depth_budget) {
  ThetaDecomposition out;
  out.first_index = family.first_index();
  out.depth = family.containing_level(g, depth_budget);
  LatticeVector prev = family.project(family.first_index(), g);
  for (int i = family.first_index() + 1; i <= out.depth; ++i) {
    LatticeVector cur = family.project(i, g);
    out.components.push_back(cur - prev);
    prev = std::move(cur);
  }
  if (out.components.empty()) out.components.push_back(LatticeVector(g.dim()));
  if (out.depth == family.first_index()) out.depth = family.first_index() + 1;
  return out;
}

int min_zero_level(const DomainFamily& family, const LatticeVector& g, int depth_budget) {
  LatticeVector prev = family.project(family.first_index(), g);
  for (int i = family.first_index() + 1; i <= depth_budget; ++i) {
    auto inside = family.contains(i - 1, g);
    if (inside && *inside) return i;
    if (!family.has_level(i)) break;
    LatticeVector cur = family.project(i, g);
    if (cur == prev) return i;
    prev = std::move(cur);
  }
  throw DepthBudgetExceeded("no vanishing theta component for " + g.str() +
                            " within the computed levels");
}

bool has_zero_component(const DomainFamily& family, const LatticeVector& g, int n,
                        int depth_budget) {
  if (n > depth_budget) throw DepthBudgetExceeded("level " + std::to_string(n) + " exceeds the depth budget");
  for (int i = 1; i <= n; ++i) {
    if (theta(family, i, g).is_zero()) return true;
  }
  return false;
}

LevelGrid::LevelGrid(const DomainFamily& family, int n) : n_(n) {
  if (n <= family.first_index()) throw InvalidArgument("grid level must exceed the trivial level");
  FundamentalDomain dom = family.domain(n);
  DiagonalMatrix step = family.period(n - 1);
  const std::size_t d = family.dim();
  step_ = step.diag();
  first_.resize(d);
  count_.resize(d);
  size_ = 1;
  zero_rank_ = 0;
  for (std::size_t i = 0; i < d; ++i) {
    first_[i] = ceil_div(dom.lower()[i], step_[i]);
    Integer last = floor_div(dom.lower()[i] + dom.sides()[i] - 1, step_[i]);
    count_[i] = last - first_[i] + 1;
    size_ *= count_[i];
    zero_rank_ = zero_rank_ * count_[i] + (Integer(0) - first_[i]);
  }
}

bool LevelGrid::contains(const LatticeVector& gamma) const {
  for (std::size_t i = 0; i < step_.size(); ++i) {
    if (!mpz_divisible_p(gamma[i].get_mpz_t(), step_[i].get_mpz_t())) return false;
    Integer t = gamma[i] / step_[i] - first_[i];
    if (t < 0 || t >= count_[i]) return false;
  }
  return true;
}

Integer LevelGrid::rank0(const LatticeVector& gamma) const {
  if (!contains(gamma)) {
    throw InvalidArgument("point " + gamma.str() + " is not on the level-" + std::to_string(n_) +
                          " grid");
  }
  Integer r = 0;
  for (std::size_t i = 0; i < step_.size(); ++i) r = r * count_[i] + (gamma[i] / step_[i] - first_[i]);
  return r;
}

LatticeVector LevelGrid::point0(const Integer& rank) const {
  if (rank < 0 || rank >= size_) throw InvalidArgument("grid rank out of range");
  Integer r = rank;
  LatticeVector g(step_.size());
  for (std::size_t i = step_.size(); i-- > 0;) {
    Integer t = floor_mod(r, count_[i]);
    r = floor_div(r, count_[i]);
    g[i] = (first_[i] + t) * step_[i];
  }
  return g;
}

Integer LevelGrid::rank(const LatticeVector& gamma) const {
  Integer r = rank0(gamma);
  if (r == zero_rank_) throw InvalidArgument("the origin has no nonzero rank");
  return r < zero_rank_ ? Integer(r + 1) : r;
}

LatticeVector LevelGrid::unrank(const Integer& rank) const {
  if (rank < 1 || rank >= size_) throw InvalidArgument("nonzero rank out of range");
  return point0(rank <= zero_rank_ ? Integer(rank - 1) : rank);
}

LatticeVector LevelGrid::least_nonzero() const { return unrank(Integer(1)); }

LatticeVector essential_witness(const DomainFamily& family, const LatticeVector& h,
                                const std::vector<int>& indices, int depth_budget) {
  LatticeVector g(h.dim());
  bool any_nonzero = false;
  for (int i : indices) {
    if (i > depth_budget) throw DepthBudgetExceeded("witness index beyond the depth budget");
    LatticeVector th = theta(family, i, h);
    if (!th.is_zero()) {
      any_nonzero = true;
      continue;
    }
    g += LevelGrid(family, i).least_nonzero();
  }
  if (!any_nonzero) {
    throw InvalidArgument("every selected theta component of " + h.str() + " vanishes");
  }
  return g;
}

}  // namespace toeplitz_forge
