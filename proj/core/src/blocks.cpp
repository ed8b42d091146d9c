#include "toeplitz_forge/blocks.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "toeplitz_forge/errors.hpp"

namespace toeplitz_forge {
namespace {

// Lexicographic rank of a permutation of {0,1,2} fixing one position, never the identity.
// Positions are relative to a tail of three starting at size−3.
std::optional<Integer> fixing_rank(const Integer& size, const Integer& fixed) {
  if (size < 3) return std::nullopt;
  if (fixed < size - 2) return Integer(1);  // swap the last two
  if (fixed == size - 1) return Integer(2);  // [1,0,2]
  return Integer(5);                         // [2,1,0]
}

Integer magnitude_cap(const Magnitude& m) {
  return m.exact ? *m.exact : Integer(-1);
}

bool within(const Magnitude& size, const Integer& j) {
  if (size.exact) return j <= *size.exact;
  return true;  // symbolic sizes exceed every representable index
}

}  // namespace

LehmerPermutation::LehmerPermutation(const Integer& rank, const Integer& size)
    : rank_(rank), size_(size) {
  if (size < 1) throw InvalidArgument("permutation size must be positive");
  if (rank < 0) throw InvalidArgument("permutation rank must be nonnegative");
  std::size_t L = 1;
  Integer fact = 1;  // L!
  while (fact <= rank) {
    ++L;
    fact *= static_cast<unsigned long>(L);
    if (L > kLehmerTailLimit) {
      throw DepthBudgetExceeded("permutation rank needs a tail beyond " +
                                std::to_string(kLehmerTailLimit) + " positions");
    }
  }
  if (Integer(static_cast<unsigned long>(L)) > size) {
    throw InvalidArgument("permutation rank " + rank.get_str(10) + " exceeds (" + size.get_str(10) + ")!");
  }
  offset_ = size - static_cast<unsigned long>(L);
  // Factoradic digits, least significant first.
  std::vector<std::uint32_t> digits(L);
  Integer r = rank;
  for (std::size_t i = 1; i <= L; ++i) {
    digits[L - i] = static_cast<std::uint32_t>(mpz_fdiv_ui(r.get_mpz_t(), static_cast<unsigned long>(i)));
    mpz_fdiv_q_ui(r.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(i));
  }
  std::vector<std::uint32_t> pool(L);
  std::iota(pool.begin(), pool.end(), 0u);
  tail_.resize(L);
  inverse_tail_.resize(L);
  for (std::size_t p = 0; p < L; ++p) {
    tail_[p] = pool[digits[p]];
    pool.erase(pool.begin() + digits[p]);
    inverse_tail_[tail_[p]] = static_cast<std::uint32_t>(p);
  }
}

Integer LehmerPermutation::operator()(const Integer& position) const {
  if (position < 0 || position >= size_) throw InvalidArgument("position out of range");
  if (position < offset_) return position;
  Integer local = position - offset_;
  return offset_ + tail_[local.get_ui()];
}

Integer LehmerPermutation::inverse(const Integer& value) const {
  if (value < 0 || value >= size_) throw InvalidArgument("value out of range");
  if (value < offset_) return value;
  Integer local = value - offset_;
  return offset_ + inverse_tail_[local.get_ui()];
}

Integer lehmer_rank(const std::vector<std::uint64_t>& perm) {
  const std::size_t n = perm.size();
  std::vector<bool> seen(n, false);
  for (auto v : perm) {
    if (v >= n || seen[v]) throw InvalidArgument("not a permutation");
    seen[v] = true;
  }
  Integer r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    unsigned long smaller = 0;
    for (std::size_t k = i + 1; k < n; ++k) {
      if (perm[k] < perm[i]) ++smaller;
    }
    r = r * static_cast<unsigned long>(n - i) + smaller;
  }
  return r;
}

const LehmerPermutation& EvalCache::permutation(int level, const Integer& index, const Integer& rank,
                                                const Integer& size) {
  auto key = std::make_pair(level, index.get_str(16));
  auto it = perms_.find(key);
  if (it == perms_.end()) {
    it = perms_.emplace(key, std::make_unique<LehmerPermutation>(rank, size)).first;
  }
  return *it->second;
}

PermutationFamily PermutationFamily::full_symmetric(int level, const Integer& m) {
  if (m < 1) throw InvalidArgument("permutation domain must be nonempty");
  PermutationFamily f;
  f.level_ = level;
  f.kind_ = FamilyKind::kFullSymmetric;
  f.m_ = m;
  if (m.fits_ulong_p() && m.get_ui() <= 100000) {
    Integer fact;
    mpz_fac_ui(fact.get_mpz_t(), m.get_ui());
    f.size_ = Magnitude::of(fact);
  } else {
    f.size_ = Magnitude::symbolic(Interval::of(Integer(m + 1)).lngamma());
  }
  return f;
}

PermutationFamily PermutationFamily::hybrid(int level, const Integer& m, const Magnitude& size) {
  if (m < 1) throw InvalidArgument("permutation domain must be nonempty");
  PermutationFamily f;
  f.level_ = level;
  f.kind_ = FamilyKind::kHybrid;
  f.m_ = m;
  f.size_ = size;
  if (size.exact && *size.exact < m) {
    throw InvalidArgument("a hybrid family needs at least one member per target");
  }
  return f;
}

PermutationFamily PermutationFamily::explicit_lists(int level, const Integer& m,
                                                    std::vector<std::vector<std::uint64_t>> lists) {
  if (m < 1 || !m.fits_ulong_p()) throw InvalidArgument("explicit families need a small domain");
  const std::uint64_t mm = m.get_ui();
  if (lists.empty()) throw InvalidArgument("explicit family is empty");
  std::set<std::vector<std::uint64_t>> distinct;
  for (std::size_t j = 0; j < lists.size(); ++j) {
    const auto& list = lists[j];
    if (list.size() != mm) throw InvalidArgument("permutation list has the wrong length");
    std::vector<bool> seen(mm, false);
    for (auto v : list) {
      if (v < 2 || v > mm + 1 || seen[v - 2]) {
        throw InvalidArgument("list " + std::to_string(j + 1) + " at level " + std::to_string(level) +
                              " is not a bijection onto 2.." + std::to_string(mm + 1));
      }
      seen[v - 2] = true;
    }
    if (!distinct.insert(list).second) {
      throw InvalidArgument("duplicate permutation at level " + std::to_string(level));
    }
  }
  for (std::uint64_t r = 1; r <= mm; ++r) {
    if (lists[0][r - 1] != r + 1) throw InvalidArgument("the first member must be the base r -> r+1");
  }
  PermutationFamily f;
  f.level_ = level;
  f.kind_ = FamilyKind::kExplicit;
  f.m_ = m;
  f.size_ = Magnitude::of(Integer(static_cast<unsigned long>(lists.size())));
  f.lists_ = std::move(lists);
  return f;
}

PermutationFamily PermutationFamily::base_only(int level, const Integer& m) {
  PermutationFamily f;
  f.level_ = level;
  f.kind_ = FamilyKind::kHybrid;
  f.base_only_ = true;
  f.m_ = m;
  f.size_ = Magnitude::of(Integer(1));
  return f;
}

bool PermutationFamily::has_index(const Integer& j) const {
  return j >= 1 && within(size_, j);
}

Integer PermutationFamily::eval(const Integer& j, const Integer& r, EvalCache* cache) const {
  if (r < 1 || r > m_) throw InvalidArgument("rank " + r.get_str(10) + " outside 1.." + m_.get_str(10));
  if (!has_index(j)) {
    throw InvalidArgument("index " + j.get_str(10) + " outside the level-" + std::to_string(level_) + " family");
  }
  if (j == 1) return r + 1;
  switch (kind_) {
    case FamilyKind::kFullSymmetric: {
      Integer rank = j - 1;
      if (cache) return cache->permutation(level_, j, rank, m_)(r - 1) + 2;
      return LehmerPermutation(rank, m_)(r - 1) + 2;
    }
    case FamilyKind::kHybrid: {
      if (j <= m_) return floor_mod(r - 1 + j - 1, m_) + 2;
      if (r == 1) return Integer(2);
      Integer rank = j - m_;
      Integer size = m_ - 1;
      if (cache) return cache->permutation(level_, j, rank, size)(r - 2) + 3;
      return LehmerPermutation(rank, size)(r - 2) + 3;
    }
    case FamilyKind::kExplicit:
      return Integer(static_cast<unsigned long>(lists_[j.get_ui() - 1][r.get_ui() - 1]));
  }
  throw InvalidArgument("unknown family kind");
}

std::optional<Integer> PermutationFamily::index_for(const Integer& r, const Integer& target,
                                                    bool require_nonbase) const {
  if (r < 1 || r > m_) throw InvalidArgument("rank outside the family domain");
  if (target < 2 || target > m_ + 1) throw InvalidArgument("target outside 2..m+1");
  if (target == r + 1 && !require_nonbase) return Integer(1);
  if (base_only_) return std::nullopt;
  auto accept = [&](const Integer& j) -> std::optional<Integer> {
    if (has_index(j)) return j;
    return std::nullopt;
  };
  switch (kind_) {
    case FamilyKind::kFullSymmetric: {
      Integer u = r - 1, v = target - 2;
      if (u == v) {
        auto rank = fixing_rank(m_, u);
        if (!rank) return std::nullopt;
        return accept(*rank + 1);
      }
      // Rotate the segment between u and v so that u lands on v.
      Integer lo = std::min(u, v);
      Integer tail_len = m_ - lo;
      if (!tail_len.fits_ulong_p() || tail_len.get_ui() > kLehmerTailLimit) {
        throw DepthBudgetExceeded("rotation spans more than " + std::to_string(kLehmerTailLimit) + " positions");
      }
      const std::uint64_t L = tail_len.get_ui();
      const std::uint64_t a = Integer(u - lo).get_ui(), b = Integer(v - lo).get_ui();
      std::vector<std::uint64_t> tail(L);
      std::iota(tail.begin(), tail.end(), 0);
      tail[a] = b;
      if (a < b) {
        for (std::uint64_t i = a + 1; i <= b; ++i) tail[i] = i - 1;
      } else {
        for (std::uint64_t i = b; i < a; ++i) tail[i] = i + 1;
      }
      return accept(lehmer_rank(tail) + 1);
    }
    case FamilyKind::kHybrid: {
      Integer cyclic = floor_mod(target - 2 - (r - 1), m_) + 1;
      if (cyclic >= 2) return accept(cyclic);
      // The only cyclic member is the base; use a tail member fixing rank 1 ↦ 2.
      if (r == 1) return accept(m_ + 1);
      auto rank = fixing_rank(m_ - 1, r - 2);
      if (!rank) return std::nullopt;
      return accept(m_ + *rank);
    }
    case FamilyKind::kExplicit: {
      const std::uint64_t rr = r.get_ui(), t = target.get_ui();
      for (std::size_t j = require_nonbase ? 1 : 0; j < lists_.size(); ++j) {
        if (lists_[j][rr - 1] == t) return Integer(static_cast<unsigned long>(j + 1));
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

PermutationFamily::Coverage PermutationFamily::coverage() const {
  Coverage c;
  if (base_only_) {
    c.passed = m_ <= 1;
    c.method = "base index only";
    if (!c.passed) c.missing = std::make_pair(Integer(1), Integer(3));
    return c;
  }
  switch (kind_) {
    case FamilyKind::kFullSymmetric:
      c.method = "full symmetric group on m >= 3 ranks";
      c.passed = m_ >= 3 && (size_.exact || size_.log.finite());
      if (!c.passed) c.missing = std::make_pair(Integer(1), Integer(2));
      return c;
    case FamilyKind::kHybrid: {
      c.method = "cyclic shifts and tail members at offsets 1, 2, 5";
      // The cyclic pairs need q ≥ m; the pairs (r, r+1) are decided by r ∈ {1, 2, m−1, m}.
      if (size_.exact && *size_.exact < m_) {
        c.missing = std::make_pair(Integer(1), *size_.exact + 2);
        return c;
      }
      for (const Integer& r : {Integer(1), Integer(2), Integer(m_ - 1), m_}) {
        if (r < 1 || r > m_) continue;
        if (!index_for(r, r + 1, true)) {
          c.missing = std::make_pair(r, Integer(r + 1));
          return c;
        }
      }
      c.passed = true;
      return c;
    }
    case FamilyKind::kExplicit: {
      c.method = "exhaustive scan of the non-base lists";
      const std::uint64_t mm = m_.get_ui();
      for (std::uint64_t r = 1; r <= mm; ++r) {
        std::vector<bool> hit(mm + 2, false);
        for (std::size_t j = 1; j < lists_.size(); ++j) hit[lists_[j][r - 1]] = true;
        for (std::uint64_t t = 2; t <= mm + 1; ++t) {
          if (!hit[t]) {
            c.missing = std::make_pair(Integer(static_cast<unsigned long>(r)), Integer(static_cast<unsigned long>(t)));
            return c;
          }
        }
      }
      c.passed = true;
      return c;
    }
  }
  return c;
}

Letter Patch::at(const LatticeVector& g) const {
  return letters[box.offset_of(g).get_ui()];
}

Construction::Construction(std::uint64_t alphabet_size, DomainFamily family,
                           std::vector<Magnitude> block_count, std::vector<PermutationFamily> families)
    : alphabet_size_(alphabet_size),
      family_(std::move(family)),
      block_count_(std::move(block_count)),
      families_(std::move(families)) {
  if (alphabet_size_ < 2) throw InvalidArgument("alphabet needs at least two letters");
  if (family_.first_index() != 0) throw InvalidArgument("constructions use families starting at level 0");
  if (families_.empty()) throw InvalidArgument("at least one permutation family is required");
  if (block_count_.size() != families_.size() + 1) {
    throw InvalidArgument("block counts must cover levels 0..L+1");
  }
  if (family_.last_index() < static_cast<int>(families_.size())) {
    throw InvalidArgument("domain family too shallow for the permutation families");
  }
  grids_.resize(families_.size() + 1);
  for (std::size_t n = 1; n <= families_.size(); ++n) {
    const int lvl = static_cast<int>(n);
    if (family_.is_exact(lvl) && family_.is_exact(lvl - 1)) grids_[n].emplace(family_, lvl);
  }
}

std::shared_ptr<const Construction> Construction::from_plan(const ConstructionPlan& plan) {
  DomainFamily family = build_family(plan);
  std::vector<PermutationFamily> families;
  const int L = plan.levels();
  for (int n = 1; n <= L; ++n) {
    const Magnitude& q_prev = plan.block_count[n - 1];
    if (!q_prev.exact) throw DepthBudgetExceeded("family domain at level " + std::to_string(n) + " is symbolic");
    Integer m = *q_prev.exact - 1;
    switch (plan.family_kinds[n - 1]) {
      case FamilyKind::kFullSymmetric: {
        PermutationFamily f = PermutationFamily::full_symmetric(n, m);
        const Magnitude& q = plan.block_count[n];
        if (f.size().exact && q.exact && *f.size().exact != *q.exact) {
          throw InvalidArgument("full symmetric level " + std::to_string(n) + " needs q_n = (q_{n-1}-1)!");
        }
        families.push_back(std::move(f));
        break;
      }
      case FamilyKind::kHybrid:
        families.push_back(PermutationFamily::hybrid(n, m, plan.block_count[n]));
        break;
      case FamilyKind::kExplicit: {
        PermutationFamily f = PermutationFamily::explicit_lists(n, m, plan.family_lists[n - 1]);
        if (!plan.block_count[n].exact || *f.size().exact != *plan.block_count[n].exact) {
          throw InvalidArgument("explicit list count differs from q_n at level " + std::to_string(n));
        }
        families.push_back(std::move(f));
        break;
      }
    }
  }
  const Magnitude& q_top = plan.block_count[L];
  Integer m_top = q_top.exact ? Integer(*q_top.exact - 1) : Integer(-1);
  families.push_back(PermutationFamily::base_only(L + 1, m_top));
  std::vector<Magnitude> counts = plan.block_count;
  counts.push_back(Magnitude::of(Integer(1)));  // only the base block above the plan
  return std::make_shared<const Construction>(plan.alphabet_size, std::move(family), std::move(counts),
                                              std::move(families));
}

const PermutationFamily& Construction::permutations(int n) const {
  if (n < 1 || n > static_cast<int>(families_.size())) {
    throw DepthBudgetExceeded("no permutation family at level " + std::to_string(n));
  }
  return families_[static_cast<std::size_t>(n - 1)];
}

const LevelGrid& Construction::grid(int n) const {
  if (n < 1 || n >= static_cast<int>(grids_.size()) || !grids_[static_cast<std::size_t>(n)]) {
    throw DepthBudgetExceeded("level " + std::to_string(n) + " grid is not exact");
  }
  return *grids_[static_cast<std::size_t>(n)];
}

Integer Construction::sigma_eval(int n, const Integer& j, const LatticeVector& gamma,
                                 EvalCache* cache) const {
  return permutations(n).eval(j, domain_rank(n, gamma), cache);
}

Letter Construction::block_eval(int n, const Integer& j, const LatticeVector& h, EvalCache* cache) const {
  if (n < 0 || n > levels() + 1) throw DepthBudgetExceeded("block level " + std::to_string(n) + " not planned");
  auto inside = family_.contains(n, h);
  if (!inside || !*inside) throw InvalidArgument("point " + h.str() + " is not in D_" + std::to_string(n));
  Integer index = j;
  LatticeVector cell = h;
  for (int level = n; level > 0; --level) {
    const PermutationFamily& fam = permutations(level);
    if (!fam.has_index(index)) {
      throw InvalidArgument("index " + index.get_str(10) + " outside the level-" + std::to_string(level) + " family");
    }
    LatticeVector below = family_.project(level - 1, cell);
    LatticeVector gamma = cell - below;
    index = gamma.is_zero() ? Integer(1) : fam.eval(index, domain_rank(level, gamma), cache);
    cell = std::move(below);
  }
  if (index < 1 || Integer(static_cast<unsigned long>(alphabet_size_)) < index) {
    throw InvalidArgument("level-0 index out of alphabet");
  }
  return static_cast<Letter>(index.get_ui() - 1);
}

Patch Construction::materialize(int n, const Integer& j, std::uint64_t cell_budget) const {
  FundamentalDomain dom = family_.domain(n);
  if (dom.cardinality() > cell_budget) {
    throw BudgetExceeded("block of " + dom.cardinality().get_str(10) + " cells exceeds the cell budget");
  }
  Patch p{dom, {}};
  p.letters.reserve(dom.cardinality().get_ui());
  EvalCache cache;
  dom.for_each_point([&](const LatticeVector& h) { p.letters.push_back(block_eval(n, j, h, &cache)); });
  return p;
}

}  // namespace toeplitz_forge
