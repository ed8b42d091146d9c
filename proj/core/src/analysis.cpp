#include "toeplitz_forge/analysis.hpp"

#include <algorithm>
#include <set>

#include <gmpxx.h>

#include "toeplitz_forge/errors.hpp"

namespace toeplitz_forge {
namespace {

constexpr std::uint64_t kPositionLimit = 100000000;

// Row-major offsets inside a fixed box.
class BoxIndexer {
 public:
  explicit BoxIndexer(const FundamentalDomain& box) : box_(box), stride_(box.dim()) {
    std::int64_t s = 1;
    for (std::size_t i = box.dim(); i-- > 0;) {
      stride_[i] = s;
      s *= static_cast<std::int64_t>(box.sides()[i].get_si());
    }
  }

  std::int64_t offset(const LatticeVector& p) const {
    std::int64_t o = 0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
      o += static_cast<std::int64_t>(Integer(p[i] - box_.lower()[i]).get_si()) * stride_[i];
    }
    return o;
  }

  // Offsets of the cells of inner + shift, in the row-major order of inner.
  std::vector<std::int64_t> cells(const FundamentalDomain& inner, const LatticeVector& shift) const {
    std::vector<std::int64_t> out;
    out.reserve(inner.cardinality().get_ui());
    const std::int64_t base = offset(inner.lower() + shift);
    inner.for_each_point([&](const LatticeVector& d) { out.push_back(offset(d - inner.lower() + box_.lower())); });
    for (auto& o : out) o += base;
    return out;
  }

 private:
  FundamentalDomain box_;
  std::vector<std::int64_t> stride_;
};

std::vector<Letter> gather(const std::vector<Letter>& letters, const std::vector<std::int64_t>& cells) {
  std::vector<Letter> out(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) out[i] = letters[static_cast<std::size_t>(cells[i])];
  return out;
}

std::vector<std::int64_t> shifted(const std::vector<std::int64_t>& cells, std::int64_t by) {
  std::vector<std::int64_t> out = cells;
  for (auto& c : out) c += by;
  return out;
}

void check_budget(const Integer& cells, std::uint64_t budget, const char* what) {
  if (cells > Integer(static_cast<unsigned long>(budget))) {
    throw BudgetExceeded(std::string(what) + " of " + cells.get_str(10) + " cells exceeds the cell budget");
  }
}

const ConstructionSource& underlying_construction(const ArrayHandle& handle, std::uint64_t* divisor) {
  if (const auto* cs = handle.construction_source()) {
    if (divisor) *divisor = 1;
    return *cs;
  }
  if (const auto* sub = dynamic_cast<const SubstitutedSource*>(&handle.source())) {
    const ConstructionSource* cs = sub->inner().construction_source();
    if (cs) {
      if (divisor) *divisor = sub->map().cells();
      return *cs;
    }
  }
  throw InvalidArgument("operation needs a construction or a substitution of one");
}

}  // namespace

std::vector<LatticeVector> aligned_positions(const DomainFamily& family, int t, int s) {
  if (t > s) throw InvalidArgument("aligned positions need t <= s");
  FundamentalDomain box = family.domain(s);
  DiagonalMatrix step = family.period(t);
  const std::size_t d = family.dim();
  std::vector<Integer> first(d), count(d);
  Integer total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    first[i] = ceil_div(box.lower()[i], step[i]);
    Integer last = floor_div(box.lower()[i] + box.sides()[i] - 1, step[i]);
    count[i] = last >= first[i] ? Integer(last - first[i] + 1) : Integer(0);
    total *= count[i];
  }
  if (total > Integer(static_cast<unsigned long>(kPositionLimit))) {
    throw BudgetExceeded(total.get_str(10) + " aligned positions exceed the enumeration limit");
  }
  std::vector<LatticeVector> out;
  out.reserve(total.get_ui());
  if (total == 0) return out;
  FundamentalDomain multipliers(0, LatticeVector(first), count);
  multipliers.for_each_point([&](const LatticeVector& z) { out.push_back(step.apply(z)); });
  return out;
}

SymbolBlock read_block(const ArrayHandle& handle, int t, const LatticeVector& offset) {
  SymbolBlock b{t, handle.family().domain(t), {}};
  b.letters.reserve(b.domain.cardinality().get_ui());
  EvalCache cache;
  b.domain.for_each_point([&](const LatticeVector& d) { b.letters.push_back(handle(d + offset, &cache)); });
  return b;
}

std::optional<std::size_t> Census::index_of(const std::vector<Letter>& letters) const {
  auto it = index_.find(letters);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Census::add(std::vector<Letter> letters) {
  auto it = index_.find(letters);
  if (it != index_.end()) return it->second;
  const std::size_t id = blocks_.size();
  index_.emplace(letters, id);
  blocks_.push_back(SymbolBlock{level_, domain_, std::move(letters)});
  return id;
}

Census census(const ArrayHandle& handle, int t, const CensusOptions& options) {
  const DomainFamily& family = handle.family();
  if (!family.has_level(t)) throw InvalidArgument("census level outside the family");
  FundamentalDomain dt = family.domain(t);
  int window = -1;
  if (options.window_level) {
    window = *options.window_level;
    if (window < t) throw InvalidArgument("census window below the block level");
    check_budget(family.domain(window).cardinality(), options.cell_budget, "census window");
  } else {
    for (int w : {t + 2, t + 1}) {
      if (family.has_level(w) && family.is_exact(w) &&
          family.domain(w).cardinality() <= Integer(static_cast<unsigned long>(options.cell_budget))) {
        window = w;
        break;
      }
    }
    if (window < 0) throw BudgetExceeded("no census window within the cell budget at level " + std::to_string(t));
  }
  FundamentalDomain dw = family.domain(window);
  const LatticeVector align = family.project(t, handle.translation());
  Patch p = patch(handle, dw.translated(-align), PatchOptions{options.cell_budget, options.threads});
  BoxIndexer idx(dw);
  const std::vector<std::int64_t> base = idx.cells(dt, LatticeVector(family.dim()));
  const std::int64_t zero = idx.offset(LatticeVector(family.dim()));
  Census out(t, dt);
  std::vector<LatticeVector> positions = aligned_positions(family, t, window);
  for (const auto& gamma : positions) {
    out.add(gather(p.letters, shifted(base, idx.offset(gamma) - zero)));
  }
  out.set_window(window, Integer(static_cast<unsigned long>(positions.size())));
  return out;
}

Magnitude census_count(const ArrayHandle& handle, int t) {
  const Construction& c = underlying_construction(handle, nullptr).construction();
  if (t < 0 || t > c.levels() + 1) throw DepthBudgetExceeded("no block count at level " + std::to_string(t));
  return c.block_count(t);
}

Rational ap(const DomainFamily& family, const SymbolBlock& B, const SymbolBlock& C) {
  const int t = B.level, s = C.level;
  if (t > s) throw InvalidArgument("ap needs the pattern level at most the block level");
  if (!(B.domain == family.domain(t)) || !(C.domain == family.domain(s))) {
    throw InvalidArgument("blocks do not match the domain family");
  }
  BoxIndexer idx(C.domain);
  const std::vector<std::int64_t> base = idx.cells(B.domain, LatticeVector(family.dim()));
  const std::int64_t zero = idx.offset(LatticeVector(family.dim()));
  std::vector<LatticeVector> positions = aligned_positions(family, t, s);
  if (positions.empty()) throw InvalidArgument("no aligned positions");
  unsigned long hits = 0;
  for (const auto& gamma : positions) {
    const std::int64_t by = idx.offset(gamma) - zero;
    bool match = true;
    for (std::size_t i = 0; i < base.size() && match; ++i) {
      match = C.letters[static_cast<std::size_t>(base[i] + by)] == B.letters[i];
    }
    if (match) ++hits;
  }
  Rational r(Integer(hits), Integer(static_cast<unsigned long>(positions.size())));
  r.canonicalize();
  return r;
}

FrequencyReport frequency_table(const DomainFamily& family, std::vector<SymbolBlock> rows,
                                std::vector<SymbolBlock> columns) {
  if (rows.empty() || columns.empty()) throw InvalidArgument("frequency table needs rows and columns");
  FrequencyReport r;
  r.t = rows.front().level;
  r.s = columns.front().level;
  r.rows = std::move(rows);
  r.columns = std::move(columns);
  r.passed = true;
  bool first = true;
  for (std::size_t b = 0; b < r.rows.size(); ++b) {
    std::vector<Rational> row;
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
      Rational v = ap(family, r.rows[b], r.columns[c]);
      if (first || v < r.min) r.min = v;
      if (first || v > r.max) r.max = v;
      first = false;
      if (r.passed && c > 0 && v != row.front()) {
        r.passed = false;
        r.witness = std::array<std::size_t, 3>{b, 0, c};
      }
      row.push_back(v);
    }
    r.table.push_back(std::move(row));
  }
  return r;
}

FrequencyReport unique_ergodicity_probe(const ArrayHandle& handle, int t, const ProbeOptions& options) {
  const DomainFamily& family = handle.family();
  Census rows = census(handle, t, options.census);
  LevelGrid grid(family, t + 2);
  std::set<Integer> ranks;
  if (grid.size() <= Integer(static_cast<unsigned long>(options.samples))) {
    for (Integer r = 0; r < grid.size(); ++r) ranks.insert(r);
  } else {
    ranks = {Integer(0), Integer(grid.size() - 1), grid.zero_rank0()};
    gmp_randclass rng(gmp_randinit_mt);
    rng.seed(static_cast<unsigned long>(options.seed));
    while (ranks.size() < options.samples) ranks.insert(rng.get_z_range(grid.size()));
  }
  const LatticeVector align = family.project(t + 1, handle.translation());
  std::vector<SymbolBlock> columns;
  std::vector<LatticeVector> where;
  for (const auto& rank : ranks) {
    LatticeVector gamma = grid.point0(rank);
    columns.push_back(read_block(handle, t + 1, gamma - align));
    where.push_back(gamma);
  }
  FrequencyReport r = frequency_table(family, rows.blocks(), std::move(columns));
  r.column_positions = std::move(where);
  return r;
}

std::vector<EntropyEstimate> handle_entropy_estimates(const ArrayHandle& handle) {
  std::uint64_t divisor = 1;
  const ConstructionSource& cs = underlying_construction(handle, &divisor);
  if (!cs.plan()) throw InvalidArgument("entropy estimates need the plan behind the construction");
  return entropy_estimates(*cs.plan(), divisor);
}

Rational birkhoff(const ArrayHandle& handle, const Patch& A, const LatticeVector& g, int n,
                  std::uint64_t cell_budget) {
  FundamentalDomain dn = handle.family().domain(n);
  std::vector<Integer> sides(dn.dim());
  for (std::size_t i = 0; i < dn.dim(); ++i) sides[i] = dn.sides()[i] + A.box.sides()[i] - 1;
  FundamentalDomain window(0, dn.lower() + g + A.box.lower(), sides);
  check_budget(window.cardinality() + dn.cardinality() * A.box.cardinality(), cell_budget, "Birkhoff window");
  Patch p = patch(handle, window, PatchOptions{cell_budget, 1});
  BoxIndexer idx(window);
  const std::vector<std::int64_t> pattern = idx.cells(A.box, dn.lower() + g);
  const std::int64_t origin = idx.offset(dn.lower() + g + A.box.lower());
  unsigned long hits = 0;
  dn.for_each_point([&](const LatticeVector& d) {
    const std::int64_t by = idx.offset(d + g + A.box.lower()) - origin;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      if (p.letters[static_cast<std::size_t>(pattern[i] + by)] != A.letters[i]) return;
    }
    ++hits;
  });
  Rational r(Integer(hits), dn.cardinality());
  r.canonicalize();
  return r;
}

Rational psi_quantity(const ArrayHandle& handle, int t, int n, const SymbolBlock& B, const LatticeVector& g,
                      std::uint64_t cell_budget) {
  const DomainFamily& family = handle.family();
  if (B.level != t || !(B.domain == family.domain(t))) throw InvalidArgument("pattern is not a level-t block");
  DomainFamily::InteriorRest ir = family.interior_rest(t, n, g);
  if (ir.interior_size == 0) throw InvalidArgument("no interior positions");
  FundamentalDomain window = family.domain(n).translated(g);
  check_budget(window.cardinality(), cell_budget, "window");
  Patch p = patch(handle, window, PatchOptions{cell_budget, 1});
  BoxIndexer idx(window);
  const std::vector<std::int64_t> base = idx.cells(B.domain, LatticeVector(family.dim()));
  const std::int64_t zero = idx.offset(LatticeVector(family.dim()));
  unsigned long hits = 0;
  for_each_interior_point(family, t, ir, [&](const LatticeVector& gamma) {
    const std::int64_t by = idx.offset(gamma) - zero;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (p.letters[static_cast<std::size_t>(base[i] + by)] != B.letters[i]) return;
    }
    ++hits;
  });
  Rational r(Integer(hits), ir.interior_size);
  r.canonicalize();
  return r;
}

SymbolBlock substitute_block(const SubstitutionMap& map, const DomainFamily& substituted, const SymbolBlock& B) {
  SymbolBlock out{B.level, substituted.domain(B.level), {}};
  const Integer side = static_cast<unsigned long>(map.side());
  BoxIndexer idx(B.domain);
  out.letters.reserve(out.domain.cardinality().get_ui());
  out.domain.for_each_point([&](const LatticeVector& p) {
    LatticeVector d = p;
    std::uint64_t cell = 0;
    for (std::size_t i = 0; i < p.dim(); ++i) {
      d[i] = floor_div(p[i], side);
      cell = cell * map.side() + Integer(p[i] - d[i] * side).get_ui();
    }
    out.letters.push_back(map.image(B.letters[static_cast<std::size_t>(idx.offset(d))], cell));
  });
  return out;
}

}  // namespace toeplitz_forge
