#include "toeplitz_forge/toeplitz.hpp"

#include <algorithm>
#include <exception>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "toeplitz_forge/errors.hpp"

namespace toeplitz_forge {
namespace {

LatticeVector zero_vector(std::size_t d) { return LatticeVector(std::vector<Integer>(d, Integer(0))); }

LatticeVector scaled(const LatticeVector& v, std::uint64_t s) {
  LatticeVector r = v;
  for (std::size_t i = 0; i < r.dim(); ++i) r[i] *= static_cast<unsigned long>(s);
  return r;
}

bool checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t* out) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) return false;
    r *= base;
  }
  *out = r;
  return true;
}

const ConstructionSource& require_construction(const ArrayHandle& handle) {
  const ConstructionSource* cs = handle.construction_source();
  if (!cs) throw InvalidArgument("operation needs an array backed by a construction");
  return *cs;
}

DomainFamily substituted_family(const DomainFamily& inner, std::uint64_t side) {
  if (inner.first_index() != 0) throw InvalidArgument("substitution needs a family starting at level 0");
  const std::size_t d = inner.dim();
  std::vector<LevelGeometry> levels;
  LevelGeometry trivial;
  trivial.axes.assign(d, AxisSpan{true, Integer(1), Integer(0), 0});
  levels.push_back(trivial);
  for (int n = 0; n <= inner.last_index(); ++n) {
    LevelGeometry lg = inner.level(n);
    for (auto& a : lg.axes) {
      if (a.exact) {
        a.period *= static_cast<unsigned long>(side);
        a.lower *= static_cast<unsigned long>(side);
      }
    }
    levels.push_back(std::move(lg));
  }
  return DomainFamily(d, -1, std::move(levels));
}

}  // namespace

ConstructionSource::ConstructionSource(std::shared_ptr<const Construction> construction,
                                       std::shared_ptr<const ConstructionPlan> plan)
    : construction_(std::move(construction)), plan_(std::move(plan)) {
  if (!construction_) throw InvalidArgument("construction is required");
}

Letter ConstructionSource::eval(const LatticeVector& g, EvalCache* cache) const {
  return x_eval(*construction_, g, cache);
}

bool ConstructionSource::periodic(const LatticeVector& g, int n) const {
  return has_zero_component(family(), g, n, depth_budget());
}

FunctionSource::FunctionSource(std::uint64_t alphabet_size, DomainFamily family,
                               std::function<Letter(const LatticeVector&)> fn)
    : alphabet_size_(alphabet_size), family_(std::move(family)), fn_(std::move(fn)) {
  if (alphabet_size_ < 2) throw InvalidArgument("alphabet needs at least two letters");
}

Letter FunctionSource::eval(const LatticeVector& g, EvalCache*) const {
  Letter a = fn_(g);
  if (a >= alphabet_size_) throw InvalidArgument("function value outside the alphabet");
  return a;
}

bool FunctionSource::periodic(const LatticeVector& g, int n) const {
  return has_zero_component(family_, g, n, depth_budget());
}

ArrayHandle::ArrayHandle(std::shared_ptr<const ArraySource> source, LatticeVector translation)
    : source_(std::move(source)), translation_(std::move(translation)) {
  if (!source_) throw InvalidArgument("array source is required");
  if (translation_.dim() == 0) translation_ = zero_vector(source_->family().dim());
  if (translation_.dim() != source_->family().dim()) throw InvalidArgument("translation has the wrong dimension");
}

ArrayHandle ArrayHandle::from_plan(const ConstructionPlan& plan, int depth_budget) {
  auto plan_ptr = std::make_shared<const ConstructionPlan>(plan);
  auto construction = std::make_shared<Construction>(*Construction::from_plan(*plan_ptr));
  construction->set_depth_budget(depth_budget);
  ArrayHandle handle(std::make_shared<const ConstructionSource>(std::move(construction), plan_ptr));
  if (plan.substitution) {
    return substitute(handle, SubstitutionMap::canonical(plan.substitution->base_alphabet,
                                                         plan.substitution->side, plan.dimension));
  }
  return handle;
}

ArrayHandle ArrayHandle::translated(const LatticeVector& g) const {
  return ArrayHandle(source_, translation_ + g);
}

Letter ArrayHandle::operator()(const LatticeVector& g, EvalCache* cache) const {
  return source_->eval(g + translation_, cache);
}

const ConstructionSource* ArrayHandle::construction_source() const {
  return dynamic_cast<const ConstructionSource*>(source_.get());
}

SubstitutionMap SubstitutionMap::canonical(std::uint64_t base_alphabet, std::uint64_t side, std::size_t dim) {
  if (base_alphabet < 2) throw InvalidArgument("substitution needs at least two target letters");
  if (side < 1 || dim < 1) throw InvalidArgument("substitution shape must be nonempty");
  SubstitutionMap m;
  m.base_ = base_alphabet;
  m.side_ = side;
  m.dim_ = dim;
  if (!checked_pow(side, dim, &m.cells_) || !checked_pow(base_alphabet, m.cells_, &m.source_alphabet_)) {
    throw InvalidArgument("substitution alphabet exceeds 64-bit letters");
  }
  // Expansion 0 1 1 ... 1.
  Letter pinned = 0;
  for (std::uint64_t c = 1; c < m.cells_; ++c) pinned = pinned * base_alphabet + 1;
  m.pinned_partner_ = pinned;
  return m;
}

SubstitutionMap SubstitutionMap::from_table(std::uint64_t base_alphabet, std::uint64_t side, std::size_t dim,
                                            std::vector<std::vector<Letter>> table) {
  SubstitutionMap m = canonical(base_alphabet, side, dim);
  if (table.size() != m.source_alphabet_) {
    throw InvalidArgument("substitution table needs one block per source letter");
  }
  std::set<std::vector<Letter>> seen;
  for (const auto& block : table) {
    if (block.size() != m.cells_) throw InvalidArgument("substitution block has the wrong size");
    for (Letter a : block) {
      if (a >= base_alphabet) throw InvalidArgument("substitution block letter outside the alphabet");
    }
    if (!seen.insert(block).second) throw InvalidArgument("substitution table is not injective");
  }
  for (std::uint64_t c = 0; c < m.cells_; ++c) {
    if (table[0][c] != (c == 0 ? 0u : 1u)) {
      throw InvalidArgument("the image of letter 0 must be 0 at the origin and 1 elsewhere");
    }
  }
  m.table_ = std::move(table);
  return m;
}

FundamentalDomain SubstitutionMap::shape() const {
  return FundamentalDomain(0, zero_vector(dim_), std::vector<Integer>(dim_, Integer(static_cast<unsigned long>(side_))));
}

Letter SubstitutionMap::image(Letter letter, std::uint64_t cell) const {
  if (letter >= source_alphabet_) throw InvalidArgument("letter outside the substitution alphabet");
  if (cell >= cells_) throw InvalidArgument("cell outside the substitution shape");
  if (!table_.empty()) return table_[letter][cell];
  Letter code = letter == 0 ? pinned_partner_ : (letter == pinned_partner_ ? 0 : letter);
  for (std::uint64_t c = cells_ - 1; c > cell; --c) code /= base_;
  return code % base_;
}

std::vector<Letter> SubstitutionMap::block(Letter letter) const {
  std::vector<Letter> out(cells_);
  for (std::uint64_t c = 0; c < cells_; ++c) out[c] = image(letter, c);
  return out;
}

SubstitutedSource::SubstitutedSource(ArrayHandle source, SubstitutionMap map)
    : source_(std::move(source)), map_(std::move(map)) {
  if (source_.dim() != map_.dim()) throw InvalidArgument("substitution shape has the wrong dimension");
  if (source_.alphabet_size() != map_.source_alphabet()) {
    throw InvalidArgument("substitution alphabet " + std::to_string(map_.source_alphabet()) +
                          " differs from the array alphabet " + std::to_string(source_.alphabet_size()));
  }
  family_ = substituted_family(source_.family(), map_.side());
}

std::pair<LatticeVector, LatticeVector> SubstitutedSource::split(const LatticeVector& g) const {
  LatticeVector f = g, gamma = g;
  const Integer side = static_cast<unsigned long>(map_.side());
  for (std::size_t i = 0; i < g.dim(); ++i) {
    gamma[i] = floor_div(g[i], side);
    f[i] = g[i] - gamma[i] * side;
  }
  return {f, gamma};
}

Letter SubstitutedSource::eval(const LatticeVector& g, EvalCache* cache) const {
  auto [f, gamma] = split(g);
  std::uint64_t cell = 0;
  for (std::size_t i = 0; i < f.dim(); ++i) cell = cell * map_.side() + f[i].get_ui();
  return map_.image(source_(gamma, cache), cell);
}

bool SubstitutedSource::periodic(const LatticeVector& g, int n) const {
  for (int i = 1; i <= n; ++i) {
    if (theta(family_, i, g).is_zero()) return true;
  }
  return false;
}

ArrayHandle substitute(const ArrayHandle& handle, SubstitutionMap map) {
  return ArrayHandle(std::make_shared<const SubstitutedSource>(handle, std::move(map)));
}

Letter x_eval(const Construction& construction, const LatticeVector& g, EvalCache* cache) {
  const DomainFamily& family = construction.family();
  int n = min_zero_level(family, g, construction.depth_budget());
  if (n - 1 > construction.levels() + 1) {
    throw DepthBudgetExceeded("point " + g.str() + " needs block level " + std::to_string(n - 1));
  }
  return construction.block_eval(n - 1, Integer(1), family.project(n - 1, g), cache);
}

Letter x_eval(const ArrayHandle& handle, const LatticeVector& g) { return handle(g); }

Patch patch(const ArrayHandle& handle, const FundamentalDomain& box, const PatchOptions& options) {
  const Integer cells = box.cardinality();
  if (cells > Integer(static_cast<unsigned long>(options.cell_budget))) {
    throw BudgetExceeded("patch of " + cells.get_str(10) + " cells exceeds the cell budget of " +
                         std::to_string(options.cell_budget));
  }
  const std::uint64_t total = cells.get_ui();
  Patch out{box, std::vector<Letter>(total)};
  const unsigned workers =
      static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(options.threads ? options.threads : 1, total)));
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](unsigned w) {
    const std::uint64_t begin = total * w / workers, end = total * (w + 1) / workers;
    EvalCache cache;
    try {
      for (std::uint64_t i = begin; i < end; ++i) {
        out.letters[i] = handle(box.point_at(Integer(static_cast<unsigned long>(i))), &cache);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

bool per_membership(const ArrayHandle& handle, const LatticeVector& g, int n) {
  return handle.source().periodic(g + handle.translation(), n);
}

LatticeVector aperiodicity_witness(const ArrayHandle& handle, const LatticeVector& g, int n, Letter alpha) {
  const Construction& c = require_construction(handle).construction();
  const DomainFamily& family = c.family();
  if (n < 1) throw InvalidArgument("witness level must be positive");
  if (alpha == 0 || alpha >= c.alphabet_size()) throw InvalidArgument("witness letter must be in 1..k-1");
  const LatticeVector base = g + handle.translation();
  Integer target = static_cast<unsigned long>(alpha + 1);
  for (int i = 1; i <= n; ++i) {
    LatticeVector th = theta(family, i, base);
    if (th.is_zero()) {
      throw InvalidArgument("theta_" + std::to_string(i) + " of " + base.str() + " vanishes");
    }
    auto j = c.permutations(i).index_for(c.domain_rank(i, th), target, i < n);
    if (!j) {
      throw CertificationFailure("level-" + std::to_string(i) + " family misses target " + target.get_str(10));
    }
    target = *j;
  }
  LatticeVector lift = family.project(n, base);
  if (target != 1) lift += c.domain_unrank(n + 1, target - 1);
  LatticeVector gamma = lift - base;
  if (!family.period(n).divides(gamma)) throw CertificationFailure("witness left the level subgroup");
  if (x_eval(c, lift) != alpha) {
    throw CertificationFailure("witness at " + lift.str() + " does not carry letter " + std::to_string(alpha));
  }
  return gamma;
}

std::optional<NonPeriodicity> nonperiodicity_witness(const ArrayHandle& handle, const LatticeVector& g, int n) {
  if (per_membership(handle, g, n)) return std::nullopt;
  const std::size_t d = handle.dim();
  if (handle.construction_source()) {
    NonPeriodicity w{zero_vector(d), {}, handle(g), 0};
    Letter alpha = w.first_letter == 1 ? 2 : 1;
    if (alpha >= handle.alphabet_size()) return std::nullopt;
    w.second = aperiodicity_witness(handle, g, n, alpha);
    w.second_letter = alpha;
    return w;
  }
  const auto* sub = dynamic_cast<const SubstitutedSource*>(&handle.source());
  if (!sub) return std::nullopt;
  auto [f, gamma] = sub->split(g + handle.translation());
  const ArrayHandle& inner = sub->inner();
  if (!inner.construction_source()) return std::nullopt;
  const SubstitutionMap& map = sub->map();
  std::uint64_t cell = 0;
  for (std::size_t i = 0; i < d; ++i) cell = cell * map.side() + f[i].get_ui();
  // Two nonzero letters whose images differ at the cell of g.
  const Letter a = 1;
  std::optional<Letter> b;
  for (Letter c = 2; c < map.source_alphabet(); ++c) {
    if (map.image(c, cell) != map.image(a, cell)) {
      b = c;
      break;
    }
  }
  if (!b) return std::nullopt;
  LatticeVector ga = aperiodicity_witness(inner, gamma, n, a);
  LatticeVector gb = aperiodicity_witness(inner, gamma, n, *b);
  NonPeriodicity w{scaled(ga, map.side()), scaled(gb, map.side()), 0, 0};
  w.first_letter = handle(g + w.first);
  w.second_letter = handle(g + w.second);
  if (w.first_letter == w.second_letter) throw CertificationFailure("substituted witnesses agree");
  return w;
}

EssentialCheck essential_period_check(const ArrayHandle& handle, int n, const LatticeVector& h) {
  EssentialCheck out;
  const DomainFamily& family = handle.family();
  if (family.period(n).divides(h)) {
    out.verdict = Verdict::kTrue;
    out.trivial = true;
    out.detail = "h lies in the level subgroup";
    return out;
  }
  if (handle.construction_source()) {
    std::vector<int> indices;
    for (int i = 1; i <= n; ++i) indices.push_back(i);
    LatticeVector base = essential_witness(family, h, indices, handle.source().depth_budget());
    out.witness = base - handle.translation();
    out.alpha = handle(out.witness);
    if (!per_membership(handle, out.witness, n)) throw CertificationFailure("essential witness is not periodic");
    out.shifted_evidence = nonperiodicity_witness(handle, out.witness + h, n);
    out.verdict = out.shifted_evidence ? Verdict::kTrue : Verdict::kMaybe;
    out.detail = out.shifted_evidence ? "shifted witness is not periodic" : "no aperiodicity witness for the shift";
    return out;
  }
  const auto* sub = dynamic_cast<const SubstitutedSource*>(&handle.source());
  if (!sub) {
    out.detail = "witness search needs a construction or a substitution of one";
    return out;
  }
  const std::uint64_t side = sub->map().side();
  auto [fh, gh] = sub->split(h);
  const ArrayHandle& inner = sub->inner();
  if (inner.family().period(n).divides(gh)) {
    // Both g and g + h are periodic, carrying [S(0)](0) = 0 and [S(0)](f_h) = 1.
    LatticeVector w = -inner.translation();
    out.witness = scaled(w, side) - handle.translation();
    out.alpha = handle(out.witness);
    out.shifted_letter = handle(out.witness + h);
    bool ok = per_membership(handle, out.witness, n) && per_membership(handle, out.witness + h, n) &&
              out.alpha != out.shifted_letter;
    out.verdict = ok ? Verdict::kTrue : Verdict::kFalse;
    out.detail = "pinned block: y(g) = " + std::to_string(out.alpha) + ", y(g+h) = " + std::to_string(out.shifted_letter);
    return out;
  }
  EssentialCheck inner_check = essential_period_check(inner, n, gh);
  if (inner_check.verdict != Verdict::kTrue) {
    out.detail = "inner check: " + inner_check.detail;
    return out;
  }
  out.witness = scaled(inner_check.witness, side) - handle.translation();
  out.alpha = handle(out.witness);
  if (!per_membership(handle, out.witness, n)) throw CertificationFailure("essential witness is not periodic");
  out.shifted_evidence = nonperiodicity_witness(handle, out.witness + h, n);
  out.verdict = out.shifted_evidence ? Verdict::kTrue : Verdict::kMaybe;
  out.detail = out.shifted_evidence ? "shifted witness is not periodic" : "no aperiodicity witness for the shift";
  return out;
}

BlockSizeChoice choose_block_size(std::uint64_t k, std::size_t d, const Rational& h, const PlannerOptions& options) {
  if (k < 2) throw InvalidArgument("alphabet needs at least two letters");
  if (d < 1) throw InvalidArgument("dimension must be positive");
  if (h <= 0) throw InvalidArgument("entropy must be positive");
  const Interval log_k = Interval::log_of(Integer(static_cast<unsigned long>(k)));
  if (less(Interval::of(h), log_k) != Verdict::kTrue) {
    throw InfeasibleEntropy("entropy " + to_string(h) + " is not below log " + std::to_string(k));
  }
  for (std::uint64_t t = 1;; ++t) {
    std::uint64_t s = 0, K = 0;
    if (!checked_pow(t, d, &s) || !checked_pow(k, s, &K)) {
      throw InfeasibleEntropy("no admissible block size before letters exceed 64 bits");
    }
    if (K < 5) continue;
    Interval margin = Interval::of(Integer(static_cast<unsigned long>(s))) * (log_k - Interval::of(h));
    if (less_equal(Interval::of(5L), margin) != Verdict::kTrue) continue;
    int it = options.lambda_iterations.value_or(default_lambda_iterations(K, options.digit_budget));
    Interval bound = lambda_lower_bound(K, it, options.digit_budget);
    Rational scaled_h = h * Rational(Integer(static_cast<unsigned long>(s)));
    if (less(Interval::of(scaled_h), bound) != Verdict::kTrue) continue;
    return BlockSizeChoice{t, s, K, bound};
  }
}

SmallAlphabetResult small_alphabet_pipeline(std::uint64_t k, std::size_t d, const Rational& h, const PlannerOptions& options) {
  BlockSizeChoice choice = choose_block_size(k, d, h, options);
  Rational scaled_h = h * Rational(Integer(static_cast<unsigned long>(choice.size)));
  ConstructionPlan plan = plan_theorem(choice.alphabet, d, scaled_h, options);
  plan.substitution = SubstitutionSpec{k, choice.side, h};
  ArrayHandle handle = ArrayHandle::from_plan(plan);
  return SmallAlphabetResult{choice, std::move(plan), std::move(handle)};
}

std::vector<std::string> toy_preset_names() { return {"A", "B", "C", "D"}; }

ConstructionPlan toy_preset(const std::string& name) {
  ToySpec spec;
  spec.alphabet_size = 4;
  if (name == "A") {
    spec.dimension = 1;
    spec.increments = {{4}, {6}, {12}, {16}};
    spec.offset_mode = OffsetMode::kShifted;
    spec.shift_from = 1;
    spec.family_kinds = {FamilyKind::kFullSymmetric, FamilyKind::kHybrid, FamilyKind::kHybrid};
  } else if (name == "B") {
    spec.dimension = 2;
    spec.increments = {{2, 2}, {3, 2}, {3, 4}, {4, 4}};
    spec.offset_mode = OffsetMode::kZero;
    spec.family_kinds = {FamilyKind::kFullSymmetric, FamilyKind::kHybrid, FamilyKind::kHybrid};
  } else if (name == "C") {
    spec.dimension = 1;
    spec.increments = {{4}, {6}, {7}, {8}};
    spec.offset_mode = OffsetMode::kExplicit;
    spec.lowers = {LatticeVector{-1}, LatticeVector{-9}, LatticeVector{-33}, LatticeVector{-201}};
    spec.family_kinds = {FamilyKind::kExplicit, FamilyKind::kExplicit, FamilyKind::kExplicit};
    std::vector<std::vector<std::uint64_t>> s1 = {{2, 3, 4}, {2, 4, 3}, {3, 2, 4},
                                                  {3, 4, 2}, {4, 2, 3}, {4, 3, 2}};
    // Base first, the other cyclic shifts in a stride order, then two single swaps that
    // realize every (r, r+1) away from the base.
    auto shifts = [](std::uint64_t m, std::uint64_t stride) {
      std::vector<std::vector<std::uint64_t>> lists;
      for (std::uint64_t j = 0; j < m; ++j) {
        std::vector<std::uint64_t> row;
        for (std::uint64_t r = 0; r < m; ++r) row.push_back(2 + (r + stride * j) % m);
        lists.push_back(row);
      }
      std::vector<std::uint64_t> tail_swap = lists.front(), head_swap = lists.front();
      std::swap(tail_swap[m - 2], tail_swap[m - 1]);
      std::swap(head_swap[0], head_swap[1]);
      lists.push_back(tail_swap);
      lists.push_back(head_swap);
      return lists;
    };
    spec.family_lists = {s1, shifts(5, 2), shifts(6, 1)};
  } else if (name == "D") {
    // Two-dimensional and deep enough that D_5 covers [0, 512)^2.
    spec.dimension = 2;
    spec.increments = {{2, 2}, {3, 2}, {5, 5}, {16, 16}, {17, 16}};
    spec.offset_mode = OffsetMode::kShifted;
    spec.shift_from = 2;
    spec.family_kinds = {FamilyKind::kFullSymmetric, FamilyKind::kHybrid, FamilyKind::kHybrid,
                         FamilyKind::kHybrid};
  } else {
    throw InvalidArgument("unknown toy preset '" + name + "'");
  }
  return plan_toy(spec);
}

namespace {

struct SliceShape {
  std::uint64_t rows = 1;
  std::uint64_t cols = 1;
};

SliceShape slice_shape(const FundamentalDomain& box) {
  const std::size_t d = box.dim();
  for (std::size_t i = 0; i + 2 < d; ++i) {
    if (box.sides()[i] != 1) throw InvalidArgument("patches above two dimensions export 2-D slices only");
  }
  SliceShape s;
  s.cols = box.sides()[d - 1].get_ui();
  if (d >= 2) s.rows = box.sides()[d - 2].get_ui();
  return s;
}

}  // namespace

void write_patch_text(std::ostream& out, const Patch& p) {
  SliceShape s = slice_shape(p.box);
  out << p.box.dim() << ' ' << s.rows << ' ' << s.cols;
  for (const auto& c : p.box.lower().coords()) out << ' ' << c.get_str(10);
  out << '\n';
  for (std::uint64_t r = 0; r < s.rows; ++r) {
    for (std::uint64_t c = 0; c < s.cols; ++c) {
      if (c) out << ' ';
      out << p.letters[r * s.cols + c];
    }
    out << '\n';
  }
}

Patch read_patch_text(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("patch text is empty");
  std::istringstream header(line);
  std::size_t d = 0;
  std::uint64_t rows = 0, cols = 0;
  if (!(header >> d >> rows >> cols) || d < 1 || rows < 1 || cols < 1) throw FormatError("bad patch header");
  if (d == 1 && rows != 1) throw FormatError("one-dimensional patches have one row");
  std::vector<Integer> origin(d);
  for (auto& c : origin) {
    std::string tok;
    if (!(header >> tok)) throw FormatError("patch header lacks origin coordinates");
    c = parse_integer(tok);
  }
  std::vector<Integer> sides(d, Integer(1));
  sides[d - 1] = static_cast<unsigned long>(cols);
  if (d >= 2) sides[d - 2] = static_cast<unsigned long>(rows);
  Patch p{FundamentalDomain(0, LatticeVector(origin), sides), {}};
  p.letters.reserve(rows * cols);
  for (std::uint64_t r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw FormatError("patch text ends early");
    std::istringstream row(line);
    for (std::uint64_t c = 0; c < cols; ++c) {
      Letter a = 0;
      if (!(row >> a)) throw FormatError("patch row " + std::to_string(r + 1) + " is short");
      p.letters.push_back(a);
    }
    std::string extra;
    if (row >> extra) throw FormatError("patch row " + std::to_string(r + 1) + " is long");
  }
  return p;
}

void write_patch_pgm(std::ostream& out, const Patch& p, std::uint64_t alphabet_size) {
  if (alphabet_size < 2 || alphabet_size - 1 > 65535) throw InvalidArgument("PGM needs 2..65536 letters");
  SliceShape s = slice_shape(p.box);
  const std::uint64_t maxval = alphabet_size - 1;
  out << "P5\n" << s.cols << ' ' << s.rows << '\n' << maxval << '\n';
  for (Letter a : p.letters) {
    if (a > maxval) throw InvalidArgument("patch letter outside the alphabet");
    if (maxval > 255) out.put(static_cast<char>((a >> 8) & 0xff));
    out.put(static_cast<char>(a & 0xff));
  }
}

}  // namespace toeplitz_forge
