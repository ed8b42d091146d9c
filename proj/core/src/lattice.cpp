#include "toeplitz_forge/lattice.hpp"

#include <algorithm>
#include <sstream>

#include "toeplitz_forge/errors.hpp"

namespace toeplitz_forge {
namespace {

void require_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

bool within_radius(const Integer& c, std::uint64_t radius_bits) {
  if (c == 0) return radius_bits >= 1;
  return mpz_sizeinbase(c.get_mpz_t(), 2) <= radius_bits;
}

}  // namespace

LatticeVector::LatticeVector(std::initializer_list<long> coords) {
  c_.reserve(coords.size());
  for (long v : coords) c_.emplace_back(v);
}

bool LatticeVector::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Integer& v) { return v == 0; });
}

LatticeVector& LatticeVector::operator+=(const LatticeVector& o) {
  require_dim(dim(), o.dim());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

LatticeVector& LatticeVector::operator-=(const LatticeVector& o) {
  require_dim(dim(), o.dim());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

LatticeVector LatticeVector::operator-() const {
  LatticeVector r(dim());
  for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] = -c_[i];
  return r;
}

bool operator==(const LatticeVector& a, const LatticeVector& b) { return a.c_ == b.c_; }

bool operator<(const LatticeVector& a, const LatticeVector& b) {
  require_dim(a.dim(), b.dim());
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    int c = cmp(a.c_[i], b.c_[i]);
    if (c != 0) return c < 0;
  }
  return false;
}

std::string LatticeVector::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) out += ",";
    out += c_[i].get_str(10);
  }
  return out + ")";
}

LatticeVector LatticeVector::parse(const std::string& text) {
  std::string s = text;
  if (!s.empty() && s.front() == '(') s.erase(0, 1);
  if (!s.empty() && s.back() == ')') s.pop_back();
  std::vector<Integer> coords;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    coords.push_back(parse_integer(item));
  }
  if (coords.empty()) throw FormatError("empty lattice vector: " + text);
  return LatticeVector(std::move(coords));
}

std::size_t LatticeVectorHash::operator()(const LatticeVector& v) const {
  std::size_t h = 1469598103934665603ull;
  for (const auto& c : v.coords()) {
    std::size_t x = mpz_get_ui(c.get_mpz_t()) ^ (static_cast<std::size_t>(mpz_sgn(c.get_mpz_t())) << 63);
    h = (h ^ x) * 1099511628211ull;
  }
  return h;
}

DiagonalMatrix::DiagonalMatrix(std::vector<Integer> diag) : diag_(std::move(diag)) {
  for (const auto& v : diag_) {
    if (v < 1) throw InvalidArgument("diagonal entries must be positive");
  }
}

DiagonalMatrix::DiagonalMatrix(std::initializer_list<long> diag) {
  for (long v : diag) diag_.emplace_back(v);
  for (const auto& v : diag_) {
    if (v < 1) throw InvalidArgument("diagonal entries must be positive");
  }
}

DiagonalMatrix DiagonalMatrix::identity(std::size_t dim) {
  return DiagonalMatrix(std::vector<Integer>(dim, Integer(1)));
}

DiagonalMatrix DiagonalMatrix::scalar(std::size_t dim, const Integer& v) {
  return DiagonalMatrix(std::vector<Integer>(dim, v));
}

Integer DiagonalMatrix::determinant() const {
  Integer d = 1;
  for (const auto& v : diag_) d *= v;
  return d;
}

DiagonalMatrix operator*(const DiagonalMatrix& a, const DiagonalMatrix& b) {
  require_dim(a.dim(), b.dim());
  std::vector<Integer> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a.diag_[i] * b.diag_[i];
  return DiagonalMatrix(std::move(out));
}

LatticeVector DiagonalMatrix::apply(const LatticeVector& v) const {
  require_dim(dim(), v.dim());
  LatticeVector r(dim());
  for (std::size_t i = 0; i < dim(); ++i) r[i] = diag_[i] * v[i];
  return r;
}

bool DiagonalMatrix::divides(const LatticeVector& v) const {
  require_dim(dim(), v.dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!mpz_divisible_p(v[i].get_mpz_t(), diag_[i].get_mpz_t())) return false;
  }
  return true;
}

LatticeVector DiagonalMatrix::solve(const LatticeVector& v) const {
  if (!divides(v)) throw InvalidArgument("vector " + v.str() + " not in lattice " + str());
  LatticeVector r(dim());
  for (std::size_t i = 0; i < dim(); ++i) mpz_divexact(r[i].get_mpz_t(), v[i].get_mpz_t(), diag_[i].get_mpz_t());
  return r;
}

std::string DiagonalMatrix::str() const {
  std::string out = "diag(";
  for (std::size_t i = 0; i < diag_.size(); ++i) {
    if (i) out += ",";
    out += diag_[i].get_str(10);
  }
  return out + ")";
}

DiagonalScale::DiagonalScale(std::vector<DiagonalMatrix> increments)
    : increments_(std::move(increments)) {
  if (increments_.empty()) throw InvalidArgument("scale needs at least one increment");
  std::size_t d = increments_.front().dim();
  scales_.push_back(DiagonalMatrix::identity(d));
  for (const auto& q : increments_) {
    require_dim(d, q.dim());
    scales_.push_back(scales_.back() * q);
  }
}

Integer DiagonalScale::min_entry(std::size_t n) const {
  const auto& diag = scale(n).diag();
  return *std::min_element(diag.begin(), diag.end());
}

FundamentalDomain::FundamentalDomain(int level, LatticeVector lower, std::vector<Integer> sides)
    : level_(level), lower_(std::move(lower)), sides_(std::move(sides)) {
  require_dim(lower_.dim(), sides_.size());
  for (const auto& s : sides_) {
    if (s < 1) throw InvalidArgument("domain sides must be positive");
  }
}

LatticeVector FundamentalDomain::upper_inclusive() const {
  LatticeVector u = lower_;
  for (std::size_t i = 0; i < dim(); ++i) u[i] += sides_[i] - 1;
  return u;
}

Integer FundamentalDomain::cardinality() const {
  Integer c = 1;
  for (const auto& s : sides_) c *= s;
  return c;
}

bool FundamentalDomain::contains(const LatticeVector& g) const {
  require_dim(dim(), g.dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (g[i] < lower_[i] || g[i] >= lower_[i] + sides_[i]) return false;
  }
  return true;
}

LatticeVector FundamentalDomain::reduce(const LatticeVector& g) const {
  require_dim(dim(), g.dim());
  LatticeVector r(dim());
  for (std::size_t i = 0; i < dim(); ++i) r[i] = lower_[i] + floor_mod(g[i] - lower_[i], sides_[i]);
  return r;
}

FundamentalDomain FundamentalDomain::translated(const LatticeVector& g) const {
  return FundamentalDomain(level_, lower_ + g, sides_);
}

Integer FundamentalDomain::offset_of(const LatticeVector& g) const {
  if (!contains(g)) throw InvalidArgument("point " + g.str() + " outside " + str());
  Integer off = 0;
  for (std::size_t i = 0; i < dim(); ++i) off = off * sides_[i] + (g[i] - lower_[i]);
  return off;
}

LatticeVector FundamentalDomain::point_at(Integer offset) const {
  if (offset < 0 || offset >= cardinality()) throw InvalidArgument("offset out of range");
  LatticeVector g(dim());
  for (std::size_t i = dim(); i-- > 0;) {
    Integer r = floor_mod(offset, sides_[i]);
    offset = floor_div(offset, sides_[i]);
    g[i] = lower_[i] + r;
  }
  return g;
}

void FundamentalDomain::for_each_point(const std::function<void(const LatticeVector&)>& fn) const {
  LatticeVector g = lower_;
  const std::size_t d = dim();
  while (true) {
    fn(g);
    std::size_t i = d;
    while (i-- > 0) {
      g[i] += 1;
      if (g[i] < lower_[i] + sides_[i]) break;
      g[i] = lower_[i];
      if (i == 0) return;
    }
    if (d == 0) return;
  }
}

std::string FundamentalDomain::str() const {
  std::string out;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (i) out += "x";
    out += "[" + lower_[i].get_str(10) + "," + Integer(lower_[i] + sides_[i] - 1).get_str(10) + "]";
  }
  return out;
}

LatticeVector coset_project(const LatticeVector& g, const FundamentalDomain& domain) {
  return domain.reduce(g);
}

std::vector<FundamentalDomain> shifted_domains(const DiagonalScale& scale, int n_max,
                                               int shift_from) {
  if (n_max < 0 || static_cast<std::size_t>(n_max) >= scale.size()) {
    throw InvalidArgument("level " + std::to_string(n_max) + " beyond the scale");
  }
  const std::size_t d = scale.dim();
  std::vector<FundamentalDomain> out;
  out.emplace_back(0, LatticeVector(d), std::vector<Integer>(d, Integer(1)));
  LatticeVector shift(d);  // s_n
  for (int n = 1; n <= n_max; ++n) {
    if (n >= 2) {
      // s_n = P_{n-1} r_{n-1} + s_{n-1}
      int m = n - 1;
      if (m >= shift_from) {
        const auto& q = scale.increment(m);
        for (std::size_t i = 0; i < d; ++i) {
          if (q[i] < 4) {
            throw InvalidArgument("increment entry " + q[i].get_str(10) + " < 4 at level " +
                                  std::to_string(m) + " where shifted domains are requested");
          }
          shift[i] += scale.scale(m)[i] * floor_div(q[i], 4);
        }
      }
    }
    out.emplace_back(n, -shift, scale.scale(n).diag());
  }
  return out;
}

std::vector<FundamentalDomain> explicit_domains(const DiagonalScale& scale,
                                                const std::vector<LatticeVector>& lowers) {
  if (lowers.size() >= scale.size()) throw InvalidArgument("more offsets than scale levels");
  const std::size_t d = scale.dim();
  std::vector<FundamentalDomain> out;
  out.emplace_back(0, LatticeVector(d), std::vector<Integer>(d, Integer(1)));
  for (std::size_t n = 1; n <= lowers.size(); ++n) {
    FundamentalDomain dom(static_cast<int>(n), lowers[n - 1], scale.scale(n).diag());
    const FundamentalDomain& prev = out.back();
    if (!dom.contains(LatticeVector(d))) {
      throw InvalidArgument("domain " + dom.str() + " does not contain the origin");
    }
    // Tiling by translates of the previous domain needs matching corners mod P_{n-1}.
    LatticeVector diff = dom.lower() - prev.lower();
    if (!scale.scale(n - 1).divides(diff)) {
      throw InvalidArgument("domain " + dom.str() + " is not tiled by level " +
                            std::to_string(n - 1) + " translates");
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (dom.lower()[i] > prev.lower()[i] ||
          dom.lower()[i] + dom.sides()[i] < prev.lower()[i] + prev.sides()[i]) {
        throw InvalidArgument("domain " + dom.str() + " does not contain its predecessor");
      }
    }
    out.push_back(dom);
  }
  return out;
}

std::vector<LatticeVector> k_boundary(const std::vector<LatticeVector>& K,
                                      const FundamentalDomain& F) {
  if (K.empty()) throw InvalidArgument("K must be nonempty");
  const std::size_t d = F.dim();
  LatticeVector kmin = K.front(), kmax = K.front();
  for (const auto& k : K) {
    require_dim(d, k.dim());
    for (std::size_t i = 0; i < d; ++i) {
      if (k[i] < kmin[i]) kmin[i] = k[i];
      if (k[i] > kmax[i]) kmax[i] = k[i];
    }
  }
  std::vector<Integer> sides(d);
  for (std::size_t i = 0; i < d; ++i) sides[i] = F.sides()[i] + kmax[i] - kmin[i];
  FundamentalDomain candidates(F.level(), F.lower() + kmin, sides);
  std::vector<LatticeVector> out;
  candidates.for_each_point([&](const LatticeVector& g) {
    bool inside = false, outside = false;
    for (const auto& k : K) {
      if (F.contains(g - k)) {
        inside = true;
      } else {
        outside = true;
      }
    }
    if (inside && outside) out.push_back(g);
  });
  return out;
}

Integer k_boundary_size(const std::vector<LatticeVector>& K, const FundamentalDomain& F) {
  if (K.empty()) throw InvalidArgument("K must be nonempty");
  if (K.size() > 20) throw BudgetExceeded("k_boundary_size supports at most 20 offsets");
  const std::size_t d = F.dim();
  auto box_of = [&](unsigned mask, bool* empty) {
    std::vector<Integer> lo(d), hi(d);
    bool first = true;
    for (std::size_t j = 0; j < K.size(); ++j) {
      if (!(mask & (1u << j))) continue;
      for (std::size_t i = 0; i < d; ++i) {
        Integer l = F.lower()[i] + K[j][i];
        Integer h = l + F.sides()[i];
        if (first || l > lo[i]) lo[i] = l;
        if (first || h < hi[i]) hi[i] = h;
      }
      first = false;
    }
    Integer size = 1;
    *empty = false;
    for (std::size_t i = 0; i < d; ++i) {
      if (hi[i] <= lo[i]) {
        *empty = true;
        return Integer(0);
      }
      size *= hi[i] - lo[i];
    }
    return size;
  };
  Integer union_size = 0;
  const unsigned full = (1u << K.size()) - 1;
  for (unsigned mask = 1; mask <= full; ++mask) {
    bool empty = false;
    Integer s = box_of(mask, &empty);
    if (__builtin_popcount(mask) % 2 == 1) {
      union_size += s;
    } else {
      union_size -= s;
    }
  }
  bool empty = false;
  Integer inter = box_of(full, &empty);
  return union_size - inter;
}

bool LevelGeometry::exact() const {
  return std::all_of(axes.begin(), axes.end(), [](const AxisSpan& a) { return a.exact; });
}

DomainFamily::DomainFamily(std::size_t dim, int first_index, std::vector<LevelGeometry> levels)
    : dim_(dim), first_(first_index), levels_(std::move(levels)) {
  if (levels_.empty()) throw InvalidArgument("domain family needs a trivial level");
  for (const auto& l : levels_) require_dim(dim_, l.axes.size());
}

DomainFamily DomainFamily::from_domains(const std::vector<FundamentalDomain>& domains) {
  if (domains.empty()) throw InvalidArgument("empty domain list");
  std::vector<LevelGeometry> levels;
  for (const auto& dom : domains) {
    LevelGeometry lg;
    for (std::size_t i = 0; i < dom.dim(); ++i) {
      lg.axes.push_back(AxisSpan{true, dom.sides()[i], dom.lower()[i], 0});
    }
    levels.push_back(std::move(lg));
  }
  return DomainFamily(domains.front().dim(), domains.front().level(), std::move(levels));
}

const LevelGeometry& DomainFamily::level(int n) const {
  if (!has_level(n)) {
    throw DepthBudgetExceeded("level " + std::to_string(n) + " outside the computed family [" +
                              std::to_string(first_) + ", " + std::to_string(last_index()) + "]");
  }
  return levels_[static_cast<std::size_t>(n - first_)];
}

bool DomainFamily::is_exact(int n) const { return level(n).exact(); }

FundamentalDomain DomainFamily::domain(int n) const {
  const auto& lg = level(n);
  if (!lg.exact()) {
    throw DepthBudgetExceeded("level " + std::to_string(n) + " is symbolic");
  }
  LatticeVector lower(dim_);
  std::vector<Integer> sides(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    lower[i] = lg.axes[i].lower;
    sides[i] = lg.axes[i].period;
  }
  return FundamentalDomain(n, lower, sides);
}

DiagonalMatrix DomainFamily::period(int n) const {
  const auto& lg = level(n);
  std::vector<Integer> diag(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    if (!lg.axes[i].exact) {
      throw DepthBudgetExceeded("period of level " + std::to_string(n) + " is symbolic");
    }
    diag[i] = lg.axes[i].period;
  }
  return DiagonalMatrix(std::move(diag));
}

std::optional<bool> DomainFamily::contains(int n, const LatticeVector& g) const {
  require_dim(dim_, g.dim());
  const auto& lg = level(n);
  bool undecided = false;
  for (std::size_t i = 0; i < dim_; ++i) {
    const auto& a = lg.axes[i];
    if (a.exact) {
      if (g[i] < a.lower || g[i] >= a.lower + a.period) return false;
    } else if (!within_radius(g[i], a.radius_bits)) {
      undecided = true;
    }
  }
  if (undecided) return std::nullopt;
  return true;
}

int DomainFamily::containing_level(const LatticeVector& g, int max_level) const {
  int top = std::min(max_level, last_index());
  for (int n = first_; n <= top; ++n) {
    auto c = contains(n, g);
    if (c && *c) return n;
  }
  throw DepthBudgetExceeded("point " + g.str() + " escapes every level up to " +
                            std::to_string(top));
}

LatticeVector DomainFamily::project(int n, const LatticeVector& g) const {
  require_dim(dim_, g.dim());
  const auto& lg = level(n);
  LatticeVector r(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    const auto& a = lg.axes[i];
    if (a.exact) {
      r[i] = a.lower + floor_mod(g[i] - a.lower, a.period);
    } else if (within_radius(g[i], a.radius_bits)) {
      r[i] = g[i];
    } else {
      throw DepthBudgetExceeded("coordinate " + g[i].get_str(10) + " beyond the certified extent of level " +
                                std::to_string(n));
    }
  }
  return r;
}

Integer DomainFamily::grid_count(int t, int n) const {
  if (t > n) throw InvalidArgument("grid_count needs t <= n");
  DiagonalMatrix pt = period(t), pn = period(n);
  Integer c = 1;
  for (std::size_t i = 0; i < dim_; ++i) c *= pn[i] / pt[i];
  return c;
}

DomainFamily::InteriorRest DomainFamily::interior_rest(int t, int n, const LatticeVector& g) const {
  if (t > n) throw InvalidArgument("interior_rest needs t <= n");
  FundamentalDomain dt = domain(t), dn = domain(n);
  InteriorRest ir;
  ir.first = LatticeVector(dim_);
  ir.counts.resize(dim_);
  ir.interior_size = 1;
  for (std::size_t i = 0; i < dim_; ++i) {
    const Integer& pt = dt.sides()[i];
    Integer a = dn.lower()[i] + g[i] - dt.lower()[i];
    Integer b = a + dn.sides()[i] - pt;
    Integer zlo = ceil_div(a, pt), zhi = floor_div(b, pt);
    Integer count = zhi >= zlo ? Integer(zhi - zlo + 1) : Integer(0);
    ir.first[i] = zlo * pt;
    ir.counts[i] = count;
    ir.interior_size *= count;
  }
  ir.rest_size = dn.cardinality() - dt.cardinality() * ir.interior_size;
  return ir;
}

int DomainFamily::exact_prefix_end() const {
  int n = first_;
  while (n + 1 <= last_index() && is_exact(n + 1)) ++n;
  return n;
}

void for_each_interior_point(const DomainFamily& family, int t,
                             const DomainFamily::InteriorRest& ir,
                             const std::function<void(const LatticeVector&)>& fn) {
  if (ir.interior_size == 0) return;
  DiagonalMatrix pt = family.period(t);
  FundamentalDomain multipliers(t, LatticeVector(family.dim()), ir.counts);
  multipliers.for_each_point([&](const LatticeVector& z) { fn(ir.first + pt.apply(z)); });
}

}  // namespace toeplitz_forge
