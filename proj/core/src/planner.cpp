#include "toeplitz_forge/planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "toeplitz_forge/errors.hpp"

namespace toeplitz_forge {
namespace {

// Precision that resolves unit differences at the magnitude of x.
mpfr_prec_t bits_for(const Interval& x) {
  mpfr_prec_t bits = working_precision();
  for (mpfr_srcptr e : {x.lo(), x.hi()}) {
    if (mpfr_regular_p(e) && mpfr_get_exp(e) > 0) {
      bits = std::max<mpfr_prec_t>(bits, static_cast<mpfr_prec_t>(mpfr_get_exp(e)) + 128);
    }
  }
  return std::min<mpfr_prec_t>(bits, kPrecisionCap);
}

// Reruns check at doubled precision while it is undecided, up to the cap.
Verdict decide(const std::function<Verdict()>& check, mpfr_prec_t start = 0) {
  mpfr_prec_t bits = std::max(working_precision(), start);
  while (true) {
    PrecisionScope scope(bits);
    Verdict v = check();
    if (v != Verdict::kMaybe || bits >= kPrecisionCap) return v;
    bits = std::min<mpfr_prec_t>(bits * 2, kPrecisionCap);
  }
}

Verdict both(Verdict a, Verdict b) {
  if (a == Verdict::kFalse || b == Verdict::kFalse) return Verdict::kFalse;
  if (a == Verdict::kMaybe || b == Verdict::kMaybe) return Verdict::kMaybe;
  return Verdict::kTrue;
}

Verdict from_bool(bool b) { return b ? Verdict::kTrue : Verdict::kFalse; }

Integer ipow(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// Upper enclosure of 1/p for a magnitude, safe for astronomically large p.
Interval reciprocal(const Magnitude& p) {
  if (p.exact) return Interval::of(1L) / Interval::of(*p.exact);
  return (-p.log_enclosure()).exp();
}

// Decimal digits of (q − 1)! bounded from above; q exact.
double factorial_digits(const Integer& q) {
  if (q < 3) return 1.0;
  Interval lg = Interval::of(q).lngamma() / Interval::log_of(Integer(10));
  return lg.hi_double();
}

Integer factorial(const Integer& n) {
  if (!n.fits_ulong_p()) throw BudgetExceeded("factorial argument beyond machine range");
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n.get_ui());
  return r;
}

// Enclosure of log((q − 1)!) for a magnitude q ≥ 2.
Interval log_factorial_of_predecessor(const Magnitude& q) {
  if (q.exact) return Interval::of(*q.exact).lngamma();
  return q.log_enclosure().exp().lngamma();
}

Verdict magnitude_less(const Magnitude& a, const Magnitude& b) {
  if (a.exact && b.exact) return from_bool(*a.exact < *b.exact);
  return decide([&] { return less(a.log_enclosure(), b.log_enclosure()); });
}

Verdict magnitude_at_least(const Magnitude& a, const Integer& v) {
  if (a.exact) return from_bool(*a.exact >= v);
  return decide([&] { return less_equal(Interval::log_of(v), a.log_enclosure()); });
}

std::string verdict_detail(const Interval& lhs, const char* rel, const Interval& rhs) {
  return lhs.str(10) + " " + rel + " " + rhs.str(10);
}

Certificate make(int level, std::string name, Verdict v, std::string detail) {
  return Certificate{level, std::move(name), v, std::move(detail)};
}

}  // namespace

Magnitude Magnitude::of(const Integer& v) {
  if (v < 1) throw InvalidArgument("magnitudes are positive");
  Magnitude m;
  m.exact = v;
  m.log = Interval::log_of(v);
  return m;
}

Magnitude Magnitude::symbolic(const Interval& log_value) {
  Magnitude m;
  m.log = log_value;
  return m;
}

Interval Magnitude::log_enclosure() const {
  if (exact) return Interval::log_of(*exact);
  return log;
}

std::string Magnitude::str() const {
  if (exact) return exact->get_str(10);
  return "exp(" + log.str(12) + ")";
}

Magnitude operator*(const Magnitude& a, const Magnitude& b) {
  if (a.exact && b.exact) return Magnitude::of(*a.exact * *b.exact);
  return Magnitude::symbolic(a.log_enclosure() + b.log_enclosure());
}

int PrimeSequences::exact_end() const {
  int n = -1;
  for (std::size_t i = 0; i < q.size() && q[i].exact; ++i) n = static_cast<int>(i);
  return n;
}

PrimeSequences prime_sequences(std::uint64_t k, int n_max, std::size_t digit_budget) {
  if (k < 5) throw InvalidArgument("prime sequences need an alphabet of at least 5 letters");
  if (n_max < 0) throw InvalidArgument("n_max must be nonnegative");
  PrimeSequences s;
  s.p.push_back(Magnitude::of(Integer(1)));
  s.q.push_back(Magnitude::of(Integer(static_cast<unsigned long>(k))));
  for (int n = 1; n <= n_max; ++n) {
    const Magnitude& q_prev = s.q.back();
    s.p.push_back(s.p.back() * q_prev);
    if (q_prev.exact && factorial_digits(*q_prev.exact) <= static_cast<double>(digit_budget)) {
      s.q.push_back(Magnitude::of(factorial(*q_prev.exact - 1)));
    } else {
      s.q.push_back(Magnitude::symbolic(log_factorial_of_predecessor(q_prev)));
    }
  }
  for (std::size_t n = 0; n < s.q.size(); ++n) {
    s.lambda.push_back(s.q[n].log_enclosure() * reciprocal(s.p[n]));
  }
  return s;
}

int default_lambda_iterations(std::uint64_t k, std::size_t digit_budget) {
  int n = 0;
  Integer q = static_cast<unsigned long>(k);
  while (factorial_digits(q) <= static_cast<double>(digit_budget)) {
    q = factorial(q - 1);
    ++n;
  }
  return n;
}

Interval lambda_lower_bound(std::uint64_t k, int iterations, std::size_t digit_budget) {
  int it = std::clamp(iterations, 0, default_lambda_iterations(k, digit_budget));
  PrimeSequences s = prime_sequences(k, it, digit_budget);
  std::optional<Interval> best;
  for (int i = 0; i <= it; ++i) {
    Interval L = (s.q[i].log_enclosure() - Interval::of(5L)) * reciprocal(s.p[i]);
    if (!best || mpfr_greater_p(L.lo(), best->lo())) best = L;
  }
  return *best;
}

long choose_M(std::size_t d) {
  if (d < 1) throw InvalidArgument("dimension must be positive");
  for (long M = 4;; ++M) {
    if (M <= static_cast<long>(d) + 1) continue;
    Verdict v = decide([&] {
      Interval xi = Interval::of(M);
      Interval f = xi - Interval::of(static_cast<long>(d + 1)) * xi.log() - Interval::of(1L);
      return less_equal(Interval::of(0L), f);
    });
    if (v == Verdict::kTrue) return M;
  }
}

int choose_N(std::uint64_t k, std::size_t d, const Rational& h, long M, const Interval& L,
             std::size_t digit_budget) {
  Verdict feasible = decide([&] { return less(Interval::of(h), L); });
  if (feasible != Verdict::kTrue) {
    throw InfeasibleEntropy("entropy " + to_string(h) + " is not certifiably below the bound " +
                            L.str(8) + " for k=" + std::to_string(k));
  }
  for (int N = 1; N <= 64; ++N) {
    PrimeSequences s = prime_sequences(k, N, digit_budget);
    const Magnitude& p_prev = s.p[N - 1];
    const Magnitude& q_prev = s.q[N - 1];
    bool entropy_ok = p_prev.exact ? (Rational(*p_prev.exact) * h >= 1) : true;
    if (!entropy_ok) continue;
    if (magnitude_at_least(q_prev, Integer(M)) != Verdict::kTrue) continue;
    Verdict margin = decide([&] {
      Interval lhs = (Interval::of(static_cast<long>(d)) * Interval::of(M).log() + Interval::of(3L)) *
                     reciprocal(s.p[N]);
      return less(lhs, L - Interval::of(h));
    });
    if (margin == Verdict::kTrue) return N;
  }
  throw BudgetExceeded("no admissible tail start within 64 levels");
}

Magnitude choose_q(const Magnitude& p, const Rational& h, long M, int l, std::size_t d,
                   std::size_t digit_budget) {
  Integer m = ipow(Integer(M + l), static_cast<unsigned long>(d));
  if (p.exact) {
    Rational T = Rational(*p.exact) * h + 3;
    double digits = T.get_d() / std::log(10.0);
    if (digits <= static_cast<double>(digit_budget)) {
      mpfr_prec_t bits =
          std::max<mpfr_prec_t>(working_precision(), static_cast<mpfr_prec_t>(T.get_d() / std::log(2.0)) + 128);
      for (int attempt = 0; attempt < 6; ++attempt, bits *= 2) {
        PrecisionScope scope(bits);
        Integer c;
        if (Interval::of(T).exp().ceil_if_unique(&c)) return Magnitude::of(m * ceil_div(c, m));
      }
      throw CertificationFailure("could not resolve the ceiling of exp(" + to_string(T) + ")");
    }
    PrecisionScope scope(bits_for(Interval::of(T)));
    Interval Ti = Interval::of(T);
    Interval slack = Interval::of(m) * (-Ti.lower_point()).exp();
    return Magnitude::symbolic(Interval::hull(Ti, Ti.upper_point() + slack));
  }
  Interval coarse = p.log_enclosure().exp() * Interval::of(h);
  PrecisionScope scope(bits_for(coarse));
  Interval Ti = p.log_enclosure().exp() * Interval::of(h) + Interval::of(3L);
  Interval slack = Interval::of(m) * (-Ti.lower_point()).exp();
  return Magnitude::symbolic(Interval::hull(Ti, Ti.upper_point() + slack));
}

const char* to_string(PlanMode m) { return m == PlanMode::kTheorem ? "theorem" : "toy"; }

const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::kFullSymmetric:
      return "full_symmetric";
    case FamilyKind::kHybrid:
      return "hybrid";
    case FamilyKind::kExplicit:
      return "explicit";
  }
  return "?";
}

const char* to_string(OffsetMode m) {
  switch (m) {
    case OffsetMode::kShifted:
      return "shifted";
    case OffsetMode::kZero:
      return "zero";
    case OffsetMode::kExplicit:
      return "explicit";
  }
  return "?";
}

int ConstructionPlan::exact_levels() const {
  int n = -1;
  for (std::size_t i = 0; i < block_count.size() && block_count[i].exact; ++i) n = static_cast<int>(i);
  return n;
}

bool ConstructionPlan::certified() const {
  return std::all_of(certificates.begin(), certificates.end(),
                     [](const Certificate& c) { return c.verdict == Verdict::kTrue; });
}

ConstructionPlan plan_theorem(std::uint64_t k, std::size_t d, const Rational& h,
                              const PlannerOptions& options) {
  if (k < 5) throw InvalidArgument("theorem mode needs an alphabet of at least 5 letters");
  if (d < 1) throw InvalidArgument("dimension must be positive");
  if (h <= 0) throw InvalidArgument("entropy must be positive");
  if (options.symbolic_levels < 0) throw InvalidArgument("symbolic level count must be >= 0");
  ConstructionPlan plan;
  plan.mode = PlanMode::kTheorem;
  plan.alphabet_size = k;
  plan.dimension = d;
  plan.entropy = h;
  plan.digit_budget = options.digit_budget;
  plan.symbolic_levels = options.symbolic_levels;
  plan.lambda_iterations =
      options.lambda_iterations.value_or(default_lambda_iterations(k, options.digit_budget));
  plan.lambda_bound = lambda_lower_bound(k, plan.lambda_iterations, options.digit_budget);
  plan.tail_base = options.tail_base.value_or(choose_M(d));
  if (plan.tail_base < 4) throw InvalidArgument("tail base must be at least 4");
  plan.tail_start = options.tail_start.value_or(
      choose_N(k, d, h, plan.tail_base, plan.lambda_bound, options.digit_budget));
  if (plan.tail_start < 1) throw InvalidArgument("tail start must be at least 1");
  const int N = plan.tail_start;

  PrimeSequences s = prime_sequences(k, N, options.digit_budget);
  plan.domain_size.push_back(Magnitude::of(Integer(1)));
  for (int n = 0; n < N; ++n) {
    if (!s.q[n].exact) throw BudgetExceeded("level " + std::to_string(n) + " before the tail is not exact");
    plan.block_count.push_back(s.q[n]);
  }
  int symbolic = 0;
  for (int l = 0;; ++l) {
    for (std::size_t n = plan.domain_size.size(); n <= plan.block_count.size(); ++n) {
      plan.domain_size.push_back(plan.domain_size.back() * plan.block_count[n - 1]);
    }
    Magnitude q;
    try {
      q = choose_q(plan.domain_size.back(), h, plan.tail_base, l, d, options.digit_budget);
    } catch (const BudgetExceeded&) {
      break;  // representation horizon
    }
    if (!q.exact) {
      if (symbolic >= options.symbolic_levels) break;
      ++symbolic;
    }
    plan.block_count.push_back(q);
  }
  while (plan.domain_size.size() <= plan.block_count.size()) {
    plan.domain_size.push_back(plan.domain_size.back() * plan.block_count[plan.domain_size.size() - 1]);
  }

  for (int n = 0; n < static_cast<int>(plan.block_count.size()); ++n) {
    std::vector<Magnitude> diag(d, Magnitude::of(Integer(1)));
    const Magnitude& q = plan.block_count[n];
    if (n < N) {
      diag[0] = q;
    } else {
      long side = plan.tail_base + (n - N);
      Integer rest = ipow(Integer(side), static_cast<unsigned long>(d - 1));
      if (q.exact) {
        if (!mpz_divisible_p(q.exact->get_mpz_t(), rest.get_mpz_t())) {
          throw CertificationFailure("level " + std::to_string(n) + " is not divisible by the tail side");
        }
        diag[0] = Magnitude::of(*q.exact / rest);
      } else {
        diag[0] = Magnitude::symbolic(q.log - Interval::log_of(rest));
      }
      for (std::size_t i = 1; i < d; ++i) diag[i] = Magnitude::of(Integer(side));
    }
    plan.increments.push_back(std::move(diag));
  }
  plan.offset_mode = OffsetMode::kShifted;
  plan.shift_from = N;
  for (int n = 1; n <= plan.levels(); ++n) {
    plan.family_kinds.push_back(n < N ? FamilyKind::kFullSymmetric : FamilyKind::kHybrid);
  }
  plan.family_lists.resize(plan.family_kinds.size());
  plan.certificates = certify(plan);
  if (!plan.certified()) {
    for (const auto& c : plan.certificates) {
      if (c.verdict != Verdict::kTrue) {
        throw CertificationFailure("level " + std::to_string(c.level) + " " + c.name + ": " +
                                   to_string(c.verdict) + " (" + c.detail + ")");
      }
    }
  }
  return plan;
}

namespace {

std::vector<Certificate> certify_structure(const ConstructionPlan& plan) {
  std::vector<Certificate> out;
  const std::size_t d = plan.dimension;
  if (plan.increments.size() != plan.block_count.size()) {
    out.push_back(make(0, "increment_count", Verdict::kFalse, "increments and block counts differ in length"));
    return out;
  }
  if (plan.domain_size.size() != plan.block_count.size() + 1) {
    out.push_back(make(0, "domain_count", Verdict::kFalse, "domain sizes must have one more entry than block counts"));
    return out;
  }
  for (std::size_t n = 0; n < plan.increments.size(); ++n) {
    const auto& diag = plan.increments[n];
    if (diag.size() != d) {
      out.push_back(make(static_cast<int>(n), "increment_shape", Verdict::kFalse, "wrong diagonal length"));
      continue;
    }
    Magnitude det = diag[0];
    for (std::size_t i = 1; i < d; ++i) det = det * diag[i];
    Verdict v;
    std::string detail;
    if (det.exact && plan.block_count[n].exact) {
      v = from_bool(*det.exact == *plan.block_count[n].exact);
      detail = det.exact->get_str(10) + " = " + plan.block_count[n].exact->get_str(10);
    } else if (det.exact || plan.block_count[n].exact) {
      v = Verdict::kFalse;
      detail = "exactness differs between increment and block count";
    } else {
      // Both symbolic: the enclosures must overlap.
      Interval a = det.log_enclosure(), b = plan.block_count[n].log_enclosure();
      v = (less(a, b) == Verdict::kTrue || less(b, a) == Verdict::kTrue) ? Verdict::kFalse : Verdict::kTrue;
      detail = verdict_detail(a, "~", b);
    }
    out.push_back(make(static_cast<int>(n), "increment_product", v, detail));
  }
  for (std::size_t n = 1; n < plan.domain_size.size(); ++n) {
    const Magnitude expected = plan.domain_size[n - 1] * plan.block_count[n - 1];
    Verdict v;
    if (expected.exact && plan.domain_size[n].exact) {
      v = from_bool(*expected.exact == *plan.domain_size[n].exact);
    } else if (expected.exact || plan.domain_size[n].exact) {
      v = Verdict::kFalse;
    } else {
      Interval a = expected.log_enclosure(), b = plan.domain_size[n].log_enclosure();
      v = (less(a, b) == Verdict::kTrue || less(b, a) == Verdict::kTrue) ? Verdict::kFalse : Verdict::kTrue;
    }
    out.push_back(make(static_cast<int>(n), "domain_product", v, "p_n = p_{n-1} q_{n-1}"));
  }
  if (!plan.block_count.empty()) {
    bool ok = plan.block_count[0].exact &&
              *plan.block_count[0].exact == Integer(static_cast<unsigned long>(plan.alphabet_size));
    out.push_back(make(0, "alphabet_match", from_bool(ok), "q_0 equals the alphabet size"));
  }
  if (plan.family_kinds.size() != static_cast<std::size_t>(std::max(plan.levels(), 0))) {
    out.push_back(make(0, "family_count", Verdict::kFalse, "one permutation family per level is required"));
  }
  return out;
}

// m + 5 ≤ q_n ≤ m + (m − 1)! − 1 with m = q_{n−1} − 1 ≥ 4: the cyclic shifts plus the tail
// members at offsets 1, 2 and 5 realize every (rank, target) pair by a non-base index.
Certificate capacity_certificate(const ConstructionPlan& plan, int n) {
  const Magnitude& q = plan.block_count[n];
  const Magnitude& q_prev = plan.block_count[n - 1];
  if (!q_prev.exact) return make(n, "family_capacity", Verdict::kFalse, "previous level is symbolic");
  Integer m = *q_prev.exact - 1;
  if (m < 4) return make(n, "family_capacity", Verdict::kFalse, "hybrid families need m >= 4");
  if (m <= 1000 && q.exact) {
    Integer cap = m + factorial(m - 1) - 1;
    return make(n, "family_capacity", from_bool(m + 5 <= *q.exact && *q.exact <= cap),
                Integer(m + 5).get_str(10) + " <= " + q.exact->get_str(10) + " <= " +
                    (cap.fits_slong_p() ? cap.get_str(10) : "(m-1)!+m-1"));
  }
  Interval lo, lhs, rhs;
  Verdict v = decide([&] {
    lo = Interval::log_of(Integer(m + 5));
    lhs = q.log_enclosure();
    rhs = Interval::of(m).lngamma();
    return both(less_equal(lo, lhs), less(lhs, rhs));
  });
  return make(n, "family_capacity", v,
              verdict_detail(lo, "<=", lhs) + " < " + rhs.str(10) + " (log(m+5) <= log q_n < log (m-1)!)");
}

// Every (rank, target) pair is realized by a list other than the base.
bool explicit_nonbase_coverage(const std::vector<std::vector<std::uint64_t>>& lists, std::uint64_t m) {
  for (std::uint64_t r = 1; r <= m; ++r) {
    std::vector<bool> hit(m + 2, false);
    for (std::size_t j = 1; j < lists.size(); ++j) {
      if (lists[j].size() == m && lists[j][r - 1] < hit.size()) hit[lists[j][r - 1]] = true;
    }
    for (std::uint64_t t = 2; t <= m + 1; ++t) {
      if (!hit[t]) return false;
    }
  }
  return true;
}

void certify_theorem(const ConstructionPlan& plan, std::vector<Certificate>& out) {
  const int N = plan.tail_start;
  const long M = plan.tail_base;
  const Rational& h = plan.entropy;
  const std::size_t d = plan.dimension;
  {
    Interval L = plan.lambda_bound;
    Verdict v = decide([&] { return less(Interval::of(h), L); });
    out.push_back(make(0, "entropy_feasible", v, "h = " + to_string(h) + " < L = " + L.str(10)));
  }
  {
    Verdict v = decide([&] {
      Interval xi = Interval::of(M);
      Interval f = xi - Interval::of(static_cast<long>(d + 1)) * xi.log() - Interval::of(1L);
      return both(from_bool(M >= 4 && M > static_cast<long>(d) + 1), less_equal(Interval::of(0L), f));
    });
    out.push_back(make(0, "tail_base", v, "M = " + std::to_string(M)));
  }
  if (N < 1 || N > plan.levels()) {
    out.push_back(make(N, "tail_start", Verdict::kFalse, "tail start outside the planned levels"));
    return;
  }
  {
    const Magnitude& p_prev = plan.domain_size[N - 1];
    bool ok = p_prev.exact && Rational(*p_prev.exact) * h >= 1;
    out.push_back(make(N, "start_entropy", from_bool(ok), "p'_{N-1} h >= 1"));
    out.push_back(make(N, "start_size", magnitude_at_least(plan.block_count[N - 1], Integer(M)),
                       "q'_{N-1} >= M"));
    Interval lhs, rhs;
    Verdict v = decide([&] {
      lhs = (Interval::of(static_cast<long>(d)) * Interval::of(M).log() + Interval::of(3L)) *
            reciprocal(plan.domain_size[N]);
      rhs = plan.lambda_bound - Interval::of(h);
      return less(lhs, rhs);
    });
    out.push_back(make(N, "start_margin", v, verdict_detail(lhs, "<", rhs)));
  }
  for (int n = 1; n < N; ++n) {
    const Magnitude& q = plan.block_count[n];
    const Magnitude& q_prev = plan.block_count[n - 1];
    bool ok = q.exact && q_prev.exact && q_prev.exact->fits_ulong_p() &&
              *q.exact == factorial(*q_prev.exact - 1);
    out.push_back(make(n, "factorial_prefix", from_bool(ok), "q_n = (q_{n-1} - 1)!"));
  }
  for (int n = N; n <= plan.levels(); ++n) {
    const int l = n - N;
    const Magnitude& q = plan.block_count[n];
    const Magnitude& q_prev = plan.block_count[n - 1];
    const Magnitude& p = plan.domain_size[n];
    const Integer side = M + l;
    const Integer m = ipow(side, static_cast<unsigned long>(d));

    out.push_back(make(n, "growth", magnitude_less(q_prev, q), "q_{n-1} < q_n"));
    {
      Interval lhs, rhs;
      Verdict v;
      if (q.exact && q_prev.exact && *q_prev.exact <= 1000) {
        Integer cap = factorial(*q_prev.exact - 1);
        v = from_bool(*q.exact <= cap);
        lhs = q.log_enclosure();
        rhs = Interval::log_of(cap);
      } else {
        v = decide([&] {
          lhs = q.log_enclosure();
          rhs = log_factorial_of_predecessor(q_prev);
          return less_equal(lhs, rhs);
        });
      }
      out.push_back(make(n, "factorial_cap", v, verdict_detail(lhs, "<=", rhs)));
    }
    if (q.exact) {
      if (!p.exact) {
        out.push_back(make(n, "entropy_floor", Verdict::kFalse, "exact block count over symbolic domain"));
      } else {
        Rational T = Rational(*p.exact) * h + 3;
        Interval lhs, rhs;
        Verdict v = decide([&] {
          lhs = Interval::of(T);
          rhs = q.log_enclosure();
          return less_equal(lhs, rhs);
        });
        out.push_back(make(n, "entropy_floor", v, verdict_detail(lhs, "<=", rhs)));
      }
      out.push_back(make(n, "divisibility",
                         from_bool(mpz_divisible_p(q.exact->get_mpz_t(), m.get_mpz_t()) != 0),
                         m.get_str(10) + " | q_n"));
    } else {
      out.push_back(make(n, "entropy_floor", Verdict::kTrue, "symbolic level, lower endpoint is p_n h + 3"));
      out.push_back(make(n, "divisibility", Verdict::kTrue, "symbolic level, smallest multiple of " + m.get_str(10)));
    }
    {
      Interval lhs, rhs;
      Verdict v = decide([&] {
        Interval Ti = (p.exact ? Interval::of(Rational(*p.exact) * h)
                               : p.log_enclosure().exp() * Interval::of(h)) +
                      Interval::of(3L);
        lhs = q.log_enclosure();
        rhs = Ti + Interval::of(static_cast<long>(d)) * Interval::log_of(side);
        return less_equal(lhs, rhs);
      }, bits_for(q.log_enclosure()));
      out.push_back(make(n, "entropy_ceiling", v, verdict_detail(lhs, "<=", rhs)));
    }
    out.push_back(make(n, "minimum_size", magnitude_at_least(q, side + 1), "q_n >= M + l + 1"));
    out.push_back(capacity_certificate(plan, n));
    {
      Verdict v = from_bool(side >= 4);
      const Magnitude& first = plan.increments[n][0];
      v = both(v, magnitude_at_least(first, Integer(4)));
      out.push_back(make(n, "increment_floor", v, "every diagonal entry of Q_n is >= 4"));
    }
  }
}

void certify_toy(const ConstructionPlan& plan, std::vector<Certificate>& out) {
  for (int n = 1; n <= plan.levels(); ++n) {
    if (static_cast<std::size_t>(n) > plan.family_kinds.size()) break;
    const Magnitude& q = plan.block_count[n];
    const Magnitude& q_prev = plan.block_count[n - 1];
    if (!q.exact || !q_prev.exact) {
      out.push_back(make(n, "toy_exact", Verdict::kFalse, "toy plans are fully exact"));
      continue;
    }
    Integer m = *q_prev.exact - 1;
    switch (plan.family_kinds[n - 1]) {
      case FamilyKind::kFullSymmetric: {
        bool ok = m >= 3 && m.fits_ulong_p() && *q.exact == factorial(m);
        out.push_back(make(n, "family_capacity", from_bool(ok), "q_n = (q_{n-1} - 1)! with q_{n-1} >= 4"));
        break;
      }
      case FamilyKind::kHybrid:
        out.push_back(capacity_certificate(plan, n));
        break;
      case FamilyKind::kExplicit: {
        const auto& lists = plan.family_lists[n - 1];
        bool ok = Integer(static_cast<unsigned long>(lists.size())) == *q.exact && m.fits_ulong_p() &&
                  explicit_nonbase_coverage(lists, m.get_ui());
        out.push_back(make(n, "family_capacity", from_bool(ok),
                           "explicit list count equals q_n and non-base lists cover every pair"));
        break;
      }
    }
  }
}

}  // namespace

std::vector<Certificate> certify(const ConstructionPlan& plan) {
  std::vector<Certificate> out = certify_structure(plan);
  for (const auto& c : out) {
    if (c.verdict == Verdict::kFalse &&
        (c.name == "increment_count" || c.name == "domain_count" || c.name == "family_count")) {
      return out;
    }
  }
  if (plan.mode == PlanMode::kTheorem) {
    certify_theorem(plan, out);
  } else {
    certify_toy(plan, out);
  }
  return out;
}

ConstructionPlan plan_toy(const ToySpec& spec) {
  ConstructionPlan plan;
  plan.mode = PlanMode::kToy;
  plan.alphabet_size = spec.alphabet_size;
  plan.dimension = spec.dimension;
  plan.offset_mode = spec.offset_mode;
  plan.shift_from = spec.shift_from;
  plan.lowers = spec.lowers;
  plan.family_kinds = spec.family_kinds;
  plan.family_lists = spec.family_lists;
  plan.family_lists.resize(plan.family_kinds.size());
  plan.domain_size.push_back(Magnitude::of(Integer(1)));
  for (const auto& row : spec.increments) {
    if (row.size() != spec.dimension) throw InvalidArgument("increment rank differs from the dimension");
    std::vector<Magnitude> diag;
    Integer det = 1;
    for (const auto& e : row) {
      if (e < 1) throw InvalidArgument("increment entries must be positive");
      diag.push_back(Magnitude::of(e));
      det *= e;
    }
    plan.increments.push_back(std::move(diag));
    plan.block_count.push_back(Magnitude::of(det));
    plan.domain_size.push_back(Magnitude::of(*plan.domain_size.back().exact * det));
  }
  plan.certificates = certify(plan);
  for (const auto& c : plan.certificates) {
    if (c.verdict != Verdict::kTrue) {
      throw CertificationFailure("toy plan certificate " + c.name + " at level " + std::to_string(c.level) +
                                 " is " + to_string(c.verdict) + ": " + c.detail);
    }
  }
  return plan;
}

DiagonalScale assemble_scale(const ConstructionPlan& plan, int levels) {
  if (levels < 1 || static_cast<std::size_t>(levels) > plan.increments.size()) {
    throw InvalidArgument("scale depth outside the plan");
  }
  std::vector<DiagonalMatrix> incs;
  for (int n = 0; n < levels; ++n) {
    std::vector<Integer> diag;
    for (const auto& e : plan.increments[n]) {
      if (!e.exact) throw DepthBudgetExceeded("increment " + std::to_string(n) + " is symbolic");
      diag.push_back(*e.exact);
    }
    incs.emplace_back(std::move(diag));
  }
  return DiagonalScale(std::move(incs));
}

DomainFamily build_family(const ConstructionPlan& plan) {
  const std::size_t d = plan.dimension;
  const int top = static_cast<int>(plan.increments.size());  // levels 0..top
  struct AxisState {
    Magnitude period;
    std::optional<Integer> shift;  // s_n, exact while known
    std::uint64_t radius_bits = 0;
  };
  std::vector<AxisState> axes(d, AxisState{Magnitude::of(Integer(1)), Integer(0), 0});
  std::vector<LevelGeometry> levels;
  auto snapshot = [&] {
    LevelGeometry lg;
    for (const auto& a : axes) {
      AxisSpan span;
      if (a.period.exact && a.shift) {
        span.exact = true;
        span.period = *a.period.exact;
        span.lower = -*a.shift;
      } else {
        span.exact = false;
        span.radius_bits = a.radius_bits;
      }
      lg.axes.push_back(span);
    }
    levels.push_back(std::move(lg));
  };
  snapshot();
  if (plan.offset_mode == OffsetMode::kExplicit && plan.lowers.size() != static_cast<std::size_t>(top)) {
    throw InvalidArgument("explicit offsets need one corner per level");
  }
  for (int n = 0; n < top; ++n) {
    // Level n+1 from level n: s_{n+1} = P_n r_n + s_n when n ≥ shift_from.
    for (std::size_t i = 0; i < d; ++i) {
      AxisState& a = axes[i];
      const Magnitude& q = plan.increments[n][i];
      Magnitude next = a.period * q;
      if (plan.offset_mode == OffsetMode::kShifted && n >= 1 && n >= plan.shift_from) {
        if (q.exact) {
          if (*q.exact < 4) {
            throw InvalidArgument("increment entry " + q.exact->get_str(10) + " < 4 at level " +
                                  std::to_string(n) + " where shifted domains are requested");
          }
          if (a.shift && a.period.exact) {
            a.shift = *a.shift + *a.period.exact * floor_div(*q.exact, 4);
          } else {
            a.shift.reset();
          }
        } else {
          a.shift.reset();
        }
        if (!a.shift || !next.exact) {
          // The box covers ±P_{n+1}/8 once Q_n ≥ 8, because s_{n+1} ≥ P_{n+1}/4 − P_n.
          Verdict wide = magnitude_at_least(q, Integer(8));
          std::uint64_t r = 0;
          if (wide == Verdict::kTrue) {
            Interval log2p = next.log_enclosure() / Interval::of(2L).log();
            Integer bits = log2p.floor_lo() - 3;
            if (bits > 0) {
              r = bits.fits_ulong_p() && bits.get_ui() < std::numeric_limits<std::uint64_t>::max()
                      ? static_cast<std::uint64_t>(bits.get_ui())
                      : std::numeric_limits<std::uint64_t>::max() - 1;
            }
          }
          a.radius_bits = std::max(a.radius_bits, r);
        }
      } else if (plan.offset_mode == OffsetMode::kExplicit) {
        a.shift = -plan.lowers[n][i];
      } else if (!next.exact) {
        a.shift.reset();
      }
      a.period = next;
    }
    snapshot();
  }
  DomainFamily family(d, 0, std::move(levels));
  // Exact prefix must tile; explicit_domains re-validates caller-chosen corners.
  if (plan.offset_mode == OffsetMode::kExplicit) {
    explicit_domains(assemble_scale(plan, top), plan.lowers);
  }
  return family;
}

std::optional<int> divisibility_witness(const ConstructionPlan& plan, const Integer& m,
                                        std::size_t axis) {
  if (axis < 1 || axis > plan.dimension) throw InvalidArgument("axis out of range");
  if (m < 1) throw InvalidArgument("divisor must be positive");
  Integer entry = 1;
  for (std::size_t n = 0; n < plan.increments.size(); ++n) {
    const Magnitude& q = plan.increments[n][axis - 1];
    if (!q.exact) return std::nullopt;
    entry *= *q.exact;
    if (mpz_divisible_p(entry.get_mpz_t(), m.get_mpz_t())) return static_cast<int>(n + 1);
  }
  return std::nullopt;
}

std::vector<EntropyEstimate> entropy_estimates(const ConstructionPlan& plan,
                                               std::uint64_t scale_divisor) {
  if (scale_divisor < 1) throw InvalidArgument("scale divisor must be positive");
  std::vector<EntropyEstimate> out;
  Interval div = Interval::of(static_cast<long>(scale_divisor));
  for (int n = 1; n <= plan.levels(); ++n) {
    EntropyEstimate e;
    e.level = n;
    Interval inv;
    try {
      inv = reciprocal(plan.domain_size[n]);
    } catch (const BudgetExceeded&) {
      break;
    }
    e.estimate = plan.block_count[n].log_enclosure() * inv / div;
    if (plan.mode == PlanMode::kTheorem && n >= plan.tail_start) {
      long side = plan.tail_base + (n - plan.tail_start);
      Interval h = Interval::of(plan.entropy);
      e.bracket_lo = (h + Interval::of(3L) * inv) / div;
      e.bracket_hi = (h + (Interval::of(static_cast<long>(plan.dimension)) * Interval::of(side).log() +
                           Interval::of(3L)) * inv) / div;
      // Decided unscaled, p h + 3 ≤ log q_n ≤ p h + d log(M+l) + 3, where the bracket is
      // far wider than the enclosures; a symbolic q_n starts at the floor by construction.
      const Magnitude& q = plan.block_count[n];
      const Magnitude& p = plan.domain_size[n];
      if (p.exact) {
        e.inside = decide([&] {
          Interval ph = Interval::of(*p.exact) * Interval::of(plan.entropy);
          Interval lq = q.log_enclosure();
          Interval ceiling = ph + Interval::of(static_cast<long>(plan.dimension)) * Interval::of(side).log() +
                             Interval::of(3L);
          Verdict lower = q.exact ? less_equal(ph + Interval::of(3L), lq) : Verdict::kTrue;
          return both(lower, less_equal(lq, ceiling));
        });
      } else if (q.exact) {
        e.inside = both(less_equal(*e.bracket_lo, e.estimate), less_equal(e.estimate, *e.bracket_hi));
      } else {
        e.inside = less_equal(e.estimate, *e.bracket_hi);
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace toeplitz_forge
