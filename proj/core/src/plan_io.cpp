#include "toeplitz_forge/plan_io.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "toeplitz_forge/errors.hpp"

namespace toeplitz_forge {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string item;
  while (ss >> item) out.push_back(item);
  return out;
}

std::string interval_to_text(const Interval& v) {
  return "[" + v.lo_dyadic() + ", " + v.hi_dyadic() + "]";
}

Interval interval_from_text(const std::string& text) {
  std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
    throw FormatError("malformed interval: " + text);
  }
  auto comma = t.find(',');
  if (comma == std::string::npos) throw FormatError("malformed interval: " + text);
  return Interval::from_dyadic(trim(t.substr(1, comma - 1)), trim(t.substr(comma + 1, t.size() - comma - 2)));
}

FamilyKind family_kind_from(const std::string& s) {
  if (s == "full_symmetric") return FamilyKind::kFullSymmetric;
  if (s == "hybrid") return FamilyKind::kHybrid;
  if (s == "explicit") return FamilyKind::kExplicit;
  throw FormatError("unknown family kind: " + s);
}

long parse_long(const std::string& s) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw FormatError("trailing characters in integer: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("malformed integer: " + s);
  }
}

std::uint64_t parse_u64(const std::string& s) {
  Integer v = parse_integer(s);
  if (v < 0 || !fits_u64(v)) throw FormatError("value out of range: " + s);
  return to_u64(v);
}

class KeyValues {
 public:
  explicit KeyValues(std::istream& in) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      auto eq = t.find('=');
      if (eq == std::string::npos) throw FormatError("line " + std::to_string(lineno) + ": missing '='");
      std::string key = trim(t.substr(0, eq));
      if (values_.count(key)) throw FormatError("duplicate key: " + key);
      values_[key] = trim(t.substr(eq + 1));
    }
  }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw FormatError("missing key: " + key);
    return it->second;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace

std::string magnitude_to_text(const Magnitude& m) {
  if (m.exact) return m.exact->get_str(10);
  return "log " + interval_to_text(m.log);
}

Magnitude magnitude_from_text(const std::string& text) {
  std::string t = trim(text);
  if (t.rfind("log", 0) == 0) {
    Interval iv = interval_from_text(t.substr(3));
    // Keep the stored endpoints exactly.
    return Magnitude::symbolic(iv);
  }
  Integer v = parse_integer(t);
  if (v < 1) throw FormatError("magnitudes must be positive: " + text);
  return Magnitude::of(v);
}

void write_plan(std::ostream& out, const ConstructionPlan& plan) {
  out << "format = " << kPlanFormat << "\n";
  out << "mode = " << to_string(plan.mode) << "\n";
  out << "alphabet_size = " << plan.alphabet_size << "\n";
  out << "dimension = " << plan.dimension << "\n";
  if (plan.mode == PlanMode::kTheorem) {
    out << "entropy = " << to_string(plan.entropy) << "\n";
    out << "lambda_iterations = " << plan.lambda_iterations << "\n";
    out << "lambda_bound = " << interval_to_text(plan.lambda_bound) << "\n";
    out << "tail_base = " << plan.tail_base << "\n";
    out << "tail_start = " << plan.tail_start << "\n";
    out << "digit_budget = " << plan.digit_budget << "\n";
    out << "symbolic_levels = " << plan.symbolic_levels << "\n";
  }
  out << "levels = " << plan.levels() << "\n";
  for (std::size_t n = 0; n < plan.increments.size(); ++n) {
    for (std::size_t i = 0; i < plan.increments[n].size(); ++i) {
      out << "increment." << n << "." << (i + 1) << " = " << magnitude_to_text(plan.increments[n][i]) << "\n";
    }
  }
  for (std::size_t n = 0; n < plan.block_count.size(); ++n) {
    out << "block_count." << n << " = " << magnitude_to_text(plan.block_count[n]) << "\n";
  }
  for (std::size_t n = 0; n < plan.domain_size.size(); ++n) {
    out << "domain_size." << n << " = " << magnitude_to_text(plan.domain_size[n]) << "\n";
  }
  out << "offsets = " << to_string(plan.offset_mode);
  if (plan.offset_mode == OffsetMode::kShifted) out << " " << plan.shift_from;
  out << "\n";
  for (std::size_t n = 0; n < plan.lowers.size(); ++n) {
    out << "lower." << (n + 1) << " = " << plan.lowers[n].str() << "\n";
  }
  for (std::size_t n = 0; n < plan.family_kinds.size(); ++n) {
    out << "family." << (n + 1) << " = " << to_string(plan.family_kinds[n]) << "\n";
    if (plan.family_kinds[n] != FamilyKind::kExplicit) continue;
    const auto& lists = plan.family_lists[n];
    for (std::size_t j = 0; j < lists.size(); ++j) {
      out << "family." << (n + 1) << ".list." << (j + 1) << " =";
      for (auto v : lists[j]) out << " " << v;
      out << "\n";
    }
  }
  if (plan.substitution) {
    out << "substitution.base_alphabet = " << plan.substitution->base_alphabet << "\n";
    out << "substitution.side = " << plan.substitution->side << "\n";
    out << "substitution.base_entropy = " << to_string(plan.substitution->base_entropy) << "\n";
  }
  for (const auto& c : plan.certificates) {
    out << "certificate." << c.level << "." << c.name << " = " << to_string(c.verdict) << "\n";
  }
}

std::string plan_to_string(const ConstructionPlan& plan) {
  std::ostringstream ss;
  write_plan(ss, plan);
  return ss.str();
}

ConstructionPlan read_plan(std::istream& in) {
  KeyValues kv(in);
  if (kv.get("format") != kPlanFormat) throw FormatError("unsupported plan format: " + kv.get("format"));
  ConstructionPlan plan;
  const std::string& mode = kv.get("mode");
  if (mode == "theorem") {
    plan.mode = PlanMode::kTheorem;
  } else if (mode == "toy") {
    plan.mode = PlanMode::kToy;
  } else {
    throw FormatError("unknown plan mode: " + mode);
  }
  plan.alphabet_size = parse_u64(kv.get("alphabet_size"));
  plan.dimension = static_cast<std::size_t>(parse_u64(kv.get("dimension")));
  if (plan.dimension < 1) throw FormatError("dimension must be positive");
  if (plan.mode == PlanMode::kTheorem) {
    try {
      plan.entropy = parse_rational(kv.get("entropy"));
    } catch (const InvalidArgument& e) {
      throw FormatError(e.what());
    }
    plan.lambda_iterations = static_cast<int>(parse_long(kv.get("lambda_iterations")));
    plan.lambda_bound = interval_from_text(kv.get("lambda_bound"));
    plan.tail_base = parse_long(kv.get("tail_base"));
    plan.tail_start = static_cast<int>(parse_long(kv.get("tail_start")));
    plan.digit_budget = static_cast<std::size_t>(parse_u64(kv.get("digit_budget")));
    plan.symbolic_levels = static_cast<int>(parse_long(kv.get("symbolic_levels")));
  }
  long levels = parse_long(kv.get("levels"));
  if (levels < 0 || levels > 4096) throw FormatError("level count out of range");
  for (long n = 0; n <= levels; ++n) {
    std::vector<Magnitude> diag;
    for (std::size_t i = 1; i <= plan.dimension; ++i) {
      diag.push_back(magnitude_from_text(kv.get("increment." + std::to_string(n) + "." + std::to_string(i))));
    }
    plan.increments.push_back(std::move(diag));
    plan.block_count.push_back(magnitude_from_text(kv.get("block_count." + std::to_string(n))));
  }
  for (long n = 0; n <= levels + 1; ++n) {
    plan.domain_size.push_back(magnitude_from_text(kv.get("domain_size." + std::to_string(n))));
  }
  auto offsets = split_ws(kv.get("offsets"));
  if (offsets.empty()) throw FormatError("empty offsets entry");
  if (offsets[0] == "shifted") {
    plan.offset_mode = OffsetMode::kShifted;
    if (offsets.size() != 2) throw FormatError("shifted offsets need a starting level");
    plan.shift_from = static_cast<int>(parse_long(offsets[1]));
  } else if (offsets[0] == "zero") {
    plan.offset_mode = OffsetMode::kZero;
  } else if (offsets[0] == "explicit") {
    plan.offset_mode = OffsetMode::kExplicit;
    for (long n = 1; n <= levels + 1; ++n) {
      LatticeVector v = LatticeVector::parse(kv.get("lower." + std::to_string(n)));
      if (v.dim() != plan.dimension) throw FormatError("corner dimension mismatch");
      plan.lowers.push_back(std::move(v));
    }
  } else {
    throw FormatError("unknown offsets mode: " + offsets[0]);
  }
  for (long n = 1; n <= levels; ++n) {
    const std::string key = "family." + std::to_string(n);
    FamilyKind kind = family_kind_from(kv.get(key));
    plan.family_kinds.push_back(kind);
    std::vector<std::vector<std::uint64_t>> lists;
    if (kind == FamilyKind::kExplicit) {
      for (long j = 1; kv.has(key + ".list." + std::to_string(j)); ++j) {
        std::vector<std::uint64_t> list;
        for (const auto& item : split_ws(kv.get(key + ".list." + std::to_string(j)))) {
          list.push_back(parse_u64(item));
        }
        lists.push_back(std::move(list));
      }
    }
    plan.family_lists.push_back(std::move(lists));
  }
  if (kv.has("substitution.base_alphabet")) {
    SubstitutionSpec spec;
    spec.base_alphabet = parse_u64(kv.get("substitution.base_alphabet"));
    spec.side = parse_u64(kv.get("substitution.side"));
    spec.base_entropy = parse_rational(kv.get("substitution.base_entropy"));
    plan.substitution = spec;
  }
  plan.certificates = certify(plan);
  return plan;
}

ConstructionPlan plan_from_string(const std::string& text) {
  std::istringstream ss(text);
  return read_plan(ss);
}

std::vector<PlanCheck> verify_plan(const ConstructionPlan& plan) {
  std::vector<PlanCheck> out;
  for (const auto& c : certify(plan)) {
    out.push_back(PlanCheck{"level " + std::to_string(c.level) + " " + c.name,
                            c.verdict == Verdict::kTrue, c.detail});
  }
  if (plan.mode != PlanMode::kTheorem) return out;
  PlannerOptions options;
  options.digit_budget = plan.digit_budget;
  options.symbolic_levels = plan.symbolic_levels;
  options.lambda_iterations = plan.lambda_iterations;
  options.tail_base = plan.tail_base;
  options.tail_start = plan.tail_start;
  ConstructionPlan fresh;
  try {
    fresh = plan_theorem(plan.alphabet_size, plan.dimension, plan.entropy, options);
  } catch (const Error& e) {
    out.push_back(PlanCheck{"recomputation", false, e.what()});
    return out;
  }
  ConstructionPlan stored = plan;
  stored.certificates = fresh.certificates;
  stored.substitution = fresh.substitution = std::nullopt;
  bool same = plan_to_string(stored) == plan_to_string(fresh);
  out.push_back(PlanCheck{"recomputation", same,
                          same ? "stored values match a fresh plan" : "stored values differ from a fresh plan"});
  return out;
}

std::string certification_report(const ConstructionPlan& plan) {
  std::ostringstream ss;
  ss << "plan mode " << to_string(plan.mode) << ", alphabet " << plan.alphabet_size << ", dimension "
     << plan.dimension << "\n";
  if (plan.mode == PlanMode::kTheorem) {
    ss << "entropy " << to_string(plan.entropy) << ", lambda bound " << plan.lambda_bound.str(12)
       << " after " << plan.lambda_iterations << " iterations\n";
    ss << "tail base M = " << plan.tail_base << ", tail start N = " << plan.tail_start << "\n";
  }
  for (int n = 0; n <= plan.levels(); ++n) {
    ss << "q_" << n << " = " << plan.block_count[n].str() << "\n";
  }
  for (const auto& c : plan.certificates) {
    ss << "[" << to_string(c.verdict) << "] level " << c.level << " " << c.name << ": " << c.detail << "\n";
  }
  return ss.str();
}

}  // namespace toeplitz_forge
