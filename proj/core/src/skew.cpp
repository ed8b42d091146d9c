#include "toeplitz_forge/skew.hpp"

#include "toeplitz_forge/errors.hpp"

namespace toeplitz_forge {

OdometerCoordinate OdometerCoordinate::of(const DomainFamily& family, const LatticeVector& g, int depth) {
  OdometerCoordinate c;
  c.first_index = family.first_index();
  for (int n = c.first_index; n <= depth; ++n) c.residues.push_back(family.project(n, g));
  return c;
}

const LatticeVector& OdometerCoordinate::at(int n) const {
  if (n < first_index || n - first_index >= static_cast<int>(residues.size())) {
    throw InvalidArgument("odometer level " + std::to_string(n) + " not stored");
  }
  return residues[static_cast<std::size_t>(n - first_index)];
}

bool OdometerCoordinate::compatible(const DomainFamily& family) const {
  for (std::size_t i = 0; i + 1 < residues.size(); ++i) {
    const int n = first_index + static_cast<int>(i);
    if (!(family.project(n, residues[i + 1]) == residues[i])) return false;
  }
  return true;
}

LatticeVector pi_t(const ArrayHandle& handle, int t) { return handle.family().project(t, handle.translation()); }

bool verify_pi_t(const ArrayHandle& handle, int t, const FundamentalDomain& window) {
  const ArrayHandle base(handle.source_ptr());
  const LatticeVector d = pi_t(handle, t);
  bool ok = true;
  EvalCache cache;
  window.for_each_point([&](const LatticeVector& h) {
    if (!ok) return;
    const bool py = per_membership(handle, h, t), px = per_membership(base, h + d, t);
    if (py != px) {
      ok = false;
    } else if (py && handle(h, &cache) != base(h + d, &cache)) {
      ok = false;
    }
  });
  return ok;
}

LatticeVector epsilon_t(const DomainFamily& family, const LatticeVector& g, const LatticeVector& h, int t) {
  LatticeVector v = -family.project(t, g + h) + g + family.project(t, h);
  DiagonalMatrix p = family.period(t);
  if (!p.divides(v)) throw CertificationFailure("carry of " + g.str() + " and " + h.str() + " is not integral");
  return p.solve(v);
}

SymbolBlock w_t(const ArrayHandle& handle, const LatticeVector& gamma, int t) {
  if (!handle.family().period(t).divides(gamma)) throw InvalidArgument("w_t needs an aligned position");
  return read_block(handle, t, gamma - pi_t(handle, t));
}

std::size_t derived_array_eval(const ArrayHandle& handle, int t, const LatticeVector& g, const Census& census) {
  if (census.level() != t) throw InvalidArgument("census level differs from t");
  SymbolBlock b = w_t(handle, handle.family().period(t).apply(g), t);
  auto index = census.index_of(b.letters);
  if (!index) throw CertificationFailure("block at " + g.str() + " is missing from the census");
  return *index;
}

SkewCheck skew_equivariance_check(const ArrayHandle& handle, const LatticeVector& g, int t,
                                  const FundamentalDomain& window, const Census& census) {
  const DomainFamily& family = handle.family();
  SkewCheck out;
  const ArrayHandle moved = handle.translated(g);
  const LatticeVector pi_y = pi_t(handle, t);
  out.first_coordinate = family.period(t).divides(pi_t(moved, t) - (g + pi_y));
  out.carry = epsilon_t(family, g, pi_y, t);
  out.verdict = out.first_coordinate ? Verdict::kTrue : Verdict::kFalse;
  window.for_each_point([&](const LatticeVector& h) {
    if (out.verdict != Verdict::kTrue) return;
    ++out.cells;
    if (derived_array_eval(moved, t, h, census) != derived_array_eval(handle, t, h + out.carry, census)) {
      out.verdict = Verdict::kFalse;
      out.mismatch = h;
    }
  });
  out.detail = !out.first_coordinate ? "odometer coordinate does not move by g"
               : out.mismatch        ? "derived arrays differ at " + out.mismatch->str()
                                     : "identity holds on " + std::to_string(out.cells) + " cells";
  return out;
}

}  // namespace toeplitz_forge
