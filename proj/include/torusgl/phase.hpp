#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "torusgl/energetics.hpp"
#include "torusgl/errors.hpp"
#include "torusgl/selfdual.hpp"

namespace tgl {

// Quadratures of one trial state, enough to evaluate the field-threshold
// functional at any coupling.
struct QuasimodeData {
  double H_source = 0.0;       // internal field the state was solved at
  int grid_n = 0;
  double kinetic_plain = 0.0;  // |i grad u + C u|^2
  double curl2 = 0.0;          // (curl a)^2
  double potential_raw = 0.0;  // (1 - |u|^2)^2
  double int_u2 = 0.0;
  double chi = 0.0;            // slope integrand, see chi() below
};

struct HkResult {
  double value = 0.0;
  double optimal_H_int = 0.0;
  bool degenerate = false;  // vanishing potential term; no finite optimum
};

// Threshold functional from the raw quadratures: kin/(4 pi k) +
// sqrt((1/2 + curl2/(8 pi^2)) pot), minimized over the internal field in
// closed form.  Its value at any trial state bounds the first critical field
// from above.
inline HkResult h_k_from_integrals(double kinetic_plain, double curl2,
                                   double potential_raw, double k) {
  if (!(k >= kInvSqrt2 - 1e-12))
    throw std::domain_error("h_k functional: require k >= 1/sqrt(2)");
  HkResult out;
  const double denom = 0.5 + curl2 / (8.0 * kPi * kPi);
  if (potential_raw <= 0.0) {
    out.value = kinetic_plain / (4.0 * kPi * k);
    out.degenerate = true;
    return out;
  }
  out.value = kinetic_plain / (4.0 * kPi * k) + std::sqrt(denom * potential_raw);
  out.optimal_H_int = 0.5 * std::sqrt(potential_raw / denom);
  return out;
}

inline HkResult h_k_functional(const SectionField& u, const VectorField& a,
                               double k, const ScalarField* curl_a = nullptr) {
  detail::require_pair(u, a, "h_k_functional");
  const auto raw = detail::raw_integrals(u, a, curl_a);
  return h_k_from_integrals(raw.kinetic_plain, raw.curl2, raw.potential_raw, k);
}

// Slope integrand of the threshold expansion at the self-dual point:
// 1 - sqrt(2) H - (H / (2 pi^2 sqrt 2)) * curl2.  Vanishes at the bifurcation
// endpoint and tends to the lattice-dependent slope constant as H -> 0.
inline double chi_of(double H_int, double curl2) {
  return 1.0 - kSqrt2 * H_int - H_int * curl2 / (2.0 * kPi * kPi * kSqrt2);
}

inline double chi(const SolutionPair& p) {
  if (p.degenerate) return 0.0;
  return chi_of(p.H_int, p.int_curl2);
}

inline QuasimodeData quasimode_data(const SolutionPair& p) {
  QuasimodeData q;
  q.H_source = p.H_int;
  q.grid_n = p.grid.n;
  q.kinetic_plain = p.int_kinetic_plain;
  q.curl2 = p.int_curl2;
  q.potential_raw = p.int_one_minus_u2_sq;
  q.int_u2 = p.int_u2;
  q.chi = chi(p);
  return q;
}

// Rigorous lower bound for the first critical field, valid for k >= 1/sqrt(2).
inline double hc1_lower_bound(double k) {
  if (!(k >= kInvSqrt2 - 1e-12))
    throw std::domain_error("hc1_lower_bound: require k >= 1/sqrt(2)");
  return 1.0 / (2.0 * k);
}

inline double hc2(double k) {
  if (!(k > 0.0)) throw std::domain_error("hc2: require k > 0");
  return std::max(k, kInvSqrt2);
}

struct UpperBound {
  double value = 0.0;
  int witness = -1;  // index into the family; -1 denotes the trivial state
  double optimal_H_int = 0.0;
};

// Upper bound for the first critical field: minimum of the threshold
// functional over the solved family plus the trivial zero state (whose value
// is exactly 1/sqrt 2).
inline UpperBound hc1_upper_bound(double k, const std::vector<QuasimodeData>& family) {
  if (!(k >= kInvSqrt2 - 1e-12))
    throw std::domain_error("hc1_upper_bound: require k >= 1/sqrt(2)");
  if (family.empty())
    throw std::domain_error("hc1_upper_bound: empty quasimode family");
  UpperBound best;
  best.value = kInvSqrt2;  // trivial state: kin = curl2 = 0, pot = 1
  best.witness = -1;
  best.optimal_H_int = kInvSqrt2;
  for (size_t i = 0; i < family.size(); ++i) {
    const auto& q = family[i];
    const HkResult h = h_k_from_integrals(q.kinetic_plain, q.curl2,
                                          q.potential_raw, k);
    if (!h.degenerate && h.value < best.value) {
      best.value = h.value;
      best.witness = static_cast<int>(i);
      best.optimal_H_int = h.optimal_H_int;
    }
  }
  return best;
}

struct SweepRow {
  double H_int = 0.0;
  double chi = 0.0;
  double curl_energy = 0.0;
  int grid_n = 0;
};

struct SEstimate {
  double grid_sup = 0.0;       // largest chi over the sweep
  double extrapolated = 0.0;   // linear fit of the three smallest fields at H = 0
  std::vector<SweepRow> rows;
  std::vector<QuasimodeData> family;
  bool complete = false;
  std::string error;
};

inline std::vector<double> default_H_grid() {
  std::vector<double> H;
  for (int k = 0; k <= 13; ++k) H.push_back(0.70 - 0.05 * k);
  H.push_back(0.04);
  H.push_back(0.03);
  H.push_back(0.02);
  return H;
}

// Continuation sweep over a descending field list, reporting the slope
// integrand row by row and its zero-field extrapolation.  Optionally hands
// back the full solution pairs.
inline SEstimate estimate_S(const Lattice& lat, const std::vector<double>& H_desc,
                            const SolverConfig& cfg,
                            std::vector<SolutionPair>* keep_pairs = nullptr) {
  if (H_desc.empty()) throw config_error("estimate_S: empty field grid");
  SweepResult sweep = continuation_sweep(lat, H_desc, cfg);
  SEstimate out;
  out.complete = sweep.complete;
  out.error = sweep.error;
  for (const auto& p : sweep.pairs) {
    const QuasimodeData q = quasimode_data(p);
    out.family.push_back(q);
    out.rows.push_back(SweepRow{p.H_int, q.chi, q.curl2, p.grid.n});
    out.grid_sup = std::max(out.grid_sup, q.chi);
  }
  if (keep_pairs) *keep_pairs = std::move(sweep.pairs);

  // least-squares line through the smallest fields, evaluated at H = 0
  const size_t m = out.rows.size();
  const size_t fit = std::min<size_t>(3, m);
  if (fit == 0) {
    out.extrapolated = 0.0;
  } else if (fit == 1) {
    out.extrapolated = out.rows.back().chi;
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = m - fit; i < m; ++i) {
      sx += out.rows[i].H_int;
      sy += out.rows[i].chi;
      sxx += out.rows[i].H_int * out.rows[i].H_int;
      sxy += out.rows[i].H_int * out.rows[i].chi;
    }
    const double nfit = static_cast<double>(fit);
    const double slope = (nfit * sxy - sx * sy) / (nfit * sxx - sx * sx);
    out.extrapolated = (sy - slope * sx) / nfit;
  }
  return out;
}

enum class Phase { Pure, Normal, Mixed, Undetermined };

inline const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Pure: return "pure";
    case Phase::Normal: return "normal";
    case Phase::Mixed: return "mixed";
    default: return "undetermined";
  }
}

struct PhasePoint {
  double k = 0.0;
  double H_ext = 0.0;
  Phase phase = Phase::Undetermined;
  double hc1_lower = 0.0;
  double hc1_upper = 0.0;
  double hc2 = 0.0;
  int witness = -1;  // quasimode deciding a mixed classification
};

// Classify one point of the (k, H) plane.  At or below the self-dual coupling
// the three critical curves coincide at 1/sqrt 2; above it the decision uses
// the rigorous lower bound and the computed upper bound, leaving a narrow
// undetermined band between them.
inline PhasePoint classify(double k, double H_ext,
                           const std::vector<QuasimodeData>& family) {
  if (!(k > 0.0) || !(H_ext > 0.0))
    throw std::domain_error("classify: require k > 0 and H_ext > 0");
  PhasePoint out;
  out.k = k;
  out.H_ext = H_ext;
  out.hc2 = hc2(k);
  if (k <= kInvSqrt2 + 1e-12) {
    out.hc1_lower = out.hc1_upper = kInvSqrt2;
    out.phase = (H_ext <= kInvSqrt2) ? Phase::Pure : Phase::Normal;
    return out;
  }
  out.hc1_lower = hc1_lower_bound(k);
  const UpperBound ub = hc1_upper_bound(k, family);
  out.hc1_upper = ub.value;
  if (H_ext >= k) {
    out.phase = Phase::Normal;
  } else if (H_ext > ub.value) {
    out.phase = Phase::Mixed;
    out.witness = ub.witness;
  } else if (H_ext <= out.hc1_lower) {
    out.phase = Phase::Pure;
  } else {
    out.phase = Phase::Undetermined;
  }
  return out;
}

struct DiagramRow {
  double k = 0.0;
  double hc1_lower = 0.0;
  double hc1_upper = 0.0;
  double hc2 = 0.0;
};

inline std::vector<DiagramRow> diagram_rows(const std::vector<double>& ks,
                                            const std::vector<QuasimodeData>& family) {
  std::vector<DiagramRow> rows;
  rows.reserve(ks.size());
  for (double k : ks) {
    if (!(k > 0.0)) throw std::domain_error("diagram_rows: require k > 0");
    DiagramRow row;
    row.k = k;
    row.hc2 = hc2(k);
    if (k <= kInvSqrt2 + 1e-12) {
      row.hc1_lower = row.hc1_upper = kInvSqrt2;
    } else {
      row.hc1_lower = hc1_lower_bound(k);
      row.hc1_upper = hc1_upper_bound(k, family).value;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tgl
