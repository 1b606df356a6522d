#pragma once

#include <vector>

#include "base.hpp"
#include "weights.hpp"

namespace etale {

struct Preset {
  int f;
  int p;
  std::vector<IntVec> rs;  // every admissible r for this (p, f)
  int default_cutoff;
};

/// Every r with 2f+1 <= r_j <= p−3−2f (and r_0 >= 4 when f=1).
inline std::vector<IntVec> generic_rs(int p, int f) {
  int lo = 2 * f + 1, hi = p - 3 - 2 * f;
  if (f == 1 && lo < 4) lo = 4;
  std::vector<IntVec> out;
  if (lo > hi) return out;
  IntVec r(f, lo);
  while (true) {
    out.push_back(r);
    int j = 0;
    while (j < f && r[j] == hi) r[j++] = lo;
    if (j == f) break;
    ++r[j];
  }
  return out;
}

inline int default_cutoff(int p, int f) {
  if (f == 1) return 40;
  if (f == 2) return 30;
  return 2 * p;
}

/// Default sweep: (11, 1), (13, 2), (17, 3), each with all generic r.
inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> ps = {
      {1, 11, generic_rs(11, 1), default_cutoff(11, 1)},
      {2, 13, generic_rs(13, 2), default_cutoff(13, 2)},
      {3, 17, generic_rs(17, 3), default_cutoff(17, 3)},
  };
  return ps;
}

inline const Preset& preset_for_f(int f) {
  for (const auto& p : presets())
    if (p.f == f) return p;
  fail(ErrorKind::ConfigInvalid, "no preset for f=" + std::to_string(f));
}

/// All validated parameter tuples of a preset, over every r and every Jrho.
inline std::vector<RhoParams> preset_params(const Preset& pr) {
  std::vector<RhoParams> out;
  for (const auto& r : pr.rs)
    for (const auto& Jr : all_subsets(pr.f)) out.push_back(validate_params(pr.p, pr.f, r, Jr));
  return out;
}

}  // namespace etale
