#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace etale {

/// Ordered key/value witness attached to a failing check.
using Witness = std::vector<std::pair<std::string, std::string>>;

/// Outcome of one verification suite: counts plus the first counterexample.
struct SuiteResult {
  std::string name;
  bool passed = true;
  int64_t checked = 0;
  int64_t failures = 0;
  std::optional<Witness> counterexample;
  /// Lowest filtration degree at which a residual was certified, when meaningful.
  std::optional<int64_t> floor;

  explicit SuiteResult(std::string n = {}) : name(std::move(n)) {}

  /// Counts one check; the witness builder runs only for the first failure.
  void check(bool ok, const std::function<Witness()>& witness) {
    ++checked;
    if (ok) return;
    ++failures;
    if (passed) counterexample = witness();
    passed = false;
  }

  void note_floor(int64_t d) {
    if (!floor || d < *floor) floor = d;
  }

  /// Folds another result for the same suite into this one.
  void merge(const SuiteResult& o) {
    checked += o.checked;
    failures += o.failures;
    if (!o.passed && passed) counterexample = o.counterexample;
    passed = passed && o.passed;
    if (o.floor) note_floor(*o.floor);
  }
};

}  // namespace etale
