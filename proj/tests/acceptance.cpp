// Acceptance runner: one PASS/FAIL line per criterion on stdout, timings on stderr.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "etale/harness.hpp"

using namespace etale;

namespace {

struct GroupRun {
  Report report;
  double seconds = 0;
};

// (f, group) -> run over the full preset sweep.
std::map<std::pair<int, std::string>, GroupRun> g_runs;

RunConfig preset_config(int f, const std::string& group) {
  RunConfig c;
  c.f = f;
  c.p = preset_for_f(f).p;
  c.suites = {group};
  c.iwasawa_units = 20;
  c.mat_a_units = 10;
  c.theta_problems = 50;
  c.threads = thread_count();
  return c;
}

const GroupRun& run_group(int f, const std::string& group) {
  auto key = std::make_pair(f, group);
  auto it = g_runs.find(key);
  if (it != g_runs.end()) return it->second;
  const auto t0 = std::chrono::steady_clock::now();
  GroupRun g{run_suite(preset_config(f, group)), 0};
  g.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "  [timing] f=" << f << " " << group << ": " << g.seconds << " s\n";
  return g_runs.emplace(key, std::move(g)).first->second;
}

struct Tally {
  bool ok = true;
  int64_t checked = 0;
  int64_t runs = 0;
  std::string first_failure;

  void fail(const std::string& why) {
    if (ok) first_failure = why;
    ok = false;
  }
};

void tally_suites(Tally& t, int f, const std::string& group, const std::set<std::string>& names) {
  const GroupRun& g = run_group(f, group);
  int64_t seen = 0;
  for (const auto& s : g.report.suites) {
    if (!names.count(s.result.name)) continue;
    ++seen;
    ++t.runs;
    t.checked += s.result.checked;
    if (!s.result.passed) {
      std::string w = s.result.name + " " + s.params + " failures=" + std::to_string(s.result.failures);
      if (s.result.counterexample)
        for (const auto& [k, v] : *s.result.counterexample) w += " " + k + "=" + v;
      t.fail(w);
    }
  }
  if (seen == 0) t.fail("no " + group + " suites ran at f=" + std::to_string(f));
}

void time_limit(Tally& t, int f, const std::string& group, double limit) {
  const double s = run_group(f, group).seconds;
  if (s >= limit) {
    std::ostringstream os;
    os << group << " at f=" << f << " took " << s << " s (limit " << limit << " s)";
    t.fail(os.str());
  }
}

Tally sweep(const std::string& group, const std::set<std::string>& names) {
  Tally t;
  for (int f = 1; f <= 3; ++f) tally_suites(t, f, group, names);
  return t;
}

Tally criterion1() {
  Tally t = sweep("identities", {"appendix_d"});
  // The timings cover every identity suite, so they bound appendix_d from above.
  time_limit(t, 1, "identities", 60);
  time_limit(t, 2, "identities", 60);
  time_limit(t, 3, "identities", 600);
  return t;
}

Tally criterion2() {
  Tally t = sweep("identities", {"lemma_a2", "region_claims"});
  for (const auto& [m, name] : mutation_names()) {
    if (m == Mutation::None) continue;
    RunConfig c = preset_config(2, "identities");
    c.suites = {"identities", "phigamma"};
    c.mat_a_units = 2;
    c.theta_problems = 2;
    c.mutate = m;
    Report rep = run_suite(c);
    int64_t failures = 0;
    for (const auto& s : rep.suites) failures += s.result.failures;
    std::cerr << "  [mutation] " << name << ": " << failures << " failures\n";
    if (failures < 1) t.fail("mutation " + name + " undetected");
  }
  return t;
}

Tally criterion3() { return sweep("identities", {"bounds"}); }

Tally criterion4() {
  Tally t = sweep("iwasawa", {"iwasawa"});
  time_limit(t, 2, "iwasawa", 120);
  return t;
}

Tally criterion5() { return sweep("phigamma", {"etale_matrix"}); }

Tally criterion6() { return sweep("phigamma", {"theta_solver"}); }

Tally criterion7() {
  Tally t = sweep("phigamma", {"mat_a"});
  time_limit(t, 2, "phigamma", 300);
  return t;
}

Tally criterion8() { return sweep("weights", {"rank"}); }

Tally criterion9() { return sweep("weights", {"weights"}); }

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Tally()>>> criteria = {
      {"identity suite over all presets", criterion1},
      {"inequality claims and mutation detection", criterion2},
      {"bounds suite", criterion3},
      {"Iwasawa axioms and unit action", criterion4},
      {"etale matrix invertible with twist compatibility", criterion5},
      {"theta solver", criterion6},
      {"Mat(a)' commutation, zero pattern and depth", criterion7},
      {"rank formula", criterion8},
      {"counting identities", criterion9},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Tally t;
    try {
      t = criteria[i].second();
    } catch (const std::exception& e) {
      t.fail(std::string("exception: ") + e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << (i + 1) << ": " << (t.ok ? "PASS" : "FAIL") << "  " << criteria[i].first << " ("
              << t.runs << " suite runs, " << t.checked << " checks)";
    if (!t.ok) std::cout << "  first failure: " << t.first_failure;
    std::cout << std::endl;
    std::cerr << "criterion " << (i + 1) << " took " << s << " s\n";
    if (!t.ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
