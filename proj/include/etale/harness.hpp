#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "check.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "iwasawa.hpp"
#include "parallel.hpp"
#include "phigamma.hpp"
#include "presets.hpp"
#include "weights.hpp"

namespace etale {

inline const std::vector<std::string>& suite_groups() {
  static const std::vector<std::string> g = {"identities", "weights", "iwasawa", "phigamma"};
  return g;
}

/// One verification run. Absent r sweeps every generic r; absent Jrho sweeps every subset.
struct RunConfig {
  int p = 0;
  int f = 0;
  std::optional<IntVec> r;
  std::optional<SubsetJ> Jrho;
  int cutoff = 0;  // 0 selects the preset default
  uint64_t seed = 1;
  std::set<std::string> suites{"all"};
  Mutation mutate = Mutation::None;
  int iwasawa_units = 20;
  int mat_a_units = 10;
  int theta_problems = 50;
  int threads = 1;

  int effective_cutoff() const { return cutoff > 0 ? cutoff : default_cutoff(p, f); }
  bool wants(const std::string& group) const { return suites.count("all") || suites.count(group); }

  /// Every parameter tuple in the sweep; throws on non-generic input.
  std::vector<RhoParams> tuples() const {
    std::vector<IntVec> rs = r ? std::vector<IntVec>{*r} : generic_rs(p, f);
    require(!rs.empty(), ErrorKind::ConfigInvalid, "no generic r for p=" + std::to_string(p) + " f=" + std::to_string(f));
    std::vector<SubsetJ> jrs = Jrho ? std::vector<SubsetJ>{*Jrho} : all_subsets(f);
    std::vector<RhoParams> out;
    for (const auto& rv : rs)
      for (const auto& J : jrs) out.push_back(validate_params(p, f, rv, J));
    return out;
  }

  /// Raises ConfigInvalid (or the genericity error) for anything the suites cannot run on.
  void validate() const {
    require(f >= 1 && f <= 3, ErrorKind::ConfigInvalid, "f must be 1, 2 or 3");
    require(p >= 2 && p < 1000, ErrorKind::ConfigInvalid, "p out of range");
    if (r) require(r->f() == f, ErrorKind::ConfigInvalid, "r needs f entries");
    if (Jrho) require(Jrho->f() == f, ErrorKind::ConfigInvalid, "Jrho is for a different f");
    for (const auto& s : suites)
      require(s == "all" || std::count(suite_groups().begin(), suite_groups().end(), s), ErrorKind::ConfigInvalid,
              "unknown suite '" + s + "'");
    require(!suites.empty(), ErrorKind::ConfigInvalid, "no suite selected");
    const int D = effective_cutoff();
    require(D >= 2 && D <= 256, ErrorKind::ConfigInvalid, "cutoff out of range");
    uint64_t box = 1;
    for (int l = 0; l < f; ++l) box *= static_cast<uint64_t>(D);
    require(box <= (uint64_t{1} << 26), ErrorKind::ConfigInvalid, "cutoff too large for f");
    require(iwasawa_units >= 0 && mat_a_units >= 0 && theta_problems >= 0, ErrorKind::ConfigInvalid,
            "sample counts must be non-negative");
    tuples();
  }
};

struct SuiteEntry {
  std::string params;  // the tuple the suite ran on
  SuiteResult result;
  double seconds = 0;  // never serialized
};

struct Report {
  RunConfig config;
  std::vector<SuiteEntry> suites;
  std::string field_polynomial;

  bool passed() const {
    for (const auto& s : suites)
      if (!s.result.passed) return false;
    return true;
  }
};

namespace detail {

inline SuiteResult guarded(const std::string& name, const std::function<SuiteResult()>& run) {
  try {
    return run();
  } catch (const Error& e) {
    SuiteResult r(name);
    r.check(false, [&] { return Witness{{"error", e.what()}}; });
    return r;
  }
}

}  // namespace detail

/// Runs the selected suites over the sweep. Tasks are dispatched over the thread pool;
/// the report keeps task order, so it does not depend on scheduling.
inline Report run_suite(const RunConfig& cfg) {
  cfg.validate();
  const auto tuples = cfg.tuples();
  const int D = cfg.effective_cutoff();
  Report rep{cfg, {}, poly_to_string(conway_polynomial(cfg.p, cfg.f))};

  struct Task {
    std::string name, params;
    std::function<SuiteResult()> run;
  };
  std::vector<Task> tasks;
  const Mutation m = cfg.mutate;
  const std::string ctx_label = "p=" + std::to_string(cfg.p) + " f=" + std::to_string(cfg.f) + " D=" + std::to_string(D);

  if (cfg.wants("identities"))
    for (const auto& P : tuples) {
      tasks.push_back({"appendix_d", P.to_string(), [P, m] { return verify_appendix_D(Constants(P, m)); }});
      tasks.push_back({"lemma_a2", P.to_string(), [P, m] { return verify_lemma_A2(Constants(P, m)); }});
      tasks.push_back({"region_claims", P.to_string(), [P, m] { return verify_region_claims(Constants(P, m)); }});
      tasks.push_back({"bounds", P.to_string(), [P, m] { return verify_bounds(Constants(P, m)); }});
    }
  if (cfg.wants("weights"))
    for (const auto& P : tuples) {
      tasks.push_back({"weights", P.to_string(), [P] { return verify_weights(P); }});
      tasks.push_back({"rank", P.to_string(), [P] { return verify_rank(P); }});
    }

  std::shared_ptr<const IwasawaContext> ctx;
  std::vector<WittElem> units;
  if (cfg.wants("iwasawa") || cfg.wants("phigamma")) {
    ctx = IwasawaContext::get(cfg.p, cfg.f, D);
    if (cfg.wants("phigamma")) {
      std::mt19937_64 rng(cfg.seed ^ 0x756e697473ULL);
      for (int k = 0; k < cfg.mat_a_units; ++k) units.push_back(ctx->witt().random_principal_unit(rng));
      // Warm the per-unit cache in parallel; the suites below only read it.
      parallel_for(units.size(), cfg.threads, [&](std::size_t k) { ctx->unit(units[k]); });
    }
  }
  if (cfg.wants("iwasawa")) {
    const uint64_t seed = cfg.seed;
    const int n = cfg.iwasawa_units;
    tasks.push_back({"iwasawa", ctx_label, [ctx, seed, n] { return verify_iwasawa(*ctx, seed, n); }});
  }
  if (cfg.wants("phigamma")) {
    const uint64_t seed = cfg.seed;
    for (const auto& P : tuples) {
      tasks.push_back({"etale_matrix", P.to_string(), [ctx, P, m, seed] {
                         return verify_etale_matrix(ctx->ring(), Constants(P, m), MuAlgebra(P, ctx->field_ptr(), seed));
                       }});
      tasks.push_back({"mat_a", P.to_string(), [ctx, P, m, seed, &units] {
                         return verify_mat_a(*ctx, Constants(P, m), MuAlgebra(P, ctx->field_ptr(), seed), units, 1);
                       }});
    }
    const int n = cfg.theta_problems;
    const int64_t cut = theta_cutoff(cfg.p, cfg.f, D);
    tasks.push_back({"theta_solver", ctx_label, [ctx, seed, n, cut] { return verify_theta_solver(ctx->ring(), seed, n, cut); }});
  }

  rep.suites.resize(tasks.size());
  parallel_for(tasks.size(), cfg.threads, [&](std::size_t i) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteResult r = detail::guarded(tasks[i].name, tasks[i].run);
    r.name = tasks[i].name;
    rep.suites[i] = SuiteEntry{tasks[i].params, std::move(r),
                               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
  });
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization. Timings are left out so that equal configs give equal bytes.

inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["p"] = c.p;
  j["f"] = c.f;
  if (c.r)
    j["r"] = c.r->data();
  else
    j["r"] = "all";
  j["jrho"] = c.Jrho ? nlohmann::ordered_json(c.Jrho->elements()) : nlohmann::ordered_json("all");
  j["cutoff"] = c.effective_cutoff();
  j["seed"] = c.seed;
  j["suites"] = std::vector<std::string>(c.suites.begin(), c.suites.end());
  j["mutate"] = mutation_name(c.mutate);
  j["iwasawa_units"] = c.iwasawa_units;
  j["mat_a_units"] = c.mat_a_units;
  j["theta_problems"] = c.theta_problems;
  return j;
}

inline nlohmann::ordered_json report_to_json(const Report& rep) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["config"] = config_to_json(rep.config);
  j["suites"] = nlohmann::ordered_json::array();
  for (const auto& s : rep.suites) {
    nlohmann::ordered_json e;
    e["name"] = s.result.name;
    e["params"] = s.params;
    e["status"] = s.result.passed ? "pass" : "fail";
    e["checked"] = s.result.checked;
    e["failures"] = s.result.failures;
    if (s.result.counterexample) {
      nlohmann::ordered_json w = nlohmann::ordered_json::object();
      for (const auto& [k, v] : *s.result.counterexample) w[k] = v;
      e["counterexample"] = w;
    }
    if (s.result.floor) e["floor"] = *s.result.floor;
    j["suites"].push_back(e);
  }
  // The unit action is normalized by xi_a = 1; the semisimple diagonal by B = I.
  j["fingerprint"] = {{"field_polynomial", rep.field_polynomial},
                      {"seed", rep.config.seed},
                      {"normalization", {{"xi", "1"}, {"B", "I"}}}};
  j["passed"] = rep.passed();
  return j;
}

inline Report report_from_json(const nlohmann::ordered_json& j) {
  require(j.is_object() && j.value("schema", 0) == 1, ErrorKind::ConfigInvalid, "not a schema 1 report");
  Report rep;
  const auto& c = j.at("config");
  rep.config.p = c.at("p").get<int>();
  rep.config.f = c.at("f").get<int>();
  if (c.at("r").is_array()) rep.config.r = IntVec(c.at("r").get<std::vector<int64_t>>());
  if (c.at("jrho").is_array()) {
    SubsetJ J(rep.config.f, 0);
    for (int e : c.at("jrho").get<std::vector<int>>()) J = J.with(e);
    rep.config.Jrho = J;
  }
  rep.config.cutoff = c.at("cutoff").get<int>();
  rep.config.seed = c.at("seed").get<uint64_t>();
  auto ss = c.at("suites").get<std::vector<std::string>>();
  rep.config.suites = std::set<std::string>(ss.begin(), ss.end());
  rep.config.mutate = parse_mutation(c.at("mutate").get<std::string>());
  rep.config.iwasawa_units = c.at("iwasawa_units").get<int>();
  rep.config.mat_a_units = c.at("mat_a_units").get<int>();
  rep.config.theta_problems = c.at("theta_problems").get<int>();
  for (const auto& e : j.at("suites")) {
    SuiteEntry s{e.at("params").get<std::string>(), SuiteResult(e.at("name").get<std::string>())};
    s.result.passed = e.at("status").get<std::string>() == "pass";
    s.result.checked = e.at("checked").get<int64_t>();
    s.result.failures = e.at("failures").get<int64_t>();
    if (e.contains("counterexample")) {
      Witness w;
      for (const auto& [k, v] : e.at("counterexample").items()) w.emplace_back(k, v.get<std::string>());
      s.result.counterexample = w;
    }
    if (e.contains("floor")) s.result.floor = e.at("floor").get<int64_t>();
    rep.suites.push_back(std::move(s));
  }
  rep.field_polynomial = j.at("fingerprint").at("field_polynomial").get<std::string>();
  return rep;
}

inline std::string report_to_text(const Report& rep) {
  std::ostringstream out;
  const auto& c = rep.config;
  out << "etale verification report (schema 1)\n";
  out << "field polynomial " << rep.field_polynomial << ", seed " << c.seed << ", normalization xi=1 B=I\n";
  out << "config p=" << c.p << " f=" << c.f << " r=" << (c.r ? c.r->to_string() : "all")
      << " Jrho=" << (c.Jrho ? c.Jrho->to_string() : "all") << " cutoff=" << c.effective_cutoff()
      << " mutate=" << mutation_name(c.mutate) << "\n";
  int failed = 0;
  for (const auto& s : rep.suites) {
    out << (s.result.passed ? "[PASS] " : "[FAIL] ") << s.result.name << "  " << s.params << "  checked=" << s.result.checked;
    if (s.result.floor) out << " floor=" << *s.result.floor;
    out << "\n";
    if (!s.result.passed) {
      ++failed;
      out << "       failures=" << s.result.failures;
      if (s.result.counterexample)
        for (const auto& [k, v] : *s.result.counterexample) out << " " << k << "=" << v;
      out << "\n";
    }
  }
  out << "summary: " << rep.suites.size() << " suites, " << failed << " failed\n";
  return out.str();
}

inline std::string emit_report(const Report& rep, const std::string& format) {
  if (format == "json") return report_to_json(rep).dump(2) + "\n";
  require(format == "text", ErrorKind::ConfigInvalid, "format must be json or text");
  return report_to_text(rep);
}

/// Every preset as a RunConfig with the default cutoff and both sweeps open.
inline std::vector<RunConfig> list_params() {
  std::vector<RunConfig> out;
  for (const auto& pr : presets()) {
    RunConfig c;
    c.p = pr.p;
    c.f = pr.f;
    c.cutoff = pr.default_cutoff;
    out.push_back(c);
  }
  return out;
}

}  // namespace etale
