#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "etale/harness.hpp"

using namespace etale;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

std::vector<std::string> split(std::string s) {
  for (char& c : s)
    if (c == '{' || c == '}' || c == '(' || c == ')' || c == ' ') c = ',';
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');)
    if (!tok.empty()) out.push_back(tok);
  return out;
}

int64_t to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int64_t v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::ConfigInvalid, "bad integer '" + s + "' in " + what);
}

IntVec parse_r(const std::string& s) {
  std::vector<int64_t> v;
  for (const auto& t : split(s)) v.push_back(to_int(t, "--r"));
  return IntVec(v);
}

/// "all", "none"/"{}" for the empty set, or a list such as "0,2" / "{0,2}".
std::optional<SubsetJ> parse_jrho(const std::string& s, int f) {
  if (s == "all") return std::nullopt;
  SubsetJ J(f, 0);
  if (s == "none" || s == "empty") return J;
  for (const auto& t : split(s)) {
    int64_t e = to_int(t, "--jrho");
    require(e >= 0 && e < f, ErrorKind::ConfigInvalid, "--jrho element " + t + " outside 0..f-1");
    J = J.with(static_cast<int>(e));
  }
  return J;
}

void write_out(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::ConfigInvalid, "cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification harness for the etale (phi, O_K^x)-module constructions"};
  app.require_subcommand(1);

  int p = 0, f = 0, cutoff = 0, iw_units = 20, ma_units = 10, theta_n = 50;
  uint64_t seed = 1;
  std::string r_arg, jrho_arg = "all", suite_arg = "all", mutate_arg = "none", format = "text", output, input;
  bool timings = false;

  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--p", p, "prime p (defaults to the preset for --f)");
  verify->add_option("--f", f, "degree f")->required();
  verify->add_option("--r", r_arg, "weight vector, e.g. 5,6 (default: every generic r)");
  verify->add_option("--jrho", jrho_arg, "Jrho as a list such as 0,1, 'none', or 'all'");
  verify->add_option("--cutoff", cutoff, "series cutoff D (default 40 / 30 / 2p for f = 1 / 2 / 3)");
  verify->add_option("--seed", seed, "seed for mu factors and unit samples");
  verify->add_option("--suite", suite_arg, "comma list of identities, weights, iwasawa, phigamma, all");
  verify->add_option("--mutate", mutate_arg, "perturb one constant table (rJ, cJ, cPrimeJ, sJ, tJJp, tJx, hj, gamma)");
  verify->add_option("--iwasawa-units", iw_units, "sampled units for the iwasawa suite");
  verify->add_option("--mat-a-units", ma_units, "sampled units for the mat_a suite");
  verify->add_option("--theta-problems", theta_n, "random problems for the theta_solver suite");
  verify->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
  verify->add_option("--output", output, "write the report here instead of stdout");
  verify->add_flag("--timings", timings, "print per-suite wall time to stderr");

  auto* params = app.add_subcommand("params", "list the preset parameter sweeps");
  params->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));

  auto* report = app.add_subcommand("report", "re-emit a saved JSON report");
  report->add_option("--input", input, "report file written by verify --format json")->required();
  report->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*verify) {
      RunConfig cfg;
      cfg.f = f;
      cfg.p = p > 0 ? p : preset_for_f(f).p;
      if (!r_arg.empty()) cfg.r = parse_r(r_arg);
      cfg.Jrho = parse_jrho(jrho_arg, f);
      cfg.cutoff = cutoff;
      cfg.seed = seed;
      auto ss = split(suite_arg);
      cfg.suites = std::set<std::string>(ss.begin(), ss.end());
      cfg.mutate = parse_mutation(mutate_arg);
      cfg.iwasawa_units = iw_units;
      cfg.mat_a_units = ma_units;
      cfg.theta_problems = theta_n;
      cfg.threads = thread_count();
      cfg.validate();
      Report rep = run_suite(cfg);
      if (timings)
        for (const auto& s : rep.suites) std::cerr << s.result.name << "  " << s.params << "  " << s.seconds << "s\n";
      write_out(emit_report(rep, format), output);
      return rep.passed() ? 0 : kExitFail;
    }
    if (*params) {
      if (format == "json") {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& pr : presets()) {
          nlohmann::ordered_json e;
          e["p"] = pr.p;
          e["f"] = pr.f;
          e["cutoff"] = pr.default_cutoff;
          e["r"] = nlohmann::ordered_json::array();
          for (const auto& r : pr.rs) e["r"].push_back(r.data());
          j.push_back(e);
        }
        std::cout << j.dump(2) << "\n";
      } else {
        for (const auto& pr : presets()) {
          std::cout << "f=" << pr.f << " p=" << pr.p << " cutoff=" << pr.default_cutoff << " r in {";
          for (std::size_t i = 0; i < pr.rs.size(); ++i) std::cout << (i ? ", " : "") << pr.rs[i].to_string();
          std::cout << "}\n";
        }
      }
      return 0;
    }
    if (*report) {
      std::ifstream in(input, std::ios::binary);
      require(static_cast<bool>(in), ErrorKind::ConfigInvalid, "cannot read " + input);
      nlohmann::ordered_json j;
      try {
        j = nlohmann::ordered_json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ConfigInvalid, std::string("report is not valid JSON: ") + e.what());
      }
      Report rep;
      try {
        rep = report_from_json(j);
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ConfigInvalid, std::string("report does not match schema 1: ") + e.what());
      }
      std::cout << emit_report(rep, format);
      return rep.passed() ? 0 : kExitFail;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
