// Command-line front end for the losssense library.
//
// Exit codes: 0 sensitive / pass, 1 insensitive / counterexample,
// 2 validation error, 3 inconclusive / undecided.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "losssense/losssense.hpp"

namespace {

using namespace losssense;
using io::json;

enum Exit { kOk = 0, kNegative = 1, kInvalid = 2, kUndecided = 3 };

struct RunConfig {
  std::string spec;
  std::string position;
  std::string domain = "full";
  std::string format = "text";
  std::string output;
  std::uint64_t seed = 42;
  bool seed_given = false;
  int trials = 100;
  int lambda_exponent = 40;
  int jobs = 1;
  // fixture command
  std::string fixture_id;
  std::vector<std::string> fixture_params;
  bool fixture_all = false;
  bool fixture_index = false;
};

std::uint64_t effective_seed(const RunConfig& c) {
  if (c.seed_given) return c.seed;
  if (const char* env = std::getenv("LOSSSENSE_SEED")) {
    try {
      std::size_t used = 0;
      unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string("LOSSSENSE_SEED='") + env + "' is not an unsigned integer");
  }
  return c.seed;
}

SllOptions sll_options(const RunConfig& c) {
  SllOptions o;
  o.trials = c.trials;
  o.seed = effective_seed(c);
  o.lambda_exponent = c.lambda_exponent;
  o.jobs = c.jobs;
  return o;
}

DomainSpec domain_of(const std::string& name) {
  if (auto d = domain_by_name(name)) return *d;
  throw ValidationError("unknown domain '" + name + "' (expected sure, pure, expected or full)");
}

json envelope(const std::string& command, const std::optional<FunctionalSpec>& spec, std::uint64_t seed,
              json result) {
  json out = {{"command", command}, {"version", io::kVersion}, {"seed", seed}, {"result", std::move(result)}};
  if (spec) {
    out["spec"] = io::spec_json(*spec);
    out["spec_hash"] = io::spec_hash(*spec);
  }
  return out;
}

void emit(const RunConfig& c, const json& doc, const std::string& text) {
  std::string body = c.format == "json" ? io::dump(doc) : text;
  if (c.output.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + c.output + "'");
    out << body;
  }
}

std::string text_value(const json& v) {
  if (v.is_null()) return "-";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string verdict_text(const SensitivityVerdict& v) {
  std::ostringstream s;
  s << v.domain << ": " << status_name(v.status) << " (" << method_name(v.method)
    << (v.certified ? ", certified" : ", sampled") << ")\n";
  s << "  criterion: " << v.criterion << "\n";
  if (v.lambda_x) s << "  lambda_x: " << *v.lambda_x << "\n";
  if (v.witness) s << "  witness: " << io::position_json(*v.witness).dump() << "\n";
  return s.str();
}

int exit_for(Status s) {
  switch (s) {
    case Status::sensitive: return kOk;
    case Status::insensitive: return kNegative;
    default: return kUndecided;
  }
}

int cmd_eval(const RunConfig& c) {
  FunctionalSpec spec = io::load_spec(c.spec);
  Position x = io::load_position(c.position);
  Extended v = evaluate(spec, x);
  json result = {{"value", io::extended_json(v)}, {"risk_value", io::extended_json(risk_value(spec, x))},
                 {"position", io::position_json(x)}};
  emit(c, envelope("eval", spec, effective_seed(c), result), text_value(result["value"]) + "\n");
  return kOk;
}

int cmd_recession(const RunConfig& c) {
  FunctionalSpec spec = io::load_spec(c.spec);
  Position x = io::load_position(c.position);
  RecessionEstimate r = recession(spec, x, {c.lambda_exponent, 1e-7});
  json result = io::recession_json(r);
  std::ostringstream s;
  s << text_value(result["value"]) << " (" << mode_name(r.mode) << ")\n";
  emit(c, envelope("recession", spec, effective_seed(c), result), s.str());
  return r.mode == RecessionMode::numeric_lower_bound ? kUndecided : kOk;
}

int cmd_sll(const RunConfig& c) {
  FunctionalSpec spec = io::load_spec(c.spec);
  SllOptions opt = sll_options(c);
  if (!c.position.empty()) {
    Position x = io::load_position(c.position);
    PositionVerdict pv = sll_position(spec, x, c.lambda_exponent);
    json result = io::position_verdict_json(pv);
    result["position"] = io::position_json(x);
    emit(c, envelope("sll", spec, opt.seed, result),
         std::string(outcome_name(pv.outcome)) + "\n  reason: " + pv.reason + "\n");
    switch (pv.outcome) {
      case PositionOutcome::certified_sensitive: return kOk;
      case PositionOutcome::certified_insensitive: return kNegative;
      default: return kUndecided;
    }
  }
  SensitivityVerdict v = sll_certify(spec, domain_of(c.domain), opt);
  emit(c, envelope("sll", spec, opt.seed, io::verdict_json(v)), verdict_text(v));
  return exit_for(v.status);
}

int cmd_battery(const RunConfig& c) {
  FunctionalSpec spec = io::load_spec(c.spec);
  SllOptions opt = sll_options(c);
  BatteryReport b = localized_battery(spec, opt);
  std::string text;
  bool any_insensitive = false, any_undecided = false;
  for (const auto& row : b.rows) {
    text += verdict_text(row);
    any_insensitive = any_insensitive || row.status == Status::insensitive;
    any_undecided = any_undecided || row.status == Status::inconclusive;
  }
  text += std::string("ordering: ") + (b.ordering_holds ? "holds" : "violated") + "\n";
  emit(c, envelope("battery", spec, opt.seed, io::battery_json(b)), text);
  if (any_undecided) return kUndecided;
  return any_insensitive ? kNegative : kOk;
}

Params parse_fixture_params(const std::vector<std::string>& raw) {
  Params p;
  for (const auto& kv : raw) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ValidationError("fixture parameter '" + kv + "' must look like name=value");
    p[kv.substr(0, eq)] = io::parse_number(kv.substr(eq + 1), "fixture parameter '" + kv + "'");
  }
  return p;
}

std::string fixture_text(const FixtureReport& r) {
  std::ostringstream s;
  s << r.id << ": " << (r.passed() ? "pass" : "FAIL") << "\n";
  for (const auto& a : r.assertions)
    s << "  [" << (a.passed ? "ok" : "!!") << "] " << a.name << "  (lhs " << a.lhs << ", rhs " << a.rhs << ")\n";
  return s.str();
}

int cmd_fixture(const RunConfig& c) {
  const std::uint64_t seed = effective_seed(c);
  if (c.fixture_index) {
    json idx = io::fixture_index_json();
    std::string text;
    for (auto it = idx.begin(); it != idx.end(); ++it) text += it.key() + ": " + it.value()["topic"].get<std::string>() + "\n";
    emit(c, idx, text);
    return kOk;
  }
  Params overrides = parse_fixture_params(c.fixture_params);
  if (c.fixture_all) {
    if (!overrides.empty()) throw ValidationError("--param cannot be combined with --all");
    json reports = json::array();
    std::string text;
    bool all = true;
    for (const auto& f : fixture_registry()) {
      FixtureReport r = run_fixture(f.id);
      all = all && r.passed();
      reports.push_back(io::fixture_report_json(r));
      text += fixture_text(r);
    }
    emit(c, envelope("fixture", std::nullopt, seed, {{"fixtures", reports}, {"passed", all}}), text);
    return all ? kOk : kNegative;
  }
  if (c.fixture_id.empty()) throw ValidationError("fixture needs --id, --all or --index");
  try {
    FixtureReport r = run_fixture(c.fixture_id, overrides);
    emit(c, envelope("fixture", std::nullopt, seed, io::fixture_report_json(r)), fixture_text(r));
    return r.passed() ? kOk : kNegative;
  } catch (const ParameterError& e) {
    throw ValidationError(e.what());
  }
}

int cmd_axioms(const RunConfig& c) {
  FunctionalSpec spec = io::load_spec(c.spec);
  const std::uint64_t seed = effective_seed(c);
  AxiomReport r = axiom_check(spec, c.trials, seed);
  std::string text;
  for (const auto& [k, ok] : r.passed) text += k + ": " + (ok ? "pass" : "FAIL") + "\n";
  emit(c, envelope("axioms", spec, seed, io::axiom_report_json(r)), text);
  return r.all_passed() ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"losssense: risk and utility functionals, recession estimates and sensitivity to large losses"};
  app.require_subcommand(1, 1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, bool needs_spec, bool needs_position) {
    auto* s = sub->add_option("--spec", cfg.spec, "preset (var:0.1, eu:exp:1, ...), JSON file or inline JSON");
    if (needs_spec) s->required();
    auto* p = sub->add_option("--position", cfg.position, "JSON/CSV file or inline form like -1_A(p=0.05)");
    if (needs_position) p->required();
    sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--output", cfg.output, "write the report here instead of stdout");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t v) { cfg.seed = v, cfg.seed_given = true; },
        "random seed (default 42, or LOSSSENSE_SEED)");
    sub->add_option("--trials", cfg.trials, "sampled positions per check")->check(CLI::Range(1, 1000000));
    sub->add_option("--lambda-exp", cfg.lambda_exponent, "rays are probed up to lambda = 2^N")
        ->check(CLI::Range(10, 60));
    sub->add_option("--jobs", cfg.jobs, "worker threads for sampled checks")->check(CLI::Range(1, 256));
  };

  auto* eval = app.add_subcommand("eval", "evaluate a functional at a position");
  common(eval, true, true);
  auto* rec = app.add_subcommand("recession", "estimate the recession functional at a position");
  common(rec, true, true);
  auto* sll = app.add_subcommand("sll", "sensitivity to large losses on a domain, or along one position's ray");
  common(sll, true, false);
  sll->add_option("--domain", cfg.domain, "sure, pure, expected or full");
  auto* bat = app.add_subcommand("battery", "sensitivity on every built-in domain");
  common(bat, true, false);
  auto* fix = app.add_subcommand("fixture", "run registered fixtures");
  common(fix, false, false);
  fix->add_option("--id", cfg.fixture_id, "fixture id");
  fix->add_option("--param", cfg.fixture_params, "parameter override name=value (repeatable)");
  fix->add_flag("--all", cfg.fixture_all, "run every fixture at default parameters");
  fix->add_flag("--index", cfg.fixture_index, "print the fixture index");
  auto* ax = app.add_subcommand("axioms", "randomized falsification of declared properties");
  common(ax, true, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return kInvalid;
  }

  try {
    if (*eval) return cmd_eval(cfg);
    if (*rec) return cmd_recession(cfg);
    if (*sll) return cmd_sll(cfg);
    if (*bat) return cmd_battery(cfg);
    if (*fix) return cmd_fixture(cfg);
    if (*ax) return cmd_axioms(cfg);
  } catch (const std::invalid_argument& e) {
    // ParameterError, ValidationError, SpaceMismatch
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
