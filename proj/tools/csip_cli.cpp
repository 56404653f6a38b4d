// csip: command-line front end for the property suites.
//
// Exit codes: 0 pass, 1 property violation, 2 usage error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "csip/harness.hpp"
#include "csip/json_io.hpp"
#include "csip/operators.hpp"
#include "csip/orthogonality.hpp"

namespace {

using csip::Json;

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw csip::UsageError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw csip::UsageError(path + ": " + e.what());
  }
}

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string policy_file;
  std::vector<std::string> suites;
  std::string fault;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_suites) {
  cmd->add_option("--seed", f.seed, "Base seed for every per-trial stream");
  cmd->add_option("--trials", f.trials, "Trials per property and construction");
  cmd->add_option("--policy-file", f.policy_file, "JSON file with tol_eq, tol_pos, tol_opt");
  cmd->add_option("--jobs", f.jobs, "Worker threads (0: hardware concurrency)");
  if (with_suites) {
    cmd->add_option("--suite", f.suites, "Suite to run; repeat to select several");
    cmd->add_option("--fault-inject", f.fault,
                    "Negative control: sign-flip, broken-action, fiber-mixing or non-isometric-psi");
  }
}

csip::SuiteConfig build_config(const std::string& config_path, const CommonFlags& f) {
  csip::SuiteConfig c = config_path.empty() ? csip::default_config() : csip::config_from_json(read_json_file(config_path));
  if (f.seed) c.seed = *f.seed;
  if (f.trials) c.trials = *f.trials;
  if (f.jobs) c.jobs = *f.jobs;
  if (!f.policy_file.empty()) c.policy = csip::policy_from_json(read_json_file(f.policy_file), c.policy);
  if (!f.suites.empty()) {
    c.suites.clear();
    for (const auto& s : f.suites) c.suites.push_back(csip::suite_from_name(s));
  }
  if (!f.fault.empty()) c.fault = csip::fault_from_name(f.fault);
  c.validate();
  return c;
}

csip::NumericPolicy read_policy(const std::string& path) {
  return path.empty() ? csip::NumericPolicy{} : csip::policy_from_json(read_json_file(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Property checks for C*-semi-inner-product modules"};
  app.require_subcommand(1);

  CommonFlags verify_flags;
  std::string verify_config;
  auto* verify = app.add_subcommand("verify", "Run the property suites and print a RunReport");
  verify->add_option("config", verify_config, "SuiteConfig JSON file (defaults when omitted)");
  add_common(verify, verify_flags, true);

  CommonFlags counter_flags;
  std::string counter_config;
  auto* counter = app.add_subcommand("counterexample", "Budgeted searches for converse-failure witnesses");
  counter->add_option("config", counter_config, "SuiteConfig JSON file (defaults when omitted)");
  add_common(counter, counter_flags, false);

  std::string pair_file;
  std::string orth_policy;
  auto* orth = app.add_subcommand("orthogonality", "Birkhoff-James test for a pair {\"x\": ..., \"y\": ...}");
  orth->add_option("file", pair_file, "Element-pair JSON file")->required();
  orth->add_option("--policy-file", orth_policy, "JSON file with tol_eq, tol_pos, tol_opt");

  std::string op_file;
  CommonFlags op_flags;
  auto* opnorm = app.add_subcommand("opnorm", "Norm bounds and least K for an operator literal");
  opnorm->add_option("file", op_file, "Operator JSON file")->required();
  add_common(opnorm, op_flags, false);

  bool schema = false;
  auto* report = app.add_subcommand("report", "Report utilities");
  report->add_flag("--schema", schema, "Print the RunReport JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify) {
      const csip::RunReport r = csip::run_suites(build_config(verify_config, verify_flags));
      std::cout << csip::to_json(r).dump(2) << "\n";
      return r.overall() ? 0 : 1;
    }
    if (*counter) {
      const csip::RunReport r = csip::find_counterexamples(build_config(counter_config, counter_flags));
      std::cout << csip::to_json(r).dump(2) << "\n";
      return r.overall() ? 0 : 1;
    }
    if (*orth) {
      const Json j = read_json_file(pair_file);
      if (!j.is_object() || !j.contains("x") || !j.contains("y"))
        throw csip::UsageError("pair file needs \"x\" and \"y\" element literals");
      const auto x = csip::module_element_from_json(j["x"]);
      const auto y = csip::module_element_from_json(j["y"]);
      const auto r = csip::bj_minimize(x, y, read_policy(orth_policy));
      std::cout << csip::to_json(r).dump(2) << "\n";
      return 0;
    }
    if (*opnorm) {
      const auto t = csip::operator_from_json(read_json_file(op_file));
      const csip::NumericPolicy policy = read_policy(op_flags.policy_file);
      const auto r = csip::op_norm(t, op_flags.trials.value_or(1000), op_flags.seed.value_or(42), policy);
      std::cout << csip::to_json(r).dump(2) << "\n";
      return 0;
    }
    if (*report) {
      if (!schema) throw csip::UsageError("report: nothing to do (try --schema)");
      std::cout << csip::report_schema().dump(2) << "\n";
      return 0;
    }
  } catch (const csip::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
