#include "csip/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "csip/json_io.hpp"
#include "csip/module_checks.hpp"
#include "csip/operators.hpp"
#include "csip/orthogonality.hpp"
#include "csip/random.hpp"

namespace csip {

namespace {

struct SuiteEntry {
  Suite suite;
  const char* name;
};

constexpr SuiteEntry kSuites[] = {
    {Suite::axioms, "axioms"},       {Suite::norms, "norms"},
    {Suite::finsler, "finsler"},     {Suite::fullness, "fullness"},
    {Suite::transport, "transport"}, {Suite::orthogonality, "orthogonality"},
    {Suite::thm34, "thm34"},         {Suite::operators, "operators"},
    {Suite::counterexamples, "counterexamples"},
};

// Budgeted searches: a found witness is one passing trial, a miss is reported
// in the note and never counted as a failure.
VerificationReport search_report(const std::string& property, const std::string& label, const WitnessSearch& s,
                                 int budget) {
  VerificationReport r(property, label, 0.0);
  r.trials = s.trials_used;
  if (!s.applicable) {
    r.note = "not applicable: " + s.note;
    return r;
  }
  if (s.found) {
    r.worst_margin = s.value;
    r.witness = s.witness;
    r.note = "witness found after " + std::to_string(s.trials_used) + " trials";
  } else {
    r.note = "inconclusive: no witness within a budget of " + std::to_string(budget) + " trials";
  }
  if (!s.note.empty()) r.note += "; " + s.note;
  return r;
}

std::vector<VerificationReport> run_one(Suite suite, const ModuleDescriptor& desc, const SuiteConfig& config) {
  const std::uint64_t seed = mix_seed(config.seed, suite_name(suite), 0);
  const int n = config.trials;
  const NumericPolicy& p = config.policy;
  const bool targeted = config.fault != FaultMode::none && target_suite(config.fault) == suite;

  ModuleDescriptor d = desc;
  if (targeted) {
    switch (config.fault) {
      case FaultMode::sign_flip:
      case FaultMode::broken_action:
        d = desc.with_fault(config.fault);
        break;
      case FaultMode::non_isometric_psi:
        if (desc.kind() == ModuleDescriptor::Kind::transported) d = desc.with_fault(config.fault);
        break;
      default:
        break;
    }
  }

  switch (suite) {
    case Suite::axioms:
      return verify_axioms(d, n, seed, p);
    case Suite::norms:
      return verify_norm_properties(d, n, seed, p);
    case Suite::finsler:
      return verify_finsler(d, n, seed, p);
    case Suite::fullness: {
      const int samples = std::max(2 * d.algebra().self_adjoint_dimension(), std::min(n, 64));
      return {fullness_report(d, samples, seed, p)};
    }
    case Suite::transport:
      return verify_transport(d, n, seed, p);
    case Suite::orthogonality:
      return verify_orthogonality(d, n, seed, p);
    case Suite::thm34:
      return {verify_thm34(d, n, seed, p)};
    case Suite::operators:
      return verify_operators(d, n, seed, p, targeted && config.fault == FaultMode::fiber_mixing);
    case Suite::counterexamples: {
      const auto defect = search_hermitian_defect_witness(d, n, seed);
      const auto converse = search_bj_converse_witness(d, n, seed, 0.1, p);
      return {search_report("hermitian-defect-witness", d.label(), defect, n),
              search_report("bj-not-sip-orthogonal-witness", d.label(), converse, n)};
    }
  }
  return {};
}

Json schema_number_or_null() { return {{"type", Json::array({"number", "null"})}}; }

}  // namespace

const char* suite_name(Suite s) {
  for (const auto& e : kSuites)
    if (e.suite == s) return e.name;
  return "?";
}

Suite suite_from_name(const std::string& name) {
  for (const auto& e : kSuites)
    if (name == e.name) return e.suite;
  throw UsageError("unknown suite \"" + name + "\"");
}

const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> suites = [] {
    std::vector<Suite> v;
    for (const auto& e : kSuites) v.push_back(e.suite);
    return v;
  }();
  return suites;
}

bool is_mandatory(Suite s) { return s != Suite::counterexamples; }

Suite target_suite(FaultMode fault) {
  switch (fault) {
    case FaultMode::sign_flip:
      return Suite::axioms;
    case FaultMode::broken_action:
      return Suite::finsler;
    case FaultMode::fiber_mixing:
      return Suite::operators;
    case FaultMode::non_isometric_psi:
      return Suite::transport;
    case FaultMode::none:
      break;
  }
  throw UsageError("no suite is targeted without a fault");
}

void SuiteConfig::validate() const {
  if (suites.empty()) throw UsageError("config selects no suites");
  if (constructions.empty()) throw UsageError("config lists no constructions");
  if (trials < 1) throw UsageError("trials must be at least 1");
  if (jobs < 0) throw UsageError("jobs must be nonnegative");
  try {
    policy.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

std::vector<ModuleDescriptor> default_constructions() {
  using MD = ModuleDescriptor;
  const auto h = [](int d) { return SipSpace::hilbert(d); };
  const auto lp = [](int d, Real p) { return SipSpace::lp(d, p); };

  const MD hilbert_bundle = MD::bundle({h(2), h(2)});
  const MD lp3_bundle = MD::bundle({lp(2, 3), lp(2, 3)});
  const MD lp15_bundle = MD::bundle({lp(3, 1.5), lp(3, 1.5), lp(3, 1.5)});
  const MD m2 = MD::matrix_self(2);
  const MD m3 = MD::matrix_self(3);
  const MD mixed = MD::direct_sum({MD::bundle({h(2), lp(2, 3)}), MD::bundle({lp(3, 1.5), h(1)})});
  const MD hybrid = MD::direct_sum({MD::bundle({h(2), lp(2, 3)}), m2});

  Rng rng(20240601);
  const IsoDescriptor swap2 = IsoDescriptor::permute({1, 0});
  const IsoDescriptor cycle3 = IsoDescriptor::permute({1, 2, 0});
  const IsoDescriptor u2 = IsoDescriptor::unitary(random_unitary(rng, 2));
  const IsoDescriptor u3 = IsoDescriptor::unitary(random_unitary(rng, 3));

  return {hilbert_bundle,
          lp3_bundle,
          lp15_bundle,
          m2,
          m3,
          mixed,
          hybrid,
          MD::transported(hilbert_bundle, swap2),
          MD::transported(lp3_bundle, swap2),
          MD::transported(lp15_bundle, cycle3),
          MD::transported(m2, u2),
          MD::transported(m3, u3),
          MD::transported(mixed, swap2),
          MD::transported(hybrid, swap2),
          MD::transported(hybrid, u2)};
}

SuiteConfig default_config() {
  SuiteConfig c;
  c.constructions = default_constructions();
  c.suites = all_suites();
  return c;
}

SuiteConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  SuiteConfig c = default_config();
  try {
    if (j.contains("constructions")) {
      c.constructions.clear();
      for (const auto& d : j.at("constructions")) c.constructions.push_back(module_descriptor_from_json(d));
    }
    if (j.contains("trials")) {
      if (!j["trials"].is_number_integer()) throw UsageError("trials must be an integer");
      c.trials = j["trials"].get<int>();
    }
    if (j.contains("seed")) {
      const Json& seed = j["seed"];
      if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) throw UsageError("seed must be a nonnegative integer");
      c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("policy")) c.policy = policy_from_json(j["policy"]);
    if (j.contains("suites")) {
      if (!j["suites"].is_array()) throw UsageError("suites must be an array of names");
      c.suites.clear();
      for (const auto& s : j["suites"]) c.suites.push_back(suite_from_name(s.get<std::string>()));
    }
    if (j.contains("fault")) c.fault = fault_from_name(j["fault"].get<std::string>());
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const StructuralError& e) {
    throw UsageError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

bool SuiteResult::passed() const {
  return std::all_of(reports.begin(), reports.end(), [](const VerificationReport& r) { return r.passed(); });
}

bool RunReport::overall() const {
  return std::all_of(suites.begin(), suites.end(),
                     [](const SuiteResult& s) { return !is_mandatory(s.suite) || s.passed(); });
}

const SuiteResult* RunReport::find(Suite s) const {
  for (const auto& r : suites)
    if (r.suite == s) return &r;
  return nullptr;
}

Json comparable_payload(const RunReport& r) {
  Json j;
  j["version"] = r.version;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["fault"] = fault_name(r.fault);
  j["policy"] = to_json(r.policy);
  j["constructions"] = r.constructions;
  Json suites = Json::array();
  for (const auto& s : r.suites) {
    Json reports = Json::array();
    for (const auto& rep : s.reports) reports.push_back(to_json(rep));
    suites.push_back({{"suite", suite_name(s.suite)},
                      {"mandatory", is_mandatory(s.suite)},
                      {"passed", s.passed()},
                      {"reports", reports}});
  }
  j["suites"] = suites;
  j["overall"] = r.overall() ? "pass" : "fail";
  return j;
}

Json to_json(const RunReport& r) {
  Json j = comparable_payload(r);
  Json timing = Json::object();
  for (const auto& s : r.suites) timing[suite_name(s.suite)] = s.seconds;
  j["timing"] = timing;
  return j;
}

RunReport run_suites(const SuiteConfig& config_in) {
  SuiteConfig config = config_in;
  config.validate();
  if (config.fault != FaultMode::none) {
    const Suite target = target_suite(config.fault);
    if (std::find(config.suites.begin(), config.suites.end(), target) == config.suites.end())
      config.suites.push_back(target);
  }

  struct Job {
    std::size_t suite_index;
    std::size_t construction_index;
    std::vector<VerificationReport> reports;
    double seconds = 0;
    std::exception_ptr error;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < config.suites.size(); ++s)
    for (std::size_t c = 0; c < config.constructions.size(); ++c) jobs.push_back({s, c, {}, 0, nullptr});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      Job& job = jobs[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        job.reports = run_one(config.suites[job.suite_index], config.constructions[job.construction_index], config);
      } catch (...) {
        job.error = std::current_exception();
      }
      job.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads = std::min<std::size_t>(config.jobs > 0 ? config.jobs : hw, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunReport report;
  report.seed = config.seed;
  report.trials = config.trials;
  report.fault = config.fault;
  report.policy = config.policy;
  for (const auto& d : config.constructions) report.constructions.push_back(d.label());
  for (std::size_t s = 0; s < config.suites.size(); ++s) report.suites.push_back({config.suites[s], {}, 0});
  for (auto& job : jobs) {
    if (job.error) std::rethrow_exception(job.error);
    SuiteResult& target = report.suites[job.suite_index];
    target.seconds += job.seconds;
    for (auto& r : job.reports) target.reports.push_back(std::move(r));
  }
  return report;
}

RunReport find_counterexamples(const SuiteConfig& config) {
  SuiteConfig c = config;
  c.suites = {Suite::counterexamples};
  c.fault = FaultMode::none;
  return run_suites(c);
}

Json report_schema() {
  const Json report = {
      {"type", "object"},
      {"required", Json::array({"property", "construction", "trials", "failures", "skipped", "worst_margin",
                                "tolerance", "witness", "note"})},
      {"additionalProperties", false},
      {"properties",
       {{"property", {{"type", "string"}}},
        {"construction", {{"type", "string"}}},
        {"trials", {{"type", "integer"}, {"minimum", 0}}},
        {"failures", {{"type", "integer"}, {"minimum", 0}}},
        {"skipped", {{"type", "integer"}, {"minimum", 0}}},
        {"worst_margin", schema_number_or_null()},
        {"tolerance", {{"type", "number"}, {"minimum", 0}}},
        {"witness", Json::object()},
        {"note", {{"type", "string"}}}}}};

  Json suite_names = Json::array();
  for (const auto& e : kSuites) suite_names.push_back(e.name);

  return {
      {"$schema", "https://json-schema.org/draft/2020-12/schema"},
      {"title", "RunReport"},
      {"type", "object"},
      {"required", Json::array({"version", "seed", "trials", "fault", "policy", "constructions", "suites", "overall"})},
      {"properties",
       {{"version", {{"type", "string"}}},
        {"seed", {{"type", "integer"}, {"minimum", 0}}},
        {"trials", {{"type", "integer"}, {"minimum", 1}}},
        {"fault",
         {{"enum", Json::array({"none", "sign-flip", "broken-action", "fiber-mixing", "non-isometric-psi"})}}},
        {"policy",
         {{"type", "object"},
          {"required", Json::array({"tol_eq", "tol_pos", "tol_opt"})},
          {"properties",
           {{"tol_eq", {{"type", "number"}}}, {"tol_pos", {{"type", "number"}}}, {"tol_opt", {{"type", "number"}}}}}}},
        {"constructions", {{"type", "array"}, {"items", {{"type", "string"}}}}},
        {"suites",
         {{"type", "array"},
          {"items",
           {{"type", "object"},
            {"required", Json::array({"suite", "mandatory", "passed", "reports"})},
            {"properties",
             {{"suite", {{"enum", suite_names}}},
              {"mandatory", {{"type", "boolean"}}},
              {"passed", {{"type", "boolean"}}},
              {"reports", {{"type", "array"}, {"items", {{"$ref", "#/$defs/VerificationReport"}}}}}}}}}}},
        {"overall", {{"enum", Json::array({"pass", "fail"})}}},
        {"timing", {{"type", "object"}, {"additionalProperties", {{"type", "number"}}}}}}},
      {"$defs", {{"VerificationReport", report}}}};
}

}  // namespace csip
