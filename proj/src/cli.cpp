#include "banditlab/cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "banditlab/baselines.hpp"
#include "banditlab/error.hpp"

#ifndef BANDITLAB_BUILD_ID
#define BANDITLAB_BUILD_ID "dev"
#endif

namespace banditlab::cli {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) config_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_number(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      config_error(std::string("'") + key + "' must be a non-negative integer");
    }
  } else if (!v.is_number()) {
    config_error(std::string("'") + key + "' must be a number");
  }
  return v.get<T>();
}

const json& nonempty_array(const json& obj, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_array()) config_error(std::string("'") + key + "' must be an array");
  if (v.empty()) config_error(std::string("'") + key + "' must not be empty");
  return v;
}

std::vector<double> nine_arm_means() {
  std::vector<double> m;
  for (int i = 1; i <= 9; ++i) m.push_back(i / 10.0);
  return m;
}

AlgorithmSpec parse_algorithm(const json& entry, bool& theory) {
  AlgorithmSpec spec;
  theory = false;
  if (entry.is_string()) {
    const auto kind = parse_algorithm_kind(entry.get<std::string>());
    if (!kind) config_error("unknown algorithm '" + entry.get<std::string>() + "'");
    spec.kind = *kind;
    spec.name = entry.get<std::string>();
    return spec;
  }
  check_keys(entry, "algorithm", {"kind", "name", "alpha", "delta", "known_corruption", "lambda", "eta_scale"});
  if (!entry.contains("kind") || !entry["kind"].is_string()) config_error("algorithm entry needs a 'kind'");
  const auto kind = parse_algorithm_kind(entry["kind"].get<std::string>());
  if (!kind) config_error("unknown algorithm '" + entry["kind"].get<std::string>() + "'");
  spec.kind = *kind;
  spec.name = entry.value("name", std::string(to_string(*kind)));
  spec.alpha = get_number(entry, "alpha", kDefaultSambaAlpha);
  if (entry.contains("delta")) spec.delta = get_number(entry, "delta", 0.0);
  if (entry.contains("known_corruption")) spec.known_corruption = get_number(entry, "known_corruption", 0.0);
  if (entry.contains("lambda")) {
    if (entry["lambda"].is_string()) {
      if (entry["lambda"] != "theory") config_error("'lambda' must be a number or \"theory\"");
      theory = true;
    } else {
      spec.lambda_scale = get_number(entry, "lambda", 0.0);
    }
  }
  spec.eta_scale = get_number(entry, "eta_scale", 1.0);
  return spec;
}

void resolve_theory_lambdas(ExperimentConfig& e, const std::vector<bool>& theory, std::size_t arms) {
  for (std::size_t i = 0; i < e.algorithms.size(); ++i) {
    if (!theory[i]) continue;
    const double delta = e.algorithms[i].delta.value_or(1.0 / static_cast<double>(std::max<Round>(e.horizon, 2)));
    e.algorithms[i].lambda_scale = barbar_theoretical_lambda(arms, delta, e.horizon);
  }
}

std::size_t instance_arms(const InstanceSpec& spec) {
  return spec.means.empty() ? spec.random_arms : spec.means.size();
}

}  // namespace

Config parse_config(const json& doc) {
  try {
    check_keys(doc, "config",
               {"schema_version", "description", "instance", "horizon", "replications", "seed", "threads",
                "algorithms", "corruption", "checkpoints", "sweep", "verify", "bench"});
    if (!doc.contains("schema_version")) config_error("missing 'schema_version'");
    if (get_number<int>(doc, "schema_version", 0) != kSchemaVersion) {
      config_error("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    }

    Config cfg;
    cfg.source = doc;
    ExperimentConfig& e = cfg.experiment;

    if (doc.contains("instance")) {
      const json& inst = doc["instance"];
      check_keys(inst, "instance", {"means", "random_arms"});
      if (inst.contains("means") == inst.contains("random_arms")) {
        config_error("instance needs exactly one of 'means' or 'random_arms'");
      }
      if (inst.contains("means")) {
        for (const auto& m : nonempty_array(inst, "means")) {
          if (!m.is_number()) config_error("'means' must hold numbers");
          e.instance.means.push_back(m.get<double>());
        }
      } else {
        e.instance.random_arms = get_number<std::size_t>(inst, "random_arms", 0);
      }
    } else {
      e.instance.means = nine_arm_means();
    }

    e.horizon = get_number<Round>(doc, "horizon", e.horizon);
    e.replications = get_number<std::size_t>(doc, "replications", e.replications);
    e.master_seed = get_number<std::uint64_t>(doc, "seed", 0);
    e.threads = std::max<std::size_t>(get_number<std::size_t>(doc, "threads", 1), 1);

    if (doc.contains("algorithms")) {
      for (const auto& entry : nonempty_array(doc, "algorithms")) {
        bool theory = false;
        e.algorithms.push_back(parse_algorithm(entry, theory));
        cfg.theory_lambda.push_back(theory);
      }
    } else {
      for (auto k : {AlgorithmKind::Samba, AlgorithmKind::FastSlowAae, AlgorithmKind::Barbar,
                     AlgorithmKind::CBarbar, AlgorithmKind::TsallisInf}) {
        AlgorithmSpec spec;
        spec.kind = k;
        spec.name = std::string(to_string(k));
        e.algorithms.push_back(spec);
        cfg.theory_lambda.push_back(false);
      }
    }

    std::vector<double> levels{0.0};
    std::vector<CorruptionScheme> schemes{CorruptionScheme::None};
    CorruptionStrategy strategy = CorruptionStrategy::SuppressOptimal;
    std::vector<Round> custom;
    if (doc.contains("corruption")) {
      const json& c = doc["corruption"];
      check_keys(c, "corruption", {"levels", "schemes", "strategy", "per_step_cost", "custom_steps"});
      if (c.contains("levels")) {
        levels.clear();
        for (const auto& l : nonempty_array(c, "levels")) {
          if (!l.is_number()) config_error("'levels' must hold numbers");
          levels.push_back(l.get<double>());
        }
        schemes = {CorruptionScheme::ConsecutiveStart, CorruptionScheme::EvenStepsStart,
                   CorruptionScheme::MiddleBlock, CorruptionScheme::RandomEarly};
      }
      if (c.contains("schemes")) {
        schemes.clear();
        for (const auto& s : nonempty_array(c, "schemes")) {
          const auto parsed = s.is_number_integer() ? parse_scheme(std::to_string(s.get<int>()))
                                                    : s.is_string() ? parse_scheme(s.get<std::string>())
                                                                    : std::nullopt;
          if (!parsed) config_error("unknown corruption scheme " + s.dump());
          schemes.push_back(*parsed);
        }
      }
      if (c.contains("strategy")) {
        const auto parsed = c["strategy"].is_string() ? parse_strategy(c["strategy"].get<std::string>())
                                                      : std::nullopt;
        if (!parsed) config_error("unknown corruption strategy " + c["strategy"].dump());
        strategy = *parsed;
      }
      if (c.contains("per_step_cost") && !c["per_step_cost"].is_null()) {
        e.per_step_cost = get_number(c, "per_step_cost", 1.0);
      }
      if (c.contains("custom_steps")) {
        if (!c["custom_steps"].is_array()) config_error("'custom_steps' must be an array");
        for (const auto& t : c["custom_steps"]) {
          if (!t.is_number_integer() || t.get<std::int64_t>() < 0) config_error("'custom_steps' must hold non-negative integers");
          custom.push_back(t.get<Round>());
        }
      }
    }
    for (double level : levels) {
      for (auto scheme : schemes) {
        CorruptionPlan plan;
        plan.scheme = scheme;
        plan.budget = level;
        plan.strategy = strategy;
        plan.horizon = e.horizon;
        plan.custom_steps = custom;
        e.plans.push_back(plan);
      }
    }

    if (doc.contains("checkpoints")) {
      const json& cp = doc["checkpoints"];
      check_keys(cp, "checkpoints", {"spacing", "count", "first"});
      const std::string spacing = cp.value("spacing", std::string("linear"));
      if (spacing == "linear") {
        e.checkpoints.spacing = CheckpointGrid::Spacing::Linear;
      } else if (spacing == "log") {
        e.checkpoints.spacing = CheckpointGrid::Spacing::Log;
      } else {
        config_error("checkpoint spacing must be \"linear\" or \"log\"");
      }
      e.checkpoints.count = get_number<std::size_t>(cp, "count", e.checkpoints.count);
      e.checkpoints.first = get_number<Round>(cp, "first", e.checkpoints.first);
    }

    if (doc.contains("sweep")) {
      const json& sw = doc["sweep"];
      check_keys(sw, "sweep", {"arms"});
      if (sw.contains("arms")) {
        for (const auto& k : nonempty_array(sw, "arms")) {
          if (!k.is_number_integer() || k.get<std::int64_t>() < 2) config_error("'arms' entries must be >= 2");
          cfg.arms_axis.push_back(k.get<std::size_t>());
        }
      }
    }

    if (doc.contains("verify")) {
      const json& v = doc["verify"];
      check_keys(v, "verify", {"alpha", "update_rule"});
      cfg.verify_alpha = get_number(v, "alpha", cfg.verify_alpha);
      const std::string rule = v.value("update_rule", std::string("samba"));
      if (rule == "samba") {
        cfg.update_rule = UpdateRule::Samba;
      } else if (rule == "tampered") {
        cfg.update_rule = UpdateRule::Tampered;
      } else {
        config_error("verify.update_rule must be \"samba\" or \"tampered\"");
      }
    } else {
      for (const auto& a : e.algorithms) {
        if (a.kind == AlgorithmKind::Samba) {
          cfg.verify_alpha = a.alpha;
          break;
        }
      }
    }

    if (doc.contains("bench")) {
      const json& b = doc["bench"];
      check_keys(b, "bench", {"runs"});
      cfg.bench_runs = std::max<std::size_t>(get_number<std::size_t>(b, "runs", cfg.bench_runs), 1);
    }

    resolve_theory_lambdas(e, cfg.theory_lambda, instance_arms(e.instance));
    return cfg;
  } catch (const json::exception& ex) {
    config_error(ex.what());
  }
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& ex) {
    config_error("cannot parse '" + path + "': " + ex.what());
  }
  return parse_config(doc);
}

std::uint64_t config_hash(const json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string results_csv(const AggregateStats& stats) {
  std::string out = "algorithm,scheme,corruption_level,K,mean_regret,sd_regret,replications,seed\n";
  for (const auto& c : stats.cells) {
    out += c.algorithm + ',' + std::string(to_string(c.scheme)) + ',' + format_number(c.corruption_level) + ',' +
           std::to_string(c.arms) + ',' + format_number(c.mean_regret) + ',' + format_number(c.sd_regret) + ',' +
           std::to_string(c.replications) + ',' + std::to_string(c.seed) + '\n';
  }
  return out;
}

std::string curves_csv(const AggregateStats& stats) {
  std::string out = "algorithm,scheme,corruption_level,t,mean_regret,sd_regret\n";
  for (const auto& c : stats.cells) {
    const std::string prefix =
        c.algorithm + ',' + std::string(to_string(c.scheme)) + ',' + format_number(c.corruption_level) + ',';
    for (std::size_t i = 0; i < c.checkpoint_t.size(); ++i) {
      out += prefix + std::to_string(c.checkpoint_t[i]) + ',' + format_number(c.curve_mean[i]) + ',' +
             format_number(c.curve_sd[i]) + '\n';
    }
  }
  return out;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "algorithm,mean_s,sd_s,step_ratio\n";
  for (const auto& r : rows) {
    out += r.algorithm + ',' + format_number(r.mean_seconds) + ',' + format_number(r.sd_seconds) + ',' +
           format_number(r.step_ratio) + '\n';
  }
  return out;
}

namespace {

std::size_t resolve_threads(const Invocation& inv, std::size_t configured) {
  if (inv.threads) return std::max<std::size_t>(*inv.threads, 1);
  if (const char* env = std::getenv("BANDITLAB_THREADS")) {
    std::size_t n = 0;
    const auto res = std::from_chars(env, env + std::strlen(env), n);
    if (res.ec == std::errc() && n > 0) return n;
  }
  return configured;
}

Config prepare(const Invocation& inv, bool config_required) {
  Config cfg;
  if (inv.config_path.empty()) {
    if (config_required) config_error("--config is required for this command");
    json doc = {{"schema_version", kSchemaVersion}};
    cfg = parse_config(doc);
  } else {
    cfg = load_config(inv.config_path);
  }
  if (inv.seed) {
    cfg.experiment.master_seed = *inv.seed;
    cfg.source["seed"] = *inv.seed;
  }
  cfg.experiment.threads = resolve_threads(inv, cfg.experiment.threads);
  return cfg;
}

/// Builds every policy and ledger once on the first replication's instance so
/// that bad parameters surface as configuration errors before any work runs.
void dry_validate(const ExperimentConfig& e) {
  validate(e);
  const auto instance = realize_instance(e.instance, split_seed(e.master_seed, 0));
  for (const auto& plan : e.plans) {
    for (const auto& alg : e.algorithms) (void)make_policy(alg, instance.arms(), e.horizon, plan.budget);
    Rng rng(0);
    CorruptionPlan p = plan;
    p.horizon = e.horizon;
    CorruptionLedger ledger(p, instance, rng, e.per_step_cost);
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const Config& cfg,
                    const std::vector<std::string>& outputs) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg.source)));
  json manifest = {
      {"command", command},
      {"config_hash", hash},
      {"generator", std::string(kGeneratorName)},
      {"build", BANDITLAB_BUILD_ID},
      {"timestamp", utc_timestamp()},
      {"seed", cfg.experiment.master_seed},
      {"schema_version", kSchemaVersion},
      {"config", cfg.source},
  };
  json paths = json::array();
  for (const auto& o : outputs) paths.push_back((dir / o).string());
  manifest["outputs"] = paths;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

/// Parses and validates; on failure prints the reason and reports exit 2.
template <class Fn>
std::optional<Config> configure(const Invocation& inv, bool required, std::ostream& err, Fn&& validate_fn) {
  try {
    Config cfg = prepare(inv, required);
    validate_fn(cfg);
    return cfg;
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
  }
  return std::nullopt;
}

}  // namespace

int cmd_run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  auto cfg = configure(inv, true, err, [](const Config& c) { dry_validate(c.experiment); });
  if (!cfg) return kExitConfigError;
  return guarded(err, [&] {
    const auto stats = run_batch(cfg->experiment);
    const std::filesystem::path dir(inv.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "results.csv", results_csv(stats));
    write_file(dir / "curves.csv", curves_csv(stats));
    write_manifest(dir, "run", *cfg, {"results.csv", "curves.csv"});
    out << "wrote " << stats.cells.size() << " cells to " << (dir / "results.csv").string() << "\n";
    return kExitOk;
  });
}

int cmd_sweep(const Invocation& inv, std::ostream& out, std::ostream& err) {
  auto cfg = configure(inv, true, err, [](Config& c) {
    if (c.arms_axis.empty()) {
      dry_validate(c.experiment);
      return;
    }
    for (std::size_t k : c.arms_axis) {
      ExperimentConfig e = c.experiment;
      e.instance = InstanceSpec{{}, k};
      resolve_theory_lambdas(e, c.theory_lambda, k);
      dry_validate(e);
    }
  });
  if (!cfg) return kExitConfigError;
  return guarded(err, [&] {
    AggregateStats all;
    if (cfg->arms_axis.empty()) {
      all = run_batch(cfg->experiment);
    } else {
      for (std::size_t ki = 0; ki < cfg->arms_axis.size(); ++ki) {
        ExperimentConfig e = cfg->experiment;
        e.instance = InstanceSpec{{}, cfg->arms_axis[ki]};
        e.master_seed = split_seed(cfg->experiment.master_seed, ki);
        resolve_theory_lambdas(e, cfg->theory_lambda, cfg->arms_axis[ki]);
        auto stats = run_batch(e);
        for (auto& cell : stats.cells) all.cells.push_back(std::move(cell));
        out << "K=" << cfg->arms_axis[ki] << " done\n";
      }
    }
    const std::filesystem::path dir(inv.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "results.csv", results_csv(all));
    write_manifest(dir, "sweep", *cfg, {"results.csv"});
    out << "wrote " << all.cells.size() << " cells to " << (dir / "results.csv").string() << "\n";
    return kExitOk;
  });
}

int cmd_verify(const Invocation& inv, std::ostream& out, std::ostream& err) {
  std::optional<BanditInstance> instance;
  auto cfg = configure(inv, false, err, [&](const Config& c) {
    instance = realize_instance(c.experiment.instance, split_seed(c.experiment.master_seed, 0));
    if (!(c.verify_alpha > 0.0 && c.verify_alpha < 1.0)) config_error("verify alpha must lie in (0,1)");
  });
  if (!cfg) return kExitConfigError;
  return guarded(err, [&] {
    SuiteOptions options;
    options.fast = inv.fast;
    options.seed = cfg->experiment.master_seed;
    options.threads = cfg->experiment.threads;
    options.update_rule = cfg->update_rule;
    const auto results = run_verify_suite(*instance, cfg->verify_alpha, options);

    bool all = true;
    out << std::left << std::setw(28) << "check" << std::setw(6) << "result" << std::setw(16) << "measured"
        << std::setw(16) << "bound"
        << "detail\n";
    for (const auto& r : results) {
      out << std::left << std::setw(28) << r.name << std::setw(6) << (r.pass ? "PASS" : "FAIL") << std::setw(16)
          << format_number(r.measured).substr(0, 14) << std::setw(16) << format_number(r.bound).substr(0, 14)
          << r.detail << "\n";
      if (!r.pass) {
        all = false;
        err << "FAIL " << r.name << ": measured " << format_number(r.measured) << " against bound "
            << format_number(r.bound) << "\n";
      }
    }
    return all ? kExitOk : kExitVerifyFailed;
  });
}

int cmd_bench(const Invocation& inv, std::ostream& out, std::ostream& err) {
  auto cfg = configure(inv, false, err, [](const Config& c) { validate(c.experiment); });
  if (!cfg) return kExitConfigError;
  return guarded(err, [&] {
    BenchOptions options;
    options.runs = inv.fast ? std::min<std::size_t>(cfg->bench_runs, 2) : cfg->bench_runs;
    const auto rows = bench_runtime(cfg->experiment, options);
    const std::filesystem::path dir(inv.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "bench.csv", bench_csv(rows));
    write_manifest(dir, "bench", *cfg, {"bench.csv"});
    for (const auto& r : rows) {
      out << std::left << std::setw(16) << r.algorithm << " mean " << r.mean_seconds << " s, sd " << r.sd_seconds
          << " s, early " << r.early_step_ns << " ns/step, late " << r.late_step_ns << " ns/step, ratio "
          << r.step_ratio << "\n";
    }
    return kExitOk;
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Corrupted-bandit simulation, verification and benchmarking"};
  app.require_subcommand(1);
  Invocation inv;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"run", "run every (algorithm, corruption plan) cell of a config"},
                      {"sweep", "run the cross product of the grid axes"},
                      {"verify", "run the property suite and print a pass/fail table"},
                      {"bench", "time single runs of each algorithm"}};
  std::vector<CLI::App*> commands;
  std::vector<CLI::Option*> seed_opts, thread_opts;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", inv.config_path, "JSON config file");
    sub->add_option("--out", inv.out_dir, "output directory")->capture_default_str();
    seed_opts.push_back(sub->add_option("--seed", seed, "master seed, overrides the config"));
    thread_opts.push_back(sub->add_option("--threads", threads, "worker threads (default: BANDITLAB_THREADS or config)")
                              ->check(CLI::PositiveNumber));
    sub->add_flag("--fast", inv.fast, "reduced sample counts");
    commands.push_back(sub);
  }

  std::vector<std::string> storage = args;
  if (storage.empty()) storage.push_back("banditlab");
  std::vector<char*> argv;
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!commands[i]->parsed()) continue;
    inv.command = subs[i].name;
    if (seed_opts[i]->count() > 0) inv.seed = seed;
    if (thread_opts[i]->count() > 0) inv.threads = threads;
  }
  if (inv.command == "run") return cmd_run(inv, out, err);
  if (inv.command == "sweep") return cmd_sweep(inv, out, err);
  if (inv.command == "verify") return cmd_verify(inv, out, err);
  return cmd_bench(inv, out, err);
}

}  // namespace banditlab::cli
