#include "luatable/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "luatable/cli/experiment.hpp"
#include "luatable/key.hpp"

namespace luatable::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string workload = "stochastic";
  std::string policy = "original";
  std::string mode = "hybrid";
  std::string out;
  std::string file;
  double p = 0.75;
  std::uint64_t T = 1000000;
  unsigned k = 10;
  std::uint64_t n = 1024;
  std::uint64_t rounds = 0;
  std::uint64_t seed = 0;
  std::uint64_t trials = 1;
  CLI::Option* rounds_opt = nullptr;
};

void add_workload_flags(CLI::App& app, Flags& f) {
  app.add_option("--workload", f.workload, "stochastic|churn|mixed-sign|adv-perm|rand-perm|file");
  app.add_option("--p", f.p, "insertion probability (stochastic)");
  app.add_option("--T", f.T, "operation count (stochastic)");
  app.add_option("--k", f.k, "exponent (churn, mixed-sign, adv-perm)");
  app.add_option("--n", f.n, "permutation length (rand-perm)");
  f.rounds_opt = app.add_option("--rounds", f.rounds, "churn rounds (default 2^k)");
  app.add_option("--file", f.file, "workload file (file)");
  app.add_option("--policy", f.policy, "original|fixed");
  app.add_option("--mode", f.mode, "hybrid|pure");
  app.add_option("--seed", f.seed, "master seed");
  app.add_option("--trials", f.trials, "independent trials");
}

RunConfig to_config(const Flags& f) {
  RunConfig c;
  c.workload.kind = parse_workload_kind(f.workload);
  c.workload.p = f.p;
  c.workload.T = f.T;
  c.workload.k = f.k;
  c.workload.n = f.n;
  if (f.rounds_opt != nullptr && f.rounds_opt->count() > 0) c.workload.rounds = f.rounds;
  c.workload.file = f.file;
  c.policy = parse_policy(f.policy);
  c.mode = parse_mode(f.mode);
  c.seed = f.seed;
  c.trials = f.trials;
  c.workers = workers_from_env();
  c.validate();
  return c;
}

std::vector<WorkloadOp> load_workload(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open workload file '" + path + "'");
  return parse_workload(in);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

std::vector<WorkloadOp> file_ops_for(const RunConfig& c) {
  if (c.workload.kind != WorkloadKind::kFile) return {};
  return load_workload(c.workload.file);
}

std::string trial_events_name(std::uint64_t index) {
  std::ostringstream name;
  name << "events/trial_" << std::setw(5) << std::setfill('0') << index << ".csv";
  return name.str();
}

int cmd_run(const Flags& f, std::ostream& out) {
  const RunConfig config = to_config(f);
  const auto file_ops = file_ops_for(config);
  const auto results = run_trials(config, file_ops);

  const fs::path dir(f.out);
  make_dir(dir / "events");
  std::vector<std::string> outputs = {"summary.json", "rehash_by_size.csv", "timing.csv",
                                      "timing.json"};
  for (const auto& r : results) {
    const std::string name = trial_events_name(r.index);
    write_file(dir / name, rehash_csv(r.log));
    outputs.push_back(name);
  }
  write_file(dir / "summary.json", summary_document(config, results).dump(2) + "\n");
  write_file(dir / "rehash_by_size.csv", rehash_by_size_csv(results));
  write_file(dir / "timing.csv", timing_csv(results));
  write_file(dir / "timing.json", timing_document(results).dump(2) + "\n");
  write_file(dir / "manifest.json", manifest_document("run", config, outputs).dump(2) + "\n");

  const json timing = timing_document(results);
  out << "trials=" << results.size() << " wall_seconds=" << timing["total_seconds"].get<double>()
      << " us_per_op=" << timing["us_per_op"].get<double>() << " out=" << dir.string() << '\n';
  return kExitOk;
}

int cmd_replay(const Flags& f, std::ostream& out) {
  if (f.file.empty()) throw ConfigError("replay needs --file");
  const auto ops = load_workload(f.file);
  HybridTable table(TableConfig{parse_mode(f.mode), parse_policy(f.policy), SaltState(f.seed)});
  Driver driver(table);
  for (const auto& op : ops) driver.apply(op);
  const std::string dump = state_dump(table).dump(2) + "\n";
  if (f.out.empty()) {
    out << dump;
  } else {
    const fs::path path(f.out);
    if (path.has_parent_path()) make_dir(path.parent_path());
    write_file(path, dump);
  }
  return kExitOk;
}

std::string ratio(double num, double den) {
  if (den == 0) return "nan";
  std::ostringstream s;
  s << num / den;
  return s.str();
}

int cmd_compare(const Flags& f, std::ostream& out) {
  RunConfig original = to_config(f);
  original.policy = ResizePolicy::kOriginal;
  RunConfig fixed = original;
  fixed.policy = ResizePolicy::kFixedHeadroom;
  const auto file_ops = file_ops_for(original);

  // Jobs alternate policies so both see the same machine conditions.
  std::vector<TrialResult> by_policy[2];
  by_policy[0].resize(original.trials);
  by_policy[1].resize(original.trials);
  parallel_for(2 * original.trials, original.workers, [&](std::uint64_t job) {
    const std::uint64_t trial = job / 2;
    const RunConfig& c = job % 2 == 0 ? original : fixed;
    by_policy[job % 2][trial] = run_trial(c, trial, file_ops);
  });

  std::ostringstream csv;
  csv << "trial,seed,insertion_calls_original,insertion_calls_fixed,insertion_calls_ratio,"
         "C_original,C_fixed,C_ratio,seconds_original,seconds_fixed,time_ratio\n";
  double totals[6] = {};
  const auto row = [&](const std::string& label, const std::string& seed, const double* v) {
    csv << label << ',' << seed << ',' << static_cast<std::uint64_t>(v[0]) << ','
        << static_cast<std::uint64_t>(v[1]) << ',' << ratio(v[0], v[1]) << ','
        << static_cast<std::uint64_t>(v[2]) << ',' << static_cast<std::uint64_t>(v[3]) << ','
        << ratio(v[2], v[3]) << ',' << v[4] << ',' << v[5] << ',' << ratio(v[4], v[5]) << '\n';
  };
  for (std::uint64_t i = 0; i < original.trials; ++i) {
    const TrialResult& a = by_policy[0][i];
    const TrialResult& b = by_policy[1][i];
    const double v[6] = {static_cast<double>(a.log.insertion_calls()),
                         static_cast<double>(b.log.insertion_calls()),
                         static_cast<double>(cost_C(a.log)),
                         static_cast<double>(cost_C(b.log)),
                         a.seconds,
                         b.seconds};
    for (int c = 0; c < 6; ++c) totals[c] += v[c];
    row(std::to_string(i), std::to_string(a.seed), v);
  }
  row("total", "", totals);

  const fs::path dir(f.out);
  make_dir(dir);
  write_file(dir / "compare.csv", csv.str());
  json manifest = manifest_document("compare", original, {"compare.csv"});
  manifest["policy"] = json::array({"original", "fixed"});
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "time_ratio=" << ratio(totals[4], totals[5])
      << " insertion_calls_ratio=" << ratio(totals[0], totals[1]) << " out=" << dir.string()
      << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lua-style hybrid table experiments"};
  app.require_subcommand(1);
  Flags run_flags;
  Flags replay_flags;
  Flags compare_flags;

  CLI::App* run = app.add_subcommand("run", "run trials and write CSV/JSON artifacts");
  add_workload_flags(*run, run_flags);
  run->add_option("--out", run_flags.out, "output directory")->required();

  CLI::App* replay = app.add_subcommand("replay", "replay a workload file and dump table state");
  replay->add_option("--file", replay_flags.file, "workload file")->required();
  replay->add_option("--policy", replay_flags.policy, "original|fixed");
  replay->add_option("--mode", replay_flags.mode, "hybrid|pure");
  replay->add_option("--seed", replay_flags.seed, "salt seed");
  replay->add_option("--out", replay_flags.out, "dump path (stdout when omitted)");

  CLI::App* compare = app.add_subcommand("compare", "run original and fixed policies side by side");
  add_workload_flags(*compare, compare_flags);
  compare->add_option("--out", compare_flags.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags, out);
    if (replay->parsed()) return cmd_replay(replay_flags, out);
    return cmd_compare(compare_flags, out);
  } catch (const WorkloadParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace luatable::cli
