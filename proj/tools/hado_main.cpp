// Command-line front end: suite runs, open-loop ablation, replay, transition
// table dump, and suite generation.
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hado/errors.hpp"
#include "hado/harness.hpp"

#ifndef HADO_DATA_DIR
#define HADO_DATA_DIR "data"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitAssert = 3;

struct RunArgs {
  std::string suite;
  std::string config_path = std::string(HADO_DATA_DIR) + "/default.cfg";
  std::string method = "closed-oracle";
  int trials = 5;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;
  std::string records;
  std::string faults = "none";
  bool markdown = false;
  bool coin_flip_swing = false;
  std::optional<double> assert_min_rate;
};

int do_run(const RunArgs& args, bool force_openloop) {
  const hado::Config cfg = hado::load_config(args.config_path);

  hado::SuiteConfig sc;
  sc.suite_path = args.suite;
  sc.trials_per_door = args.trials;
  sc.base_seed = args.seed;
  sc.parallel_workers = args.workers;
  sc.coin_flip_swing = args.coin_flip_swing;

  if (force_openloop) {
    sc.method = hado::Method::OpenLoopRandom;
  } else {
    const auto m = hado::method_from_string(args.method);
    if (!m) {
      std::cerr << "unknown method '" << args.method
                << "' (expected closed-oracle, closed-centroid, open-random)\n";
      return kExitUsage;
    }
    sc.method = *m;
  }
  if (args.faults == "rotate")
    sc.faults = hado::FaultMode::Rotate;
  else if (args.faults != "none") {
    std::cerr << "unknown fault mode '" << args.faults << "' (none|rotate)\n";
    return kExitUsage;
  }

  const hado::SuiteResults results = hado::run_suite(sc, cfg);
  const std::string report = args.markdown ? results.to_markdown() : results.to_csv();
  if (args.out.empty()) {
    std::cout << report;
  } else {
    std::ofstream out(args.out);
    if (!out) {
      std::cerr << "cannot write " << args.out << "\n";
      return kExitParse;
    }
    out << report;
  }
  if (!args.records.empty()) hado::write_records(args.records, results);

  if (args.assert_min_rate && results.overall.rate() < *args.assert_min_rate) {
    std::cerr << "overall rate " << results.overall.rate()
              << " below asserted minimum " << *args.assert_min_rate << "\n";
    return kExitAssert;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"haptic-aware door opening: simulation and evaluation harness"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto add_run_options = [&](CLI::App* cmd, bool with_method) {
    cmd->add_option("--suite", run_args.suite, "suite file")->required();
    cmd->add_option("--config", run_args.config_path, "config file");
    if (with_method)
      cmd->add_option("--method", run_args.method,
                      "closed-oracle | closed-centroid | open-random");
    cmd->add_option("--trials", run_args.trials, "trials per door");
    cmd->add_option("--seed", run_args.seed, "base seed");
    cmd->add_option("--workers", run_args.workers, "parallel workers");
    cmd->add_option("--out", run_args.out, "write the report here (default stdout)");
    cmd->add_option("--records", run_args.records, "write episode records (JSON lines)");
    cmd->add_option("--faults", run_args.faults,
                    "fault injection: none | rotate (one error per episode)");
    cmd->add_flag("--markdown", run_args.markdown, "table layout instead of CSV");
    cmd->add_flag("--coin-flip-swing", run_args.coin_flip_swing,
                  "replace push/pull classification with a coin flip");
    cmd->add_option("--assert", run_args.assert_min_rate,
                    "exit 3 when the overall rate falls below this");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run a suite and report rates");
  add_run_options(run_cmd, true);

  CLI::App* openloop_cmd =
      app.add_subcommand("openloop", "open-loop ablation (sampled guesses)");
  add_run_options(openloop_cmd, false);

  std::string replay_records, replay_suite;
  std::string replay_config = std::string(HADO_DATA_DIR) + "/default.cfg";
  std::size_t replay_index = 0;
  CLI::App* replay_cmd = app.add_subcommand("replay", "re-run a stored episode");
  replay_cmd->add_option("--records", replay_records, "records file")->required();
  replay_cmd->add_option("--suite", replay_suite, "suite file")->required();
  replay_cmd->add_option("--index", replay_index, "episode index (default 0)");
  replay_cmd->add_option("--config", replay_config, "config file");

  std::string dump_out;
  CLI::App* dump_cmd =
      app.add_subcommand("dump-transitions", "print the planner transition table");
  dump_cmd->add_option("--out", dump_out, "write here instead of stdout");

  int gen_count = 20;
  std::uint64_t gen_seed = 7;
  std::string gen_out;
  CLI::App* gen_cmd = app.add_subcommand("gen-suite", "generate a randomized suite");
  gen_cmd->add_option("--count", gen_count, "number of doors");
  gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_option("--out", gen_out, "output suite file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return do_run(run_args, false);
    if (openloop_cmd->parsed()) return do_run(run_args, true);
    if (replay_cmd->parsed()) {
      const hado::Config cfg = hado::load_config(replay_config);
      hado::replay(replay_records, replay_suite, replay_index, cfg, std::cout);
      return kExitOk;
    }
    if (dump_cmd->parsed()) {
      const auto table = hado::TransitionTable::standard();
      if (dump_out.empty()) {
        table.dump(std::cout);
      } else {
        std::ofstream out(dump_out);
        if (!out) {
          std::cerr << "cannot write " << dump_out << "\n";
          return kExitParse;
        }
        table.dump(out);
      }
      return kExitOk;
    }
    if (gen_cmd->parsed()) {
      std::vector<hado::DoorSpec> doors;
      for (int i = 0; i < gen_count; ++i)
        doors.push_back(hado::random_door(hado::mix_seed(gen_seed, i),
                                          "gen_" + std::to_string(i)));
      hado::save_suite(gen_out, doors);
      std::cout << "wrote " << doors.size() << " doors to " << gen_out << "\n";
      return kExitOk;
    }
  } catch (const hado::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const hado::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitUsage;
}
