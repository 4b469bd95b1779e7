// Experiment runner: suites of doors, repeated trials, per-handle-type
// success aggregation, CSV/markdown reports, record files, and replay.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hado/config.hpp"
#include "hado/door.hpp"
#include "hado/planner.hpp"

namespace hado {

enum class FaultMode { None, Rotate };  // Rotate: one error code per episode,
                                        // cycled across eligible codes

struct SuiteConfig {
  std::string suite_path;
  int trials_per_door = 5;
  std::uint64_t base_seed = 1;
  Method method = Method::ClosedLoopOracle;
  FaultMode faults = FaultMode::None;
  int parallel_workers = 1;
  bool coin_flip_swing = false;
};

struct TypeRate {
  int successes = 0;
  int trials = 0;
  double rate() const { return trials ? double(successes) / trials : 0.0; }
};

struct SuiteResults {
  std::string method;
  std::map<std::string, TypeRate> per_type;  // keyed by handle type name
  TypeRate overall;
  std::vector<EpisodeRecord> episodes;  // ordered by (door index, trial)

  std::string to_csv() const;
  std::string to_markdown() const;
};

// Deterministic given base seed, regardless of parallel_workers.
SuiteResults run_suite(const SuiteConfig& config, const Config& cfg);
SuiteResults run_suite(const std::vector<DoorSpec>& doors, const SuiteConfig& config,
                       const Config& cfg);

// One pass of the primitive chain with uniformly sampled direction and swing
// guesses and no error transitions (config.method is forced to open loop).
SuiteResults run_openloop(const SuiteConfig& config, const Config& cfg);

// Per-door analytic open-loop success expectation: product of 1/2 per unknown
// binary choice (unlock direction when a latch must be turned a specific way,
// plus the push/pull guess).
double openloop_expected_rate(const DoorSpec& door);

// Per-episode seed derivation, shared by the runner and replay.
std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t door_index,
                           int trial);

// Episode record files (one JSON object per line).
void write_records(const std::string& path, const SuiteResults& results);
std::vector<EpisodeRecord> load_records(const std::string& path);

// Re-runs a stored episode and prints the step-by-step trace; throws
// ParseError on a bad record and std::runtime_error on suite mismatch or
// determinism breaks.
void replay(const std::string& record_path, const std::string& suite_path,
            std::size_t index, const Config& cfg, std::ostream& os);

// The fault-rotation schedule used by FaultMode::Rotate (exposed for tests).
FaultPlan rotated_fault(const DoorSpec& door, std::size_t door_index);

}  // namespace hado
