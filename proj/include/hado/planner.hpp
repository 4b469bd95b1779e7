// High-level state machine: states clustered by primitive, regular working
// transitions, and error-handling transitions. The table is data, dumpable as
// text, with each row carrying a provenance mark (fixed vs inferred).
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hado/config.hpp"
#include "hado/door.hpp"
#include "hado/primitives.hpp"

namespace hado {

enum class PlannerState {
  Start,
  Approach,
  Grasp,
  UnlockLever,
  UnlockKnob,
  Open,
  Traverse,
  Done,
  Failed
};

const char* to_string(PlannerState s);

struct TransitionRow {
  PlannerState from = PlannerState::Start;
  std::optional<ErrorCode> on;            // empty == Success
  std::optional<HandleType> handle_only;  // empty == any handle type
  PlannerState to = PlannerState::Start;
  enum class Provenance { Fixed, Inferred } provenance = Provenance::Fixed;
};

class TransitionTable {
 public:
  static TransitionTable standard();

  // Total over runtime-reachable (state, result, handle) combinations;
  // throws std::logic_error on a miss (the totality test proves there is none).
  PlannerState next(PlannerState current, const std::optional<ErrorCode>& result,
                    HandleType handle) const;

  // Lookup without throwing, for the exhaustive enumeration test.
  std::optional<PlannerState> find(PlannerState current,
                                   const std::optional<ErrorCode>& result,
                                   HandleType handle) const;

  // True when (state, result) can never occur at runtime (a primitive cannot
  // emit that result), documented instead of given a row.
  static bool unreachable(PlannerState current, const std::optional<ErrorCode>& result);

  const std::vector<TransitionRow>& rows() const { return rows_; }

  // One row per transition, with its provenance mark.
  void dump(std::ostream& os) const;

 private:
  std::vector<TransitionRow> rows_;
};

struct OutcomeSummary {
  PrimitiveId primitive;
  std::string result;
  int duration_steps = 0;
  int reversals = 0;
  std::string classified_swing;  // empty when not applicable
};

struct EpisodeRecord {
  std::string door_id;
  std::uint64_t seed = 0;
  std::string method;
  std::string fault;  // injected error code name, empty when none
  bool coin_flip_swing = false;
  bool success = false;
  std::vector<PlannerState> state_sequence;
  std::vector<OutcomeSummary> outcomes;
  double final_door_angle_rad = 0.0;
  int wall_steps = 0;
  std::uint64_t door_hash = 0;
  std::string failure_reason;  // empty on success
};

enum class Method { ClosedLoopOracle, ClosedLoopCentroid, OpenLoopRandom };

const char* to_string(Method m);
std::optional<Method> method_from_string(const std::string& s);

struct EpisodeOptions {
  Method method = Method::ClosedLoopOracle;
  FaultPlan fault;
  bool coin_flip_swing = false;
};

// Called after each primitive run with the full outcome (telemetry included);
// replay uses this to print haptic event timelines.
using EpisodeObserver = std::function<void(PlannerState, const PrimitiveOutcome&)>;

EpisodeRecord run_episode(const DoorSpec& door, std::uint64_t seed, const Config& cfg,
                          const EpisodeOptions& options = {},
                          const EpisodeObserver& observer = {});

// Upper bound on world steps for any episode: every state may run its
// primitive (1 + retry_budget) times, each bounded by the step budget.
int episode_step_bound(const Config& cfg);

}  // namespace hado
