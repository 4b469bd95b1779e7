// The six low-level motion primitives. Each one owns the world for its
// duration, runs a closed loop over haptic feedback (unless the context says
// otherwise), and returns success or one of six error codes.
#pragma once

#include <memory>
#include <optional>
#include <string>

#include "hado/config.hpp"
#include "hado/direction.hpp"
#include "hado/dmp.hpp"
#include "hado/haptics.hpp"
#include "hado/perception.hpp"
#include "hado/rng.hpp"
#include "hado/world.hpp"

namespace hado {

enum class PrimitiveId { Approach, Grasp, UnlockLever, UnlockKnob, Open, Traverse };
enum class ErrorCode {
  GraspIkFail,
  GraspMiss,
  UnlockMiss,
  UnlockCollision,
  OpenMiss,
  OpenCollision
};

const char* to_string(PrimitiveId p);
const char* to_string(ErrorCode e);
std::optional<ErrorCode> error_code_from_string(const std::string& s);

struct PrimitiveTelemetry {
  HapticTrace trace;
  std::optional<RotationDirection> initial_direction;
  std::optional<RotationDirection> final_direction;
  int reversals = 0;
  std::optional<SwingClass> classified_swing;
  bool hazard = false;
};

struct PrimitiveOutcome {
  PrimitiveId primitive = PrimitiveId::Approach;
  std::optional<ErrorCode> error;  // empty == success
  PrimitiveTelemetry telemetry;
  int duration_steps = 0;

  bool ok() const { return !error.has_value(); }
  std::string result_string() const;
};

enum class FeedbackMode {
  Haptic,         // full closed loop
  OpenLoop,       // feedback stubbed; directions and swing sampled uniformly
  CoinFlipSwing   // closed loop, but push/pull classification is a coin flip
};

struct FaultPlan {
  std::optional<ErrorCode> inject;  // at most one fault per episode
};

// Everything a primitive needs for one episode. The plane fit and grasp
// prediction persist across primitives so unlock/open reuse grasp-phase
// results, mirroring how the planner feeds key parameters forward.
struct ExecContext {
  World& world;
  const Config& cfg;
  const GraspRefiner& refiner;
  std::uint64_t episode_seed = 0;
  Rng rng;  // episode-level draws: open-loop guesses, coin flips
  FeedbackMode mode = FeedbackMode::Haptic;
  FaultPlan fault;
  bool fault_fired = false;

  std::optional<PlaneFit> plane;
  std::optional<GraspPrediction> prediction;
  std::optional<GraspPose> grasp_pose;
  std::optional<RotationDirection> openloop_direction;  // sampled once
  std::optional<SwingClass> openloop_swing;

  ExecContext(World& w, const Config& c, const GraspRefiner& r, std::uint64_t seed,
              FeedbackMode m = FeedbackMode::Haptic, FaultPlan f = {})
      : world(w), cfg(c), refiner(r), episode_seed(seed),
        rng(mix_seed(seed, 0x9d)), mode(m), fault(f) {}

  // Consumes the planned fault if it targets `code`; true at most once.
  bool take_fault(ErrorCode code);
};

PrimitiveOutcome approach(ExecContext& ctx);
PrimitiveOutcome grasp(ExecContext& ctx);
PrimitiveOutcome unlock_lever(ExecContext& ctx);
PrimitiveOutcome unlock_knob(ExecContext& ctx);
PrimitiveOutcome open_door(ExecContext& ctx);
PrimitiveOutcome traverse(ExecContext& ctx);

}  // namespace hado
