#include "hado/planner.hpp"

#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>

namespace hado {

const char* to_string(PlannerState s) {
  switch (s) {
    case PlannerState::Start: return "Start";
    case PlannerState::Approach: return "Approach";
    case PlannerState::Grasp: return "Grasp";
    case PlannerState::UnlockLever: return "UnlockLever";
    case PlannerState::UnlockKnob: return "UnlockKnob";
    case PlannerState::Open: return "Open";
    case PlannerState::Traverse: return "Traverse";
    case PlannerState::Done: return "Done";
    case PlannerState::Failed: return "Failed";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::ClosedLoopOracle: return "closed-oracle";
    case Method::ClosedLoopCentroid: return "closed-centroid";
    case Method::OpenLoopRandom: return "open-random";
  }
  return "?";
}

std::optional<Method> method_from_string(const std::string& s) {
  if (s == "closed-oracle") return Method::ClosedLoopOracle;
  if (s == "closed-centroid") return Method::ClosedLoopCentroid;
  if (s == "open-random") return Method::OpenLoopRandom;
  return std::nullopt;
}

TransitionTable TransitionTable::standard() {
  using P = PlannerState;
  using Prov = TransitionRow::Provenance;
  TransitionTable t;
  auto add = [&](P from, std::optional<ErrorCode> on, std::optional<HandleType> h,
                 P to, Prov prov) { t.rows_.push_back({from, on, h, to, prov}); };

  // Regular working chain.
  add(P::Start, std::nullopt, std::nullopt, P::Approach, Prov::Fixed);
  add(P::Approach, std::nullopt, std::nullopt, P::Grasp, Prov::Fixed);
  add(P::Grasp, std::nullopt, HandleType::Lever, P::UnlockLever, Prov::Fixed);
  add(P::Grasp, std::nullopt, HandleType::Knob, P::UnlockKnob, Prov::Fixed);
  // Push bars and cabinet pulls have no latch to turn.
  add(P::Grasp, std::nullopt, HandleType::Crossbar, P::Open, Prov::Inferred);
  add(P::Grasp, std::nullopt, HandleType::CabinetHandle, P::Open, Prov::Inferred);
  add(P::UnlockLever, std::nullopt, std::nullopt, P::Open, Prov::Fixed);
  add(P::UnlockKnob, std::nullopt, std::nullopt, P::Open, Prov::Fixed);
  add(P::Open, std::nullopt, std::nullopt, P::Traverse, Prov::Fixed);
  add(P::Traverse, std::nullopt, std::nullopt, P::Done, Prov::Fixed);

  // Error handling.
  add(P::Grasp, ErrorCode::GraspIkFail, std::nullopt, P::Approach, Prov::Fixed);
  add(P::Grasp, ErrorCode::GraspMiss, std::nullopt, P::Approach, Prov::Fixed);
  // Contact lost mid-turn: a fresh grasp is enough.
  add(P::UnlockLever, ErrorCode::UnlockMiss, std::nullopt, P::Grasp, Prov::Inferred);
  add(P::UnlockKnob, ErrorCode::UnlockMiss, std::nullopt, P::Grasp, Prov::Inferred);
  // Obstruction while turning: re-perceive from scratch.
  add(P::UnlockLever, ErrorCode::UnlockCollision, std::nullopt, P::Approach,
      Prov::Inferred);
  add(P::UnlockKnob, ErrorCode::UnlockCollision, std::nullopt, P::Approach,
      Prov::Inferred);
  add(P::Open, ErrorCode::OpenMiss, std::nullopt, P::Approach, Prov::Fixed);
  add(P::Open, ErrorCode::OpenCollision, std::nullopt, P::Grasp, Prov::Fixed);
  return t;
}

std::optional<PlannerState> TransitionTable::find(
    PlannerState current, const std::optional<ErrorCode>& result,
    HandleType handle) const {
  // Handle-specific rows take precedence over wildcard rows.
  for (const auto& row : rows_)
    if (row.from == current && row.on == result && row.handle_only &&
        *row.handle_only == handle)
      return row.to;
  for (const auto& row : rows_)
    if (row.from == current && row.on == result && !row.handle_only) return row.to;
  return std::nullopt;
}

PlannerState TransitionTable::next(PlannerState current,
                                   const std::optional<ErrorCode>& result,
                                   HandleType handle) const {
  const auto to = find(current, result, handle);
  if (!to)
    throw std::logic_error(std::string("transition miss: ") + to_string(current) +
                           " on " + (result ? to_string(*result) : "SUCCESS"));
  return *to;
}

bool TransitionTable::unreachable(PlannerState current,
                                  const std::optional<ErrorCode>& result) {
  if (current == PlannerState::Done || current == PlannerState::Failed) return true;
  if (!result) return false;  // every live state can succeed
  switch (current) {
    case PlannerState::Start:
    case PlannerState::Approach:
    case PlannerState::Traverse:
      return true;  // these primitives emit no error feedback
    case PlannerState::Grasp:
      return *result != ErrorCode::GraspIkFail && *result != ErrorCode::GraspMiss;
    case PlannerState::UnlockLever:
    case PlannerState::UnlockKnob:
      return *result != ErrorCode::UnlockMiss && *result != ErrorCode::UnlockCollision;
    case PlannerState::Open:
      return *result != ErrorCode::OpenMiss && *result != ErrorCode::OpenCollision;
    default:
      return true;
  }
}

void TransitionTable::dump(std::ostream& os) const {
  os << "# transition table: from -> to, trigger, handle filter, provenance\n";
  for (const auto& row : rows_) {
    os << to_string(row.from) << " -> " << to_string(row.to) << " on "
       << (row.on ? to_string(*row.on) : "SUCCESS");
    if (row.handle_only) os << " when handle=" << to_string(*row.handle_only);
    os << (row.provenance == TransitionRow::Provenance::Fixed ? " [fixed]"
                                                              : " [inferred]");
    os << "\n";
  }
}

int episode_step_bound(const Config& cfg) {
  // Four states can emit errors, each at most retry_budget times; every error
  // rewinds at most to Approach, so between errors the chain advances through
  // at most seven primitive runs.
  const int max_errors = 4 * cfg.planner.retry_budget + 1;
  return max_errors * 7 * cfg.primitives.step_budget;
}

namespace {

PrimitiveOutcome run_primitive(PlannerState state, ExecContext& ctx) {
  switch (state) {
    case PlannerState::Approach: return approach(ctx);
    case PlannerState::Grasp: return grasp(ctx);
    case PlannerState::UnlockLever: return unlock_lever(ctx);
    case PlannerState::UnlockKnob: return unlock_knob(ctx);
    case PlannerState::Open: return open_door(ctx);
    case PlannerState::Traverse: return traverse(ctx);
    default: throw std::logic_error("not a primitive state");
  }
}

OutcomeSummary summarize(const PrimitiveOutcome& o) {
  OutcomeSummary s;
  s.primitive = o.primitive;
  s.result = o.result_string();
  s.duration_steps = o.duration_steps;
  s.reversals = o.telemetry.reversals;
  if (o.telemetry.classified_swing)
    s.classified_swing = to_string(*o.telemetry.classified_swing);
  return s;
}

// Open-loop halting: the chain stops as soon as ground truth shows the last
// primitive cannot have worked (no haptic feedback is consulted).
std::string openloop_blocker(PlannerState state, const World& world) {
  switch (state) {
    case PlannerState::Grasp:
      return world.door().gripper_engaged ? "" : "cannot proceed: grasp missed";
    case PlannerState::UnlockLever:
    case PlannerState::UnlockKnob:
      return world.door().unlocked ? "" : "cannot proceed: still latched";
    case PlannerState::Open:
      return world.fully_open() ? "" : "cannot proceed: door did not open";
    default:
      return "";
  }
}

}  // namespace

EpisodeRecord run_episode(const DoorSpec& door, std::uint64_t seed, const Config& cfg,
                          const EpisodeOptions& options,
                          const EpisodeObserver& observer) {
  door.validate();

  World world(door, cfg, mix_seed(seed, 0x01));

  std::unique_ptr<GraspRefiner> refiner;
  if (options.method == Method::ClosedLoopCentroid)
    refiner = std::make_unique<CentroidBaseline>(cfg.perception);
  else
    refiner = std::make_unique<GeometricOracle>(cfg.perception);

  FeedbackMode mode = FeedbackMode::Haptic;
  if (options.method == Method::OpenLoopRandom) mode = FeedbackMode::OpenLoop;
  else if (options.coin_flip_swing) mode = FeedbackMode::CoinFlipSwing;

  ExecContext ctx(world, cfg, *refiner, mix_seed(seed, 0x02), mode, options.fault);

  const TransitionTable table = TransitionTable::standard();
  const HandleType handle = door.handle.handle_type;

  EpisodeRecord rec;
  rec.door_id = door.id;
  rec.seed = seed;
  rec.method = to_string(options.method);
  rec.fault = options.fault.inject ? to_string(*options.fault.inject) : "";
  rec.coin_flip_swing = options.coin_flip_swing;
  rec.door_hash = spec_hash(door);

  std::map<PlannerState, int> budget;
  for (PlannerState s : {PlannerState::Approach, PlannerState::Grasp,
                         PlannerState::UnlockLever, PlannerState::UnlockKnob,
                         PlannerState::Open, PlannerState::Traverse})
    budget[s] = cfg.planner.retry_budget;

  PlannerState state = PlannerState::Start;
  rec.state_sequence.push_back(state);
  state = table.next(state, std::nullopt, handle);

  const int step_bound = episode_step_bound(cfg);
  while (state != PlannerState::Done && state != PlannerState::Failed) {
    rec.state_sequence.push_back(state);
    const PrimitiveOutcome outcome = run_primitive(state, ctx);
    rec.outcomes.push_back(summarize(outcome));
    if (observer) observer(state, outcome);

    if (world.hazard()) {
      rec.failure_reason = world.hazard_reason();
      state = PlannerState::Failed;
      break;
    }
    if (world.step_count() > step_bound) {
      rec.failure_reason = "episode step bound exceeded";
      state = PlannerState::Failed;
      break;
    }

    if (mode == FeedbackMode::OpenLoop) {
      const std::string blocker = openloop_blocker(state, world);
      if (!blocker.empty()) {
        rec.failure_reason = blocker;
        state = PlannerState::Failed;
        break;
      }
      state = table.next(state, std::nullopt, handle);
      continue;
    }

    if (outcome.error) {
      if (--budget[state] < 0) {
        rec.failure_reason =
            std::string("retry budget exhausted in ") + to_string(state) + " after " +
            to_string(*outcome.error);
        state = PlannerState::Failed;
        break;
      }
    }
    state = table.next(state, outcome.error, handle);
  }
  rec.state_sequence.push_back(state);

  rec.success = world.fully_open();
  rec.final_door_angle_rad = world.door().door_angle_rad;
  rec.wall_steps = world.step_count();
  if (state == PlannerState::Failed && rec.failure_reason.empty())
    rec.failure_reason = "failed";
  return rec;
}

}  // namespace hado
