#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "hado/config.hpp"
#include "hado/harness.hpp"
#include "hado/planner.hpp"

using namespace hado;

namespace {

const std::string kDataDir = HADO_DATA_DIR;

Config default_config() { return load_config(kDataDir + "/default.cfg"); }

DoorSpec door_by_id(const std::string& suite, const std::string& id) {
  for (const DoorSpec& d : load_suite(kDataDir + "/" + suite))
    if (d.id == id) return d;
  FAIL("no door ", id);
  return {};
}

const std::vector<std::optional<ErrorCode>> kAllResults = {
    std::nullopt,
    ErrorCode::GraspIkFail,
    ErrorCode::GraspMiss,
    ErrorCode::UnlockMiss,
    ErrorCode::UnlockCollision,
    ErrorCode::OpenMiss,
    ErrorCode::OpenCollision};

const std::vector<PlannerState> kAllStates = {
    PlannerState::Start,      PlannerState::Approach, PlannerState::Grasp,
    PlannerState::UnlockLever, PlannerState::UnlockKnob, PlannerState::Open,
    PlannerState::Traverse,   PlannerState::Done,     PlannerState::Failed};

const std::vector<HandleType> kAllHandles = {
    HandleType::Lever, HandleType::Knob, HandleType::Crossbar,
    HandleType::CabinetHandle};

std::vector<PlannerState> primitive_states(const EpisodeRecord& rec) {
  std::vector<PlannerState> out;
  for (PlannerState s : rec.state_sequence)
    if (s != PlannerState::Start && s != PlannerState::Done &&
        s != PlannerState::Failed)
      out.push_back(s);
  return out;
}

}  // namespace

TEST_CASE("transition lookup is total over everything reachable at runtime") {
  const TransitionTable table = TransitionTable::standard();
  for (PlannerState s : kAllStates)
    for (const auto& r : kAllResults)
      for (HandleType h : kAllHandles) {
        const bool defined = table.find(s, r, h).has_value();
        const bool unreachable = TransitionTable::unreachable(s, r);
        CAPTURE(to_string(s));
        CAPTURE(r ? to_string(*r) : "SUCCESS");
        CHECK((defined || unreachable));
        CHECK_FALSE((defined && unreachable));
      }
}

TEST_CASE("absorbing states have no outgoing rows") {
  const TransitionTable table = TransitionTable::standard();
  for (const auto& row : table.rows()) {
    CHECK(row.from != PlannerState::Done);
    CHECK(row.from != PlannerState::Failed);
  }
}

TEST_CASE("documented transitions") {
  const TransitionTable t = TransitionTable::standard();
  CHECK(t.next(PlannerState::Grasp, ErrorCode::GraspMiss, HandleType::Lever) ==
        PlannerState::Approach);
  CHECK(t.next(PlannerState::Grasp, ErrorCode::GraspIkFail, HandleType::Knob) ==
        PlannerState::Approach);
  CHECK(t.next(PlannerState::Open, ErrorCode::OpenCollision, HandleType::Lever) ==
        PlannerState::Grasp);
  CHECK(t.next(PlannerState::Open, ErrorCode::OpenMiss, HandleType::Knob) ==
        PlannerState::Approach);
  CHECK(t.next(PlannerState::UnlockLever, ErrorCode::UnlockMiss, HandleType::Lever) ==
        PlannerState::Grasp);
  CHECK(t.next(PlannerState::UnlockKnob, ErrorCode::UnlockCollision,
               HandleType::Knob) == PlannerState::Approach);
  CHECK(t.next(PlannerState::Traverse, std::nullopt, HandleType::Crossbar) ==
        PlannerState::Done);
  // Handle type routes the grasp success.
  CHECK(t.next(PlannerState::Grasp, std::nullopt, HandleType::Lever) ==
        PlannerState::UnlockLever);
  CHECK(t.next(PlannerState::Grasp, std::nullopt, HandleType::Knob) ==
        PlannerState::UnlockKnob);
  CHECK(t.next(PlannerState::Grasp, std::nullopt, HandleType::Crossbar) ==
        PlannerState::Open);
  CHECK(t.next(PlannerState::Grasp, std::nullopt, HandleType::CabinetHandle) ==
        PlannerState::Open);
}

TEST_CASE("table dump carries one row per transition with provenance marks") {
  const TransitionTable t = TransitionTable::standard();
  std::ostringstream os;
  t.dump(os);
  const std::string text = os.str();
  CHECK(text.find("Grasp -> UnlockLever on SUCCESS when handle=Lever [fixed]") !=
        std::string::npos);
  CHECK(text.find("UnlockLever -> Grasp on UNLOCK_MISS [inferred]") !=
        std::string::npos);
  CHECK(text.find("Open -> Grasp on OPEN_COLLISION [fixed]") != std::string::npos);
  // one line per row plus the header
  std::size_t lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == t.rows().size() + 1);
}

TEST_CASE("solvable lever pull door runs the straight chain") {
  const Config cfg = default_config();
  Config sure = cfg;
  sure.perception.direction_prior_accuracy = 1.0;
  const DoorSpec door = door_by_id("suite_field20", "lever_pull_cw_01");
  const EpisodeRecord rec = run_episode(door, 21, sure);
  CHECK(rec.success);
  CHECK(rec.state_sequence.back() == PlannerState::Done);
  const auto prims = primitive_states(rec);
  const std::vector<PlannerState> want = {PlannerState::Approach, PlannerState::Grasp,
                                          PlannerState::UnlockLever, PlannerState::Open,
                                          PlannerState::Traverse};
  CHECK(prims == want);
  CHECK(rec.final_door_angle_rad > sure.planner.success_angle_rad);
}

TEST_CASE("one injected grasp miss adds a second approach but still finishes") {
  const Config cfg = default_config();
  EpisodeOptions options;
  options.fault.inject = ErrorCode::GraspMiss;
  const DoorSpec door = door_by_id("suite_field20", "lever_pull_cw_01");
  const EpisodeRecord rec = run_episode(door, 22, cfg, options);
  CHECK(rec.success);
  int approaches = 0;
  for (PlannerState s : rec.state_sequence)
    if (s == PlannerState::Approach) ++approaches;
  CHECK(approaches == 2);
  CHECK(rec.state_sequence.back() == PlannerState::Done);
}

TEST_CASE("hard-locked door fails after exhausting the unlock retry budget") {
  const Config cfg = default_config();
  DoorSpec door = door_by_id("suite_field20", "knob_pull_cw_01");
  door.locked = true;
  door.handle.unlock_direction = UnlockDirection::None;
  door.handle.unlock_angle_rad = 0.0;
  door.handle.hard_stop_slack_rad = 0.0;
  const EpisodeRecord rec = run_episode(door, 23, cfg);
  CHECK_FALSE(rec.success);
  CHECK(rec.state_sequence.back() == PlannerState::Failed);
  CHECK(rec.failure_reason.find("UNLOCK_COLLISION") != std::string::npos);
  int collisions = 0;
  for (const auto& o : rec.outcomes)
    if (o.result == "UNLOCK_COLLISION") ++collisions;
  CHECK(collisions == cfg.planner.retry_budget + 1);
}

TEST_CASE("single-fault recovery ends Done for every code on eligible doors") {
  const Config cfg = default_config();
  const DoorSpec lever = door_by_id("suite_field20", "lever_pull_cw_01");
  const DoorSpec drawer = door_by_id("suite_field20", "drawer_slide_01");
  for (ErrorCode code : {ErrorCode::GraspIkFail, ErrorCode::GraspMiss,
                         ErrorCode::UnlockMiss, ErrorCode::UnlockCollision,
                         ErrorCode::OpenMiss, ErrorCode::OpenCollision}) {
    EpisodeOptions options;
    options.fault.inject = code;
    const EpisodeRecord rec = run_episode(lever, 24, cfg, options);
    CAPTURE(to_string(code));
    CHECK(rec.success);
    bool saw = false;
    for (const auto& o : rec.outcomes)
      if (o.result == to_string(code)) saw = true;
    CHECK(saw);
  }
  // No-latch door takes the grasp/open faults as well.
  for (ErrorCode code : {ErrorCode::GraspMiss, ErrorCode::OpenCollision}) {
    EpisodeOptions options;
    options.fault.inject = code;
    const EpisodeRecord rec = run_episode(drawer, 25, cfg, options);
    CHECK(rec.success);
  }
}

TEST_CASE("fuzzed episodes always halt inside the step bound") {
  Config cfg = default_config();
  // Smaller clouds keep the fuzz fast; physics is untouched.
  cfg.world.cloud_points = 300;
  cfg.perception.ransac_iterations = 60;
  const int bound = episode_step_bound(cfg);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const DoorSpec door = random_door(mix_seed(400, seed), "fuzz");
    EpisodeOptions options;
    if (seed % 3 == 1) options.fault = rotated_fault(door, seed);
    if (seed % 7 == 2) options.method = Method::OpenLoopRandom;
    const EpisodeRecord rec = run_episode(door, seed, cfg, options);
    CAPTURE(seed);
    CHECK(rec.wall_steps <= bound);
    const PlannerState last = rec.state_sequence.back();
    CHECK((last == PlannerState::Done || last == PlannerState::Failed));
    if (door.solvable() && !options.fault.inject &&
        options.method != Method::OpenLoopRandom)
      CHECK(rec.success);
  }
}

TEST_CASE("observer sees one outcome per primitive run") {
  const Config cfg = default_config();
  const DoorSpec door = door_by_id("suite_field20", "cabinet_pull_01");
  int calls = 0;
  const EpisodeRecord rec = run_episode(
      door, 26, cfg, {}, [&](PlannerState, const PrimitiveOutcome&) { ++calls; });
  CHECK(calls == static_cast<int>(rec.outcomes.size()));
  CHECK(rec.success);
}
