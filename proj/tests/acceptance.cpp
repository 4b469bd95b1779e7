// Acceptance suite. Runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion; exits non-zero if any line is red.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hado/config.hpp"
#include "hado/dmp.hpp"
#include "hado/harness.hpp"
#include "hado/haptics.hpp"
#include "hado/perception.hpp"
#include "hado/planner.hpp"
#include "hado/rng.hpp"

using namespace hado;

namespace {

const std::string kDataDir = HADO_DATA_DIR;
int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", number,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// 1. Overall closed-loop success rate on the field suite, single-threaded,
//    within the wall-clock budget.
void criterion_1(const Config& cfg) {
  SuiteConfig sc;
  sc.suite_path = kDataDir + "/suite_field20";
  sc.method = Method::ClosedLoopOracle;
  sc.trials_per_door = 5;
  sc.base_seed = 1;
  sc.parallel_workers = 1;
  const auto t0 = std::chrono::steady_clock::now();
  const SuiteResults r = run_suite(sc, cfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = r.overall.rate() >= 0.90 && secs < 30.0;
  report(1, "overall closed-loop rate", pass,
         fmt("rate=%.3f (need >=0.90) over %d trials, runtime=%.2fs (budget 30s)",
             r.overall.rate(), r.overall.trials, secs));
}

// 2. Grasp-refinement ablation shape on the non-convex subset.
void criterion_2(const Config& cfg) {
  SuiteConfig sc;
  sc.suite_path = kDataDir + "/suite_ablation5";
  sc.trials_per_door = 5;
  sc.base_seed = 1;
  sc.method = Method::ClosedLoopCentroid;
  const SuiteResults centroid = run_suite(sc, cfg);
  sc.method = Method::ClosedLoopOracle;
  const SuiteResults oracle = run_suite(sc, cfg);
  const bool pass = centroid.overall.rate() <= 0.40 && oracle.overall.rate() == 1.0;
  report(2, "grasp refinement ablation", pass,
         fmt("centroid=%.2f (need <=0.40), refined=%.2f (need =1.00)",
             centroid.overall.rate(), oracle.overall.rate()));
}

// 3. Open loop vs closed loop on the ablation subset: per-door empirical rate
//    within 3 sigma of the analytic expectation; closed loop perfect.
void criterion_3(const Config& cfg) {
  const auto doors = load_suite(kDataDir + "/suite_ablation5");
  SuiteConfig sc;
  sc.suite_path = kDataDir + "/suite_ablation5";
  sc.method = Method::OpenLoopRandom;
  sc.trials_per_door = 200;
  sc.base_seed = 3;
  const SuiteResults open = run_suite(sc, cfg);

  bool pass = true;
  std::string detail;
  for (std::size_t d = 0; d < doors.size(); ++d) {
    int succ = 0, n = 0;
    for (const auto& e : open.episodes)
      if (e.door_id == doors[d].id) {
        ++n;
        succ += e.success ? 1 : 0;
      }
    const double p = openloop_expected_rate(doors[d]);
    const double sigma = std::sqrt(p * (1 - p) / n);
    const double emp = double(succ) / n;
    if (std::abs(emp - p) > 3 * sigma) pass = false;
    detail += fmt("%s%.2f/%.2f", d ? " " : "", emp, p);
  }
  sc.method = Method::ClosedLoopOracle;
  sc.trials_per_door = 5;
  const SuiteResults closed = run_suite(sc, cfg);
  if (closed.overall.rate() != 1.0) pass = false;
  report(3, "open vs closed loop", pass,
         fmt("open-loop per-door emp/expected: %s (3-sigma bands); closed=%.2f",
             detail.c_str(), closed.overall.rate()));
}

// 4. Haptic classification matches ground truth on every probe over the full
//    suite by 100 seeds.
void criterion_4(const Config& cfg) {
  const auto doors = load_suite(kDataDir + "/suite_field20");
  long probes = 0, swing_hits = 0, limit_checks = 0, limit_hits = 0;
  long episodes_done = 0, episodes = 0;

  for (const DoorSpec& door : doors) {
    const SwingClass truth_swing =
        door.swing == SwingType::Push ? SwingClass::Push : SwingClass::Pull;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const EpisodeObserver observer = [&](PlannerState, const PrimitiveOutcome& o) {
        if (o.primitive == PrimitiveId::Open && o.telemetry.classified_swing) {
          ++probes;
          if (*o.telemetry.classified_swing == truth_swing) ++swing_hits;
        }
        if ((o.primitive == PrimitiveId::UnlockLever ||
             o.primitive == PrimitiveId::UnlockKnob) &&
            o.telemetry.initial_direction && !o.telemetry.trace.empty()) {
          // Ground truth: the handle hits a stop iff the initial guess was
          // wrong for a directional latch.
          const auto dir = door.handle.unlock_direction;
          if (dir != UnlockDirection::CW && dir != UnlockDirection::CCW) return;
          const bool truth_stop =
              (dir == UnlockDirection::CW &&
               *o.telemetry.initial_direction != RotationDirection::CW) ||
              (dir == UnlockDirection::CCW &&
               *o.telemetry.initial_direction != RotationDirection::CCW);
          const HapticEvent ev = detect_rotation_limit(
              o.telemetry.trace, cfg.world.current_threshold_A,
              cfg.haptics.debounce_window);
          ++limit_checks;
          if ((ev.kind == HapticEventKind::RotationLimit) == truth_stop)
            ++limit_hits;
        }
      };
      const EpisodeRecord rec =
          run_episode(door, mix_seed(4000, probes + seed, seed), cfg, {}, observer);
      ++episodes;
      if (rec.success) ++episodes_done;
    }
  }
  const bool pass = probes > 0 && swing_hits == probes &&
                    limit_hits == limit_checks && episodes_done == episodes;
  report(4, "haptic classification vs ground truth", pass,
         fmt("swing %ld/%ld, rotation-limit %ld/%ld, episodes done %ld/%ld",
             swing_hits, probes, limit_hits, limit_checks, episodes_done, episodes));
}

// 5. Single-fault recovery: every eligible error code on every solvable door
//    still ends Done, and all six codes are exercised.
void criterion_5(const Config& cfg) {
  const auto doors = load_suite(kDataDir + "/suite_field20");
  std::set<std::string> exercised;
  long runs = 0, done = 0, fault_fired = 0;
  for (const DoorSpec& door : doors) {
    if (!door.solvable()) continue;
    for (ErrorCode code : {ErrorCode::GraspIkFail, ErrorCode::GraspMiss,
                           ErrorCode::UnlockMiss, ErrorCode::UnlockCollision,
                           ErrorCode::OpenMiss, ErrorCode::OpenCollision}) {
      const bool unlock_fault =
          code == ErrorCode::UnlockMiss || code == ErrorCode::UnlockCollision;
      if (unlock_fault && !door.has_latch()) continue;
      EpisodeOptions options;
      options.fault.inject = code;
      const EpisodeRecord rec = run_episode(door, 5000 + runs, cfg, options);
      ++runs;
      if (rec.success && rec.state_sequence.back() == PlannerState::Done) ++done;
      for (const auto& o : rec.outcomes)
        if (o.result == to_string(code)) {
          exercised.insert(o.result);
          ++fault_fired;
          break;
        }
    }
  }
  const bool pass = done == runs && exercised.size() == 6 && fault_fired == runs;
  report(5, "single-fault recovery", pass,
         fmt("recovered %ld/%ld episodes, %zu/6 codes exercised", done, runs,
             exercised.size()));
}

// 6. Planner totality and fuzzed termination.
void criterion_6(const Config& cfg) {
  const TransitionTable table = TransitionTable::standard();
  bool total = true;
  for (PlannerState s :
       {PlannerState::Start, PlannerState::Approach, PlannerState::Grasp,
        PlannerState::UnlockLever, PlannerState::UnlockKnob, PlannerState::Open,
        PlannerState::Traverse, PlannerState::Done, PlannerState::Failed}) {
    const std::vector<std::optional<ErrorCode>> results = {
        std::nullopt,
        ErrorCode::GraspIkFail,
        ErrorCode::GraspMiss,
        ErrorCode::UnlockMiss,
        ErrorCode::UnlockCollision,
        ErrorCode::OpenMiss,
        ErrorCode::OpenCollision};
    for (const auto& r : results)
      for (HandleType h : {HandleType::Lever, HandleType::Knob, HandleType::Crossbar,
                           HandleType::CabinetHandle}) {
        const bool defined = table.find(s, r, h).has_value();
        const bool unreachable = TransitionTable::unreachable(s, r);
        if (defined == unreachable) total = false;
      }
  }

  Config fuzz_cfg = cfg;
  fuzz_cfg.world.cloud_points = 300;      // lighter perception, same physics
  fuzz_cfg.perception.ransac_iterations = 60;
  const int bound = episode_step_bound(fuzz_cfg);
  const int kEpisodes = 10000;
  std::atomic<int> next{0}, halted{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= kEpisodes) return;
      const DoorSpec door = random_door(mix_seed(6000, i), "fuzz");
      EpisodeOptions options;
      if (i % 3 == 1) options.fault = rotated_fault(door, i);
      if (i % 5 == 2) options.method = Method::OpenLoopRandom;
      const EpisodeRecord rec = run_episode(door, 6000 + i, fuzz_cfg, options);
      const PlannerState last = rec.state_sequence.back();
      if (rec.wall_steps <= bound &&
          (last == PlannerState::Done || last == PlannerState::Failed))
        halted.fetch_add(1);
    }
  };
  std::thread a(worker), b(worker);
  a.join();
  b.join();
  const bool pass = total && halted.load() == kEpisodes;
  report(6, "planner totality and termination", pass,
         fmt("lookup total=%s, %d/%d fuzzed episodes halted within %d steps",
             total ? "yes" : "no", halted.load(), kEpisodes, bound));
}

// 7. Plane fitting accuracy under the stated contamination.
void criterion_7(const Config& cfg) {
  int ok = 0;
  const int kClouds = 100;
  for (int c = 0; c < kClouds; ++c) {
    Rng rng(mix_seed(7000, c));
    PointCloud cloud;
    const int total = 1000;
    const int n_out = 300;
    for (int i = 0; i < total - n_out; ++i) {
      Vec3 p{rng.uniform(-0.45, 0.45), rng.uniform(-1.0, 1.0), 1.0};
      p.z += rng.normal(0, 0.002);
      cloud.push_back(p);
    }
    int made = 0;
    while (made < n_out) {
      const Vec3 p{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                   1.0 + rng.uniform(-0.5, 0.5)};
      if (std::abs(p.z - 1.0) < 0.02) continue;
      cloud.push_back(p);
      ++made;
    }
    const PlaneFit fit = ransac_plane(cloud, 0.006, 200, mix_seed(7500, c));
    const double cosang = std::abs(fit.normal.z);
    if (std::acos(clamp(cosang, -1.0, 1.0)) < deg_to_rad(2)) ++ok;
  }
  (void)cfg;
  report(7, "plane fit under 30% outliers", ok == kClouds,
         fmt("%d/%d clouds within 2 degrees (sigma 2mm, threshold 6mm, 200 iters)",
             ok, kClouds));
}

// 8. Trajectory generator: goal convergence and spatial invariance.
void criterion_8(const Config& cfg) {
  const Trajectory demo = min_jerk_demo({0, 0, 0}, {1, 1, 1}, 101);
  const DmpParams p =
      dmp_fit(demo, 0.01, cfg.dmp.basis_count, cfg.dmp.alpha_z, cfg.dmp.alpha_x);
  Rng rng(8008);
  int conv_ok = 0;
  const int kPairs = 1000;
  for (int t = 0; t < kPairs; ++t) {
    std::vector<double> start(3), goal(3);
    for (int d = 0; d < 3; ++d) {
      start[d] = rng.uniform(-5, 5);
      goal[d] = start[d] + rng.uniform(-10, 10);
    }
    const auto roll = dmp_rollout(p, start, goal, cfg.dmp.rollout_steps);
    double err = 0;
    for (int d = 0; d < 3; ++d) err += std::pow(roll.back()[d] - goal[d], 2);
    if (std::sqrt(err) < 1e-3 * std::max(path_length(roll), 1e-9)) ++conv_ok;
  }

  int inv_ok = 0;
  const int kShifts = 200;
  for (int t = 0; t < kShifts; ++t) {
    std::vector<double> start(3), goal(3), c(3);
    for (int d = 0; d < 3; ++d) {
      start[d] = rng.uniform(-1, 1);
      goal[d] = rng.uniform(-1, 1);
      c[d] = rng.uniform(-5, 5);
    }
    std::vector<double> s2(3), g2(3);
    for (int d = 0; d < 3; ++d) {
      s2[d] = start[d] + c[d];
      g2[d] = goal[d] + c[d];
    }
    const auto a = dmp_rollout(p, start, goal, 300);
    const auto b = dmp_rollout(p, s2, g2, 300);
    double worst = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
      for (int d = 0; d < 3; ++d)
        worst = std::max(worst, std::abs(b[k][d] - (a[k][d] + c[d])));
    if (worst < 1e-6) ++inv_ok;
  }
  const bool pass = conv_ok == kPairs && inv_ok == kShifts;
  report(8, "trajectory goal convergence and invariance", pass,
         fmt("convergence %d/%d pairs, translation invariance %d/%d", conv_ok,
             kPairs, inv_ok, kShifts));
}

// 9. Byte-identical reports across worker counts.
void criterion_9(const Config& cfg) {
  SuiteConfig sc;
  sc.suite_path = kDataDir + "/suite_field20";
  sc.method = Method::ClosedLoopOracle;
  sc.trials_per_door = 5;
  sc.base_seed = 41;
  sc.parallel_workers = 1;
  const SuiteResults a = run_suite(sc, cfg);
  sc.parallel_workers = 4;
  const SuiteResults b = run_suite(sc, cfg);
  bool same_records = a.episodes.size() == b.episodes.size();
  if (same_records)
    for (std::size_t i = 0; i < a.episodes.size(); ++i)
      same_records = same_records && a.episodes[i].seed == b.episodes[i].seed &&
                     a.episodes[i].success == b.episodes[i].success &&
                     a.episodes[i].final_door_angle_rad ==
                         b.episodes[i].final_door_angle_rad &&
                     a.episodes[i].wall_steps == b.episodes[i].wall_steps;
  const bool pass = a.to_csv() == b.to_csv() && same_records;
  report(9, "determinism across workers", pass,
         fmt("csv identical=%s, per-episode identical=%s",
             a.to_csv() == b.to_csv() ? "yes" : "no", same_records ? "yes" : "no"));
}

}  // namespace

int main() {
  const Config cfg = load_config(kDataDir + "/default.cfg");
  criterion_1(cfg);
  criterion_2(cfg);
  criterion_3(cfg);
  criterion_4(cfg);
  criterion_5(cfg);
  criterion_6(cfg);
  criterion_7(cfg);
  criterion_8(cfg);
  criterion_9(cfg);
  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
