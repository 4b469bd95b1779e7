#include "hado/harness.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "hado/errors.hpp"
#include "hado/haptics.hpp"
#include "hado/rng.hpp"

namespace hado {

std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t door_index,
                           int trial) {
  return mix_seed(base_seed, door_index + 1, static_cast<std::uint64_t>(trial) + 1);
}

FaultPlan rotated_fault(const DoorSpec& door, std::size_t door_index) {
  static const ErrorCode kCycle[] = {ErrorCode::GraspIkFail,   ErrorCode::GraspMiss,
                                     ErrorCode::UnlockMiss,    ErrorCode::UnlockCollision,
                                     ErrorCode::OpenMiss,      ErrorCode::OpenCollision};
  // Walk the cycle starting at the door index; skip codes the door cannot
  // raise (unlock faults need a latch to turn).
  for (std::size_t k = 0; k < 6; ++k) {
    const ErrorCode code = kCycle[(door_index + k) % 6];
    const bool unlock_fault =
        code == ErrorCode::UnlockMiss || code == ErrorCode::UnlockCollision;
    if (unlock_fault && !door.has_latch()) continue;
    return FaultPlan{code};
  }
  return {};
}

SuiteResults run_suite(const std::vector<DoorSpec>& doors, const SuiteConfig& config,
                       const Config& cfg) {
  struct Job {
    std::size_t door_index;
    int trial;
  };
  std::vector<Job> jobs;
  for (std::size_t d = 0; d < doors.size(); ++d)
    for (int t = 0; t < config.trials_per_door; ++t) jobs.push_back({d, t});

  std::vector<EpisodeRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      EpisodeOptions options;
      options.method = config.method;
      options.coin_flip_swing = config.coin_flip_swing;
      if (config.faults == FaultMode::Rotate)
        options.fault = rotated_fault(doors[job.door_index], job.door_index);
      records[i] = run_episode(doors[job.door_index],
                               episode_seed(config.base_seed, job.door_index, job.trial),
                               cfg, options);
    }
  };

  const int workers = std::max(1, config.parallel_workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SuiteResults results;
  results.method = to_string(config.method);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const DoorSpec& door = doors[jobs[i].door_index];
    TypeRate& tr = results.per_type[to_string(door.handle.handle_type)];
    tr.trials += 1;
    results.overall.trials += 1;
    if (records[i].success) {
      tr.successes += 1;
      results.overall.successes += 1;
    }
  }
  results.episodes = std::move(records);
  return results;
}

SuiteResults run_suite(const SuiteConfig& config, const Config& cfg) {
  return run_suite(load_suite(config.suite_path), config, cfg);
}

SuiteResults run_openloop(const SuiteConfig& config, const Config& cfg) {
  SuiteConfig ol = config;
  ol.method = Method::OpenLoopRandom;
  return run_suite(ol, cfg);
}

double openloop_expected_rate(const DoorSpec& door) {
  if (!door.solvable()) return 0.0;
  double p = 1.0;
  if (door.has_latch() && (door.handle.unlock_direction == UnlockDirection::CW ||
                           door.handle.unlock_direction == UnlockDirection::CCW))
    p *= 0.5;  // rotation direction guess
  p *= 0.5;    // push/pull guess
  return p;
}

namespace {

std::string fmt_rate(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", r);
  return buf;
}

const char* kTypeOrder[] = {"Crossbar", "Lever", "Knob", "CabinetHandle"};

}  // namespace

std::string SuiteResults::to_csv() const {
  std::ostringstream os;
  os << "method,handle_type,successes,trials,rate\n";
  for (const char* type : kTypeOrder) {
    const auto it = per_type.find(type);
    if (it == per_type.end()) continue;
    os << method << "," << type << "," << it->second.successes << ","
       << it->second.trials << "," << fmt_rate(it->second.rate()) << "\n";
  }
  os << method << ",Avg," << overall.successes << "," << overall.trials << ","
     << fmt_rate(overall.rate()) << "\n";
  return os.str();
}

std::string SuiteResults::to_markdown() const {
  auto pct = [](const TypeRate& tr) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f%%", 100.0 * tr.rate());
    return std::string(tr.trials ? buf : "-");
  };
  std::ostringstream os;
  os << "| Method | Crossbar | Lever | Doorknob | Cabinet | Avg |\n";
  os << "|---|---|---|---|---|---|\n";
  os << "| " << method;
  for (const char* type : kTypeOrder) {
    const auto it = per_type.find(type);
    os << " | " << (it == per_type.end() ? std::string("-") : pct(it->second));
  }
  os << " | " << pct(overall) << " |\n";
  return os.str();
}

namespace {

nlohmann::json to_json(const EpisodeRecord& r) {
  nlohmann::json j;
  j["door_id"] = r.door_id;
  j["seed"] = r.seed;
  j["method"] = r.method;
  if (!r.fault.empty()) j["fault"] = r.fault;
  if (r.coin_flip_swing) j["coin_flip_swing"] = true;
  j["success"] = r.success;
  nlohmann::json states = nlohmann::json::array();
  for (PlannerState s : r.state_sequence) states.push_back(to_string(s));
  j["states"] = states;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& o : r.outcomes) {
    nlohmann::json jo;
    jo["primitive"] = to_string(o.primitive);
    jo["result"] = o.result;
    jo["steps"] = o.duration_steps;
    jo["reversals"] = o.reversals;
    if (!o.classified_swing.empty()) jo["swing"] = o.classified_swing;
    outs.push_back(jo);
  }
  j["outcomes"] = outs;
  j["final_door_angle_rad"] = r.final_door_angle_rad;
  j["wall_steps"] = r.wall_steps;
  j["door_hash"] = r.door_hash;
  if (!r.failure_reason.empty()) j["failure_reason"] = r.failure_reason;
  return j;
}

PlannerState state_from_string(const std::string& s) {
  for (PlannerState st : {PlannerState::Start, PlannerState::Approach,
                          PlannerState::Grasp, PlannerState::UnlockLever,
                          PlannerState::UnlockKnob, PlannerState::Open,
                          PlannerState::Traverse, PlannerState::Done,
                          PlannerState::Failed})
    if (s == to_string(st)) return st;
  throw ParseError("unknown planner state '" + s + "'");
}

EpisodeRecord record_from_json(const nlohmann::json& j, int line) {
  try {
    EpisodeRecord r;
    r.door_id = j.at("door_id").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.method = j.at("method").get<std::string>();
    r.fault = j.value("fault", "");
    r.coin_flip_swing = j.value("coin_flip_swing", false);
    r.success = j.at("success").get<bool>();
    for (const auto& s : j.at("states"))
      r.state_sequence.push_back(state_from_string(s.get<std::string>()));
    for (const auto& jo : j.at("outcomes")) {
      OutcomeSummary o;
      const std::string prim = jo.at("primitive").get<std::string>();
      bool matched = false;
      for (PrimitiveId id : {PrimitiveId::Approach, PrimitiveId::Grasp,
                             PrimitiveId::UnlockLever, PrimitiveId::UnlockKnob,
                             PrimitiveId::Open, PrimitiveId::Traverse})
        if (prim == to_string(id)) {
          o.primitive = id;
          matched = true;
        }
      if (!matched) throw ParseError("unknown primitive '" + prim + "'", line);
      o.result = jo.at("result").get<std::string>();
      o.duration_steps = jo.at("steps").get<int>();
      o.reversals = jo.value("reversals", 0);
      o.classified_swing = jo.value("swing", "");
      r.outcomes.push_back(o);
    }
    r.final_door_angle_rad = j.at("final_door_angle_rad").get<double>();
    r.wall_steps = j.at("wall_steps").get<int>();
    r.door_hash = j.at("door_hash").get<std::uint64_t>();
    r.failure_reason = j.value("failure_reason", "");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad episode record: ") + e.what(), line);
  }
}

}  // namespace

void write_records(const std::string& path, const SuiteResults& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write records file: " + path);
  for (const auto& r : results.episodes) out << to_json(r).dump() << "\n";
}

std::vector<EpisodeRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open records file: " + path);
  std::vector<EpisodeRecord> records;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("bad JSON in records file", line_number);
    records.push_back(record_from_json(j, line_number));
  }
  return records;
}

void replay(const std::string& record_path, const std::string& suite_path,
            std::size_t index, const Config& cfg, std::ostream& os) {
  const auto records = load_records(record_path);
  if (index >= records.size())
    throw std::runtime_error("record index " + std::to_string(index) +
                             " out of range (" + std::to_string(records.size()) +
                             " records)");
  const EpisodeRecord& stored = records[index];

  const auto doors = load_suite(suite_path);
  const DoorSpec* door = nullptr;
  for (const auto& d : doors)
    if (d.id == stored.door_id) door = &d;
  if (!door)
    throw std::runtime_error("suite mismatch: door '" + stored.door_id +
                             "' not present in " + suite_path);
  if (spec_hash(*door) != stored.door_hash)
    throw std::runtime_error("suite mismatch: door '" + stored.door_id +
                             "' differs from the one recorded");

  const auto method = method_from_string(stored.method);
  if (!method) throw ParseError("record has unknown method '" + stored.method + "'");

  os << "replaying door '" << stored.door_id << "' seed " << stored.seed
     << " method " << stored.method << "\n";

  EpisodeOptions options;
  options.method = *method;
  options.coin_flip_swing = stored.coin_flip_swing;
  if (!stored.fault.empty()) {
    options.fault.inject = error_code_from_string(stored.fault);
    if (!options.fault.inject)
      throw ParseError("record has unknown fault '" + stored.fault + "'");
  }
  EpisodeObserver observer = [&](PlannerState state, const PrimitiveOutcome& o) {
    os << "  [" << to_string(state) << "] " << to_string(o.primitive) << " -> "
       << o.result_string() << " (" << o.duration_steps << " steps)";
    if (o.telemetry.initial_direction)
      os << " dir=" << to_string(*o.telemetry.initial_direction)
         << (o.telemetry.reversals ? "(reversed)" : "");
    if (o.telemetry.classified_swing)
      os << " swing=" << to_string(*o.telemetry.classified_swing);
    os << "\n";
    if (o.primitive == PrimitiveId::UnlockLever ||
        o.primitive == PrimitiveId::UnlockKnob) {
      const HapticEvent ev =
          detect_rotation_limit(o.telemetry.trace, cfg.world.current_threshold_A,
                                cfg.haptics.debounce_window);
      if (ev.kind != HapticEventKind::Nominal) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "    haptic: %s at t=%.2fs (%.2f A)\n",
                      to_string(ev.kind), ev.t_s, ev.evidence_A);
        os << buf;
      }
    }
    bool was_high = false;
    for (const auto& s : o.telemetry.trace.samples) {
      if (s.gripper_resistance == GripperResistance::High) was_high = true;
      if (was_high && s.gripper_resistance == GripperResistance::Low) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "    haptic: contact lost at t=%.2fs\n", s.t_s);
        os << buf;
        break;
      }
    }
  };

  const EpisodeRecord rerun = run_episode(*door, stored.seed, cfg, options, observer);

  os << "  final state: " << to_string(rerun.state_sequence.back()) << "\n";
  char buf[96];
  std::snprintf(buf, sizeof buf, "  final door angle: %.6f rad, success: %s\n",
                rerun.final_door_angle_rad, rerun.success ? "true" : "false");
  os << buf;

  if (rerun.final_door_angle_rad != stored.final_door_angle_rad ||
      rerun.success != stored.success || rerun.wall_steps != stored.wall_steps)
    throw std::runtime_error("replay mismatch: stored record disagrees with re-run");
  os << "  re-run matches the stored record exactly\n";
}

}  // namespace hado
