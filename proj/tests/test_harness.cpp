#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hado/config.hpp"
#include "hado/errors.hpp"
#include "hado/harness.hpp"

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

}  // namespace

TEST_CASE("open-loop analytic expectation per door") {
  CHECK(openloop_expected_rate(door_by_id("suite_ablation5", "ab_lever_pull_cw_04")) ==
        doctest::Approx(0.25));
  CHECK(openloop_expected_rate(door_by_id("suite_ablation5", "ab_crossbar_c_01")) ==
        doctest::Approx(0.5));
  CHECK(openloop_expected_rate(door_by_id("suite_field20", "drawer_slide_01")) ==
        doctest::Approx(0.5));
  DoorSpec either = door_by_id("suite_field20", "lever_pull_either_05");
  CHECK(openloop_expected_rate(either) == doctest::Approx(0.5));
  DoorSpec locked = door_by_id("suite_field20", "lever_pull_cw_01");
  locked.locked = true;
  locked.handle.unlock_direction = UnlockDirection::None;
  locked.handle.unlock_angle_rad = 0;
  locked.handle.hard_stop_slack_rad = 0;
  CHECK(openloop_expected_rate(locked) == 0.0);
}

TEST_CASE("empty suite yields an empty table without complaint") {
  const Config cfg = default_config();
  SuiteConfig sc;
  sc.trials_per_door = 5;
  const SuiteResults results = run_suite(std::vector<DoorSpec>{}, sc, cfg);
  CHECK(results.overall.trials == 0);
  CHECK(results.episodes.empty());
  CHECK(results.to_csv().rfind("method,handle_type,successes,trials,rate\n", 0) == 0);
}

TEST_CASE("per-type accounting sums exactly to the overall row") {
  const Config cfg = default_config();
  SuiteConfig sc;
  sc.suite_path = kDataDir + "/suite_field20";
  sc.trials_per_door = 2;
  sc.base_seed = 17;
  const SuiteResults results = run_suite(sc, cfg);
  int successes = 0, trials = 0;
  for (const auto& [type, tr] : results.per_type) {
    successes += tr.successes;
    trials += tr.trials;
  }
  CHECK(successes == results.overall.successes);
  CHECK(trials == results.overall.trials);
  CHECK(trials == 40);
}

TEST_CASE("suite results are identical for one and four workers") {
  const Config cfg = default_config();
  SuiteConfig sc;
  sc.suite_path = kDataDir + "/suite_field20";
  sc.trials_per_door = 2;
  sc.base_seed = 5;
  sc.parallel_workers = 1;
  const SuiteResults a = run_suite(sc, cfg);
  sc.parallel_workers = 4;
  const SuiteResults b = run_suite(sc, cfg);
  CHECK(a.to_csv() == b.to_csv());
  REQUIRE(a.episodes.size() == b.episodes.size());
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    CHECK(a.episodes[i].seed == b.episodes[i].seed);
    CHECK(a.episodes[i].success == b.episodes[i].success);
    CHECK(a.episodes[i].final_door_angle_rad == b.episodes[i].final_door_angle_rad);
    CHECK(a.episodes[i].wall_steps == b.episodes[i].wall_steps);
  }
}

TEST_CASE("markdown report renders the table layout") {
  const Config cfg = default_config();
  SuiteConfig sc;
  sc.suite_path = kDataDir + "/suite_ablation5";
  sc.trials_per_door = 1;
  const SuiteResults results = run_suite(sc, cfg);
  const std::string md = results.to_markdown();
  CHECK(md.find("| Method | Crossbar | Lever | Doorknob | Cabinet | Avg |") !=
        std::string::npos);
  CHECK(md.find("closed-oracle") != std::string::npos);
}

TEST_CASE("records round-trip and replay reproduces the stored episode") {
  const Config cfg = default_config();
  SuiteConfig sc;
  sc.suite_path = kDataDir + "/suite_field20";
  sc.trials_per_door = 1;
  sc.base_seed = 23;
  const SuiteResults results = run_suite(sc, cfg);
  const std::string path = "/tmp/hado_records_test.jsonl";
  write_records(path, results);

  const auto loaded = load_records(path);
  REQUIRE(loaded.size() == results.episodes.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    CHECK(loaded[i].door_id == results.episodes[i].door_id);
    CHECK(loaded[i].seed == results.episodes[i].seed);
    CHECK(loaded[i].success == results.episodes[i].success);
    CHECK(loaded[i].final_door_angle_rad ==
          results.episodes[i].final_door_angle_rad);
    CHECK(loaded[i].state_sequence == results.episodes[i].state_sequence);
    CHECK(loaded[i].door_hash == results.episodes[i].door_hash);
  }

  std::ostringstream os;
  CHECK_NOTHROW(replay(path, kDataDir + "/suite_field20", 0, cfg, os));
  CHECK(os.str().find("re-run matches the stored record exactly") !=
        std::string::npos);
  CHECK(os.str().find("Done") != std::string::npos);

  // Wrong suite: the referenced door is missing or differs.
  std::ostringstream os2;
  CHECK_THROWS_WITH_AS(replay(path, kDataDir + "/suite_ablation5", 0, cfg, os2),
                       doctest::Contains("suite mismatch"), std::runtime_error);

  std::ofstream(path, std::ios::app) << "{not json}\n";
  CHECK_THROWS_AS(load_records(path), ParseError);
}

TEST_CASE("rotated faults cover all six error codes across the field suite") {
  const auto doors = load_suite(kDataDir + "/suite_field20");
  std::set<std::string> codes;
  for (std::size_t i = 0; i < doors.size(); ++i) {
    const FaultPlan plan = rotated_fault(doors[i], i);
    REQUIRE(plan.inject.has_value());
    codes.insert(to_string(*plan.inject));
    const bool unlock_fault = *plan.inject == ErrorCode::UnlockMiss ||
                              *plan.inject == ErrorCode::UnlockCollision;
    if (unlock_fault) CHECK(doors[i].has_latch());
  }
  CHECK(codes.size() == 6);
}

TEST_CASE("suite parser fails closed") {
  SUBCASE("unknown field") {
    CHECK_THROWS_WITH_AS(parse_suite("id: d\nnope: 1\n---\n", "test"),
                         doctest::Contains("unknown field"), ParseError);
  }
  SUBCASE("missing field") {
    CHECK_THROWS_WITH_AS(parse_suite("id: d\n---\n", "test"),
                         doctest::Contains("missing field"), ParseError);
  }
  SUBCASE("bad enum value") {
    const std::string text = "id: d\nhandle_type: Handlebar\n---\n";
    CHECK_THROWS_AS(parse_suite(text, "test"), ParseError);
  }
  SUBCASE("duplicate field") {
    CHECK_THROWS_WITH_AS(parse_suite("id: d\nid: e\n---\n", "test"),
                         doctest::Contains("duplicate"), ParseError);
  }
  SUBCASE("shipped suites parse and validate") {
    CHECK(load_suite(kDataDir + "/suite_field20").size() == 20);
    CHECK(load_suite(kDataDir + "/suite_ablation5").size() == 5);
  }
  SUBCASE("serialization round trip") {
    const auto doors = load_suite(kDataDir + "/suite_ablation5");
    const auto again = parse_suite(serialize_suite(doors), "round-trip");
    REQUIRE(again.size() == doors.size());
    for (std::size_t i = 0; i < doors.size(); ++i)
      CHECK(spec_hash(again[i]) == spec_hash(doors[i]));
  }
}

TEST_CASE("generated doors are valid and varied") {
  std::set<HandleType> types;
  int solvable = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const DoorSpec d = random_door(mix_seed(9, seed), "g");
    CHECK_NOTHROW(d.validate());
    types.insert(d.handle.handle_type);
    if (d.solvable()) ++solvable;
  }
  CHECK(types.size() == 4);
  CHECK(solvable > 150);  // locked doors are a small minority
  CHECK(solvable < 200);
}

TEST_CASE("swing-classifier coin flip degrades pull doors, haptics stay perfect") {
  const Config cfg = default_config();
  std::vector<DoorSpec> pull_doors;
  for (const DoorSpec& d : load_suite(kDataDir + "/suite_field20"))
    if (d.swing == SwingType::Pull) pull_doors.push_back(d);
  REQUIRE(pull_doors.size() == 7);

  SuiteConfig sc;
  sc.trials_per_door = 12;
  sc.base_seed = 31;
  sc.coin_flip_swing = true;
  const SuiteResults coin = run_suite(pull_doors, sc, cfg);
  CHECK(coin.overall.rate() <= 0.60);

  sc.coin_flip_swing = false;
  const SuiteResults haptic = run_suite(pull_doors, sc, cfg);
  CHECK(haptic.overall.rate() == doctest::Approx(1.0));
}
