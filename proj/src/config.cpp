#include "hado/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "hado/errors.hpp"
#include "kv_text.hpp"

namespace hado {

double min_hard_stop_current(const Config& cfg) {
  // Current one rotation step after the handle reaches a hard stop: the
  // commanded position keeps advancing while the handle stays put.
  const double step_rad = cfg.primitives.rotation_speed_rad_s *
                          cfg.primitives.knob_speed_factor * cfg.world.dt_s;
  return cfg.world.free_current_A + cfg.world.current_gain_A_per_Nm *
                                        cfg.world.handle_stiffness_Nm_per_rad * step_rad;
}

double blocked_probe_mean_current(const Config& cfg) {
  // Second half of a fully blocked probe pull: displacement ramps from d/2 to
  // d, so the mean blocked displacement is 3d/4.
  const double mean_blocked = 0.75 * cfg.haptics.probe_distance_m;
  const double torque = cfg.world.door_resist_stiffness_N_per_m * mean_blocked *
                        cfg.world.ee_lever_arm_m;
  return cfg.world.free_current_A + cfg.world.current_gain_A_per_Nm * torque;
}

void Config::validate() const {
  const double sigma3 = 3.0 * world.current_noise_sigma_A;
  if (world.dt_s <= 0.0) throw ConfigError("dt_s must be positive");
  if (haptics.debounce_window < 1) throw ConfigError("debounce_window must be >= 1");
  if (haptics.collision_factor <= 1.0)
    throw ConfigError("collision_factor must exceed 1");
  if (perception.direction_prior_accuracy < 0.0 ||
      perception.direction_prior_accuracy > 1.0)
    throw ConfigError("direction_prior_accuracy must lie in [0, 1]");
  if (planner.retry_budget < 1) throw ConfigError("retry_budget must be >= 1");
  if (primitives.step_budget < 10) throw ConfigError("step_budget too small");

  // Threshold separability: free motion and hard-stop currents must straddle
  // the threshold with a 3-sigma margin on both sides.
  const double free_upper = world.free_current_A + sigma3;
  if (world.current_threshold_A <= free_upper)
    throw ConfigError("current_threshold_A not separable from free motion current");
  const double stop_lower = min_hard_stop_current(*this) - sigma3;
  if (world.current_threshold_A >= stop_lower)
    throw ConfigError("current_threshold_A not separable from hard-stop current");

  // The blocked-probe response must clear the push/pull band decisively.
  const double band = world.free_current_A + haptics.push_pull_delta_A;
  if (blocked_probe_mean_current(*this) <= band + sigma3)
    throw ConfigError("probe response not separable from the push/pull band");
  if (haptics.push_pull_delta_A <= 2.0 * sigma3)
    throw ConfigError("push_pull_delta_A too close to the noise floor");
}

namespace {

using detail::KvLine;

struct Binder {
  std::map<std::string, std::function<void(const KvLine&)>> setters;

  void number(const std::string& key, double* target) {
    setters[key] = [target](const KvLine& kv) { *target = detail::parse_double(kv); };
  }
  void integer(const std::string& key, int* target) {
    setters[key] = [target](const KvLine& kv) { *target = detail::parse_int(kv); };
  }
  void box(const std::string& key, Box3* target) {
    setters[key] = [target](const KvLine& kv) {
      const auto v = detail::parse_doubles(kv, 6);
      target->min = {v[0], v[2], v[4]};
      target->max = {v[1], v[3], v[5]};
    };
  }
};

}  // namespace

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  Config cfg;
  Binder bind;
  bind.number("current_gain_A_per_Nm", &cfg.world.current_gain_A_per_Nm);
  bind.number("handle_stiffness_Nm_per_rad", &cfg.world.handle_stiffness_Nm_per_rad);
  bind.number("door_resist_stiffness_N_per_m", &cfg.world.door_resist_stiffness_N_per_m);
  bind.number("current_noise_sigma_A", &cfg.world.current_noise_sigma_A);
  bind.number("current_threshold_A", &cfg.world.current_threshold_A);
  bind.number("free_current_A", &cfg.world.free_current_A);
  bind.number("ee_lever_arm_m", &cfg.world.ee_lever_arm_m);
  bind.number("wedge_threshold_m", &cfg.world.wedge_threshold_m);
  bind.box("workspace_box_m", &cfg.world.workspace_box_m);
  bind.number("dt_s", &cfg.world.dt_s);
  bind.integer("cloud_points", &cfg.world.cloud_points);
  bind.number("view_max_range_m", &cfg.world.view_max_range_m);
  bind.number("view_half_angle_rad", &cfg.world.view_half_angle_rad);

  bind.integer("debounce_window", &cfg.haptics.debounce_window);
  bind.number("collision_factor", &cfg.haptics.collision_factor);
  bind.number("push_pull_delta_A", &cfg.haptics.push_pull_delta_A);
  bind.number("probe_distance_m", &cfg.haptics.probe_distance_m);
  bind.number("probe_speed_m_s", &cfg.haptics.probe_speed_m_s);

  bind.number("direction_prior_accuracy", &cfg.perception.direction_prior_accuracy);
  bind.integer("ransac_iterations", &cfg.perception.ransac_iterations);
  bind.number("ransac_inlier_threshold_m", &cfg.perception.ransac_inlier_threshold_m);
  bind.number("centroid_prior_radius_m", &cfg.perception.centroid_prior_radius_m);

  bind.integer("dmp_basis_count", &cfg.dmp.basis_count);
  bind.number("dmp_alpha_z", &cfg.dmp.alpha_z);
  bind.number("dmp_alpha_x", &cfg.dmp.alpha_x);
  bind.integer("dmp_rollout_steps", &cfg.dmp.rollout_steps);

  bind.number("approach_offset_m", &cfg.primitives.approach_offset_m);
  bind.number("approach_tolerance_m", &cfg.primitives.approach_tolerance_m);
  bind.number("rotation_speed_rad_s", &cfg.primitives.rotation_speed_rad_s);
  bind.number("knob_speed_factor", &cfg.primitives.knob_speed_factor);
  bind.number("drive_speed_m_s", &cfg.primitives.drive_speed_m_s);
  bind.number("base_speed_m_s", &cfg.primitives.base_speed_m_s);
  bind.integer("reach_steps", &cfg.primitives.reach_steps);
  bind.integer("step_budget", &cfg.primitives.step_budget);
  bind.number("grasp_depth_tol_m", &cfg.primitives.grasp_depth_tol_m);

  bind.integer("retry_budget", &cfg.planner.retry_budget);
  bind.number("success_angle_rad", &cfg.planner.success_angle_rad);

  std::string raw;
  int line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    KvLine kv;
    if (!detail::parse_kv_line(raw, line_number, &kv)) continue;
    auto it = bind.setters.find(kv.key);
    if (it == bind.setters.end())
      throw ConfigError("unknown config key '" + kv.key + "' at line " +
                        std::to_string(line_number));
    it->second(kv);
  }

  cfg.validate();
  return cfg;
}

}  // namespace hado
