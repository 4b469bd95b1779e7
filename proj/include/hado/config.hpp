// Runtime configuration for the whole stack. Defaults ship in data/default.cfg;
// the loader is fail-closed (unknown keys are an error) and validates the
// separability margins that the haptic channel depends on.
#pragma once

#include <cstdint>
#include <string>

#include "hado/geometry.hpp"

namespace hado {

// Axis-aligned reachability box, expressed in the base frame
// (x lateral, y down, z forward along the base heading).
struct Box3 {
  Vec3 min{-0.6, -0.5, 0.25};
  Vec3 max{0.6, 0.35, 0.95};

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }
};

struct WorldConfig {
  double current_gain_A_per_Nm = 2.0;
  double handle_stiffness_Nm_per_rad = 40.0;
  double door_resist_stiffness_N_per_m = 500.0;
  double current_noise_sigma_A = 0.05;
  double current_threshold_A = 1.2;
  double free_current_A = 0.4;
  double ee_lever_arm_m = 0.35;
  double wedge_threshold_m = 0.006;
  Box3 workspace_box_m;
  double dt_s = 0.02;
  int cloud_points = 1500;
  double view_max_range_m = 4.0;
  double view_half_angle_rad = 0.8;
};

struct HapticsConfig {
  int debounce_window = 3;
  double collision_factor = 1.5;
  double push_pull_delta_A = 0.4;
  double probe_distance_m = 0.05;
  double probe_speed_m_s = 0.05;
};

struct PerceptionConfig {
  double direction_prior_accuracy = 0.8;
  int ransac_iterations = 200;
  double ransac_inlier_threshold_m = 0.006;
  double centroid_prior_radius_m = 0.06;
};

struct DmpConfig {
  int basis_count = 20;
  double alpha_z = 25.0;
  double alpha_x = 4.6;
  int rollout_steps = 600;
};

struct PrimitiveConfig {
  double approach_offset_m = 0.6;
  double approach_tolerance_m = 0.01;
  double rotation_speed_rad_s = 1.0;
  double knob_speed_factor = 0.7;
  double drive_speed_m_s = 0.10;
  double base_speed_m_s = 0.3;
  int reach_steps = 120;
  int step_budget = 600;
  double grasp_depth_tol_m = 0.03;
};

struct PlannerConfig {
  int retry_budget = 3;
  double success_angle_rad = kPi / 4.0;
};

struct Config {
  WorldConfig world;
  HapticsConfig haptics;
  PerceptionConfig perception;
  DmpConfig dmp;
  PrimitiveConfig primitives;
  PlannerConfig planner;

  // Throws ConfigError when the numeric separability guarantees do not hold:
  // free-motion current + 3*sigma < threshold < hard-stop current - 3*sigma,
  // and the push-probe response must clear the classification band.
  void validate() const;
};

// Current produced by one rotation step into a hard stop, the lower bound the
// threshold must stay under for the limit detector to fire.
double min_hard_stop_current(const Config& cfg);

// Mean elbow current over the second half of a fully blocked probe pull.
double blocked_probe_mean_current(const Config& cfg);

Config load_config(const std::string& path);

}  // namespace hado
