// Discrete dynamic movement primitives: a critically damped attractor with a
// learned forcing term, fit by locally weighted regression and generalized to
// new start/goal pairs. Exponential canonical system, gaussian basis
// functions, goal-scaled forcing.
#pragma once

#include <vector>

#include "hado/config.hpp"

namespace hado {

// trajectory[t][dim], uniform timestep.
using Trajectory = std::vector<std::vector<double>>;

struct DmpParams {
  int basis_count = 20;
  double alpha_z = 25.0;
  double beta_z = 6.25;  // alpha_z / 4: critical damping
  double alpha_x = 4.6;
  double tau_s = 1.0;
  std::vector<double> start, goal;            // fit endpoints
  std::vector<std::vector<double>> weights;   // [dim][basis]
  std::vector<double> centers, widths;        // shared across dimensions
};

// Fits basis weights so the forcing term reproduces the demonstration's
// finite-difference accelerations. Throws DegenerateDemoError when start
// equals goal in every dimension (forcing scale undefined); callers fall back
// to a straight line.
DmpParams dmp_fit(const Trajectory& demonstration, double dt_s, int basis_count,
                  double alpha_z = 25.0, double alpha_x = 4.6);

// Integrates canonical + transformation systems at dt = tau_s / steps with
// explicit trapezoidal (Heun) steps. Returns steps + 1 samples including
// both endpoints.
Trajectory dmp_rollout(const DmpParams& params, const std::vector<double>& new_start,
                       const std::vector<double>& new_goal, int steps);

// Normalized basis mix times the phase, before goal scaling; vanishes with
// the canonical variable.
double dmp_forcing_term(const DmpParams& params, int dim, double phase);

// Same integrator run for an arbitrary duration (canonical decay tail).
Trajectory dmp_rollout_for(const DmpParams& params, const std::vector<double>& new_start,
                           const std::vector<double>& new_goal, int steps,
                           double duration_s);

// Minimum-jerk profile between start and goal; the one built-in demonstration
// behind the default reach primitive.
Trajectory min_jerk_demo(const std::vector<double>& start,
                         const std::vector<double>& goal, int samples);

// The shipped reach DMP: minimum-jerk 3-D straight line, fit once.
DmpParams default_reach_dmp(const DmpConfig& cfg);

double path_length(const Trajectory& t);

}  // namespace hado
