#include "hado/dmp.hpp"

#include <cmath>
#include <stdexcept>

#include "hado/errors.hpp"

namespace hado {

namespace {

constexpr double kAmpEps = 1e-9;

// Gaussian basis activations at canonical phase x.
void basis_activations(const DmpParams& p, double x, std::vector<double>* psi) {
  psi->resize(p.centers.size());
  for (std::size_t i = 0; i < p.centers.size(); ++i) {
    const double d = x - p.centers[i];
    (*psi)[i] = std::exp(-p.widths[i] * d * d);
  }
}

double forcing(const DmpParams& p, int dim, double x, const std::vector<double>& psi) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    num += psi[i] * p.weights[dim][i];
    den += psi[i];
  }
  if (den < 1e-12) return 0.0;
  return num / den * x;
}

void make_basis(DmpParams* p) {
  const int n = p->basis_count;
  p->centers.resize(n);
  p->widths.resize(n);
  for (int i = 0; i < n; ++i)
    p->centers[i] = std::exp(-p->alpha_x * static_cast<double>(i) / (n - 1));
  // Width factor tuned against the reproduction and goal-convergence bounds.
  for (int i = 0; i < n - 1; ++i) {
    const double gap = 0.25 * (p->centers[i + 1] - p->centers[i]);
    p->widths[i] = 1.0 / (2.0 * gap * gap);
  }
  p->widths[n - 1] = p->widths[n - 2];
}

}  // namespace

double dmp_forcing_term(const DmpParams& params, int dim, double phase) {
  std::vector<double> psi;
  basis_activations(params, phase, &psi);
  return forcing(params, dim, phase, psi);
}

double path_length(const Trajectory& t) {
  double len = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    double step2 = 0.0;
    for (std::size_t d = 0; d < t[k].size(); ++d) {
      const double dd = t[k][d] - t[k - 1][d];
      step2 += dd * dd;
    }
    len += std::sqrt(step2);
  }
  return len;
}

DmpParams dmp_fit(const Trajectory& demo, double dt_s, int basis_count,
                  double alpha_z, double alpha_x) {
  if (demo.size() < 3) throw std::invalid_argument("demonstration needs >= 3 samples");
  if (basis_count < 2) throw std::invalid_argument("basis_count must be >= 2");

  const std::size_t T = demo.size();
  const std::size_t dims = demo[0].size();

  DmpParams p;
  p.basis_count = basis_count;
  p.alpha_z = alpha_z;
  p.beta_z = alpha_z / 4.0;
  p.alpha_x = alpha_x;
  p.tau_s = static_cast<double>(T - 1) * dt_s;
  p.start = demo.front();
  p.goal = demo.back();
  make_basis(&p);

  bool any_amplitude = false;
  std::vector<double> amplitude(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    amplitude[d] = p.goal[d] - p.start[d];
    if (std::abs(amplitude[d]) > kAmpEps) any_amplitude = true;
  }
  if (!any_amplitude) throw DegenerateDemoError();

  // Canonical phase at the demo samples. The phase equation has a closed
  // form; evaluating it exactly keeps the forcing term aligned between fit
  // and playback regardless of either side's step count.
  std::vector<double> xs(T);
  for (std::size_t t = 0; t < T; ++t)
    xs[t] = std::exp(-p.alpha_x * static_cast<double>(t) / static_cast<double>(T - 1));

  // Forcing target per dimension: tau^2 ydd - alpha_z (beta_z (g - y) - tau yd),
  // normalized by the demo amplitude (the rollout scales by goal - start).
  p.weights.assign(dims, std::vector<double>(basis_count, 0.0));
  std::vector<double> psi;
  std::vector<std::vector<double>> f_target(dims, std::vector<double>(T, 0.0));
  for (std::size_t d = 0; d < dims; ++d) {
    if (std::abs(amplitude[d]) <= kAmpEps) continue;
    for (std::size_t t = 0; t < T; ++t) {
      double yd, ydd;
      if (t == 0) {
        yd = (demo[1][d] - demo[0][d]) / dt_s;
        ydd = (demo[2][d] - 2 * demo[1][d] + demo[0][d]) / (dt_s * dt_s);
      } else if (t == T - 1) {
        yd = (demo[T - 1][d] - demo[T - 2][d]) / dt_s;
        ydd = (demo[T - 1][d] - 2 * demo[T - 2][d] + demo[T - 3][d]) / (dt_s * dt_s);
      } else {
        yd = (demo[t + 1][d] - demo[t - 1][d]) / (2 * dt_s);
        ydd = (demo[t + 1][d] - 2 * demo[t][d] + demo[t - 1][d]) / (dt_s * dt_s);
      }
      const double spring =
          p.alpha_z * (p.beta_z * (p.goal[d] - demo[t][d]) - p.tau_s * yd);
      f_target[d][t] = (p.tau_s * p.tau_s * ydd - spring) / amplitude[d];
    }
  }

  // Locally weighted regression, one basis at a time.
  for (int i = 0; i < basis_count; ++i) {
    for (std::size_t d = 0; d < dims; ++d) {
      if (std::abs(amplitude[d]) <= kAmpEps) continue;
      double num = 0.0, den = 1e-12;
      for (std::size_t t = 0; t < T; ++t) {
        const double dc = xs[t] - p.centers[i];
        const double w = std::exp(-p.widths[i] * dc * dc);
        num += w * xs[t] * f_target[d][t];
        den += w * xs[t] * xs[t];
      }
      p.weights[d][i] = num / den;
    }
  }
  return p;
}

Trajectory dmp_rollout_for(const DmpParams& p, const std::vector<double>& new_start,
                           const std::vector<double>& new_goal, int steps,
                           double duration_s) {
  if (steps < 2) throw std::invalid_argument("rollout needs >= 2 steps");
  const std::size_t dims = new_start.size();
  if (new_goal.size() != dims || p.start.size() != dims)
    throw std::invalid_argument("dimension mismatch in rollout");

  const double dt = duration_s / steps;
  const double dt_over_tau = dt / p.tau_s;

  std::vector<double> y = new_start;
  std::vector<double> v(dims, 0.0);

  Trajectory out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(y);

  // Exact canonical phase; explicit trapezoidal (Heun) steps on the
  // transformation system. The forcing term cancels the spring exactly at
  // the start, and plain forward Euler leaves a first-order residue of that
  // transient large enough to miss the integration-convergence bounds.
  std::vector<double> psi0, psi1;
  std::vector<double> yp(dims), vp(dims);
  for (int k = 0; k < steps; ++k) {
    const double x0 = std::exp(-p.alpha_x * static_cast<double>(k) * dt_over_tau);
    const double x1 = std::exp(-p.alpha_x * static_cast<double>(k + 1) * dt_over_tau);
    basis_activations(p, x0, &psi0);
    basis_activations(p, x1, &psi1);
    std::vector<double> y_next(dims), v_next(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      const double scale = new_goal[d] - new_start[d];
      const double f0 = forcing(p, static_cast<int>(d), x0, psi0) * scale;
      const double f1 = forcing(p, static_cast<int>(d), x1, psi1) * scale;
      const double a0 = p.alpha_z * (p.beta_z * (new_goal[d] - y[d]) - v[d]) + f0;
      yp[d] = y[d] + v[d] * dt_over_tau;
      vp[d] = v[d] + a0 * dt_over_tau;
      const double a1 = p.alpha_z * (p.beta_z * (new_goal[d] - yp[d]) - vp[d]) + f1;
      y_next[d] = y[d] + 0.5 * dt_over_tau * (v[d] + vp[d]);
      v_next[d] = v[d] + 0.5 * dt_over_tau * (a0 + a1);
    }
    y = std::move(y_next);
    v = std::move(v_next);
    out.push_back(y);
  }
  return out;
}

Trajectory dmp_rollout(const DmpParams& p, const std::vector<double>& new_start,
                       const std::vector<double>& new_goal, int steps) {
  return dmp_rollout_for(p, new_start, new_goal, steps, p.tau_s);
}

Trajectory min_jerk_demo(const std::vector<double>& start,
                         const std::vector<double>& goal, int samples) {
  Trajectory demo(samples);
  for (int t = 0; t < samples; ++t) {
    const double s = static_cast<double>(t) / (samples - 1);
    const double blend = 10 * s * s * s - 15 * s * s * s * s + 6 * s * s * s * s * s;
    demo[t].resize(start.size());
    for (std::size_t d = 0; d < start.size(); ++d)
      demo[t][d] = start[d] + (goal[d] - start[d]) * blend;
  }
  return demo;
}

DmpParams default_reach_dmp(const DmpConfig& cfg) {
  const Trajectory demo = min_jerk_demo({0, 0, 0}, {1, 1, 1}, 101);
  return dmp_fit(demo, 0.01, cfg.basis_count, cfg.alpha_z, cfg.alpha_x);
}

}  // namespace hado
