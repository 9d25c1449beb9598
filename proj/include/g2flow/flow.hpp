#pragma once
// Laplacian flow of closed G2-structures on the lattice torus, plain or with
// the DeTurck term d(V(sigma) ⌟ sigma), integrated by classical RK4.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "g2flow/lattice.hpp"

namespace g2flow {

struct Gauge {
  bool deturck = true;
  double lambda = -5.0;
  double mu = -1.0;
  static Gauge plain() { return {false, 0.0, 0.0}; }
  static Gauge deturck_gauge(double lambda, double mu) { return {true, lambda, mu}; }
};

struct FlowConfig {
  FormField sigma0;
  double dt_safety = 0.1;
  double t_end = 0.1;
  // When set, every step uses t_end / fixed_steps instead of the h^2 rule.
  std::optional<int> fixed_steps;
  Gauge gauge;
  double A = -0.5;
  int snapshot_every = 1;
  // Keep every accepted state (needed by the pullback machinery).
  bool keep_states = true;
};

struct FlowDiagnostics {
  double t = 0.0;
  double hitchin_V = 0.0;
  double tau2_l2 = 0.0;
  double dsigma_l2 = 0.0;
  std::vector<double> periods;  // 35 zero modes
  double dt_used = 0.0;
  double min_metric_eig = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<FormField> states;
  // DeTurck vector field of each stored state (empty for plain runs).
  std::vector<VectorField> fields;
};

struct FlowResult {
  Trajectory trajectory;
  std::vector<FlowDiagnostics> diagnostics;
  bool breakdown = false;
  std::string message;
  int steps = 0;
};

// Christoffel symbols of the metric field, 343 per site at [i*49 + j*7 + k]
// for Gamma^i_{jk}, from spectral derivatives of g.
struct ChristoffelField {
  LatticeSpec spec;
  std::vector<double> data;
  double at(std::size_t site, int i, int j, int k) const { return data[site * 343 + static_cast<std::size_t>(i * 49 + j * 7 + k)]; }
};

ChristoffelField christoffel(const FormField& sigma);
ChristoffelField christoffel(const std::vector<G2Point>& pts, const LatticeSpec& spec);

// V = lambda V1 + mu V2 with V1 = (1/7) g^{il} Gamma^p_{pl} e_i and
// V2 = 2A (g^{pq} Gamma^j_{pq} e_j + 5 V1). Throws if A == 0.
VectorField deturck_vector(const FormField& sigma, double lambda, double mu, double A);
VectorField deturck_vector(const std::vector<G2Point>& pts, const LatticeSpec& spec, double lambda, double mu, double A);

// -d*d*sigma, plus d(V ⌟ sigma) in the DeTurck gauge.
// Throws std::invalid_argument if sigma is not closed (|d sigma| > 1e-8).
FormField flow_rhs(const FormField& sigma, const Gauge& gauge, double A);
// Same without the closedness guard; used where sigma is only closed up to
// discretization (pulled-back trajectories, symbol probes).
FormField flow_rhs_unchecked(const FormField& sigma, const Gauge& gauge, double A);

// Time step from the h^2 rule: dt_safety * h^2 / max_x tr(g^{-1} on active axes).
double stable_dt(const FormField& sigma, double dt_safety);

// One classical RK4 step; throws DefinitenessError if an intermediate
// stage loses definiteness.
FormField rk4_step(const FormField& sigma, double dt, const Gauge& gauge, double A);

double hitchin_volume(const FormField& sigma);
FlowDiagnostics diagnose(const FormField& sigma, double t, double dt);

FlowResult run_flow(const FlowConfig& cfg, const std::function<void(const FlowDiagnostics&)>& on_diag = {});

// Pullback of a DeTurck trajectory to a solution of the plain flow:
// d/dt phi_t(x) = -V(sigma_bar(t))|_{phi_t(x)}, sigma(t) = phi_t^* sigma_bar(t).
struct PullbackResult {
  Trajectory trajectory;            // pulled-back states, same times
  std::vector<VectorField> displacement;  // phi_t(x) - x per stored time
  double max_displacement = 0.0;
};
PullbackResult diffeo_pullback(const Trajectory& deturck, InterpolationScheme scheme = InterpolationScheme::fourier);

// Given a plain-flow trajectory sigma(t), integrates chi_t = phi_t^{-1} with
// d/dt chi = (D chi) V(chi^* sigma) and returns sigma_hat(t) = chi_t^* sigma(t),
// which solves the DeTurck flow.
PullbackResult uniqueness_gauge_flow(const Trajectory& plain, const Gauge& gauge, double A,
                                     InterpolationScheme scheme = InterpolationScheme::fourier);

// Relative residual max_t |d sigma/dt - (-d*d*sigma)| / max_t |-d*d*sigma|
// using fourth-order central differences in time (uniform steps required).
double plain_flow_residual(const Trajectory& traj);

// Value at time t of a uniformly sampled trajectory of fields by cubic
// Lagrange interpolation in time (4 nearest samples).
FormField sample_in_time(const std::vector<double>& times, const std::vector<FormField>& states, double t);
VectorField sample_in_time(const std::vector<double>& times, const std::vector<VectorField>& states, double t);

}  // namespace g2flow
