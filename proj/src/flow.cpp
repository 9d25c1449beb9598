#include "g2flow/flow.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "g2flow/parallel.hpp"
#include "g2flow/torsion.hpp"

namespace g2flow {

ChristoffelField christoffel(const std::vector<G2Point>& pts, const LatticeSpec& spec) {
  const std::size_t n = spec.sites();
  std::vector<double> g(n * 49);
  for (std::size_t i = 0; i < n; ++i) Eigen::Map<Mat7>(g.data() + 49 * i) = pts[i].metric().g;
  // dg[a] holds d_a g for each active slot a.
  std::vector<std::vector<double>> dg(static_cast<std::size_t>(spec.k()), std::vector<double>(n * 49));
  for (int s = 0; s < spec.k(); ++s) partial_block(spec, s, 49, g, dg[static_cast<std::size_t>(s)]);

  ChristoffelField out{spec, std::vector<double>(n * 343, 0.0)};
  parallel_for(n, [&](std::size_t site) {
    std::array<Mat7, 7> d;
    for (auto& m : d) m.setZero();
    for (int s = 0; s < spec.k(); ++s)
      d[static_cast<std::size_t>(spec.active_axes[static_cast<std::size_t>(s)])] =
          Eigen::Map<const Mat7>(dg[static_cast<std::size_t>(s)].data() + 49 * site);
    // lowered symbols Gamma_{l j k} = (d_j g_lk + d_k g_lj - d_l g_jk) / 2
    std::array<double, 343> low{};
    for (int l = 0; l < 7; ++l)
      for (int j = 0; j < 7; ++j)
        for (int k = 0; k < 7; ++k)
          low[static_cast<std::size_t>(l * 49 + j * 7 + k)] =
              0.5 * (d[static_cast<std::size_t>(j)](l, k) + d[static_cast<std::size_t>(k)](l, j) -
                     d[static_cast<std::size_t>(l)](j, k));
    const Mat7& gi = pts[site].metric().g_inv;
    double* dst = out.data.data() + site * 343;
    for (int i = 0; i < 7; ++i)
      for (int jk = 0; jk < 49; ++jk) {
        double v = 0.0;
        for (int l = 0; l < 7; ++l) v += gi(i, l) * low[static_cast<std::size_t>(l * 49 + jk)];
        dst[i * 49 + jk] = v;
      }
  });
  return out;
}

ChristoffelField christoffel(const FormField& sigma) { return christoffel(g2_points(sigma), sigma.spec()); }

VectorField deturck_vector(const std::vector<G2Point>& pts, const LatticeSpec& spec, double lambda, double mu,
                           double A) {
  if (A == 0.0) throw std::invalid_argument("deturck_vector: A must be nonzero");
  VectorField v(spec);
  if (lambda == 0.0 && mu == 0.0) return v;
  const ChristoffelField gam = christoffel(pts, spec);
  parallel_for(spec.sites(), [&](std::size_t s) {
    const Mat7& gi = pts[s].metric().g_inv;
    Vec7 trace = Vec7::Zero();  // Gamma^p_{pl}
    Vec7 w = Vec7::Zero();      // g^{pq} Gamma^j_{pq}
    for (int l = 0; l < 7; ++l)
      for (int p = 0; p < 7; ++p) trace(l) += gam.at(s, p, p, l);
    for (int j = 0; j < 7; ++j)
      for (int p = 0; p < 7; ++p)
        for (int q = 0; q < 7; ++q) w(j) += gi(p, q) * gam.at(s, j, p, q);
    const Vec7 v1 = (gi * trace) / 7.0;
    const Vec7 v2 = 2.0 * A * (w + 5.0 * v1);
    v.set(s, lambda * v1 + mu * v2);
  });
  return v;
}

VectorField deturck_vector(const FormField& sigma, double lambda, double mu, double A) {
  return deturck_vector(g2_points(sigma), sigma.spec(), lambda, mu, A);
}

FormField flow_rhs_unchecked(const FormField& sigma, const Gauge& gauge, double A) {
  const auto pts = g2_points(sigma);
  const FormField psi = hodge_star(pts, sigma);
  FormField rhs = exterior_derivative(hodge_star(pts, exterior_derivative(psi)));
  rhs *= -1.0;
  if (gauge.deturck) {
    const VectorField v = deturck_vector(pts, sigma.spec(), gauge.lambda, gauge.mu, A);
    rhs += exterior_derivative(interior(v, sigma));
  }
  return rhs;
}

FormField flow_rhs(const FormField& sigma, const Gauge& gauge, double A) {
  if (sigma.degree() != 3) throw DegreeError("flow_rhs expects a 3-form field");
  const double ds = exterior_derivative(sigma).max_abs();
  if (ds > 1e-8 * std::max(1.0, sigma.max_abs()))
    throw std::invalid_argument("flow_rhs: sigma is not closed (|d sigma| = " + std::to_string(ds) + ")");
  return flow_rhs_unchecked(sigma, gauge, A);
}

double stable_dt(const FormField& sigma, double dt_safety) {
  const LatticeSpec& spec = sigma.spec();
  if (spec.k() == 0) return std::numeric_limits<double>::infinity();
  const MetricField m = metric_field(sigma);
  double h = spec.spacing(0);
  for (int s = 1; s < spec.k(); ++s) h = std::min(h, spec.spacing(s));
  double stiff = 0.0;
  for (const Metric& g : m.at) {
    double tr = 0.0;
    for (int a : spec.active_axes) tr += g.g_inv(a, a);
    stiff = std::max(stiff, tr);
  }
  return dt_safety * h * h / stiff;
}

FormField rk4_step(const FormField& sigma, double dt, const Gauge& gauge, double A) {
  const FormField k1 = flow_rhs_unchecked(sigma, gauge, A);
  FormField y = sigma;
  y.axpy(0.5 * dt, k1);
  const FormField k2 = flow_rhs_unchecked(y, gauge, A);
  y = sigma;
  y.axpy(0.5 * dt, k2);
  const FormField k3 = flow_rhs_unchecked(y, gauge, A);
  y = sigma;
  y.axpy(dt, k3);
  const FormField k4 = flow_rhs_unchecked(y, gauge, A);
  FormField out = sigma;
  out.axpy(dt / 6.0, k1);
  out.axpy(dt / 3.0, k2);
  out.axpy(dt / 3.0, k3);
  out.axpy(dt / 6.0, k4);
  for (double x : out.data())
    if (!std::isfinite(x)) throw DefinitenessError("non-finite value after RK4 step", 0.0, 0.0);
  return out;
}

double hitchin_volume(const FormField& sigma) {
  const auto pts = g2_points(sigma);
  return integrate(wedge(sigma, hodge_star(pts, sigma)));
}

FlowDiagnostics diagnose(const FormField& sigma, double t, double dt) {
  FlowDiagnostics d;
  d.t = t;
  d.dt_used = dt;
  const auto pts = g2_points(sigma);
  d.hitchin_V = integrate(wedge(sigma, hodge_star(pts, sigma)));
  d.dsigma_l2 = l2_norm(pts, exterior_derivative(sigma));
  const TorsionComponents tc = torsion_components(sigma);
  d.tau2_l2 = l2_norm(pts, tc.tau2);
  d.periods = sigma.mean();
  d.min_metric_eig = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) d.min_metric_eig = std::min(d.min_metric_eig, p.metric().min_eigenvalue());
  return d;
}

FlowResult run_flow(const FlowConfig& cfg, const std::function<void(const FlowDiagnostics&)>& on_diag) {
  const FormField& s0 = cfg.sigma0;
  if (s0.degree() != 3) throw DegreeError("initial data must be a 3-form field");
  if (!(cfg.t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
  if (!(cfg.dt_safety > 0.0)) throw std::invalid_argument("dt_safety must be positive");
  if (cfg.snapshot_every < 1) throw std::invalid_argument("snapshot_every must be >= 1");
  if (cfg.gauge.deturck && cfg.A == 0.0) throw std::invalid_argument("DeTurck gauge needs a nonzero A");
  if (cfg.fixed_steps && *cfg.fixed_steps < 1) throw std::invalid_argument("fixed_steps must be >= 1");
  metric_field(s0);  // definiteness of the initial data
  const double ds = exterior_derivative(s0).max_abs();
  if (ds > 1e-10 * std::max(1.0, s0.max_abs()))
    throw std::invalid_argument("initial data is not closed (|d sigma| = " + std::to_string(ds) + ")");

  FlowResult res;
  auto store = [&](const FormField& s, double t) {
    if (!cfg.keep_states) return;
    res.trajectory.times.push_back(t);
    res.trajectory.states.push_back(s);
    if (cfg.gauge.deturck)
      res.trajectory.fields.push_back(deturck_vector(s, cfg.gauge.lambda, cfg.gauge.mu, cfg.A));
  };
  auto emit = [&](const FormField& s, double t, double dt) {
    res.diagnostics.push_back(diagnose(s, t, dt));
    if (on_diag) on_diag(res.diagnostics.back());
  };

  FormField sigma = s0;
  double t = 0.0;
  store(sigma, t);
  emit(sigma, t, 0.0);
  double cap = std::numeric_limits<double>::infinity();
  const double fixed_dt = cfg.fixed_steps ? cfg.t_end / *cfg.fixed_steps : 0.0;
  const double t_tol = 1e-12 * std::max(1.0, cfg.t_end);
  while (t < cfg.t_end - t_tol) {
    double dt = cfg.fixed_steps ? fixed_dt : stable_dt(sigma, cfg.dt_safety);
    if (!cfg.fixed_steps) {
      // even out the remaining steps so the run ends on t_end
      const double remaining = cfg.t_end - t;
      dt = remaining / std::ceil(remaining / dt - 1e-9);
    }
    dt = std::min({dt, cap, cfg.t_end - t});
    FormField next;
    for (;;) {
      try {
        next = rk4_step(sigma, dt, cfg.gauge, cfg.A);
        metric_field(next);
        break;
      } catch (const DefinitenessError& e) {
        dt *= 0.5;
        cap = dt;
        if (dt < 1e-12) {
          res.breakdown = true;
          res.message = std::string("flow breakdown at t = ") + std::to_string(t) + ": " + e.what();
          emit(sigma, t, dt);
          return res;
        }
      }
    }
    sigma = std::move(next);
    t = (std::abs(t + dt - cfg.t_end) <= t_tol) ? cfg.t_end : t + dt;
    ++res.steps;
    store(sigma, t);
    if (res.steps % cfg.snapshot_every == 0 || t >= cfg.t_end - t_tol) emit(sigma, t, dt);
  }
  return res;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::pair<std::size_t, double>> lagrange_weights(const std::vector<double>& times, double t) {
  const std::size_t m = times.size();
  if (m == 0) throw std::invalid_argument("sample_in_time: empty trajectory");
  for (std::size_t i = 0; i < m; ++i)
    if (std::abs(times[i] - t) <= 1e-14 * std::max(1.0, std::abs(t))) return {{i, 1.0}};
  if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
    throw std::out_of_range("sample_in_time: time outside the trajectory");
  std::size_t hi = 1;
  while (hi < m - 1 && times[hi] < t) ++hi;
  const std::size_t width = std::min<std::size_t>(4, m);
  // window of `width` nodes around the interval [hi-1, hi]
  std::size_t lo = hi >= 2 ? hi - 2 : 0;
  if (lo + width > m) lo = m - width;
  std::vector<std::pair<std::size_t, double>> w;
  for (std::size_t a = lo; a < lo + width; ++a) {
    double c = 1.0;
    for (std::size_t b = lo; b < lo + width; ++b)
      if (b != a) c *= (t - times[b]) / (times[a] - times[b]);
    w.emplace_back(a, c);
  }
  return w;
}

}  // namespace

FormField sample_in_time(const std::vector<double>& times, const std::vector<FormField>& states, double t) {
  const auto w = lagrange_weights(times, t);
  FormField out(states[w[0].first].spec(), states[w[0].first].degree());
  for (const auto& [i, c] : w) out.axpy(c, states[i]);
  return out;
}

VectorField sample_in_time(const std::vector<double>& times, const std::vector<VectorField>& states, double t) {
  const auto w = lagrange_weights(times, t);
  VectorField out(states[w[0].first].spec);
  for (const auto& [i, c] : w)
    for (std::size_t k = 0; k < out.data.size(); ++k) out.data[k] += c * states[i].data[k];
  return out;
}

double plain_flow_residual(const Trajectory& traj) {
  const std::size_t m = traj.states.size();
  if (m < 5) throw std::invalid_argument("plain_flow_residual needs at least 5 samples");
  const double dt = traj.times[1] - traj.times[0];
  for (std::size_t i = 1; i < m; ++i)
    if (std::abs(traj.times[i] - traj.times[i - 1] - dt) > 1e-9 * dt)
      throw std::invalid_argument("plain_flow_residual needs uniform time steps");
  double worst = 0.0, scale = 0.0;
  for (std::size_t n = 2; n + 2 < m; ++n) {
    FormField deriv = traj.states[n - 2];
    deriv.axpy(-8.0, traj.states[n - 1]);
    deriv.axpy(8.0, traj.states[n + 1]);
    deriv.axpy(-1.0, traj.states[n + 2]);
    deriv *= 1.0 / (12.0 * dt);
    const FormField rhs = flow_rhs_unchecked(traj.states[n], Gauge::plain(), 1.0);
    worst = std::max(worst, (deriv - rhs).rms());
    scale = std::max(scale, rhs.rms());
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace g2flow
