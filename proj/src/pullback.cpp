#include <cmath>
#include <stdexcept>

#include "g2flow/flow.hpp"
#include "g2flow/parallel.hpp"

namespace g2flow {

namespace {

// I + du at every site, du from spectral derivatives of the displacement.
std::vector<Mat7> jacobian(const VectorField& u) {
  const LatticeSpec& spec = u.spec;
  const std::size_t n = spec.sites();
  std::vector<Mat7> jac(n, Mat7::Identity());
  std::vector<double> du(n * 7);
  for (int s = 0; s < spec.k(); ++s) {
    const int axis = spec.active_axes[static_cast<std::size_t>(s)];
    partial_block(spec, s, 7, u.data, du);
    for (std::size_t i = 0; i < n; ++i)
      for (int r = 0; r < 7; ++r) jac[i](r, axis) += du[i * 7 + static_cast<std::size_t>(r)];
  }
  return jac;
}

// (x -> x + u(x))^* f
FormField pull_state(const FormField& f, const VectorField& u, InterpolationScheme scheme) {
  const auto jac = jacobian(u);
  FormField out(f.spec(), f.degree());
  parallel_for(f.sites(), [&](std::size_t i) {
    const Vec7 x = f.spec().position(i) + u.at(i);
    out.set(i, pullback(jac[i], interpolate(f, x, scheme)));
  });
  return out;
}

// -V(x + u(x))
VectorField advect_velocity(const VectorField& v, const VectorField& u, InterpolationScheme scheme) {
  VectorField out(u.spec);
  parallel_for(u.spec.sites(), [&](std::size_t i) {
    const Vec7 x = u.spec.position(i) + u.at(i);
    std::array<double, 7> val{};
    interpolate_block(v.spec, 7, v.data, x, val, scheme);
    for (int r = 0; r < 7; ++r) out.data[i * 7 + static_cast<std::size_t>(r)] = -val[static_cast<std::size_t>(r)];
  });
  return out;
}

VectorField combine(const VectorField& base, double a, const VectorField& k) {
  VectorField out = base;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += a * k.data[i];
  return out;
}

template <class Rate>
VectorField rk4_vector(const VectorField& u, double t, double dt, Rate&& rate) {
  const VectorField k1 = rate(t, u);
  const VectorField k2 = rate(t + 0.5 * dt, combine(u, 0.5 * dt, k1));
  const VectorField k3 = rate(t + 0.5 * dt, combine(u, 0.5 * dt, k2));
  const VectorField k4 = rate(t + dt, combine(u, dt, k3));
  VectorField out = u;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] += dt / 6.0 * (k1.data[i] + 2.0 * k2.data[i] + 2.0 * k3.data[i] + k4.data[i]);
  return out;
}

double active_displacement(const VectorField& u) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.spec.sites(); ++i)
    for (int a : u.spec.active_axes) m = std::max(m, std::abs(u.at(i)(a)));
  return m;
}

void guard_displacement(const VectorField& u, double t) {
  const double m = active_displacement(u);
  for (int s = 0; s < u.spec.k(); ++s)
    if (m > 0.5 * u.spec.periods[static_cast<std::size_t>(s)])
      throw std::runtime_error("displacement " + std::to_string(m) + " exceeds half a period at t = " +
                               std::to_string(t));
}

}  // namespace

PullbackResult diffeo_pullback(const Trajectory& deturck, InterpolationScheme scheme) {
  const std::size_t m = deturck.states.size();
  if (m == 0 || deturck.fields.size() != m || deturck.times.size() != m)
    throw std::invalid_argument("diffeo_pullback needs a DeTurck trajectory with stored vector fields");
  const LatticeSpec& spec = deturck.states[0].spec();
  PullbackResult res;
  VectorField u(spec);
  res.trajectory.times = deturck.times;
  res.trajectory.states.push_back(deturck.states[0]);
  res.displacement.push_back(u);
  auto rate = [&](double t, const VectorField& x) {
    return advect_velocity(sample_in_time(deturck.times, deturck.fields, t), x, scheme);
  };
  for (std::size_t n = 0; n + 1 < m; ++n) {
    const double t = deturck.times[n], dt = deturck.times[n + 1] - t;
    u = rk4_vector(u, t, dt, rate);
    guard_displacement(u, deturck.times[n + 1]);
    res.max_displacement = std::max(res.max_displacement, active_displacement(u));
    res.trajectory.states.push_back(pull_state(deturck.states[n + 1], u, scheme));
    res.displacement.push_back(u);
  }
  return res;
}

PullbackResult uniqueness_gauge_flow(const Trajectory& plain, const Gauge& gauge, double A,
                                     InterpolationScheme scheme) {
  const std::size_t m = plain.states.size();
  if (m == 0 || plain.times.size() != m) throw std::invalid_argument("uniqueness_gauge_flow needs a trajectory");
  if (!gauge.deturck) throw std::invalid_argument("uniqueness_gauge_flow needs a DeTurck gauge");
  const LatticeSpec& spec = plain.states[0].spec();
  PullbackResult res;
  VectorField w(spec);
  res.trajectory.times = plain.times;
  res.trajectory.states.push_back(plain.states[0]);
  res.displacement.push_back(w);
  auto rate = [&](double t, const VectorField& x) {
    const FormField s = pull_state(sample_in_time(plain.times, plain.states, t), x, scheme);
    const VectorField v = deturck_vector(s, gauge.lambda, gauge.mu, A);
    const auto jac = jacobian(x);
    VectorField out(spec);
    for (std::size_t i = 0; i < spec.sites(); ++i) out.set(i, jac[i] * v.at(i));
    return out;
  };
  for (std::size_t n = 0; n + 1 < m; ++n) {
    const double t = plain.times[n], dt = plain.times[n + 1] - t;
    w = rk4_vector(w, t, dt, rate);
    guard_displacement(w, plain.times[n + 1]);
    res.max_displacement = std::max(res.max_displacement, active_displacement(w));
    res.trajectory.states.push_back(pull_state(plain.states[n + 1], w, scheme));
    res.displacement.push_back(w);
  }
  return res;
}

}  // namespace g2flow
