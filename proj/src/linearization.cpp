#include "g2flow/linearization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "g2flow/parallel.hpp"
#include "g2flow/torsion.hpp"

namespace g2flow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform(std::mt19937_64& rng) { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; }

std::vector<double> halving_steps(double s0) { return {s0, 0.5 * s0, 0.25 * s0}; }

void finish(VariationReport& r) {
  const std::size_t best = static_cast<std::size_t>(
      std::min_element(r.errors.begin(), r.errors.end()) - r.errors.begin());
  r.rel_error = r.errors[best] / r.scale;
  const double floor = 1e-12 * std::max(1.0, r.scale);
  for (std::size_t i = 0; i + 1 < r.errors.size(); ++i) {
    if (r.errors[i] <= floor) break;
    const double ratio = r.errors[i] / std::max(r.errors[i + 1], 1e-300);
    if (ratio > 3.0 && ratio < 5.5) {
      r.quadratic = true;
      break;
    }
  }
}

double frob(const Mat7& m) { return m.norm(); }

}  // namespace

VariationReport check_metric_variation(const PForm& sigma, const PForm& psi) {
  const G2Point p(sigma);
  const JoyceTriple t = p.decompose(psi);
  VariationReport r;
  r.formula = "metric: 2 f0 g + (1/2) j(f3)";
  r.roundtrip = (p.compose(t) - psi).max_abs();
  const Mat7 cf = 2.0 * t.f0 * p.metric().g + 0.5 * p.j_raw(t.f3);
  r.closed_form = frob(cf);
  r.scale = std::max(r.closed_form, frob(p.metric().g) * p.norm(psi) / p.norm(sigma));
  if (r.scale == 0.0) r.scale = 1.0;
  r.steps = halving_steps(1e-3 * sigma.max_abs() / std::max(psi.max_abs(), 1e-300));
  for (double s : r.steps) {
    const Mat7 fd = (metric_from_sigma(sigma + s * psi).g - metric_from_sigma(sigma - s * psi).g) / (2.0 * s);
    r.errors.push_back(frob(fd - cf));
    r.fd_value = frob(fd);
  }
  finish(r);
  return r;
}

VariationReport check_dual_variation(const PForm& sigma, const PForm& psi) {
  const G2Point p(sigma);
  const JoyceTriple t = p.decompose(psi);
  VariationReport r;
  r.formula = "dual: 4 f0 *sigma + f1 ^ sigma - *f3";
  r.roundtrip = (p.compose(t) - psi).max_abs();
  const PForm cf = (4.0 * t.f0) * p.star_sigma() + wedge(t.f1, sigma) - p.star(t.f3);
  r.closed_form = p.norm(cf);
  r.scale = std::max(r.closed_form, p.norm(psi) * p.norm(p.star_sigma()) / p.norm(sigma));
  if (r.scale == 0.0) r.scale = 1.0;
  r.steps = halving_steps(1e-3 * sigma.max_abs() / std::max(psi.max_abs(), 1e-300));
  auto dual = [](const PForm& s) { return hodge_star(metric_from_sigma(s), s); };
  for (double s : r.steps) {
    const PForm fd = (1.0 / (2.0 * s)) * (dual(sigma + s * psi) - dual(sigma - s * psi));
    r.errors.push_back(p.norm(fd - cf));
    r.fd_value = p.norm(fd);
  }
  finish(r);
  return r;
}

VariationReport check_hitchin_variation(const FormField& sigma, const FormField& dsigma) {
  const auto pts = g2_points(sigma);
  VariationReport r;
  r.formula = "hitchin: (7/3) int dsigma ^ *sigma";
  double rt = 0.0;
  for (std::size_t i = 0; i < sigma.sites(); ++i) {
    const PForm psi = dsigma.at(i);
    rt = std::max(rt, (pts[i].compose(pts[i].decompose(psi)) - psi).max_abs());
  }
  r.roundtrip = rt;
  const double integral = integrate(wedge(dsigma, hodge_star(pts, sigma)));
  const double cf = (7.0 / 3.0) * integral;
  r.closed_form = std::abs(cf);
  r.scale = std::max(r.closed_form, l2_norm(pts, dsigma) * l2_norm(pts, sigma));
  if (r.scale == 0.0) r.scale = 1.0;
  const double m = dsigma.max_abs();
  r.steps = halving_steps(m > 0.0 ? 1e-3 / m : 1e-3);
  double fd = 0.0;
  for (double s : r.steps) {
    FormField plus = sigma, minus = sigma;
    plus.axpy(s, dsigma);
    minus.axpy(-s, dsigma);
    fd = (hitchin_volume(plus) - hitchin_volume(minus)) / (2.0 * s);
    r.errors.push_back(std::abs(fd - cf));
    r.fd_value = std::abs(fd);
  }
  const double sixth = (7.0 / 18.0) * integral;
  r.sixth_ratio = sixth != 0.0 ? fd / sixth : 0.0;
  finish(r);
  return r;
}

std::vector<double> T_variation_formula(const FormField& sigma, const FormField& psi) {
  const auto pts = g2_points(sigma);
  const LatticeSpec& spec = sigma.spec();
  const std::size_t n = spec.sites();
  std::vector<double> h(n * 49);
  for (std::size_t i = 0; i < n; ++i) {
    const JoyceTriple t = pts[i].decompose(psi.at(i));
    const Mat7 hi = 2.0 * t.f0 * pts[i].metric().g + 0.5 * pts[i].j_raw(t.f3);
    Eigen::Map<Mat7>(h.data() + 49 * i) = hi;
  }
  std::vector<std::vector<double>> dh(static_cast<std::size_t>(spec.k()), std::vector<double>(n * 49));
  for (int s = 0; s < spec.k(); ++s) partial_block(spec, s, 49, h, dh[static_cast<std::size_t>(s)]);
  const ChristoffelField gam = christoffel(pts, spec);
  std::vector<double> out(n * 343, 0.0);
  parallel_for(n, [&](std::size_t site) {
    const Mat7 hs = Eigen::Map<const Mat7>(h.data() + 49 * site);
    std::array<Mat7, 7> d;
    for (auto& m : d) m.setZero();
    for (int s = 0; s < spec.k(); ++s)
      d[static_cast<std::size_t>(spec.active_axes[static_cast<std::size_t>(s)])] =
          Eigen::Map<const Mat7>(dh[static_cast<std::size_t>(s)].data() + 49 * site);
    // cov[c](a, b) = h_{ab;c}
    std::array<Mat7, 7> cov;
    for (int c = 0; c < 7; ++c)
      for (int a = 0; a < 7; ++a)
        for (int b = 0; b < 7; ++b) {
          double v = d[static_cast<std::size_t>(c)](a, b);
          for (int m = 0; m < 7; ++m) v -= gam.at(site, m, c, a) * hs(m, b) + gam.at(site, m, c, b) * hs(a, m);
          cov[static_cast<std::size_t>(c)](a, b) = v;
        }
    const Mat7& gi = pts[site].metric().g_inv;
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j)
        for (int k = 0; k < 7; ++k) {
          double v = 0.0;
          for (int l = 0; l < 7; ++l)
            v += gi(i, l) * (cov[static_cast<std::size_t>(k)](l, j) + cov[static_cast<std::size_t>(j)](l, k) -
                             cov[static_cast<std::size_t>(l)](j, k));
          out[site * 343 + static_cast<std::size_t>(i * 49 + j * 7 + k)] = 0.5 * v;
        }
  });
  return out;
}

VariationReport check_T_variation(const FormField& sigma, const FormField& psi) {
  VariationReport r;
  r.formula = "T: (1/2) g^{il}(h_{lj;k} + h_{lk;j} - h_{jk;l})";
  r.tolerance = 1e-5;
  const auto pts = g2_points(sigma);
  double rt = 0.0;
  for (std::size_t i = 0; i < sigma.sites(); ++i) {
    const PForm p = psi.at(i);
    rt = std::max(rt, (pts[i].compose(pts[i].decompose(p)) - p).max_abs());
  }
  r.roundtrip = rt;
  const std::vector<double> cf = T_variation_formula(sigma, psi);
  double cmax = 0.0;
  for (double x : cf) cmax = std::max(cmax, std::abs(x));
  r.closed_form = cmax;
  r.scale = cmax > 0.0 ? cmax : 1.0;
  const double m = psi.max_abs();
  r.steps = halving_steps(m > 0.0 ? 1e-3 / m : 1e-3);
  for (double s : r.steps) {
    FormField plus = sigma, minus = sigma;
    plus.axpy(s, psi);
    minus.axpy(-s, psi);
    const ChristoffelField gp = christoffel(plus), gm = christoffel(minus);
    double err = 0.0, fmax = 0.0;
    for (std::size_t q = 0; q < cf.size(); ++q) {
      const double fd = (gp.data[q] - gm.data[q]) / (2.0 * s);
      err = std::max(err, std::abs(fd - cf[q]));
      fmax = std::max(fmax, std::abs(fd));
    }
    r.errors.push_back(err);
    r.fd_value = fmax;
  }
  finish(r);
  return r;
}

// ---------------------------------------------------------------------------

const char* symbol_op_name(SymbolOp op) {
  switch (op) {
    case SymbolOp::laplacian: return "laplacian";
    case SymbolOp::P: return "P";
    case SymbolOp::Q: return "Q";
    case SymbolOp::PQ: return "P+Q";
    case SymbolOp::gauge_flow: return "gauge_flow";
  }
  return "?";
}

Vec7 random_xi(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vec7 xi;
  do {
    for (int i = 0; i < 7; ++i) xi(i) = uniform(rng);
  } while (xi.norm() < 1e-3);
  return xi;
}

namespace {

// Orthogonal R with first column xi/|xi| and det R = +1.
Mat7 frame_for(const Vec7& xi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Mat7 a;
  a.col(0) = xi.normalized();
  for (int c = 1; c < 7; ++c)
    for (int r = 0; r < 7; ++r) a(r, c) = uniform(rng);
  Eigen::HouseholderQR<Mat7> qr(a);
  Mat7 q = qr.householderQ();
  if (q.col(0).dot(a.col(0)) < 0.0) q.col(0) *= -1.0;
  if (q.determinant() < 0.0) q.col(6) *= -1.0;
  return q;
}

}  // namespace

SymbolResult symbol_matrix(SymbolOp op, const SymbolProbe& probe, double lambda, double mu, double A) {
  const double xn = probe.xi.norm();
  if (!(xn > 0.0)) throw std::invalid_argument("symbol probe needs a nonzero xi");
  if (probe.wavenumbers.size() < 3) throw std::invalid_argument("symbol probe needs at least 3 wavenumbers");
  const double period = kTwoPi / xn;
  const LatticeSpec spec = LatticeSpec::make({0}, probe.n, period);
  for (int k : probe.wavenumbers)
    if (k <= 0 || 2 * k >= probe.n) throw std::invalid_argument("wavenumbers must lie in 1..n/2-1");

  const Mat7 frame = frame_for(probe.xi, probe.frame_seed);
  const PForm bg = pullback(frame, standard_phi());
  const FormField bg_field = FormField::constant(spec, bg);
  const auto bg_pts = g2_points(bg_field);
  const Basis& basis = Basis::get();

  SymbolResult res;
  res.xi_norm2 = xn * xn;
  // input basis (as coefficient index) and response rows
  std::vector<int> cols;
  const bool vector_input = op == SymbolOp::gauge_flow;
  if (vector_input) {
    for (int i = 0; i < 7; ++i) {
      cols.push_back(i);
      res.basis_labels.push_back("e_" + std::to_string(i + 1));
    }
  } else if (probe.subspace == SymbolSubspace::full) {
    for (int k = 0; k < 35; ++k) cols.push_back(k);
  } else {
    for (int a = 1; a < 7; ++a)
      for (int b = a + 1; b < 7; ++b)
        cols.push_back(basis.position[static_cast<std::uint8_t>(1u | (1u << a) | (1u << b))]);
  }
  if (!vector_input)
    for (int k : cols) {
      std::array<int, 7> idx{};
      Basis::indices(basis.masks[3][static_cast<std::size_t>(k)], idx);
      res.basis_labels.push_back("e^" + std::to_string(idx[0] + 1) + std::to_string(idx[1] + 1) +
                                 std::to_string(idx[2] + 1));
    }
  const std::size_t out_width = vector_input ? 7 : 35;

  auto evaluate = [&](const FormField& pert_or_null, const VectorField* x) -> std::vector<double> {
    switch (op) {
      case SymbolOp::laplacian: {
        FormField lap = exterior_derivative(codifferential(bg_pts, pert_or_null));
        lap += codifferential(bg_pts, exterior_derivative(pert_or_null));
        return {lap.data().begin(), lap.data().end()};
      }
      case SymbolOp::P: {
        const FormField r = flow_rhs_unchecked(bg_field + pert_or_null, Gauge::plain(), A);
        return {r.data().begin(), r.data().end()};
      }
      case SymbolOp::Q: {
        const FormField s = bg_field + pert_or_null;
        const VectorField v = deturck_vector(s, lambda, mu, A);
        const FormField r = exterior_derivative(interior(v, s));
        return {r.data().begin(), r.data().end()};
      }
      case SymbolOp::PQ: {
        const FormField r = flow_rhs_unchecked(bg_field + pert_or_null, Gauge::deturck_gauge(lambda, mu), A);
        return {r.data().begin(), r.data().end()};
      }
      case SymbolOp::gauge_flow: {
        const FormField s = bg_field + exterior_derivative(interior(*x, bg_field));
        return deturck_vector(s, lambda, mu, A).data;
      }
    }
    return {};
  };

  const std::size_t nk = probe.wavenumbers.size();
  const std::size_t nc = cols.size();
  // y[k][col] = cosine coefficients of the linear response (out_width)
  std::vector<std::vector<Eigen::VectorXd>> y(nk, std::vector<Eigen::VectorXd>(nc));
  double sine = 0.0;
  const double s = probe.amplitude;
  for (std::size_t ki = 0; ki < nk; ++ki) {
    const int k = probe.wavenumbers[ki];
    std::vector<double> cosx(spec.sites()), sinx(spec.sites());
    for (std::size_t i = 0; i < spec.sites(); ++i) {
      const double th = kTwoPi * k * static_cast<double>(i) / spec.n;
      cosx[i] = std::cos(th);
      sinx[i] = std::sin(th);
    }
    for (std::size_t c = 0; c < nc; ++c) {
      std::vector<double> rp, rm;
      if (vector_input) {
        VectorField xp(spec), xm(spec);
        for (std::size_t i = 0; i < spec.sites(); ++i) {
          xp.data[i * 7 + static_cast<std::size_t>(cols[c])] = s * cosx[i];
          xm.data[i * 7 + static_cast<std::size_t>(cols[c])] = -s * cosx[i];
        }
        const FormField dummy;
        rp = evaluate(dummy, &xp);
        rm = evaluate(dummy, &xm);
      } else {
        FormField pp(spec, 3), pm(spec, 3);
        for (std::size_t i = 0; i < spec.sites(); ++i) {
          pp.site(i)[static_cast<std::size_t>(cols[c])] = s * cosx[i];
          pm.site(i)[static_cast<std::size_t>(cols[c])] = -s * cosx[i];
        }
        rp = evaluate(pp, nullptr);
        rm = evaluate(pm, nullptr);
      }
      Eigen::VectorXd cc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out_width));
      Eigen::VectorXd ss = cc;
      for (std::size_t i = 0; i < spec.sites(); ++i)
        for (std::size_t r = 0; r < out_width; ++r) {
          const double lin = (rp[i * out_width + r] - rm[i * out_width + r]) / (2.0 * s);
          cc(static_cast<Eigen::Index>(r)) += lin * cosx[i];
          ss(static_cast<Eigen::Index>(r)) += lin * sinx[i];
        }
      cc *= 2.0 / spec.n;
      ss *= 2.0 / spec.n;
      sine = std::max(sine, ss.cwiseAbs().maxCoeff() / (res.xi_norm2 * k * k));
      y[ki][c] = cc;
    }
  }

  // rows of the response that are kept
  std::vector<int> rows = cols;
  Eigen::MatrixXd vand(static_cast<Eigen::Index>(nk), 3);
  for (std::size_t ki = 0; ki < nk; ++ki) {
    const double k = probe.wavenumbers[ki];
    vand.row(static_cast<Eigen::Index>(ki)) << 1.0, k, k * k;
  }
  const auto solver = vand.colPivHouseholderQr();
  double kmax2 = 0.0;
  for (int k : probe.wavenumbers) kmax2 = std::max(kmax2, static_cast<double>(k) * k);
  res.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(nc));
  double outside = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t r = 0; r < out_width; ++r) {
      const bool kept = std::find(rows.begin(), rows.end(), static_cast<int>(r)) != rows.end();
      Eigen::VectorXd yy(static_cast<Eigen::Index>(nk));
      for (std::size_t ki = 0; ki < nk; ++ki) yy(static_cast<Eigen::Index>(ki)) = y[ki][c](static_cast<Eigen::Index>(r));
      if (!kept) {
        outside = std::max(outside, yy.cwiseAbs().maxCoeff() / (res.xi_norm2 * kmax2));
        continue;
      }
      const Eigen::Vector3d coef = solver.solve(yy);
      const Eigen::VectorXd fit = vand * coef;
      res.fit_residual = std::max(res.fit_residual, (fit - yy).cwiseAbs().maxCoeff() / (res.xi_norm2 * kmax2));
      for (std::size_t ki = 0; ki < nk; ++ki) {
        const double k = probe.wavenumbers[ki];
        res.k_variation =
            std::max(res.k_variation, std::abs(yy(static_cast<Eigen::Index>(ki)) / (k * k) - coef(2)) / res.xi_norm2);
      }
      const auto ri = std::find(rows.begin(), rows.end(), static_cast<int>(r)) - rows.begin();
      res.matrix(ri, static_cast<Eigen::Index>(c)) = coef(2);
    }
  }
  res.leakage = std::max(outside, sine);
  res.eigenvalues = Eigen::EigenSolver<Eigen::MatrixXd>(res.matrix).eigenvalues();
  return res;
}

ParabolicityReport parabolicity_certificate(std::uint64_t seed, int probes, double lambda, double mu, double A) {
  if (probes < 1) throw std::invalid_argument("parabolicity_certificate needs at least one probe");
  ParabolicityReport rep;
  rep.probes = probes;
  std::vector<double> lambdas, mus;
  for (int l = -10; l <= 2; ++l) lambdas.push_back(l);
  for (int m = -6; m <= 2; ++m) mus.push_back(0.5 * m);
  for (const double l : {lambda})
    if (std::find(lambdas.begin(), lambdas.end(), l) == lambdas.end()) lambdas.push_back(l);
  if (std::find(mus.begin(), mus.end(), mu) == mus.end()) mus.push_back(mu);
  std::vector<double> grid_max(lambdas.size() * mus.size(), -std::numeric_limits<double>::infinity());
  rep.p_alone_max_eig = -std::numeric_limits<double>::infinity();

  auto max_real = [](const Eigen::MatrixXd& m) {
    return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().real().maxCoeff();
  };
  for (int p = 0; p < probes; ++p) {
    SymbolProbe probe;
    probe.xi = random_xi(mix(seed, static_cast<std::uint64_t>(p)));
    probe.frame_seed = mix(seed, static_cast<std::uint64_t>(p) + 1000);
    const double x2 = probe.xi.squaredNorm();
    const SymbolResult pq = symbol_matrix(SymbolOp::PQ, probe, lambda, mu, A);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(pq.matrix.rows(), pq.matrix.cols());
    rep.max_deviation = std::max(rep.max_deviation, (pq.matrix + x2 * id).cwiseAbs().maxCoeff() / x2);
    const SymbolResult sp = symbol_matrix(SymbolOp::P, probe, lambda, mu, A);
    const SymbolResult q1 = symbol_matrix(SymbolOp::Q, probe, 1.0, 0.0, A);
    const SymbolResult q2 = symbol_matrix(SymbolOp::Q, probe, 0.0, 1.0, A);
    for (const SymbolResult* r : {&pq, &sp, &q1, &q2}) {
      rep.max_fit_residual = std::max(rep.max_fit_residual, r->fit_residual);
      rep.max_k_variation = std::max(rep.max_k_variation, r->k_variation);
    }
    rep.p_alone_max_eig = std::max(rep.p_alone_max_eig, max_real(sp.matrix) / x2);
    for (std::size_t a = 0; a < lambdas.size(); ++a)
      for (std::size_t b = 0; b < mus.size(); ++b) {
        const Eigen::MatrixXd m = sp.matrix + lambdas[a] * q1.matrix + mus[b] * q2.matrix;
        auto& slot = grid_max[a * mus.size() + b];
        slot = std::max(slot, max_real(m) / x2);
      }
  }
  rep.p_alone_negative_definite = rep.p_alone_max_eig < -1e-6;
  for (std::size_t a = 0; a < lambdas.size(); ++a)
    for (std::size_t b = 0; b < mus.size(); ++b) {
      const double v = grid_max[a * mus.size() + b];
      rep.grid.push_back({lambdas[a], mus[b], v, v < -1e-6});
      if (lambdas[a] == lambda && mus[b] == mu) rep.target_in_region = v < -1e-6;
    }

  SymbolProbe gauge;
  gauge.xi = Vec7::Unit(0);
  gauge.amplitude = 1e-5;
  const SymbolResult g = symbol_matrix(SymbolOp::gauge_flow, gauge, lambda, mu, A);
  rep.gauge_deviation = (g.matrix + Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff();
  rep.max_fit_residual = std::max(rep.max_fit_residual, g.fit_residual);

  SymbolProbe h1;
  h1.xi = random_xi(mix(seed, 5000));
  h1.frame_seed = mix(seed, 5001);
  SymbolProbe h2 = h1;
  h2.xi = 2.0 * h1.xi;
  const double n1 = symbol_matrix(SymbolOp::PQ, h1, lambda, mu, A).matrix.norm();
  const double n2 = symbol_matrix(SymbolOp::PQ, h2, lambda, mu, A).matrix.norm();
  rep.homogeneity_exponent = std::log2(n2 / n1);
  return rep;
}

}  // namespace g2flow
