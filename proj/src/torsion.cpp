#include "g2flow/torsion.hpp"

#include <cmath>
#include <stdexcept>

#include "g2flow/parallel.hpp"

namespace g2flow {

namespace {

constexpr double kMemberTol = 1e-9;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

template <class Fn>
FormField map_sites(const FormField& in, int out_degree, Fn&& fn) {
  FormField out(in.spec(), out_degree);
  parallel_for(in.sites(), [&](std::size_t i) { out.set(i, fn(i, in.at(i))); });
  return out;
}

// Root of the summed squares of all first partials, a scale for identities.
double gradient_norm(const FormField& f) {
  double s = 0.0;
  for (int a = 0; a < f.spec().k(); ++a) {
    const FormField p = partial(f, a);
    s += l2_inner_flat(p, p);
  }
  return std::sqrt(s);
}

void require_member(DOp op, const std::vector<G2Point>& pts, const FormField& in) {
  const int p = dop_input_degree(op);
  if (in.degree() != p)
    throw DegreeError(std::string(dop_name(op)) + ": expected a " + std::to_string(p) + "-form field");
  if (p != 2 && p != 3) return;
  for (std::size_t i = 0; i < in.sites(); ++i) {
    const PForm a = in.at(i);
    const double r = p == 2 ? pts[i].residual14(a) : pts[i].residual27(a);
    if (r > kMemberTol * std::max(1.0, pts[i].norm(a)))
      throw SubspaceError(std::string(dop_name(op)) + ": input leaves the source subbundle at site " +
                              std::to_string(i) + " (residual " + std::to_string(r) + ")",
                          r);
  }
}

FormField field_star_sigma(const std::vector<G2Point>& pts, const LatticeSpec& spec) {
  FormField out(spec, 4);
  for (std::size_t i = 0; i < pts.size(); ++i) out.set(i, pts[i].star_sigma());
  return out;
}

FormField field_sigma(const std::vector<G2Point>& pts, const LatticeSpec& spec) {
  FormField out(spec, 3);
  for (std::size_t i = 0; i < pts.size(); ++i) out.set(i, pts[i].sigma());
  return out;
}

FormField scale_sites(const FormField& f, const FormField& form) {
  // f (0-form) times form, site by site
  FormField out(form.spec(), form.degree());
  for (std::size_t i = 0; i < form.sites(); ++i) out.set(i, f.site(i)[0] * form.at(i));
  return out;
}

}  // namespace

double l2_norm(const std::vector<G2Point>& pts, const FormField& a) {
  return std::sqrt(std::max(0.0, l2_inner(pts, a, a)));
}

TorsionComponents torsion_components(const FormField& sigma) {
  const auto pts = g2_points(sigma);
  const LatticeSpec& spec = sigma.spec();
  const FormField ds = exterior_derivative(sigma);
  const FormField dpsi = exterior_derivative(field_star_sigma(pts, spec));

  TorsionComponents t{FormField(spec, 0), FormField(spec, 1), FormField(spec, 2), FormField(spec, 3)};
  FormField r1(spec, 4), r2(spec, 5);
  std::vector<double> m27(sigma.sites()), m14(sigma.sites());
  parallel_for(sigma.sites(), [&](std::size_t i) {
    const G2Point& p = pts[i];
    const PForm& psi = p.star_sigma();
    const Split3 s4 = p.split4(ds.at(i));
    const double tau0 = p.inner(s4.one, psi) / p.inner(psi, psi);
    const PForm tau1 = (1.0 / 3.0) * p.extract4_7(s4.seven);
    const PForm tau3 = p.star(s4.twentyseven);
    const Split2 s5 = p.split5(dpsi.at(i));
    // beta ^ sigma = -*beta on Lambda^2_14
    const PForm tau2 = -p.star(s5.fourteen);
    t.tau0.site(i)[0] = tau0;
    t.tau1.set(i, tau1);
    t.tau2.set(i, tau2);
    t.tau3.set(i, tau3);
    r1.set(i, ds.at(i) - (tau0 * psi + 3.0 * wedge(tau1, p.sigma()) + p.star(tau3)));
    r2.set(i, dpsi.at(i) - (4.0 * wedge(tau1, psi) + wedge(tau2, p.sigma())));
    m27[i] = p.residual27(tau3);
    m14[i] = p.residual14(tau2);
  });
  const double scale = l2_norm(pts, ds) + l2_norm(pts, dpsi);
  const double denom = scale > 0.0 ? scale : 1.0;
  t.residual_dsigma = l2_norm(pts, r1) / denom;
  t.residual_dstar = l2_norm(pts, r2) / denom;
  for (std::size_t i = 0; i < sigma.sites(); ++i) {
    t.tau3_membership = std::max(t.tau3_membership, m27[i]);
    t.tau2_membership = std::max(t.tau2_membership, m14[i]);
  }
  return t;
}

// ---------------------------------------------------------------------------

const char* dop_name(DOp op) {
  switch (op) {
    case DOp::d1_7: return "d1_7";
    case DOp::d7_1: return "d7_1";
    case DOp::d7_7: return "d7_7";
    case DOp::d7_14: return "d7_14";
    case DOp::d14_7: return "d14_7";
    case DOp::d7_27: return "d7_27";
    case DOp::d27_7: return "d27_7";
    case DOp::d14_27: return "d14_27";
    case DOp::d27_14: return "d27_14";
    case DOp::d27_27: return "d27_27";
    case DOp::d1_1: return "d1_1";
    case DOp::d1_14: return "d1_14";
    case DOp::d1_27: return "d1_27";
    case DOp::d14_14: return "d14_14";
  }
  return "?";
}

namespace {

int rep_degree(int rep) {
  switch (rep) {
    case 1: return 0;
    case 7: return 1;
    case 14: return 2;
    default: return 3;
  }
}

std::pair<int, int> dop_reps(DOp op) {
  switch (op) {
    case DOp::d1_7: return {1, 7};
    case DOp::d7_1: return {7, 1};
    case DOp::d7_7: return {7, 7};
    case DOp::d7_14: return {7, 14};
    case DOp::d14_7: return {14, 7};
    case DOp::d7_27: return {7, 27};
    case DOp::d27_7: return {27, 7};
    case DOp::d14_27: return {14, 27};
    case DOp::d27_14: return {27, 14};
    case DOp::d27_27: return {27, 27};
    case DOp::d1_1: return {1, 1};
    case DOp::d1_14: return {1, 14};
    case DOp::d1_27: return {1, 27};
    case DOp::d14_14: return {14, 14};
  }
  return {1, 1};
}

}  // namespace

int dop_input_degree(DOp op) { return rep_degree(dop_reps(op).first); }
int dop_output_degree(DOp op) { return rep_degree(dop_reps(op).second); }

FormField apply_dop(DOp op, const std::vector<G2Point>& pts, const FormField& in) {
  require_member(op, pts, in);
  const LatticeSpec& spec = in.spec();
  auto proj14 = [&](const FormField& b) {
    return map_sites(b, 2, [&](std::size_t i, const PForm& x) { return pts[i].split2(x).fourteen; });
  };
  auto proj27 = [&](const FormField& g) {
    return map_sites(g, 3, [&](std::size_t i, const PForm& x) { return pts[i].split3(x).twentyseven; });
  };
  switch (op) {
    case DOp::d1_7:
      return exterior_derivative(in);
    case DOp::d7_1:
    case DOp::d14_7:
      return codifferential(pts, in);
    case DOp::d7_7:
      return hodge_star(pts, exterior_derivative(wedge(in, field_star_sigma(pts, spec))));
    case DOp::d7_14:
      return proj14(exterior_derivative(in));
    case DOp::d7_27: {
      const FormField l = map_sites(in, 2, [&](std::size_t i, const PForm& a) { return pts[i].embed2_7(a); });
      return proj27(exterior_derivative(l));
    }
    case DOp::d27_7: {
      const FormField dg = codifferential(pts, in);
      return map_sites(dg, 1, [&](std::size_t i, const PForm& b) { return pts[i].embed2_7_adjoint(b); });
    }
    case DOp::d14_27:
      return proj27(exterior_derivative(in));
    case DOp::d27_14:
      return proj14(codifferential(pts, in));
    case DOp::d27_27: {
      const FormField dg = exterior_derivative(in);
      return map_sites(dg, 3, [&](std::size_t i, const PForm& w) { return pts[i].star(pts[i].split4(w).twentyseven); });
    }
    case DOp::d1_1: {
      const FormField d = exterior_derivative(scale_sites(in, field_sigma(pts, spec)));
      return map_sites(d, 0, [&](std::size_t i, const PForm& w) {
        const PForm& psi = pts[i].star_sigma();
        return PForm::scalar(pts[i].inner(w, psi) / pts[i].inner(psi, psi));
      });
    }
    case DOp::d1_14:
      return proj14(hodge_star(pts, exterior_derivative(scale_sites(in, field_star_sigma(pts, spec)))));
    case DOp::d1_27: {
      const FormField d = exterior_derivative(scale_sites(in, field_sigma(pts, spec)));
      return map_sites(d, 3, [&](std::size_t i, const PForm& w) { return pts[i].star(pts[i].split4(w).twentyseven); });
    }
    case DOp::d14_14:
      return proj14(exterior_derivative(hodge_star(pts, wedge(in, field_star_sigma(pts, spec)))));
  }
  throw std::invalid_argument("unknown operator");
}

FormField apply_dop(DOp op, const FormField& sigma, const FormField& in) {
  return apply_dop(op, g2_points(sigma), in);
}

FormField random_section14(const std::vector<G2Point>& pts, const LatticeSpec& spec, int max_mode, std::uint64_t seed) {
  const FormField b = random_smooth_form(spec, 2, max_mode, seed);
  return map_sites(b, 2, [&](std::size_t i, const PForm& x) { return pts[i].split2(x).fourteen; });
}

FormField random_section27(const std::vector<G2Point>& pts, const LatticeSpec& spec, int max_mode, std::uint64_t seed) {
  const FormField g = random_smooth_form(spec, 3, max_mode, seed);
  return map_sites(g, 3, [&](std::size_t i, const PForm& x) { return pts[i].split3(x).twentyseven; });
}

std::vector<Mat7> j_field(const std::vector<G2Point>& pts, const FormField& gamma27) {
  std::vector<Mat7> h(gamma27.sites());
  parallel_for(gamma27.sites(), [&](std::size_t i) { h[i] = pts[i].j_map(gamma27.at(i)).h; });
  return h;
}

VectorField divergence(const std::vector<G2Point>& pts, const LatticeSpec& spec, const std::vector<Mat7>& h) {
  const std::size_t n = spec.sites();
  std::vector<double> flat(n * 49), dh(n * 49);
  for (std::size_t i = 0; i < n; ++i) Eigen::Map<Mat7>(flat.data() + 49 * i) = h[i];
  VectorField out(spec);
  for (int s = 0; s < spec.k(); ++s) {
    const int axis = spec.active_axes[static_cast<std::size_t>(s)];
    partial_block(spec, s, 49, flat, dh);
    for (std::size_t i = 0; i < n; ++i) {
      const Mat7 d = Eigen::Map<const Mat7>(dh.data() + 49 * i);
      const Mat7& gi = pts[i].metric().g_inv;
      // g^{jl} g^{ik} d_k h_ij, k = axis
      const Vec7 v = gi * (d.transpose() * gi.col(axis));
      out.set(i, out.at(i) + v);
    }
  }
  return out;
}

VectorField sharp_field(const std::vector<G2Point>& pts, const FormField& alpha) {
  VectorField out(alpha.spec());
  for (std::size_t i = 0; i < alpha.sites(); ++i) out.set(i, pts[i].sharp(alpha.at(i)));
  return out;
}

CalibrationReport calibrate_A(std::uint64_t seed, int samples, const CalibrationOptions& opts) {
  if (samples < 1) throw std::invalid_argument("calibrate_A needs at least one sample");
  const LatticeSpec spec = LatticeSpec::make(opts.axes, opts.n);
  const FormField sigma = FormField::constant(spec, standard_phi());
  const auto pts = g2_points(sigma);
  CalibrationReport rep;
  double num = 0.0, den = 0.0;
  std::vector<VectorField> lhs_all, rhs_all;
  for (int s = 0; s < samples; ++s) {
    const FormField gamma = random_section27(pts, spec, opts.max_mode, mix_seed(seed, static_cast<std::uint64_t>(s)));
    const VectorField lhs = sharp_field(pts, apply_dop(DOp::d27_7, pts, gamma));
    const VectorField rhs = divergence(pts, spec, j_field(pts, gamma));
    double sn = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < lhs.data.size(); ++i) {
      sn += lhs.data[i] * rhs.data[i];
      sd += rhs.data[i] * rhs.data[i];
    }
    if (sd == 0.0 || lhs.max_abs() == 0.0) continue;
    num += sn;
    den += sd;
    rep.per_sample.push_back(sn / sd);
    lhs_all.push_back(lhs);
    rhs_all.push_back(rhs);
  }
  rep.samples = static_cast<int>(rep.per_sample.size());
  if (rep.samples == 0) throw std::runtime_error("calibrate_A: every sample was degenerate");
  rep.A = num / den;
  for (double a : rep.per_sample) rep.relative_spread = std::max(rep.relative_spread, std::abs(a - rep.A) / std::abs(rep.A));
  for (std::size_t s = 0; s < lhs_all.size(); ++s) {
    double worst = 0.0;
    for (std::size_t i = 0; i < lhs_all[s].data.size(); ++i)
      worst = std::max(worst, std::abs(lhs_all[s].data[i] - rep.A * rhs_all[s].data[i]));
    rep.site_residual = std::max(rep.site_residual, worst / lhs_all[s].max_abs());
  }
  rep.relative_spread = std::max(rep.relative_spread, rep.site_residual);
  if (rep.A == 0.0) throw std::runtime_error("calibrate_A: fitted constant is zero");
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

void require_torsion_free(const std::vector<G2Point>& pts, const FormField& sigma) {
  const double ds = exterior_derivative(sigma).max_abs();
  const double dps = exterior_derivative(field_star_sigma(pts, sigma.spec())).max_abs();
  if (ds > 1e-10 || dps > 1e-10)
    throw std::invalid_argument("background is not torsion free (|d sigma| " + std::to_string(ds) + ", |d*sigma| " +
                                std::to_string(dps) + ")");
}

IdentityReport make_report(const std::string& name, const std::vector<G2Point>& pts, const FormField& residual,
                           double scale) {
  const double r = l2_norm(pts, residual);
  return {name, scale > 0.0 ? r / scale : r, scale};
}

}  // namespace

std::vector<IdentityReport> closed_structure_identities(const FormField& sigma, const FormField& psi) {
  const auto pts = g2_points(sigma);
  require_torsion_free(pts, sigma);
  if (psi.degree() != 3) throw DegreeError("closed_structure_identities expects a 3-form variation");
  const double closed = exterior_derivative(psi).max_abs();
  if (closed > 1e-8 * std::max(1.0, psi.max_abs()))
    throw std::invalid_argument("variation is not closed (|d psi| " + std::to_string(closed) + ")");
  const LatticeSpec& spec = psi.spec();
  FormField f0(spec, 0), f1(spec, 1), f3(spec, 3);
  for (std::size_t i = 0; i < psi.sites(); ++i) {
    const JoyceTriple t = pts[i].decompose(psi.at(i));
    f0.site(i)[0] = t.f0;
    f1.set(i, t.f1);
    f3.set(i, t.f3);
  }
  const double scale = gradient_norm(psi);
  std::vector<IdentityReport> out;
  out.push_back(make_report("closed_deform_1", pts, (4.0 / 7.0) * apply_dop(DOp::d7_1, pts, f1), scale));
  FormField r2 = apply_dop(DOp::d1_7, pts, f0);
  r2.axpy(1.0 / 6.0, apply_dop(DOp::d7_7, pts, f1));
  r2.axpy(1.0 / 12.0, apply_dop(DOp::d27_7, pts, f3));
  out.push_back(make_report("closed_deform_2", pts, r2, scale));
  FormField r3 = apply_dop(DOp::d7_27, pts, f1);
  r3 += apply_dop(DOp::d27_27, pts, f3);
  out.push_back(make_report("closed_deform_3", pts, r3, scale));
  return out;
}

std::vector<IdentityReport> one_form_identities(const FormField& sigma, const FormField& f1) {
  const auto pts = g2_points(sigma);
  require_torsion_free(pts, sigma);
  const LatticeSpec& spec = f1.spec();
  const FormField psi = field_star_sigma(pts, spec);
  const FormField d77 = apply_dop(DOp::d7_7, pts, f1);
  const FormField d714 = apply_dop(DOp::d7_14, pts, f1);
  const double scale = gradient_norm(f1);

  FormField r1 = exterior_derivative(f1);
  r1.axpy(-1.0 / 3.0, hodge_star(pts, wedge(d77, psi)));
  r1 -= d714;
  FormField r2 = exterior_derivative(wedge(f1, field_sigma(pts, spec)));
  r2.axpy(-2.0 / 3.0, wedge(d77, psi));
  r2 += hodge_star(pts, d714);
  return {make_report("d_f1_split", pts, r1, scale), make_report("d_f1_wedge_sigma", pts, r2, scale)};
}

std::vector<IdentityReport> vanishing_operators(const FormField& sigma, std::uint64_t seed) {
  const auto pts = g2_points(sigma);
  require_torsion_free(pts, sigma);
  const LatticeSpec& spec = sigma.spec();
  const FormField f = random_smooth_form(spec, 0, 2, mix_seed(seed, 101));
  const FormField b = random_section14(pts, spec, 2, mix_seed(seed, 102));
  const double sf = gradient_norm(f), sb = gradient_norm(b);
  return {make_report("d1_1", pts, apply_dop(DOp::d1_1, pts, f), sf),
          make_report("d1_14", pts, apply_dop(DOp::d1_14, pts, f), sf),
          make_report("d1_27", pts, apply_dop(DOp::d1_27, pts, f), sf),
          make_report("d14_14", pts, apply_dop(DOp::d14_14, pts, b), sb)};
}

}  // namespace g2flow
