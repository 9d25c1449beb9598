#include <doctest.h>

#include <cmath>

#include "g2flow/torsion.hpp"

using namespace g2flow;

namespace {

const PForm& reference_star_phi() {
  static const PForm s = PForm::from_terms(4, {{1, {4, 5, 6, 7}}, {1, {2, 3, 6, 7}}, {1, {2, 3, 4, 5}},
                                               {1, {1, 3, 5, 7}}, {-1, {1, 3, 4, 6}}, {-1, {1, 2, 5, 6}},
                                               {-1, {1, 2, 4, 7}}});
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

TEST_CASE("torsion of the flat structure vanishes") {
  const LatticeSpec spec = LatticeSpec::make({0, 1}, 8);
  const TorsionComponents t = torsion_components(FormField::constant(spec, standard_phi()));
  CHECK(t.tau0.max_abs() == 0.0);
  CHECK(t.tau1.max_abs() == 0.0);
  CHECK(t.tau2.max_abs() == 0.0);
  CHECK(t.tau3.max_abs() == 0.0);
}

TEST_CASE("closed structures carry only the 2-form torsion") {
  const LatticeSpec spec = LatticeSpec::make({0, 1}, 16);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const FormField s = FormField::constant(spec, standard_phi()) + random_exact_3form(spec, 1e-2, 1, seed);
    const TorsionComponents t = torsion_components(s);
    const auto pts = g2_points(s);
    const double t2 = l2_norm(pts, t.tau2);
    CHECK(t2 > 0.0);
    CHECK(l2_norm(pts, t.tau0) <= 1e-8 * t2);
    CHECK(l2_norm(pts, t.tau1) <= 1e-8 * t2);
    CHECK(l2_norm(pts, t.tau3) <= 1e-8 * t2);
    CHECK(t.tau2_membership <= 1e-9);
    CHECK(t.residual_dsigma <= 1e-8);
    CHECK(t.residual_dstar <= 1e-8);
  }
}

TEST_CASE("general structures reconstruct d sigma and d*sigma") {
  // the d*sigma identity is differential; N = 32 keeps aliasing of the nonlinear star below 1e-8
  const LatticeSpec spec = LatticeSpec::make({0, 3}, 32);
  const FormField s = FormField::constant(spec, standard_phi()) + 0.05 * random_smooth_form(spec, 3, 1, 8);
  const TorsionComponents t = torsion_components(s);
  const auto pts = g2_points(s);
  CHECK(l2_norm(pts, t.tau0) > 0.0);
  CHECK(l2_norm(pts, t.tau1) > 0.0);
  CHECK(l2_norm(pts, t.tau3) > 0.0);
  CHECK(t.residual_dsigma <= 1e-8);
  CHECK(t.residual_dstar <= 1e-8);
  CHECK(t.tau3_membership <= 1e-9);
}

TEST_CASE("first-order operators: examples") {
  const LatticeSpec spec = LatticeSpec::make({0}, 16);
  const FormField phi = FormField::constant(spec, standard_phi());
  CHECK(apply_dop(DOp::d1_7, phi, FormField::constant(spec, PForm::scalar(2.5))).max_abs() == 0.0);

  // alpha = cos(x1) e^2, differentiated by hand: *d(cos(x1) e^2 ^ *phi) = -sin(x1) *(e^1 ^ e^2 ^ *phi)
  FormField alpha(spec, 1);
  FormField expect(spec, 1);
  const PForm top = euclidean_star(wedge(PForm::basis({0}), wedge(PForm::basis({1}), reference_star_phi())));
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    const double x = spec.position(i)(0);
    alpha.set(i, PForm::basis({1}, std::cos(x)));
    expect.set(i, -std::sin(x) * top);
  }
  CHECK((apply_dop(DOp::d7_7, phi, alpha) - expect).max_abs() <= 1e-13);

  FormField not14 = FormField::constant(spec, PForm::basis({1, 2}) + PForm::basis({3, 4}) + PForm::basis({5, 6}));
  CHECK_THROWS_AS(apply_dop(DOp::d14_27, phi, not14), SubspaceError);
  CHECK_THROWS_AS(apply_dop(DOp::d7_7, phi, FormField(spec, 2)), DegreeError);
}

TEST_CASE("first-order operators: adjoint pairs and targets") {
  const LatticeSpec spec = LatticeSpec::make({0, 1}, 12);
  for (int curved = 0; curved < 2; ++curved) {
    const FormField s = FormField::constant(spec, standard_phi()) + random_exact_3form(spec, curved ? 0.05 : 0.0, 1, 4);
    const auto pts = g2_points(s);
    const FormField a7 = random_smooth_form(spec, 1, 2, 10);
    const FormField b14 = random_section14(pts, spec, 2, 11);
    const FormField g27 = random_section27(pts, spec, 2, 12);
    const FormField f1 = random_smooth_form(spec, 0, 2, 13);
    struct Pair {
      DOp fwd, back;
      const FormField *in, *out;
    };
    for (const Pair& p : {Pair{DOp::d7_27, DOp::d27_7, &a7, &g27}, Pair{DOp::d7_14, DOp::d14_7, &a7, &b14},
                          Pair{DOp::d14_27, DOp::d27_14, &b14, &g27}, Pair{DOp::d1_7, DOp::d7_1, &f1, &a7}}) {
      INFO(dop_name(p.fwd) << " curved=" << curved);
      const FormField fa = apply_dop(p.fwd, pts, *p.in);
      const double lhs = l2_inner(pts, fa, *p.out);
      const double rhs = l2_inner(pts, *p.in, apply_dop(p.back, pts, *p.out));
      const double scale = l2_norm(pts, fa) * l2_norm(pts, *p.out);
      CHECK(std::abs(lhs - rhs) <= 1e-8 * scale);
    }
    const FormField o14 = apply_dop(DOp::d7_14, pts, a7);
    const FormField o27 = apply_dop(DOp::d7_27, pts, a7);
    for (std::size_t i = 0; i < spec.sites(); i += 7) {
      CHECK(pts[i].residual14(o14.at(i)) <= 1e-9);
      CHECK(pts[i].residual27(o27.at(i)) <= 1e-9);
    }
  }
}

TEST_CASE("operators that vanish at torsion-free structures") {
  const LatticeSpec spec = LatticeSpec::make({0, 1, 2}, 10);
  for (const IdentityReport& r : vanishing_operators(FormField::constant(spec, standard_phi()), 5)) {
    INFO(r.name);
    CHECK(r.scale > 0.0);
    CHECK(r.residual <= 1e-8);
  }
}

TEST_CASE("calibrated divergence constant is universal") {
  const CalibrationReport a = calibrate_A(1, 3);
  const CalibrationReport b = calibrate_A(2, 3);
  CHECK(std::isfinite(a.A));
  CHECK(a.A != 0.0);
  CHECK(a.samples == 3);
  CHECK(a.relative_spread <= 1e-6);
  CHECK(rel(a.A, b.A) <= 1e-6);
  CalibrationOptions fine;
  fine.n = 32;
  CHECK(rel(calibrate_A(1, 2, fine).A, a.A) <= 1e-8);
  CalibrationOptions other;
  other.axes = {2, 5};
  CHECK(rel(calibrate_A(3, 2, other).A, a.A) <= 1e-6);
  CHECK_THROWS_AS(calibrate_A(1, 0), std::invalid_argument);
}

TEST_CASE("closed-deformation identities") {
  const LatticeSpec spec = LatticeSpec::make({0, 1, 2}, 12);
  const FormField phi = FormField::constant(spec, standard_phi());
  for (const IdentityReport& r : closed_structure_identities(phi, FormField::constant(spec, 3.0 * standard_phi())))
    CHECK(r.residual == 0.0);
  for (const IdentityReport& r : closed_structure_identities(phi, random_exact_3form(spec, 1.0, 2, 31))) {
    INFO(r.name);
    CHECK(r.residual <= 1e-7);
  }
  for (const IdentityReport& r : one_form_identities(phi, random_smooth_form(spec, 1, 2, 32))) {
    INFO(r.name);
    CHECK(r.residual <= 1e-8);
  }
  const FormField twisted = phi + random_exact_3form(spec, 0.05, 1, 33);
  CHECK_THROWS_AS(closed_structure_identities(twisted, random_exact_3form(spec, 1.0, 2, 31)), std::invalid_argument);
  CHECK_THROWS_AS(closed_structure_identities(phi, random_smooth_form(spec, 3, 1, 34)), std::invalid_argument);
}
