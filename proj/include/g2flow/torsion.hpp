#pragma once
// Torsion forms of a G2-structure field and the first-order operators
// d^p_q between the irreducible pieces Omega_1 (functions), Omega_7
// (1-forms), Omega_14 (2-forms in Lambda^2_14) and Omega_27 (3-forms in
// Lambda^3_27).

#include <cstdint>
#include <string>
#include <vector>

#include "g2flow/lattice.hpp"

namespace g2flow {

struct TorsionComponents {
  FormField tau0, tau1, tau2, tau3;
  // |d sigma - (tau0 *sigma + 3 tau1 ^ sigma + *tau3)| and
  // |d*sigma - (4 tau1 ^ *sigma + tau2 ^ sigma)|, each divided by
  // |d sigma| + |d*sigma| (L2, metric norms; raw values when that is 0).
  double residual_dsigma = 0.0;
  double residual_dstar = 0.0;
  // Largest pointwise Lambda^3_27 / Lambda^2_14 membership residual.
  double tau3_membership = 0.0;
  double tau2_membership = 0.0;
};

// Throws DefinitenessError on a non-definite site.
TorsionComponents torsion_components(const FormField& sigma);

// L2 norm int |a|_g^2 vol_g, square-rooted.
double l2_norm(const std::vector<G2Point>& pts, const FormField& a);

enum class DOp {
  d1_7, d7_1,
  d7_7,
  d7_14, d14_7,
  d7_27, d27_7,
  d14_27, d27_14,
  d27_27,
  // vanish at torsion-free structures
  d1_1, d1_14, d1_27, d14_14,
};

const char* dop_name(DOp op);
int dop_input_degree(DOp op);
int dop_output_degree(DOp op);

// Applies d^p_q for the structure sigma. The input must lie in the source
// subbundle (pointwise residual <= 1e-9 relative); throws SubspaceError
// otherwise.
FormField apply_dop(DOp op, const std::vector<G2Point>& pts, const FormField& in);
FormField apply_dop(DOp op, const FormField& sigma, const FormField& in);

// Random band-limited sections of Omega_14 and Omega_27 over the structure.
FormField random_section14(const std::vector<G2Point>& pts, const LatticeSpec& spec, int max_mode, std::uint64_t seed);
FormField random_section27(const std::vector<G2Point>& pts, const LatticeSpec& spec, int max_mode, std::uint64_t seed);

// Pointwise j-map and divergence helpers on fields (flat derivatives).
std::vector<Mat7> j_field(const std::vector<G2Point>& pts, const FormField& gamma27);
// div(h)_l = g^{jl} g^{ik} d_k h_ij
VectorField divergence(const std::vector<G2Point>& pts, const LatticeSpec& spec, const std::vector<Mat7>& h);
VectorField sharp_field(const std::vector<G2Point>& pts, const FormField& alpha);

struct CalibrationReport {
  double A = 0.0;
  int samples = 0;
  double relative_spread = 0.0;
  // worst per-sample residual |lhs - A rhs| / |lhs| over sites
  double site_residual = 0.0;
  std::vector<double> per_sample;
};

struct CalibrationOptions {
  std::vector<int> axes{0, 1};
  int n = 16;
  int max_mode = 2;
};

// Fits (d^27_7 gamma)_# = A div(j(gamma)) at the flat standard structure.
CalibrationReport calibrate_A(std::uint64_t seed, int samples, const CalibrationOptions& opts = {});

struct IdentityReport {
  std::string name;
  double residual = 0.0;  // relative
  double scale = 0.0;
};

// Leading-order identities for a closed variation psi at a torsion-free
// constant background (sigma constant on the lattice).
std::vector<IdentityReport> closed_structure_identities(const FormField& sigma, const FormField& psi);
// df1 = (1/3) *(d77 f1 ^ *sigma) + d7_14 f1 and
// d(f1 ^ sigma) = (2/3) d77 f1 ^ *sigma - * d7_14 f1.
std::vector<IdentityReport> one_form_identities(const FormField& sigma, const FormField& f1);
// Checks the four operators that vanish at torsion-free structures.
std::vector<IdentityReport> vanishing_operators(const FormField& sigma, std::uint64_t seed);

}  // namespace g2flow
