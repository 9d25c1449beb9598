#pragma once
// Finite-difference checks of first variations and plane-wave extraction
// of principal symbols at constant torsion-free backgrounds.

#include <cstdint>
#include <string>
#include <vector>

#include "g2flow/flow.hpp"

namespace g2flow {

struct VariationReport {
  std::string formula;
  double fd_value = 0.0;      // norm of the best finite difference
  double closed_form = 0.0;   // norm of the formula's value
  double rel_error = 0.0;     // at the best step
  double scale = 0.0;         // denominator used for rel_error
  std::vector<double> steps;
  std::vector<double> errors;  // absolute, one per step
  bool quadratic = false;      // halving the step cut the error by ~4
  double roundtrip = 0.0;      // compose(decompose(psi)) - psi
  double tolerance = 1e-6;
  double sixth_ratio = 0.0;  // hitchin only: fd over the V/6 normalization, 7/18
  bool pass() const { return rel_error <= tolerance && (quadratic || errors.front() <= 1e-12 * std::max(1.0, scale)); }
};

// Default steps halve twice from 1e-3 (scaled by 1/max|psi| for fields).
VariationReport check_metric_variation(const PForm& sigma, const PForm& psi);
VariationReport check_dual_variation(const PForm& sigma, const PForm& psi);
VariationReport check_hitchin_variation(const FormField& sigma, const FormField& dsigma);
VariationReport check_T_variation(const FormField& sigma, const FormField& psi);

// The Levi-Civita variation (1/2) g^{il}(h_{lj;k} + h_{lk;j} - h_{jk;l}) with
// h = 2 f0 g + (1/2) j(f3) built from psi; 343 values per site.
std::vector<double> T_variation_formula(const FormField& sigma, const FormField& psi);

enum class SymbolOp { laplacian, P, Q, PQ, gauge_flow };
enum class SymbolSubspace { closed, full };

const char* symbol_op_name(SymbolOp op);

struct SymbolProbe {
  Vec7 xi = Vec7::Unit(0);
  std::vector<int> wavenumbers{1, 2, 3, 4};
  SymbolSubspace subspace = SymbolSubspace::closed;
  int n = 32;
  double amplitude = 1e-4;
  // Orientation of the background: R^* phi with R e_1 = xi / |xi|.
  std::uint64_t frame_seed = 0;
};

struct SymbolResult {
  Eigen::MatrixXd matrix;       // columns: probe basis, rows: same basis
  std::vector<std::string> basis_labels;
  double fit_residual = 0.0;    // max deviation of the quadratic fit
  double k_variation = 0.0;     // max |y_k / k^2 - c2|
  double leakage = 0.0;         // response outside the basis span / sine part
  double xi_norm2 = 0.0;
  Eigen::VectorXcd eigenvalues;
};

SymbolResult symbol_matrix(SymbolOp op, const SymbolProbe& probe, double lambda = -5.0, double mu = -1.0,
                           double A = -0.5);

struct GridPoint {
  double lambda, mu;
  double max_real_eig;  // over all probes
  bool parabolic;
};

struct ParabolicityReport {
  int probes = 0;
  double max_deviation = 0.0;       // |S_{P+Q} + |xi|^2 I| / |xi|^2
  double p_alone_max_eig = 0.0;     // largest real part, normalized by |xi|^2
  bool p_alone_negative_definite = false;
  double gauge_deviation = 0.0;     // gauge-flow symbol vs -|xi|^2 I
  double homogeneity_exponent = 0.0;
  double max_fit_residual = 0.0;
  double max_k_variation = 0.0;
  std::vector<GridPoint> grid;
  bool target_in_region = false;
  bool pass(double tol = 1e-6) const {
    return max_deviation <= tol && !p_alone_negative_definite && gauge_deviation <= tol &&
           std::abs(homogeneity_exponent - 2.0) <= tol && target_in_region;
  }
};

ParabolicityReport parabolicity_certificate(std::uint64_t seed, int probes = 10, double lambda = -5.0,
                                            double mu = -1.0, double A = -0.5);

// Random direction with components uniform in [-1, 1] (never zero).
Vec7 random_xi(std::uint64_t seed);

}  // namespace g2flow
