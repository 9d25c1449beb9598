#pragma once
// Pointwise G2 linear algebra: the metric of a definite 3-form, the Hodge
// star it induces, the irreducible splittings of forms, the j-map onto
// traceless symmetric bilinear forms and the Joyce decomposition of a
// variation 3f0*sigma + *(f1 ^ sigma) + f3.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

#include "g2flow/exterior.hpp"

namespace g2flow {

// The standard 3-form e^123 + e^145 + e^167 + e^246 - e^257 - e^347 - e^356.
PForm standard_phi();

class DefinitenessError : public std::runtime_error {
 public:
  DefinitenessError(const std::string& what, double min_eigenvalue, double det_b)
      : std::runtime_error(what), min_eigenvalue(min_eigenvalue), det_b(det_b) {}
  double min_eigenvalue;
  double det_b;
};

class SubspaceError : public std::invalid_argument {
 public:
  SubspaceError(const std::string& what, double residual) : std::invalid_argument(what), residual(residual) {}
  double residual;
};

struct Metric {
  Mat7 g = Mat7::Identity();
  Mat7 g_inv = Mat7::Identity();
  double det_g = 1.0;
  // sqrt(det g); the metric volume form is orientation * vol_coeff * e^{1..7}.
  double vol_coeff = 1.0;
  int orientation = 1;

  // Throws DefinitenessError unless g is symmetric positive definite.
  static Metric from_matrix(const Mat7& g, int orientation = 1);
  double min_eigenvalue() const;
};

struct Sym2 {
  Mat7 h = Mat7::Zero();
  bool traceless = false;
};

struct JoyceTriple {
  double f0 = 0.0;
  PForm f1 = PForm(1);
  PForm f3 = PForm(3);
};

struct Split2 {
  PForm seven;
  PForm fourteen;
};

struct Split3 {
  PForm one;
  PForm seven;
  PForm twentyseven;
};

// B_ij = coefficient of e^{1..7} in (e_i ⌟ s) ^ (e_j ⌟ s) ^ s.
Mat7 sigma_bilinear(const PForm& sigma);

Metric metric_from_sigma(const PForm& sigma);
std::optional<Metric> try_metric_from_sigma(const PForm& sigma);
bool is_definite(const PForm& sigma);

// Induced inner product on p-forms, <a, b> = a^T C_p(g^{-1}) b.
double inner_product(const Metric& g, const PForm& a, const PForm& b);
Eigen::MatrixXd gram_matrix(const Metric& g, int p);
PForm hodge_star(const Metric& g, const PForm& a);
// Matrix of the star on p-forms (C(7,7-p) x C(7,p)).
Eigen::MatrixXd star_matrix(const Metric& g, int p);

// Matrix of b -> a ^ b on q-forms.
Eigen::MatrixXd wedge_matrix(const PForm& a, int q);

// Everything derived from one definite 3-form. Matrices are built on first
// use and cached; an instance is meant to be owned by one thread.
class G2Point {
 public:
  explicit G2Point(const PForm& sigma);
  G2Point(const PForm& sigma, const Metric& metric);

  const PForm& sigma() const { return sigma_; }
  const PForm& star_sigma() const { return star_sigma_; }
  const Metric& metric() const { return metric_; }

  PForm star(const PForm& a) const;
  double inner(const PForm& a, const PForm& b) const;
  double norm(const PForm& a) const;
  const Eigen::MatrixXd& star_mat(int p) const;
  const Eigen::MatrixXd& gram(int p) const;

  // vector <-> covector
  Vec7 sharp(const PForm& alpha) const;
  PForm flat(const Vec7& v) const;

  // Irreducible splittings.
  Split2 split2(const PForm& beta) const;
  Split3 split3(const PForm& gamma) const;
  // Lambda^4 = 1 + 7 + 27 (images of the Lambda^3 pieces under the star).
  Split3 split4(const PForm& omega) const;
  // Lambda^5 = 7 + 14.
  Split2 split5(const PForm& omega) const;

  const Eigen::MatrixXd& projector2_7() const;
  const Eigen::MatrixXd& projector2_14() const;
  const Eigen::MatrixXd& projector3_1() const;
  const Eigen::MatrixXd& projector3_7() const;
  const Eigen::MatrixXd& projector3_27() const;

  // Lambda^1 -> Lambda^3_7, a -> *(a ^ sigma), and its left inverse.
  PForm embed3_7(const PForm& alpha) const;
  PForm extract3_7(const PForm& gamma) const;
  // Lambda^1 -> Lambda^4_7, a -> a ^ sigma, and left inverse on Lambda^4.
  PForm embed4_7(const PForm& alpha) const;
  PForm extract4_7(const PForm& omega) const;
  // Lambda^1 -> Lambda^5_7, a -> a ^ *sigma, and left inverse on Lambda^5.
  PForm embed5_7(const PForm& alpha) const;
  PForm extract5_7(const PForm& omega) const;
  // Lambda^1 -> Lambda^2_7, a -> *(a ^ *sigma).
  PForm embed2_7(const PForm& alpha) const;

  // Formal adjoint (pointwise, g-inner products) of a -> *(a ^ *sigma).
  PForm embed2_7_adjoint(const PForm& beta) const;

  // Distance of gamma from Lambda^3_27 measured as |gamma - pi_27 gamma|_g.
  double residual27(const PForm& gamma) const;
  double residual14(const PForm& beta) const;

  Sym2 j_map(const PForm& gamma) const;
  // Same without the Lambda^3_27 membership check.
  Mat7 j_raw(const PForm& gamma) const;
  PForm j_inverse(const Sym2& h) const;

  JoyceTriple decompose(const PForm& psi) const;
  PForm compose(const JoyceTriple& t) const;

 private:
  struct Embedding {
    Eigen::MatrixXd e;     // n x 7
    Eigen::MatrixXd left;  // 7 x n, (E^T W E)^{-1} E^T W
  };
  const Embedding& embedding(int which) const;
  const Eigen::MatrixXd& j_basis() const;     // 35 x 27, columns span Lambda^3_27
  const Eigen::MatrixXd& j_matrix() const;    // 49 x 27

  PForm sigma_;
  Metric metric_;
  PForm star_sigma_;
  mutable std::array<std::optional<Eigen::MatrixXd>, 8> star_;
  std::array<Eigen::MatrixXd, 8> gram_;
  mutable std::optional<Eigen::MatrixXd> p2_7_, p2_14_, p3_1_, p3_7_, p3_27_;
  mutable std::array<std::optional<Embedding>, 4> embed_;
  mutable std::optional<Eigen::MatrixXd> j_basis_, j_matrix_;
};

// Free-function forms of the G2Point operations.
Split2 project_2forms(const PForm& sigma, const PForm& beta);
Split3 project_3forms(const PForm& sigma, const PForm& gamma);
Sym2 j_map(const PForm& sigma, const PForm& gamma);
PForm j_inverse(const PForm& sigma, const Sym2& h);
JoyceTriple decompose_variation(const PForm& sigma, const PForm& psi);
PForm compose_variation(const PForm& sigma, const JoyceTriple& t);

// exp of the skew endomorphism g^{-1} beta for beta in Lambda^2_14; the
// result stabilizes sigma under pullback.
Mat7 g2_exp(const PForm& sigma, const PForm& beta14);

// 2-form <-> skew matrix beta_ij (i<j stored).
Mat7 skew_matrix(const PForm& beta);
PForm two_form(const Mat7& skew);

inline constexpr double kSubspaceTol = 1e-10;

}  // namespace g2flow
