#include "g2flow/g2_algebra.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace g2flow {

namespace {

// e^I -> eps(I, I^c) e^{I^c} as (target row, sign) per source index.
struct ComplementMap {
  std::array<int, kMaxComponents> target{};
  std::array<double, kMaxComponents> sign{};
};

const ComplementMap& complement_map(int p) {
  static const std::array<ComplementMap, 8> table = [] {
    std::array<ComplementMap, 8> t;
    const Basis& b = Basis::get();
    for (int q = 0; q <= 7; ++q) {
      const auto& masks = b.masks[static_cast<std::size_t>(q)];
      for (std::size_t k = 0; k < masks.size(); ++k) {
        t[static_cast<std::size_t>(q)].target[k] = b.position[static_cast<std::uint8_t>(~masks[k] & 0x7f)];
        t[static_cast<std::size_t>(q)].sign[k] = complement_sign(q, static_cast<int>(k));
      }
    }
    return t;
  }();
  return table[static_cast<std::size_t>(p)];
}

// scale * S_p * c, with S_p the signed complement permutation.
Eigen::MatrixXd complement_rows(int p, const Eigen::MatrixXd& c, double scale) {
  const ComplementMap& cm = complement_map(p);
  Eigen::MatrixXd out(c.rows(), c.cols());
  for (Eigen::Index k = 0; k < c.rows(); ++k) out.row(cm.target[static_cast<std::size_t>(k)]) = (scale * cm.sign[static_cast<std::size_t>(k)]) * c.row(k);
  return out;
}

// Nonzero terms of B_ij = sum s_a s_b s_c * coeff for i <= j.
struct BilinearTerm {
  std::uint8_t i, j, a, b, c;
  double coeff;
};

const std::vector<BilinearTerm>& bilinear_terms() {
  static const std::vector<BilinearTerm> terms = [] {
    std::vector<BilinearTerm> out;
    std::array<PForm, 35> e;
    for (int k = 0; k < 35; ++k) {
      e[static_cast<std::size_t>(k)] = PForm(3);
      e[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 1.0;
    }
    for (int i = 0; i < 7; ++i)
      for (int j = i; j < 7; ++j)
        for (int a = 0; a < 35; ++a) {
          const PForm ia = interior(Vec7::Unit(i), e[static_cast<std::size_t>(a)]);
          if (ia.max_abs() == 0.0) continue;
          for (int b = 0; b < 35; ++b) {
            const PForm jb = interior(Vec7::Unit(j), e[static_cast<std::size_t>(b)]);
            if (jb.max_abs() == 0.0) continue;
            const PForm q = wedge(ia, jb);
            if (q.max_abs() == 0.0) continue;
            for (int c = 0; c < 35; ++c) {
              const double v = wedge(q, e[static_cast<std::size_t>(c)])[0];
              if (v != 0.0)
                out.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j), static_cast<std::uint8_t>(a),
                               static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(c), v});
            }
          }
        }
    return out;
  }();
  return terms;
}

PForm from_vector(int degree, const Eigen::VectorXd& v) {
  PForm f(degree);
  f.vec() = v;
  return f;
}

PForm unit_covector(int i) {
  PForm e(1);
  e[static_cast<std::size_t>(i)] = 1.0;
  return e;
}

double tol_scale(double n) { return kSubspaceTol * std::max(1.0, n); }

}  // namespace

PForm standard_phi() {
  return PForm::from_terms(3, {{1.0, {1, 2, 3}},
                               {1.0, {1, 4, 5}},
                               {1.0, {1, 6, 7}},
                               {1.0, {2, 4, 6}},
                               {-1.0, {2, 5, 7}},
                               {-1.0, {3, 4, 7}},
                               {-1.0, {3, 5, 6}}});
}

Metric Metric::from_matrix(const Mat7& g, int orientation) {
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff()))
    throw DefinitenessError("metric matrix is not symmetric", 0.0, 0.0);
  Eigen::SelfAdjointEigenSolver<Mat7> eig(g, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  if (!(lo > 0.0)) throw DefinitenessError("metric is not positive definite", lo, g.determinant());
  Metric m;
  m.g = g;
  m.g_inv = g.inverse();
  m.det_g = g.determinant();
  m.vol_coeff = std::sqrt(m.det_g);
  m.orientation = orientation >= 0 ? 1 : -1;
  return m;
}

double Metric::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat7> eig(g, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

Mat7 sigma_bilinear(const PForm& sigma) {
  if (sigma.degree() != 3) throw DegreeError("sigma must be a 3-form");
  Mat7 b = Mat7::Zero();
  for (const BilinearTerm& t : bilinear_terms()) b(t.i, t.j) += t.coeff * sigma[t.a] * sigma[t.b] * sigma[t.c];
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < i; ++j) b(i, j) = b(j, i);
  return b;
}

namespace {

// g = B / (6^{2/9} (det B)^{1/9}) with the real (signed) ninth root; at phi
// B = 6 I, which fixes the 6^{2/9}.
std::optional<Metric> metric_or_reason(const PForm& sigma, double* min_eig, double* det_out) {
  const Mat7 b = sigma_bilinear(sigma);
  const double det = b.determinant();
  if (det_out) *det_out = det;
  const double scale = std::max(1.0, std::pow(b.cwiseAbs().maxCoeff(), 7.0));
  if (!(std::abs(det) > 1e-13 * scale)) {
    if (min_eig) *min_eig = 0.0;
    return std::nullopt;
  }
  const double root = std::copysign(std::pow(std::abs(det), 1.0 / 9.0), det);
  const Mat7 g = b / (std::pow(6.0, 2.0 / 9.0) * root);
  Eigen::SelfAdjointEigenSolver<Mat7> eig(g, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  if (min_eig) *min_eig = lo;
  if (!(lo > 0.0)) return std::nullopt;
  return Metric::from_matrix(0.5 * (g + g.transpose()), det > 0 ? 1 : -1);
}

}  // namespace

Metric metric_from_sigma(const PForm& sigma) {
  double lo = 0.0, det = 0.0;
  auto m = metric_or_reason(sigma, &lo, &det);
  if (!m)
    throw DefinitenessError("3-form is not definite (min eigenvalue " + std::to_string(lo) + ", det B " +
                                std::to_string(det) + ")",
                            lo, det);
  return *m;
}

std::optional<Metric> try_metric_from_sigma(const PForm& sigma) { return metric_or_reason(sigma, nullptr, nullptr); }

bool is_definite(const PForm& sigma) { return try_metric_from_sigma(sigma).has_value(); }

Eigen::MatrixXd gram_matrix(const Metric& g, int p) { return compound(g.g_inv, p); }

double inner_product(const Metric& g, const PForm& a, const PForm& b) {
  if (a.degree() != b.degree()) throw DegreeError("inner product of forms of different degree");
  return a.vec().dot(gram_matrix(g, a.degree()) * b.vec());
}

Eigen::MatrixXd star_matrix(const Metric& g, int p) {
  return complement_rows(p, compound(g.g_inv, p), g.orientation * g.vol_coeff);
}

PForm hodge_star(const Metric& g, const PForm& a) {
  return from_vector(7 - a.degree(), star_matrix(g, a.degree()) * a.vec());
}

Eigen::MatrixXd wedge_matrix(const PForm& a, int q) {
  if (a.degree() + q > 7) throw DegreeError("wedge_matrix degree overflow");
  Eigen::MatrixXd m(binomial7(a.degree() + q), binomial7(q));
  for (int k = 0; k < binomial7(q); ++k) {
    PForm e(q);
    e[static_cast<std::size_t>(k)] = 1.0;
    m.col(k) = wedge(a, e).vec();
  }
  return m;
}

Mat7 skew_matrix(const PForm& beta) {
  if (beta.degree() != 2) throw DegreeError("skew_matrix expects a 2-form");
  const Basis& b = Basis::get();
  Mat7 m = Mat7::Zero();
  std::array<int, 7> idx{};
  for (std::size_t k = 0; k < 21; ++k) {
    Basis::indices(b.masks[2][k], idx);
    m(idx[0], idx[1]) = beta[k];
    m(idx[1], idx[0]) = -beta[k];
  }
  return m;
}

PForm two_form(const Mat7& skew) {
  const Basis& b = Basis::get();
  PForm beta(2);
  std::array<int, 7> idx{};
  for (std::size_t k = 0; k < 21; ++k) {
    Basis::indices(b.masks[2][k], idx);
    beta[k] = 0.5 * (skew(idx[0], idx[1]) - skew(idx[1], idx[0]));
  }
  return beta;
}

// ---------------------------------------------------------------------------

G2Point::G2Point(const PForm& sigma) : G2Point(sigma, metric_from_sigma(sigma)) {}

G2Point::G2Point(const PForm& sigma, const Metric& metric)
    : sigma_(sigma), metric_(metric), gram_(compound_all(metric.g_inv)) {
  star_sigma_ = star(sigma_);
}

const Eigen::MatrixXd& G2Point::star_mat(int p) const {
  auto& slot = star_[static_cast<std::size_t>(p)];
  if (!slot) slot = complement_rows(p, gram(p), metric_.orientation * metric_.vol_coeff);
  return *slot;
}

const Eigen::MatrixXd& G2Point::gram(int p) const { return gram_[static_cast<std::size_t>(p)]; }

PForm G2Point::star(const PForm& a) const { return from_vector(7 - a.degree(), star_mat(a.degree()) * a.vec()); }

double G2Point::inner(const PForm& a, const PForm& b) const {
  if (a.degree() != b.degree()) throw DegreeError("inner product of forms of different degree");
  return a.vec().dot(gram(a.degree()) * b.vec());
}

double G2Point::norm(const PForm& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

Vec7 G2Point::sharp(const PForm& alpha) const {
  Vec7 a;
  for (int i = 0; i < 7; ++i) a(i) = alpha[static_cast<std::size_t>(i)];
  return metric_.g_inv * a;
}

PForm G2Point::flat(const Vec7& v) const { return PForm::covector(metric_.g * v); }

const Eigen::MatrixXd& G2Point::projector2_7() const {
  if (!p2_7_) {
    // beta -> *(sigma ^ beta) has eigenvalue 2 on Lambda^2_7 and -1 on Lambda^2_14.
    const Eigen::MatrixXd m = star_mat(5) * wedge_matrix(sigma_, 2);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(21, 21);
    p2_7_ = (m + id) / 3.0;
    p2_14_ = (2.0 * id - m) / 3.0;
  }
  return *p2_7_;
}

const Eigen::MatrixXd& G2Point::projector2_14() const {
  projector2_7();
  return *p2_14_;
}

const Eigen::MatrixXd& G2Point::projector3_1() const {
  if (!p3_1_) {
    const Eigen::MatrixXd& w = gram(3);
    const Eigen::VectorXd s = sigma_.vec();
    p3_1_ = s * (w * s).transpose() / s.dot(w * s);
  }
  return *p3_1_;
}

const Eigen::MatrixXd& G2Point::projector3_7() const {
  if (!p3_7_) {
    const Embedding& e = embedding(0);
    p3_7_ = e.e * e.left;
  }
  return *p3_7_;
}

const Eigen::MatrixXd& G2Point::projector3_27() const {
  if (!p3_27_) p3_27_ = Eigen::MatrixXd::Identity(35, 35) - projector3_1() - projector3_7();
  return *p3_27_;
}

const G2Point::Embedding& G2Point::embedding(int which) const {
  auto& slot = embed_[static_cast<std::size_t>(which)];
  if (!slot) {
    int degree = 0;
    Eigen::MatrixXd e;
    for (int i = 0; i < 7; ++i) {
      const PForm a = unit_covector(i);
      PForm col;
      switch (which) {
        case 0: col = star(wedge(a, sigma_)); break;
        case 1: col = wedge(a, sigma_); break;
        case 2: col = wedge(a, star_sigma_); break;
        default: col = star(wedge(a, star_sigma_)); break;
      }
      if (i == 0) {
        degree = col.degree();
        e.resize(binomial7(degree), 7);
      }
      e.col(i) = col.vec();
    }
    const Eigen::MatrixXd& w = gram(degree);
    const Eigen::MatrixXd normal = e.transpose() * w * e;
    Embedding emb{e, normal.ldlt().solve(e.transpose() * w)};
    slot = std::move(emb);
  }
  return *slot;
}

Split2 G2Point::split2(const PForm& beta) const {
  if (beta.degree() != 2) throw DegreeError("split2 expects a 2-form");
  return {from_vector(2, projector2_7() * beta.vec()), from_vector(2, projector2_14() * beta.vec())};
}

Split3 G2Point::split3(const PForm& gamma) const {
  if (gamma.degree() != 3) throw DegreeError("split3 expects a 3-form");
  const Eigen::VectorXd v = gamma.vec();
  return {from_vector(3, projector3_1() * v), from_vector(3, projector3_7() * v),
          from_vector(3, projector3_27() * v)};
}

Split3 G2Point::split4(const PForm& omega) const {
  if (omega.degree() != 4) throw DegreeError("split4 expects a 4-form");
  const Split3 s = split3(star(omega));
  return {star(s.one), star(s.seven), star(s.twentyseven)};
}

Split2 G2Point::split5(const PForm& omega) const {
  if (omega.degree() != 5) throw DegreeError("split5 expects a 5-form");
  const Split2 s = split2(star(omega));
  return {star(s.seven), star(s.fourteen)};
}

PForm G2Point::embed3_7(const PForm& alpha) const { return from_vector(3, embedding(0).e * alpha.vec()); }
PForm G2Point::extract3_7(const PForm& gamma) const { return from_vector(1, embedding(0).left * gamma.vec()); }
PForm G2Point::embed4_7(const PForm& alpha) const { return from_vector(4, embedding(1).e * alpha.vec()); }
PForm G2Point::extract4_7(const PForm& omega) const { return from_vector(1, embedding(1).left * omega.vec()); }
PForm G2Point::embed5_7(const PForm& alpha) const { return from_vector(5, embedding(2).e * alpha.vec()); }
PForm G2Point::extract5_7(const PForm& omega) const { return from_vector(1, embedding(2).left * omega.vec()); }
PForm G2Point::embed2_7(const PForm& alpha) const { return from_vector(2, embedding(3).e * alpha.vec()); }

PForm G2Point::embed2_7_adjoint(const PForm& beta) const {
  // <L a, b>_g = <a, L^T b>_g with gram(1) = g^{-1}, so L^T = g E^T W2.
  const Eigen::VectorXd v = embedding(3).e.transpose() * (gram(2) * beta.vec());
  return from_vector(1, metric_.g * v);
}

double G2Point::residual27(const PForm& gamma) const {
  const Split3 s = split3(gamma);
  return norm(s.one + s.seven);
}

double G2Point::residual14(const PForm& beta) const { return norm(split2(beta).seven); }

Mat7 G2Point::j_raw(const PForm& gamma) const {
  if (gamma.degree() != 3) throw DegreeError("j_map expects a 3-form");
  std::array<PForm, 7> contr;
  for (int i = 0; i < 7; ++i) contr[static_cast<std::size_t>(i)] = interior(Vec7::Unit(i), sigma_);
  // *(c e^{1..7}) = c * orientation / vol_coeff
  const double to_scalar = metric_.orientation / metric_.vol_coeff;
  Mat7 h;
  for (int i = 0; i < 7; ++i)
    for (int j = i; j < 7; ++j) {
      const PForm q = wedge(contr[static_cast<std::size_t>(i)], contr[static_cast<std::size_t>(j)]);
      const double v = wedge(q, gamma)[0] * to_scalar;
      h(i, j) = v;
      h(j, i) = v;
    }
  return h;
}

Sym2 G2Point::j_map(const PForm& gamma) const {
  const double r = residual27(gamma);
  if (r > tol_scale(norm(gamma)))
    throw SubspaceError("j_map: input is not in Lambda^3_27 (residual " + std::to_string(r) + ")", r);
  return {j_raw(gamma), true};
}

const Eigen::MatrixXd& G2Point::j_basis() const {
  if (!j_basis_) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(projector3_27());
    const Eigen::MatrixXd q = qr.householderQ();
    j_basis_ = q.leftCols(27);
  }
  return *j_basis_;
}

const Eigen::MatrixXd& G2Point::j_matrix() const {
  if (!j_matrix_) {
    const Eigen::MatrixXd& b = j_basis();
    Eigen::MatrixXd j(49, 27);
    for (int c = 0; c < 27; ++c) {
      const Mat7 h = j_raw(from_vector(3, b.col(c)));
      j.col(c) = Eigen::Map<const Eigen::VectorXd>(h.data(), 49);
    }
    j_matrix_ = std::move(j);
  }
  return *j_matrix_;
}

PForm G2Point::j_inverse(const Sym2& h) const {
  const double asym = (h.h - h.h.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, h.h.cwiseAbs().maxCoeff());
  if (asym > 1e-12 * scale) throw SubspaceError("j_inverse: h is not symmetric", asym);
  const double tr = (metric_.g_inv * h.h).trace();
  if (std::abs(tr) > kSubspaceTol * scale) throw SubspaceError("j_inverse: h is not traceless", std::abs(tr));
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(h.h.data(), 49);
  const Eigen::VectorXd x = j_matrix().colPivHouseholderQr().solve(rhs);
  return from_vector(3, j_basis() * x);
}

JoyceTriple G2Point::decompose(const PForm& psi) const {
  if (psi.degree() != 3) throw DegreeError("decompose expects a 3-form");
  JoyceTriple t;
  t.f0 = inner(psi, sigma_) / (3.0 * inner(sigma_, sigma_));
  t.f1 = extract3_7(psi);
  t.f3 = psi - (3.0 * t.f0) * sigma_ - embed3_7(t.f1);
  return t;
}

PForm G2Point::compose(const JoyceTriple& t) const {
  if (t.f1.degree() != 1 || t.f3.degree() != 3) throw DegreeError("compose: triple has wrong degrees");
  const double r = residual27(t.f3);
  if (r > tol_scale(norm(t.f3)))
    throw SubspaceError("compose: f3 is not in Lambda^3_27 (residual " + std::to_string(r) + ")", r);
  return (3.0 * t.f0) * sigma_ + embed3_7(t.f1) + t.f3;
}

// ---------------------------------------------------------------------------

Split2 project_2forms(const PForm& sigma, const PForm& beta) { return G2Point(sigma).split2(beta); }
Split3 project_3forms(const PForm& sigma, const PForm& gamma) { return G2Point(sigma).split3(gamma); }
Sym2 j_map(const PForm& sigma, const PForm& gamma) { return G2Point(sigma).j_map(gamma); }
PForm j_inverse(const PForm& sigma, const Sym2& h) { return G2Point(sigma).j_inverse(h); }
JoyceTriple decompose_variation(const PForm& sigma, const PForm& psi) { return G2Point(sigma).decompose(psi); }
PForm compose_variation(const PForm& sigma, const JoyceTriple& t) { return G2Point(sigma).compose(t); }

Mat7 g2_exp(const PForm& sigma, const PForm& beta14) {
  const G2Point pt(sigma);
  const double r = pt.residual14(beta14);
  if (r > tol_scale(pt.norm(beta14)))
    throw SubspaceError("g2_exp: 2-form is not in Lambda^2_14 (residual " + std::to_string(r) + ")", r);
  const Mat7 k = pt.metric().g_inv * skew_matrix(beta14);
  return k.exp();
}

}  // namespace g2flow
