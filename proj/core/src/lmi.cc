#include "rsma/lmi.h"

#include <cmath>

namespace rsma {

namespace {

constexpr double kHermitianTol = 1e-12;

bool is_hermitian(const CMatrix& m) {
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= kHermitianTol * scale;
}

AffineExpr real_part(const ComplexAffine& e) {
  AffineExpr out(e.constant.real());
  for (const auto& [var, coef] : e.terms) {
    if (coef.real() != 0.0) out.terms.push_back({var, coef.real()});
  }
  return out;
}

AffineExpr imag_part(const ComplexAffine& e) {
  AffineExpr out(e.constant.imag());
  for (const auto& [var, coef] : e.terms) {
    if (coef.imag() != 0.0) out.terms.push_back({var, coef.imag()});
  }
  return out;
}

}  // namespace

LmiConstraint LmiConstraint::from_affine(const AffineMatrix& m, std::string label) {
  require(m.rows() == m.cols(), "LMI: matrix must be square");
  LmiConstraint out;
  out.dim = m.rows();
  out.label = std::move(label);
  out.constant = CMatrix::Zero(out.dim, out.dim);
  for (int c = 0; c < out.dim; ++c) {
    for (int r = 0; r < out.dim; ++r) {
      const ComplexAffine& e = m(r, c);
      out.constant(r, c) = e.constant;
      for (const auto& [var, coef] : e.terms) {
        auto it = out.terms.find(var);
        if (it == out.terms.end()) {
          it = out.terms.emplace(var, CMatrix::Zero(out.dim, out.dim)).first;
        }
        it->second(r, c) += coef;
      }
    }
  }
  if (!is_hermitian(out.constant)) throw ContractError("LMI: constant part is not Hermitian");
  for (const auto& [var, coef] : out.terms) {
    if (!is_hermitian(coef)) throw ContractError("LMI: coefficient matrix is not Hermitian");
  }
  return out;
}

CMatrix LmiConstraint::evaluate(std::span<const double> x) const {
  CMatrix out = constant;
  for (const auto& [var, coef] : terms) {
    require(var >= 0 && static_cast<std::size_t>(var) < x.size(),
            "LMI: assignment does not cover a referenced variable");
    out += x[var] * coef;
  }
  return out;
}

bool LmiConstraint::is_real() const {
  if (constant.imag().cwiseAbs().maxCoeff() != 0.0) return false;
  for (const auto& [var, coef] : terms) {
    if (coef.imag().cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

SProcedureBlock build_sprocedure_lmi(const CVector& h_hat, double delta,
                                     const AffineMatrix& columns, const ComplexAffine& g,
                                     int target, const AffineExpr& tau, const AffineExpr& lambda,
                                     std::string label) {
  const int nt = columns.rows();
  const int m = columns.cols();
  require(h_hat.size() == nt, "S-procedure LMI: estimate length differs from precoder rows");
  require(target >= 0 && target < m, "S-procedure LMI: target column out of range");
  require(delta >= 0, "S-procedure LMI: negative radius");

  AffineMatrix f(1 + m + nt, 1 + m + nt);
  for (int r = 0; r < f.rows(); ++r) {
    for (int c = 0; c < f.cols(); ++c) f(r, c) = ComplexAffine(Complex(0.0, 0.0));
  }
  f(0, 0) = ComplexAffine(tau - lambda);

  for (int j = 0; j < m; ++j) {
    ComplexAffine projection;  // (h_hat^H M)_j
    for (int n = 0; n < nt; ++n) projection += std::conj(h_hat(n)) * columns(n, j);
    ComplexAffine psi_h = multiply(g, projection);
    if (j == target) psi_h -= ComplexAffine(Complex(1.0, 0.0));
    f(0, 1 + j) = psi_h;
    f(1 + j, 0) = psi_h.conj();
    f(1 + j, 1 + j) = ComplexAffine(Complex(1.0, 0.0));
    for (int n = 0; n < nt; ++n) {
      const ComplexAffine lower = Complex(-delta, 0.0) * multiply(g, columns(n, j));
      f(1 + m + n, 1 + j) = lower;
      f(1 + j, 1 + m + n) = lower.conj();
    }
  }
  for (int n = 0; n < nt; ++n) f(1 + m + n, 1 + m + n) = ComplexAffine(lambda);

  return {LmiConstraint::from_affine(f, std::move(label)), lambda};
}

SProcedureBlock build_private_lmi(const CVector& h_hat, double delta, const AffineMatrix& pp,
                                  const ComplexAffine& g, int k, const AffineExpr& tau,
                                  const AffineExpr& lambda) {
  return build_sprocedure_lmi(h_hat, delta, pp, g, k, tau, lambda,
                              "private_" + std::to_string(k + 1));
}

SProcedureBlock build_common_lmi(const CVector& h_hat, double delta, const AffineMatrix& p_full,
                                 const ComplexAffine& g_c, const AffineExpr& tau_c,
                                 const AffineExpr& lambda_c) {
  return build_sprocedure_lmi(h_hat, delta, p_full, g_c, 0, tau_c, lambda_c, "common");
}

LmiConstraint build_scalar_square_epigraph(const ComplexAffine& g, const AffineExpr& s) {
  AffineMatrix f(2, 2);
  f(0, 0) = ComplexAffine(s);
  f(0, 1) = g.conj();
  f(1, 0) = g;
  f(1, 1) = ComplexAffine(Complex(1.0, 0.0));
  return LmiConstraint::from_affine(f, "square_epigraph");
}

SocConstraint build_power_constraint(const AffineMatrix& p, double budget) {
  if (budget < 0) throw DomainError("power constraint: negative budget");
  return build_power_constraint(p, AffineExpr(std::sqrt(budget)));
}

SocConstraint build_power_constraint(const AffineMatrix& p, const AffineExpr& bound) {
  SocConstraint soc;
  soc.label = "power";
  soc.entries.push_back(bound);
  for (int c = 0; c < p.cols(); ++c) {
    for (int r = 0; r < p.rows(); ++r) {
      soc.entries.push_back(real_part(p(r, c)));
      soc.entries.push_back(imag_part(p(r, c)));
    }
  }
  return soc;
}

namespace {

CMatrix realify_matrix(const CMatrix& h) {
  const int n = static_cast<int>(h.rows());
  CMatrix out = CMatrix::Zero(2 * n, 2 * n);
  const RMatrix a = h.real();
  const RMatrix b = h.imag();
  out.topLeftCorner(n, n) = a.cast<Complex>();
  out.topRightCorner(n, n) = (-b).cast<Complex>();
  out.bottomLeftCorner(n, n) = b.cast<Complex>();
  out.bottomRightCorner(n, n) = a.cast<Complex>();
  return out;
}

}  // namespace

LmiConstraint realify(const LmiConstraint& lmi) {
  LmiConstraint out;
  out.dim = 2 * lmi.dim;
  out.label = lmi.label;
  out.constant = realify_matrix(lmi.constant);
  for (const auto& [var, coef] : lmi.terms) out.terms.emplace(var, realify_matrix(coef));
  return out;
}

double min_hermitian_eigenvalue(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool LmiEvaluation::is_psd() const {
  const double norm = matrix.size() == 0 ? 0.0 : matrix.operatorNorm();
  return min_eigenvalue >= -1e-9 * (1.0 + norm);
}

LmiEvaluation evaluate_lmi(const LmiConstraint& lmi, std::span<const double> assignment) {
  LmiEvaluation out;
  out.matrix = lmi.evaluate(assignment);
  out.min_eigenvalue = min_hermitian_eigenvalue(out.matrix);
  return out;
}

}  // namespace rsma
