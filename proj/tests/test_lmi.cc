#include <cmath>
#include <vector>

#include "doctest.h"
#include "rsma/lmi.h"
#include "rsma/wmse.h"
#include "support.h"

using namespace rsma;

namespace {

double residual(const CVector& h, const CMatrix& m, Complex g, int j) {
  Eigen::RowVectorXcd row = g * (h.adjoint() * m);
  row(j) -= 1.0;
  return row.squaredNorm();
}

// Largest min-eigenvalue over the multiplier (concave in lambda).
double best_margin(const LmiConstraint& lmi, double tau) {
  auto margin = [&](double lambda) {
    const std::vector<double> x{tau, lambda};
    return evaluate_lmi(lmi, x).min_eigenvalue;
  };
  const double lam = test::golden_section([&](double l) { return -margin(l); }, 0.0, 50.0);
  return margin(lam);
}

}  // namespace

TEST_SUITE("lmi") {

TEST_CASE("affine arithmetic") {
  AffineExpr a = AffineExpr::variable(0, 2.0) + AffineExpr::variable(1) + 3.0;
  a -= AffineExpr::variable(0);
  a.normalize();
  REQUIRE(a.terms.size() == 2);
  const std::vector<double> x{5.0, -1.0};
  CHECK(a.evaluate(x) == doctest::Approx(5.0 - 1.0 + 3.0));
  AffineExpr z = AffineExpr::variable(2) - AffineExpr::variable(2);
  z.normalize();
  CHECK(z.is_constant());

  const ComplexAffine c = ComplexAffine::variable(0, 1);
  const std::vector<double> y{1.5, -2.0};
  CHECK(c.evaluate(y) == Complex(1.5, -2.0));
  CHECK(c.conj().evaluate(y) == Complex(1.5, 2.0));
  CHECK(multiply(Complex(0, 1), c).evaluate(y) == Complex(2.0, 1.5));
  CHECK_THROWS_AS(multiply(c, c), BilinearError);
}

TEST_CASE("from_affine rejects non-Hermitian matrices") {
  AffineMatrix m(2, 2);
  m(0, 0) = AffineExpr::variable(0);
  m(0, 1) = ComplexAffine(Complex(1.0, 1.0));
  m(1, 0) = ComplexAffine(Complex(1.0, 1.0));
  m(1, 1) = ComplexAffine(Complex(1.0));
  CHECK_THROWS_AS(LmiConstraint::from_affine(m), ContractError);
  m(1, 0) = ComplexAffine(Complex(1.0, -1.0));
  CHECK_NOTHROW(LmiConstraint::from_affine(m));
  CHECK_THROWS_AS(LmiConstraint::from_affine(AffineMatrix(2, 3)), ContractError);
}

TEST_CASE("realification doubles the spectrum") {
  Rng rng(3);
  const CMatrix a = test::random_matrix(rng, 3, 3);
  LmiConstraint lmi;
  lmi.dim = 3;
  lmi.constant = a + a.adjoint();
  const LmiConstraint r = realify(lmi);
  CHECK(r.dim == 6);
  CHECK(r.is_real());
  Eigen::SelfAdjointEigenSolver<CMatrix> ec(lmi.constant);
  Eigen::SelfAdjointEigenSolver<CMatrix> er(r.constant);
  for (int i = 0; i < 3; ++i) {
    CHECK(er.eigenvalues()(2 * i) == doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-10));
    CHECK(er.eigenvalues()(2 * i + 1) == doctest::Approx(ec.eigenvalues()(i)).epsilon(1e-10));
  }
}

TEST_CASE("scalar square epigraph") {
  const LmiConstraint lmi =
      build_scalar_square_epigraph(ComplexAffine::variable(0, 1), AffineExpr::variable(2));
  CHECK(evaluate_lmi(lmi, std::vector<double>{0.6, 0.8, 1.0 + 1e-9}).is_psd());
  CHECK_FALSE(evaluate_lmi(lmi, std::vector<double>{0.6, 0.8, 0.99}).is_psd());
  CHECK_THROWS_AS(evaluate_lmi(lmi, std::vector<double>{0.6, 0.8}), ContractError);
}

TEST_CASE("power constraint") {
  CHECK_THROWS_AS(build_power_constraint(AffineMatrix::constant(CMatrix::Ones(2, 2)), -1.0),
                  DomainError);
  const SocConstraint soc = build_power_constraint(AffineMatrix::constant(CMatrix::Ones(2, 2)), 9.0);
  CHECK(soc.entries[0].constant == doctest::Approx(3.0));
}

TEST_CASE("reference instance: tau* = 0.3025") {
  CVector h(2);
  h << 1.0, 0.0;
  const SProcedureBlock b =
      build_private_lmi(h, 0.1, AffineMatrix::constant(CMatrix::Identity(2, 2)),
                        ComplexAffine(Complex(0.5)), 0, AffineExpr::variable(0),
                        AffineExpr::variable(1));
  CHECK(best_margin(b.lmi, 0.3025 + 1e-6) >= -1e-12);
  CHECK(best_margin(b.lmi, 0.3025 - 1e-4) < 0.0);
}

TEST_CASE("a feasible certificate bounds every sampled residual") {
  Rng rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 2;
    const CVector h = sample_channel(rng, n);
    const CMatrix m = test::random_matrix(rng, n, n + 1, 0.5);
    const Complex g(rng.uniform() - 0.5, rng.uniform() - 0.5);
    const double delta = 0.05 + 0.15 * rng.uniform();
    const SProcedureBlock b =
        build_common_lmi(h, delta, AffineMatrix::constant(m), ComplexAffine(g),
                         AffineExpr::variable(0), AffineExpr::variable(1));
    // Smallest certified tau by bisection.
    double lo = 0.0, hi = 10.0;
    REQUIRE(best_margin(b.lmi, hi) >= 0.0);
    for (int i = 0; i < 50; ++i) {
      const double mid = 0.5 * (lo + hi);
      (best_margin(b.lmi, mid) >= 0.0 ? hi : lo) = mid;
    }
    double sampled = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const CVector e = sample_error(rng, delta, i % 2 ? ErrorMode::Boundary : ErrorMode::Interior, n);
      sampled = std::max(sampled, residual(h + e, m, g, 0));
    }
    CHECK(hi >= sampled - 1e-9);
    CHECK(hi == doctest::Approx(worst_case_residual(h, delta, m, g, 0)).epsilon(1e-6));
  }
}

TEST_CASE("variable precoder and variable equalizer forms agree") {
  Rng rng(23);
  const CVector h = sample_channel(rng, 2);
  const CMatrix m = test::random_matrix(rng, 2, 2, 0.5);
  const Complex g(0.4, -0.2);
  // Precoder entries as variables 2.., equalizer constant.
  AffineMatrix pv(2, 2);
  std::vector<double> x{0.2, 0.7};
  int next = 2;
  for (int c = 0; c < 2; ++c) {
    for (int r = 0; r < 2; ++r) {
      pv(r, c) = ComplexAffine::variable(next, next + 1);
      x.push_back(m(r, c).real());
      x.push_back(m(r, c).imag());
      next += 2;
    }
  }
  const auto a = build_private_lmi(h, 0.1, pv, ComplexAffine(g), 1, AffineExpr::variable(0),
                                   AffineExpr::variable(1));
  const auto b = build_private_lmi(h, 0.1, AffineMatrix::constant(m), ComplexAffine::variable(2, 3),
                                   1, AffineExpr::variable(0), AffineExpr::variable(1));
  const std::vector<double> xb{0.2, 0.7, g.real(), g.imag()};
  const CMatrix fa = evaluate_lmi(a.lmi, x).matrix, fb = evaluate_lmi(b.lmi, xb).matrix;
  CHECK((fa - fb).norm() <= 1e-12);
  CHECK(a.multiplier.evaluate(x) == doctest::Approx(0.7));
  CHECK_THROWS_AS(build_private_lmi(h, 0.1, pv, ComplexAffine::variable(20, 21), 1,
                                    AffineExpr::variable(0), AffineExpr::variable(1)),
                  BilinearError);
}

}  // TEST_SUITE
