#include "rsma/affine.h"

#include <algorithm>
#include <map>

namespace rsma {

AffineExpr AffineExpr::variable(int index, double coef) {
  AffineExpr e;
  e.terms.push_back({index, coef});
  return e;
}

double AffineExpr::evaluate(std::span<const double> x) const {
  double v = constant;
  for (const auto& t : terms) {
    require(t.var >= 0 && static_cast<std::size_t>(t.var) < x.size(),
            "AffineExpr: assignment does not cover a referenced variable");
    v += t.coef * x[t.var];
  }
  return v;
}

void AffineExpr::normalize() {
  std::map<int, double> merged;
  for (const auto& t : terms) merged[t.var] += t.coef;
  terms.clear();
  for (const auto& [var, coef] : merged) {
    if (coef != 0.0) terms.push_back({var, coef});
  }
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  constant += other.constant;
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  normalize();
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) { return *this += -other; }

AffineExpr& AffineExpr::operator*=(double s) {
  constant *= s;
  for (auto& t : terms) t.coef *= s;
  if (s == 0.0) terms.clear();
  return *this;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
AffineExpr operator*(double s, AffineExpr a) { return a *= s; }

ComplexAffine::ComplexAffine(const AffineExpr& real) : constant(real.constant, 0.0) {
  for (const auto& t : real.terms) terms.emplace_back(t.var, Complex(t.coef, 0.0));
}

ComplexAffine ComplexAffine::variable(int re, int im) {
  ComplexAffine e;
  e.terms.emplace_back(re, Complex(1.0, 0.0));
  e.terms.emplace_back(im, Complex(0.0, 1.0));
  return e;
}

Complex ComplexAffine::evaluate(std::span<const double> x) const {
  Complex v = constant;
  for (const auto& [var, coef] : terms) {
    require(var >= 0 && static_cast<std::size_t>(var) < x.size(),
            "ComplexAffine: assignment does not cover a referenced variable");
    v += coef * x[var];
  }
  return v;
}

ComplexAffine ComplexAffine::conj() const {
  ComplexAffine out;
  out.constant = std::conj(constant);
  out.terms.reserve(terms.size());
  for (const auto& [var, coef] : terms) out.terms.emplace_back(var, std::conj(coef));
  return out;
}

void ComplexAffine::normalize() {
  std::map<int, Complex> merged;
  for (const auto& [var, coef] : terms) merged[var] += coef;
  terms.clear();
  for (const auto& [var, coef] : merged) {
    if (coef != Complex(0.0, 0.0)) terms.emplace_back(var, coef);
  }
}

ComplexAffine& ComplexAffine::operator+=(const ComplexAffine& other) {
  constant += other.constant;
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  normalize();
  return *this;
}

ComplexAffine& ComplexAffine::operator-=(const ComplexAffine& other) { return *this += -other; }

ComplexAffine& ComplexAffine::operator*=(Complex s) {
  constant *= s;
  for (auto& term : terms) term.second *= s;
  if (s == Complex(0.0, 0.0)) terms.clear();
  return *this;
}

ComplexAffine operator+(ComplexAffine a, const ComplexAffine& b) { return a += b; }
ComplexAffine operator-(ComplexAffine a, const ComplexAffine& b) { return a -= b; }
ComplexAffine operator-(ComplexAffine a) { return a *= Complex(-1.0, 0.0); }
ComplexAffine operator*(Complex s, ComplexAffine a) { return a *= s; }

ComplexAffine multiply(const ComplexAffine& a, const ComplexAffine& b) {
  if (a.is_constant()) return a.constant * b;
  if (b.is_constant()) return b.constant * a;
  throw BilinearError();
}

AffineMatrix::AffineMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows) * cols) {
  require(rows >= 0 && cols >= 0, "AffineMatrix: negative dimension");
}

AffineMatrix AffineMatrix::constant(const CMatrix& m) {
  AffineMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int c = 0; c < out.cols(); ++c) {
    for (int r = 0; r < out.rows(); ++r) out(r, c) = ComplexAffine(m(r, c));
  }
  return out;
}

AffineMatrix AffineMatrix::col(int c) const {
  require(c >= 0 && c < cols_, "AffineMatrix::col: index out of range");
  AffineMatrix out(rows_, 1);
  for (int r = 0; r < rows_; ++r) out(r, 0) = (*this)(r, c);
  return out;
}

CMatrix AffineMatrix::evaluate(std::span<const double> x) const {
  CMatrix out(rows_, cols_);
  for (int c = 0; c < cols_; ++c) {
    for (int r = 0; r < rows_; ++r) out(r, c) = (*this)(r, c).evaluate(x);
  }
  return out;
}

bool AffineMatrix::is_constant() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const ComplexAffine& e) { return e.is_constant(); });
}

}  // namespace rsma
