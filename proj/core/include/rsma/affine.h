#pragma once

// Affine expressions over real decision variables. Complex quantities
// (precoder entries, equalizers) are a pair of real variables; products are
// only formed when one factor is constant, which keeps every constraint
// built from these types affine.

#include <span>
#include <utility>
#include <vector>

#include "rsma/types.h"

namespace rsma {

class BilinearError : public ContractError {
 public:
  BilinearError() : ContractError("product of two non-constant affine expressions") {}
};

struct Term {
  int var;
  double coef;
};

class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)
  static AffineExpr variable(int index, double coef = 1.0);

  double constant = 0.0;
  std::vector<Term> terms;

  bool is_constant() const { return terms.empty(); }
  double evaluate(std::span<const double> x) const;
  /// Merge duplicate indices, drop zeros, sort by index.
  void normalize();

  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double s);
};

AffineExpr operator+(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a, const AffineExpr& b);
AffineExpr operator-(AffineExpr a);
AffineExpr operator*(double s, AffineExpr a);

class ComplexAffine {
 public:
  ComplexAffine() = default;
  ComplexAffine(Complex c) : constant(c) {}  // NOLINT(google-explicit-constructor)
  ComplexAffine(const AffineExpr& real);     // NOLINT(google-explicit-constructor)
  /// re + i*im for two real variables.
  static ComplexAffine variable(int re, int im);

  Complex constant{0.0, 0.0};
  std::vector<std::pair<int, Complex>> terms;

  bool is_constant() const { return terms.empty(); }
  Complex evaluate(std::span<const double> x) const;
  ComplexAffine conj() const;
  void normalize();

  ComplexAffine& operator+=(const ComplexAffine& other);
  ComplexAffine& operator-=(const ComplexAffine& other);
  ComplexAffine& operator*=(Complex s);
};

ComplexAffine operator+(ComplexAffine a, const ComplexAffine& b);
ComplexAffine operator-(ComplexAffine a, const ComplexAffine& b);
ComplexAffine operator-(ComplexAffine a);
ComplexAffine operator*(Complex s, ComplexAffine a);

/// Throws BilinearError unless at least one factor is constant.
ComplexAffine multiply(const ComplexAffine& a, const ComplexAffine& b);

/// Dense matrix of complex affine entries.
class AffineMatrix {
 public:
  AffineMatrix() = default;
  AffineMatrix(int rows, int cols);
  static AffineMatrix constant(const CMatrix& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  ComplexAffine& operator()(int r, int c) { return entries_[index(r, c)]; }
  const ComplexAffine& operator()(int r, int c) const { return entries_[index(r, c)]; }

  AffineMatrix col(int c) const;
  CMatrix evaluate(std::span<const double> x) const;
  bool is_constant() const;

 private:
  std::size_t index(int r, int c) const { return static_cast<std::size_t>(c) * rows_ + r; }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<ComplexAffine> entries_;
};

}  // namespace rsma
