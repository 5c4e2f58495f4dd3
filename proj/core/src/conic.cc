#include "rsma/conic.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace rsma {

int ConicProblem::add_variable(std::string name) {
  var_names.push_back(std::move(name));
  return n_vars() - 1;
}

ComplexAffine ConicProblem::add_complex_variable(const std::string& name) {
  const int re = add_variable(name + ".re");
  const int im = add_variable(name + ".im");
  return ComplexAffine::variable(re, im);
}

void ConicProblem::add_nonneg(AffineExpr expr, std::string label) {
  nonneg.push_back({std::move(expr), std::move(label)});
}

void ConicProblem::add_equality(AffineExpr expr, std::string label) {
  equalities.push_back({std::move(expr), std::move(label)});
}

void ConicProblem::add_lmi(LmiConstraint lmi) { lmis.push_back(std::move(lmi)); }

void ConicProblem::add_soc(SocConstraint soc) { socs.push_back(std::move(soc)); }

void ConicProblem::add(const SProcedureBlock& block) {
  add_lmi(block.lmi);
  add_nonneg(block.multiplier, block.lmi.label + "_multiplier");
}

namespace {

void check_expr(const AffineExpr& e, int n) {
  require(std::isfinite(e.constant), "ConicProblem: non-finite constant");
  for (const auto& t : e.terms) {
    require(t.var >= 0 && t.var < n, "ConicProblem: reference to an undeclared variable");
    require(std::isfinite(t.coef), "ConicProblem: non-finite coefficient");
  }
}

}  // namespace

void ConicProblem::validate() const {
  const int n = n_vars();
  check_expr(objective, n);
  for (const auto& c : nonneg) check_expr(c.expr, n);
  for (const auto& c : equalities) check_expr(c.expr, n);
  for (const auto& soc : socs) {
    require(!soc.entries.empty(), "ConicProblem: empty second-order cone");
    for (const auto& e : soc.entries) check_expr(e, n);
  }
  for (const auto& lmi : lmis) {
    require(lmi.dim > 0 && lmi.constant.rows() == lmi.dim && lmi.constant.cols() == lmi.dim,
            "ConicProblem: LMI dimension mismatch");
    require(lmi.constant.allFinite(), "ConicProblem: non-finite LMI constant");
    for (const auto& [var, coef] : lmi.terms) {
      require(var >= 0 && var < n, "ConicProblem: LMI references an undeclared variable");
      require(coef.rows() == lmi.dim && coef.cols() == lmi.dim && coef.allFinite(),
              "ConicProblem: malformed LMI coefficient");
    }
  }
}

const ConstraintViolation* SolutionReport::worst() const {
  if (constraints.empty()) return nullptr;
  return &*std::max_element(constraints.begin(), constraints.end(),
                            [](const auto& a, const auto& b) { return a.magnitude < b.magnitude; });
}

SolutionReport check_solution(const ConicProblem& problem, std::span<const double> x) {
  require(static_cast<int>(x.size()) == problem.n_vars(),
          "check_solution: assignment size differs from variable count");
  SolutionReport report;
  report.objective = problem.objective.evaluate(x);
  auto push = [&](const char* kind, const std::string& label, int index, double magnitude) {
    report.constraints.push_back({kind, label, index, std::max(0.0, magnitude)});
    report.max_violation = std::max(report.max_violation, std::max(0.0, magnitude));
  };
  for (std::size_t i = 0; i < problem.nonneg.size(); ++i) {
    push("nonneg", problem.nonneg[i].label, static_cast<int>(i), -problem.nonneg[i].expr.evaluate(x));
  }
  for (std::size_t i = 0; i < problem.equalities.size(); ++i) {
    push("eq", problem.equalities[i].label, static_cast<int>(i),
         std::abs(problem.equalities[i].expr.evaluate(x)));
  }
  for (std::size_t i = 0; i < problem.socs.size(); ++i) {
    const auto& entries = problem.socs[i].entries;
    double tail = 0.0;
    for (std::size_t j = 1; j < entries.size(); ++j) tail += std::pow(entries[j].evaluate(x), 2);
    push("soc", problem.socs[i].label, static_cast<int>(i), std::sqrt(tail) - entries[0].evaluate(x));
  }
  for (std::size_t i = 0; i < problem.lmis.size(); ++i) {
    const LmiEvaluation ev = evaluate_lmi(problem.lmis[i], x);
    push("lmi", problem.lmis[i].label, static_cast<int>(i), -ev.min_eigenvalue);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::string token(const std::string& label) {
  if (label.empty()) return "-";
  std::string out = label;
  std::replace_if(out.begin(), out.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }, '_');
  return out;
}

std::string untoken(const std::string& t) { return t == "-" ? std::string() : t; }

void write_expr(std::ostream& out, const AffineExpr& e) {
  out << e.constant << ' ' << e.terms.size();
  for (const auto& t : e.terms) out << ' ' << t.var << ' ' << t.coef;
  out << '\n';
}

void write_triplets(std::ostream& out, const CMatrix& m) {
  std::vector<std::tuple<int, int, Complex>> nz;
  for (int c = 0; c < m.cols(); ++c) {
    for (int r = 0; r < m.rows(); ++r) {
      if (m(r, c) != Complex(0.0, 0.0)) nz.emplace_back(r, c, m(r, c));
    }
  }
  out << nz.size() << '\n';
  for (const auto& [r, c, v] : nz) out << r << ' ' << c << ' ' << v.real() << ' ' << v.imag() << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) fail("unexpected end of input");
    return w;
  }
  void expect(const std::string& w) {
    const std::string got = word();
    if (got != w) fail("expected '" + w + "', found '" + got + "'");
  }
  template <class T>
  T number() {
    T v{};
    if (!(in_ >> v)) fail("expected a number");
    return v;
  }
  AffineExpr expr() {
    AffineExpr e(number<double>());
    const auto n = number<std::size_t>();
    for (std::size_t i = 0; i < n; ++i) {
      const int var = number<int>();
      e.terms.push_back({var, number<double>()});
    }
    return e;
  }
  CMatrix triplets(int dim) {
    CMatrix m = CMatrix::Zero(dim, dim);
    const auto n = number<std::size_t>();
    for (std::size_t i = 0; i < n; ++i) {
      const int r = number<int>();
      const int c = number<int>();
      const double re = number<double>();
      const double im = number<double>();
      if (r < 0 || r >= dim || c < 0 || c >= dim) fail("triplet index out of range");
      m(r, c) = Complex(re, im);
    }
    return m;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw ContractError("read_problem: " + what);
  }

 private:
  std::istream& in_;
};

}  // namespace

void write_problem(std::ostream& out, const ConicProblem& problem) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17);
  out << "rsma-conic 1\n";
  out << "vars " << problem.n_vars() << '\n';
  for (const auto& name : problem.var_names) out << token(name) << '\n';
  out << "objective ";
  write_expr(out, problem.objective);
  for (const auto& c : problem.nonneg) {
    out << "nonneg " << token(c.label) << ' ';
    write_expr(out, c.expr);
  }
  for (const auto& c : problem.equalities) {
    out << "eq " << token(c.label) << ' ';
    write_expr(out, c.expr);
  }
  for (const auto& soc : problem.socs) {
    out << "soc " << token(soc.label) << ' ' << soc.entries.size() << '\n';
    for (const auto& e : soc.entries) write_expr(out, e);
  }
  for (const auto& lmi : problem.lmis) {
    out << "lmi " << token(lmi.label) << ' ' << lmi.dim << ' ' << lmi.terms.size() << '\n';
    out << "const ";
    write_triplets(out, lmi.constant);
    for (const auto& [var, coef] : lmi.terms) {
      out << "term " << var << ' ';
      write_triplets(out, coef);
    }
  }
  out << "end\n";
  out.flags(flags);
  out.precision(precision);
}

ConicProblem read_problem(std::istream& in) {
  Reader rd(in);
  rd.expect("rsma-conic");
  if (rd.number<int>() != 1) rd.fail("unsupported format version");
  rd.expect("vars");
  ConicProblem p;
  const int n = rd.number<int>();
  if (n < 0) rd.fail("negative variable count");
  for (int i = 0; i < n; ++i) p.var_names.push_back(untoken(rd.word()));
  rd.expect("objective");
  p.objective = rd.expr();
  for (;;) {
    const std::string kind = rd.word();
    if (kind == "end") break;
    if (kind == "nonneg" || kind == "eq") {
      std::string label = untoken(rd.word());
      AffineExpr e = rd.expr();
      if (kind == "nonneg") {
        p.add_nonneg(std::move(e), std::move(label));
      } else {
        p.add_equality(std::move(e), std::move(label));
      }
    } else if (kind == "soc") {
      SocConstraint soc;
      soc.label = untoken(rd.word());
      const auto m = rd.number<std::size_t>();
      for (std::size_t i = 0; i < m; ++i) soc.entries.push_back(rd.expr());
      p.add_soc(std::move(soc));
    } else if (kind == "lmi") {
      LmiConstraint lmi;
      lmi.label = untoken(rd.word());
      lmi.dim = rd.number<int>();
      if (lmi.dim <= 0) rd.fail("LMI dimension must be positive");
      const auto n_terms = rd.number<std::size_t>();
      rd.expect("const");
      lmi.constant = rd.triplets(lmi.dim);
      for (std::size_t i = 0; i < n_terms; ++i) {
        rd.expect("term");
        const int var = rd.number<int>();
        lmi.terms[var] = rd.triplets(lmi.dim);
      }
      p.add_lmi(std::move(lmi));
    } else {
      rd.fail("unknown block '" + kind + "'");
    }
  }
  p.validate();
  return p;
}

}  // namespace rsma
