#include "rsma/sdp.h"

#include <algorithm>
#include <cmath>

namespace rsma {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::NumericalTrouble: return "NumericalTrouble";
  }
  return "Unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kStallIterations = 8;
const double kSqrt2 = std::sqrt(2.0);

// ---------------------------------------------------------------------------
// Cone bookkeeping. Vectors in K are laid out as [orthant | SOC blocks | PSD
// blocks], PSD blocks in svec form (lower triangle, column-major, off-diagonal
// entries scaled by sqrt(2)) so the trace inner product is the dot product.

struct Cones {
  int l = 0;
  std::vector<int> q;
  std::vector<int> s;  // matrix sides

  std::vector<int> q_offset;
  std::vector<int> s_offset;
  int dim = 0;

  void finalize() {
    int off = l;
    q_offset.clear();
    s_offset.clear();
    for (int n : q) {
      q_offset.push_back(off);
      off += n;
    }
    for (int n : s) {
      s_offset.push_back(off);
      off += n * (n + 1) / 2;
    }
    dim = off;
  }
  int degree() const {
    int d = l + static_cast<int>(q.size());
    for (int n : s) d += n;
    return d;
  }
};

int svec_size(int n) { return n * (n + 1) / 2; }

RMatrix unsvec(const Eigen::Ref<const RVector>& v, int n) {
  RMatrix m(n, n);
  int idx = 0;
  for (int j = 0; j < n; ++j) {
    m(j, j) = v(idx++);
    for (int i = j + 1; i < n; ++i) {
      m(i, j) = m(j, i) = v(idx++) / kSqrt2;
    }
  }
  return m;
}

void svec_into(const RMatrix& m, Eigen::Ref<RVector> out) {
  const int n = static_cast<int>(m.rows());
  int idx = 0;
  for (int j = 0; j < n; ++j) {
    out(idx++) = m(j, j);
    for (int i = j + 1; i < n; ++i) out(idx++) = kSqrt2 * 0.5 * (m(i, j) + m(j, i));
  }
}

RVector identity_element(const Cones& k) {
  RVector e = RVector::Zero(k.dim);
  e.head(k.l).setOnes();
  for (std::size_t b = 0; b < k.q.size(); ++b) e(k.q_offset[b]) = 1.0;
  for (std::size_t b = 0; b < k.s.size(); ++b) {
    const int n = k.s[b];
    int idx = k.s_offset[b];
    for (int j = 0; j < n; ++j) {
      e(idx) = 1.0;
      idx += n - j;
    }
  }
  return e;
}

// Smallest "eigenvalue" of v with respect to each cone, minimized over blocks.
double min_cone_eigenvalue(const Cones& k, const RVector& v) {
  double m = kInf;
  if (k.l > 0) m = std::min(m, v.head(k.l).minCoeff());
  for (std::size_t b = 0; b < k.q.size(); ++b) {
    const auto blk = v.segment(k.q_offset[b], k.q[b]);
    m = std::min(m, blk(0) - blk.tail(k.q[b] - 1).norm());
  }
  for (std::size_t b = 0; b < k.s.size(); ++b) {
    const RMatrix mat = unsvec(v.segment(k.s_offset[b], svec_size(k.s[b])), k.s[b]);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(mat, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()(0));
  }
  return m;
}

// Largest alpha with x + alpha*d in the second-order cone (x interior).
double soc_max_step(const Eigen::Ref<const RVector>& x, const Eigen::Ref<const RVector>& d) {
  const int n = static_cast<int>(x.size());
  const double a = d(0) * d(0) - d.tail(n - 1).squaredNorm();
  const double b = x(0) * d(0) - x.tail(n - 1).dot(d.tail(n - 1));
  const double c = std::max(x(0) * x(0) - x.tail(n - 1).squaredNorm(), 0.0);
  // f(alpha) = a alpha^2 + 2 b alpha + c, f(0) = c > 0.
  if (a == 0.0) return b < 0.0 ? -c / (2.0 * b) : kInf;
  const double disc = b * b - a * c;
  if (disc < 0.0) return kInf;  // a > 0: never leaves the cone
  const double sq = std::sqrt(disc);
  // Stable roots of a t^2 + 2 b t + c.
  const double q = -(b + std::copysign(sq, b));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : kInf;
  if (r1 > r2) std::swap(r1, r2);
  if (r1 > 0.0) return r1;
  if (r2 > 0.0) return r2;
  // Both roots nonpositive; the boundary branch ahead is x0 + t d0 = 0.
  if (d(0) < 0.0) return -x(0) / d(0);
  return kInf;
}

// ---------------------------------------------------------------------------
// Scaling W with W z = W^{-T} s = lambda. It starts as the Nesterov-Todd
// scaling of the initial point and is afterwards updated by composing with
// the NT scaling of the new iterates expressed in the current scaled
// coordinates. Those are well conditioned, while the unscaled iterates lose
// their relative accuracy near the boundary of the cone. The composed map
// differs from the NT map only by an orthogonal Jordan automorphism, which
// leaves the search direction unchanged.

struct Scaling {
  RVector d;                   // orthant: W = diag(d)
  std::vector<RMatrix> m;      // SOC: W = m with m' J m = beta2 J
  std::vector<double> beta2;
  std::vector<RMatrix> r;      // PSD: W(Z) = r' Z r
  std::vector<RMatrix> rinv;
  RVector lambda;
};

// J v for the hyperbolic form diag(1, -1, ..., -1).
RVector jmul(RVector v) {
  v.tail(v.size() - 1) *= -1.0;
  return v;
}

enum class Op { W, WT, Winv, WinvT };

void apply_scaling(const Cones& k, const Scaling& sc, Op op, Eigen::Ref<RVector> v) {
  const bool inv = (op == Op::Winv || op == Op::WinvT);
  if (k.l > 0) {
    if (inv) {
      v.head(k.l).array() /= sc.d.array();
    } else {
      v.head(k.l).array() *= sc.d.array();
    }
  }
  for (std::size_t b = 0; b < k.q.size(); ++b) {
    auto blk = v.segment(k.q_offset[b], k.q[b]);
    const RMatrix& m = sc.m[b];
    RVector x = blk;
    switch (op) {
      case Op::W: blk = m * x; break;
      case Op::WT: blk = m.transpose() * x; break;
      // m^{-1} = J m' J / beta2 and m^{-T} = J m J / beta2.
      case Op::Winv: blk = jmul(m.transpose() * jmul(x)) / sc.beta2[b]; break;
      case Op::WinvT: blk = jmul(m * jmul(x)) / sc.beta2[b]; break;
    }
  }
  for (std::size_t b = 0; b < k.s.size(); ++b) {
    const int n = k.s[b];
    auto blk = v.segment(k.s_offset[b], svec_size(n));
    const RMatrix m = unsvec(blk, n);
    RMatrix out;
    switch (op) {
      case Op::W: out = sc.r[b].transpose() * m * sc.r[b]; break;
      case Op::WT: out = sc.r[b] * m * sc.r[b].transpose(); break;
      case Op::Winv: out = sc.rinv[b].transpose() * m * sc.rinv[b]; break;
      case Op::WinvT: out = sc.rinv[b] * m * sc.rinv[b].transpose(); break;
    }
    svec_into(out, blk);
  }
}

struct PsdScaling {
  RMatrix r;
  RMatrix rinv;
  RVector lambda;  // eigenvalues of the scaled point
};

// NT scaling of one PSD block from s = Ls Ls', z = Lz Lz'.
bool psd_nt(const RMatrix& s, const RMatrix& z, PsdScaling& out) {
  Eigen::LLT<RMatrix> ls(s);
  Eigen::LLT<RMatrix> lz(z);
  if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const RMatrix lsm = ls.matrixL();
  const RMatrix lzm = lz.matrixL();
  Eigen::JacobiSVD<RMatrix> svd(lzm.transpose() * lsm, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector sig = svd.singularValues();
  if (sig.minCoeff() <= 0.0 || !sig.allFinite()) return false;
  const RVector isq = sig.array().rsqrt();
  out.r = lsm * svd.matrixV() * isq.asDiagonal();
  out.rinv = isq.asDiagonal() * svd.matrixU().transpose() * lzm.transpose();
  out.lambda = sig;
  return true;
}

struct SocScaling {
  RMatrix m;  // beta * Wbar(w)
  double beta2 = 1.0;
  RVector lambda;
};

// NT scaling of one SOC block: W = beta [[w0, w1'], [w1, I + w1 w1'/(1 + w0)]].
bool soc_nt(const RVector& s, const RVector& z, SocScaling& out) {
  const int n = static_cast<int>(s.size());
  const double sn2 = s(0) * s(0) - s.tail(n - 1).squaredNorm();
  const double zn2 = z(0) * z(0) - z.tail(n - 1).squaredNorm();
  if (!(sn2 > 0) || !(zn2 > 0) || s(0) <= 0 || z(0) <= 0) return false;
  const double sn = std::sqrt(sn2);
  const double zn = std::sqrt(zn2);
  const RVector sbar = s / sn;
  const RVector zbar = z / zn;
  const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
  RVector w1 = (sbar.tail(n - 1) - zbar.tail(n - 1)) / (2.0 * gamma);
  const double w0 = std::sqrt(1.0 + w1.squaredNorm());
  const double beta = std::sqrt(sn / zn);
  out.m.resize(n, n);
  out.m(0, 0) = w0;
  out.m.block(0, 1, 1, n - 1) = w1.transpose();
  out.m.block(1, 0, n - 1, 1) = w1;
  out.m.block(1, 1, n - 1, n - 1) =
      RMatrix::Identity(n - 1, n - 1) + w1 * w1.transpose() / (1.0 + w0);
  out.m *= beta;
  out.beta2 = beta * beta;
  out.lambda = out.m * z;
  return true;
}

// NT scaling computed directly from unscaled s, z (first iteration only).
bool compute_scaling(const Cones& k, const RVector& s, const RVector& z, Scaling& sc) {
  sc.lambda.resize(k.dim);
  if (k.l > 0) {
    const auto sl = s.head(k.l).array();
    const auto zl = z.head(k.l).array();
    if ((sl <= 0).any() || (zl <= 0).any()) return false;
    sc.d = (sl / zl).sqrt();
    sc.lambda.head(k.l) = (sl * zl).sqrt();
  }
  sc.m.assign(k.q.size(), RMatrix());
  sc.beta2.assign(k.q.size(), 1.0);
  for (std::size_t b = 0; b < k.q.size(); ++b) {
    SocScaling ss;
    if (!soc_nt(s.segment(k.q_offset[b], k.q[b]), z.segment(k.q_offset[b], k.q[b]), ss)) {
      return false;
    }
    sc.m[b] = ss.m;
    sc.beta2[b] = ss.beta2;
    sc.lambda.segment(k.q_offset[b], k.q[b]) = ss.lambda;
  }
  sc.r.assign(k.s.size(), RMatrix());
  sc.rinv.assign(k.s.size(), RMatrix());
  for (std::size_t b = 0; b < k.s.size(); ++b) {
    const int n = k.s[b];
    PsdScaling ps;
    if (!psd_nt(unsvec(s.segment(k.s_offset[b], svec_size(n)), n),
                unsvec(z.segment(k.s_offset[b], svec_size(n)), n), ps)) {
      return false;
    }
    sc.r[b] = ps.r;
    sc.rinv[b] = ps.rinv;
    svec_into(RMatrix(ps.lambda.asDiagonal()), sc.lambda.segment(k.s_offset[b], svec_size(n)));
  }
  return true;
}

// Compose the current scaling with the NT scaling of the scaled iterates
// (st, zt) = (W^{-T} s, W z).
bool update_scaling(const Cones& k, Scaling& sc, const RVector& st, const RVector& zt) {
  RVector lambda(k.dim);
  if (k.l > 0) {
    const auto sl = st.head(k.l).array();
    const auto zl = zt.head(k.l).array();
    if ((sl <= 0).any() || (zl <= 0).any()) return false;
    sc.d.array() *= (sl / zl).sqrt();
    lambda.head(k.l) = (sl * zl).sqrt();
  }
  for (std::size_t b = 0; b < k.q.size(); ++b) {
    SocScaling ss;
    if (!soc_nt(st.segment(k.q_offset[b], k.q[b]), zt.segment(k.q_offset[b], k.q[b]), ss)) {
      return false;
    }
    sc.m[b] = ss.m * sc.m[b];
    sc.beta2[b] *= ss.beta2;
    lambda.segment(k.q_offset[b], k.q[b]) = ss.lambda;
  }
  for (std::size_t b = 0; b < k.s.size(); ++b) {
    const int n = k.s[b];
    const int off = k.s_offset[b];
    PsdScaling ps;
    if (!psd_nt(unsvec(st.segment(off, svec_size(n)), n), unsvec(zt.segment(off, svec_size(n)), n),
                ps)) {
      return false;
    }
    sc.r[b] = sc.r[b] * ps.r;
    sc.rinv[b] = ps.rinv * sc.rinv[b];
    svec_into(RMatrix(ps.lambda.asDiagonal()), lambda.segment(off, svec_size(n)));
  }
  sc.lambda = lambda;
  return true;
}

Scaling identity_scaling(const Cones& k) {
  Scaling sc;
  sc.d = RVector::Ones(k.l);
  for (int n : k.q) {
    sc.m.push_back(RMatrix::Identity(n, n));
    sc.beta2.push_back(1.0);
  }
  for (int n : k.s) {
    sc.r.push_back(RMatrix::Identity(n, n));
    sc.rinv.push_back(RMatrix::Identity(n, n));
  }
  sc.lambda = identity_element(k);
  return sc;
}

// Diagonal entries of the (diagonal) scaled point of PSD block b.
RVector psd_lambda_diag(const Cones& k, const RVector& lambda, std::size_t b) {
  const int n = k.s[b];
  RVector diag(n);
  int idx = k.s_offset[b];
  for (int j = 0; j < n; ++j) {
    diag(j) = lambda(idx);
    idx += n - j;
  }
  return diag;
}

// Jordan product x o y.
RVector jordan_product(const Cones& k, const RVector& x, const RVector& y) {
  RVector out(k.dim);
  if (k.l > 0) out.head(k.l) = x.head(k.l).cwiseProduct(y.head(k.l));
  for (std::size_t b = 0; b < k.q.size(); ++b) {
    const int n = k.q[b];
    const auto xb = x.segment(k.q_offset[b], n);
    const auto yb = y.segment(k.q_offset[b], n);
    auto ob = out.segment(k.q_offset[b], n);
    ob(0) = xb.dot(yb);
    ob.tail(n - 1) = xb(0) * yb.tail(n - 1) + yb(0) * xb.tail(n - 1);
  }
  for (std::size_t b = 0; b < k.s.size(); ++b) {
    const int n = k.s[b];
    const RMatrix xm = unsvec(x.segment(k.s_offset[b], svec_size(n)), n);
    const RMatrix ym = unsvec(y.segment(k.s_offset[b], svec_size(n)), n);
    svec_into(0.5 * (xm * ym + ym * xm), out.segment(k.s_offset[b], svec_size(n)));
  }
  return out;
}

// Solve lambda o x = d for x.
RVector jordan_solve(const Cones& k, const RVector& lambda, const RVector& d) {
  RVector out(k.dim);
  if (k.l > 0) out.head(k.l) = d.head(k.l).cwiseQuotient(lambda.head(k.l));
  for (std::size_t b = 0; b < k.q.size(); ++b) {
    const int n = k.q[b];
    const auto lb = lambda.segment(k.q_offset[b], n);
    const auto db = d.segment(k.q_offset[b], n);
    auto ob = out.segment(k.q_offset[b], n);
    const double l0 = lb(0);
    const double det = l0 * l0 - lb.tail(n - 1).squaredNorm();
    const double x0 = (l0 * db(0) - lb.tail(n - 1).dot(db.tail(n - 1))) / det;
    ob(0) = x0;
    ob.tail(n - 1) = (db.tail(n - 1) - x0 * lb.tail(n - 1)) / l0;
  }
  for (std::size_t b = 0; b < k.s.size(); ++b) {
    const int n = k.s[b];
    const RVector lam = psd_lambda_diag(k, lambda, b);
    int idx = k.s_offset[b];
    for (int j = 0; j < n; ++j) {
      for (int i = j; i < n; ++i, ++idx) out(idx) = 2.0 * d(idx) / (lam(i) + lam(j));
    }
  }
  return out;
}

// Largest alpha with lambda + alpha * dv in K (lambda the scaled point).
double max_step_scaled(const Cones& k, const RVector& lambda, const RVector& dv) {
  double alpha = kInf;
  for (int i = 0; i < k.l; ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -lambda(i) / dv(i));
  }
  for (std::size_t b = 0; b < k.q.size(); ++b) {
    alpha = std::min(alpha, soc_max_step(lambda.segment(k.q_offset[b], k.q[b]),
                                         dv.segment(k.q_offset[b], k.q[b])));
  }
  for (std::size_t b = 0; b < k.s.size(); ++b) {
    const int n = k.s[b];
    const RVector isq = psd_lambda_diag(k, lambda, b).array().rsqrt();
    const RMatrix m =
        isq.asDiagonal() * unsvec(dv.segment(k.s_offset[b], svec_size(n)), n) * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<RMatrix> es(m, Eigen::EigenvaluesOnly);
    const double emin = es.eigenvalues()(0);
    if (emin < 0.0) alpha = std::min(alpha, -1.0 / emin);
  }
  return alpha;
}

// ---------------------------------------------------------------------------
// Standard form.

struct StandardForm {
  RVector c;
  double c0 = 0.0;
  RMatrix g;
  RVector h;
  RMatrix a;
  RVector b;
  Cones cones;
};

StandardForm to_standard_form(const ConicProblem& p) {
  StandardForm sf;
  const int n = p.n_vars();
  sf.cones.l = static_cast<int>(p.nonneg.size());
  for (const auto& soc : p.socs) sf.cones.q.push_back(static_cast<int>(soc.entries.size()));
  std::vector<LmiConstraint> real_lmis;
  for (const auto& lmi : p.lmis) {
    real_lmis.push_back(lmi.is_real() ? lmi : realify(lmi));
    sf.cones.s.push_back(real_lmis.back().dim);
  }
  sf.cones.finalize();
  const int m = sf.cones.dim;

  sf.c = RVector::Zero(n);
  for (const auto& t : p.objective.terms) sf.c(t.var) += t.coef;
  sf.c0 = p.objective.constant;

  sf.g = RMatrix::Zero(m, n);
  sf.h = RVector::Zero(m);
  auto put_row = [&](int row, const AffineExpr& e) {
    sf.h(row) = e.constant;
    for (const auto& t : e.terms) sf.g(row, t.var) -= t.coef;
  };
  for (int i = 0; i < sf.cones.l; ++i) put_row(i, p.nonneg[i].expr);
  for (std::size_t b = 0; b < p.socs.size(); ++b) {
    for (std::size_t j = 0; j < p.socs[b].entries.size(); ++j) {
      put_row(sf.cones.q_offset[b] + static_cast<int>(j), p.socs[b].entries[j]);
    }
  }
  for (std::size_t b = 0; b < real_lmis.size(); ++b) {
    const int dim = sf.cones.s[b];
    const int off = sf.cones.s_offset[b];
    svec_into(real_lmis[b].constant.real(), sf.h.segment(off, svec_size(dim)));
    RVector col(svec_size(dim));
    for (const auto& [var, coef] : real_lmis[b].terms) {
      svec_into(coef.real(), col);
      sf.g.block(off, var, svec_size(dim), 1) -= col;
    }
  }

  const int p_rows = static_cast<int>(p.equalities.size());
  sf.a = RMatrix::Zero(p_rows, n);
  sf.b = RVector::Zero(p_rows);
  for (int i = 0; i < p_rows; ++i) {
    const auto& e = p.equalities[i].expr;
    sf.b(i) = -e.constant;
    for (const auto& t : e.terms) sf.a(i, t.var) += t.coef;
  }
  return sf;
}

// ---------------------------------------------------------------------------
// KKT system
//   [ 0  A'  G'    ] [ux]   [bx]
//   [ A  0   0     ] [uy] = [by]
//   [ G  0  -W'W   ] [uz]   [bz]

class KktSolver {
 public:
  KktSolver(const StandardForm& sf, const Scaling& sc) : sf_(sf), sc_(sc) {
    const int n = static_cast<int>(sf.c.size());
    const int p = static_cast<int>(sf.b.size());
    gs_ = sf.g;
    for (int j = 0; j < n; ++j) {
      RVector col = gs_.col(j);
      apply_scaling(sf.cones, sc, Op::WinvT, col);
      gs_.col(j) = col;
    }
    RMatrix kkt = RMatrix::Zero(n + p, n + p);
    kkt.topLeftCorner(n, n) = gs_.transpose() * gs_;
    kkt.topRightCorner(n, p) = sf.a.transpose();
    kkt.bottomLeftCorner(p, n) = sf.a;
    exact_ = kkt;
    const double reg = 1e-13 * std::max(1.0, kkt.diagonal().head(n).cwiseAbs().maxCoeff());
    kkt.topLeftCorner(n, n).diagonal().array() += reg;
    kkt.bottomRightCorner(p, p).diagonal().array() -= reg;
    lu_.compute(kkt);
  }

  bool ok() const { return lu_.matrixLU().allFinite(); }

  struct Result {
    RVector x, y, z, z_scaled;  // z_scaled = W z
  };

  Result solve(const RVector& bx, const RVector& by, const RVector& bz) const {
    Result out = solve_once(bx, by, bz);
    // Refinement against the full system; the condensed one squares the
    // conditioning of the scaling.
    for (int it = 0; it < 2; ++it) {
      RVector wz = out.z_scaled;
      apply_scaling(sf_.cones, sc_, Op::WT, wz);  // W'W z
      const RVector rx = bx - sf_.a.transpose() * out.y - sf_.g.transpose() * out.z;
      const RVector ry = by - sf_.a * out.x;
      const RVector rz = bz - (sf_.g * out.x - wz);
      const Result d = solve_once(rx, ry, rz);
      out.x += d.x;
      out.y += d.y;
      out.z += d.z;
      out.z_scaled += d.z_scaled;
    }
    return out;
  }

 private:
  Result solve_once(const RVector& bx, const RVector& by, const RVector& bz) const {
    const int n = static_cast<int>(bx.size());
    const int p = static_cast<int>(by.size());
    RVector bzs = bz;
    apply_scaling(sf_.cones, sc_, Op::WinvT, bzs);
    RVector rhs(n + p);
    rhs.head(n) = bx + gs_.transpose() * bzs;
    rhs.tail(p) = by;
    RVector sol = lu_.solve(rhs);
    const RVector res = rhs - exact_ * sol;
    sol += lu_.solve(res);
    Result out;
    out.x = sol.head(n);
    out.y = sol.tail(p);
    out.z_scaled = gs_ * out.x - bzs;
    out.z = out.z_scaled;
    apply_scaling(sf_.cones, sc_, Op::Winv, out.z);
    return out;
  }

  const StandardForm& sf_;
  const Scaling& sc_;
  RMatrix gs_;
  RMatrix exact_;
  Eigen::PartialPivLU<RMatrix> lu_;
};

}  // namespace

Solution solve(const ConicProblem& problem, const SolverOptions& options) {
  problem.validate();
  require(options.tol > 0 && options.feastol > 0, "solve: tolerances must be positive");
  require(options.max_iter >= 1, "solve: max_iter must be >= 1");
  const StandardForm sf = to_standard_form(problem);
  const Cones& k = sf.cones;
  require(k.dim > 0, "solve: problem has no cone constraints");

  const int n = static_cast<int>(sf.c.size());
  const int p = static_cast<int>(sf.b.size());
  const double resx0 = std::max(1.0, sf.c.norm());
  const double resy0 = std::max(1.0, sf.b.norm());
  const double resz0 = std::max(1.0, sf.h.norm());
  const RVector e = identity_element(k);
  const int degree = k.degree();

  Solution out;
  out.x = RVector::Zero(n);

  // Starting point from the two least-squares systems with W = I.
  RVector x, y, s, z;
  {
    const Scaling id = identity_scaling(k);
    KktSolver kkt(sf, id);
    if (!kkt.ok()) {
      out.status = SolveStatus::NumericalTrouble;
      return out;
    }
    auto primal = kkt.solve(RVector::Zero(n), sf.b, sf.h);
    x = primal.x;
    s = -primal.z;
    auto dual = kkt.solve(-sf.c, RVector::Zero(p), RVector::Zero(k.dim));
    y = dual.y;
    z = dual.z;
    const double ts = -min_cone_eigenvalue(k, s);
    if (ts >= -1e-8 * std::max(s.norm(), 1.0)) s += (1.0 + ts) * e;
    const double tz = -min_cone_eigenvalue(k, z);
    if (tz >= -1e-8 * std::max(z.norm(), 1.0)) z += (1.0 + tz) * e;
  }
  double tau = 1.0;
  double kappa = 1.0;

  Scaling sc;
  bool have_scaling = false;

  // Near the optimum the dual residual can stall at a floor set by the
  // conditioning of the scaling. Failed runs report the best iterate seen.
  struct Best {
    double merit = kInf;
    int iter = 0;
    RVector x;
    double objective = Solution::kNaN, dual_objective = Solution::kNaN, gap = Solution::kNaN;
  } best;
  auto fail = [&](SolveStatus status) {
    out.status = status;
    if (best.x.size() > 0) {
      out.x = best.x;
      out.objective = best.objective;
      out.dual_objective = best.dual_objective;
      out.gap = best.gap;
    }
    return out;
  };

  for (int iter = 0;; ++iter) {
    const RVector rx = sf.a.transpose() * y + sf.g.transpose() * z + sf.c * tau;
    const RVector ry = sf.a * x - sf.b * tau;
    const RVector rz = sf.g * x + s - sf.h * tau;
    const double cx = sf.c.dot(x);
    const double by = sf.b.dot(y);
    const double hz = sf.h.dot(z);
    const double rt = kappa + cx + by + hz;

    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double gap = s.dot(z) / (tau * tau);
    double relgap = kInf;
    if (pcost < 0.0) {
      relgap = gap / -pcost;
    } else if (dcost > 0.0) {
      relgap = gap / dcost;
    }
    const double pres = std::max(ry.norm() / resy0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;

    double pinfres = kInf;
    if (hz + by < 0.0) {
      pinfres = (sf.a.transpose() * y + sf.g.transpose() * z).norm() / resx0 / -(hz + by);
    }
    double dinfres = kInf;
    if (cx < 0.0) {
      dinfres = std::max((sf.a * x).norm() / resy0, (sf.g * x + s).norm() / resz0) / -cx;
    }

    IterationInfo info;
    info.iteration = iter;
    info.primal_objective = pcost + sf.c0;
    info.dual_objective = dcost + sf.c0;
    info.gap = gap;
    info.primal_residual = pres;
    info.dual_residual = dres;
    out.trace.push_back(info);
    out.iterations = iter;

    const bool gap_ok = gap <= options.tol || relgap <= options.tol;
    const double merit = std::max({pres / options.feastol, dres / options.feastol,
                                   std::min(gap, std::abs(relgap)) / options.tol});
    if (merit < best.merit) {
      best.merit = merit;
      best.iter = iter;
      best.x = x / tau;
      best.objective = pcost + sf.c0;
      best.dual_objective = dcost + sf.c0;
      best.gap = gap;
    }
    if (pres <= options.feastol && dres <= options.feastol && gap_ok) {
      out.status = SolveStatus::Optimal;
      out.x = x / tau;
      out.objective = pcost + sf.c0;
      out.dual_objective = dcost + sf.c0;
      out.gap = gap;
      out.certificate_y = y / tau;
      out.certificate_z = z / tau;
      return out;
    }
    if (pinfres <= options.feastol) {
      out.status = SolveStatus::Infeasible;
      out.certificate_y = y / -(hz + by);
      out.certificate_z = z / -(hz + by);
      out.gap = gap;
      return out;
    }
    if (dinfres <= options.feastol) {
      out.status = SolveStatus::Unbounded;
      out.certificate_x = x / -cx;
      out.gap = gap;
      return out;
    }
    if (iter >= options.max_iter) return fail(SolveStatus::MaxIterations);
    if (iter - best.iter >= kStallIterations) return fail(SolveStatus::NumericalTrouble);

    if (!have_scaling) {
      if (!compute_scaling(k, s, z, sc)) return fail(SolveStatus::NumericalTrouble);
      have_scaling = true;
    }
    const RVector& lambda = sc.lambda;

    const KktSolver kkt(sf, sc);
    if (!kkt.ok()) return fail(SolveStatus::NumericalTrouble);
    const auto v = kkt.solve(-sf.c, sf.b, sf.h);
    const double v_dot = sf.c.dot(v.x) + sf.b.dot(v.y) + sf.h.dot(v.z);

    const double mu = (lambda.squaredNorm() + tau * kappa) / (degree + 1);
    const RVector lambda_sq = jordan_product(k, lambda, lambda);

    struct Direction {
      RVector dx, dy, dz, ds_scaled, dz_scaled;
      double dtau = 0, dkappa = 0;
    };
    auto newton = [&](const RVector& ds_rhs, double dk_rhs, double eta) {
      Direction d;
      const RVector ls = jordan_solve(k, lambda, ds_rhs);  // lambda \ d_s
      RVector wt_ls = ls;
      apply_scaling(k, sc, Op::WT, wt_ls);
      const auto u = kkt.solve(-eta * rx, -eta * ry, -wt_ls - eta * rz);
      const double num = eta * rt + dk_rhs / tau + sf.c.dot(u.x) + sf.b.dot(u.y) + sf.h.dot(u.z);
      const double den = kappa / tau - v_dot;
      d.dtau = num / den;
      d.dx = u.x + d.dtau * v.x;
      d.dy = u.y + d.dtau * v.y;
      d.dz = u.z + d.dtau * v.z;
      d.dz_scaled = u.z_scaled + d.dtau * v.z_scaled;
      d.ds_scaled = ls - d.dz_scaled;
      d.dkappa = (dk_rhs - kappa * d.dtau) / tau;
      return d;
    };
    auto max_step = [&](const Direction& d) {
      double a = std::min(max_step_scaled(k, lambda, d.ds_scaled),
                          max_step_scaled(k, lambda, d.dz_scaled));
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    const Direction aff = newton(-lambda_sq, -tau * kappa, 1.0);
    const double step_aff = std::min(1.0, max_step(aff));
    const double sigma = std::pow(1.0 - step_aff, 3);

    const RVector ds_rhs = -lambda_sq - jordan_product(k, aff.ds_scaled, aff.dz_scaled) +
                           sigma * mu * e;
    const double dk_rhs = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
    const Direction dir = newton(ds_rhs, dk_rhs, 1.0 - sigma);
    const double step = std::min(1.0, 0.99 * max_step(dir));
    out.trace.back().step = step;
    if (!(step > 1e-12) || !std::isfinite(step)) return fail(SolveStatus::NumericalTrouble);

    x += step * dir.dx;
    y += step * dir.dy;
    tau += step * dir.dtau;
    kappa += step * dir.dkappa;

    // New iterates in the current scaled coordinates.
    const RVector s_tilde = lambda + step * dir.ds_scaled;
    const RVector z_tilde = lambda + step * dir.dz_scaled;
    RVector s_new = s_tilde;
    apply_scaling(k, sc, Op::WT, s_new);
    RVector z_new = z_tilde;
    apply_scaling(k, sc, Op::Winv, z_new);
    s = s_new;
    z = z_new;

    if (!update_scaling(k, sc, s_tilde, z_tilde)) return fail(SolveStatus::NumericalTrouble);
  }
}

}  // namespace rsma
