#include "magque/eigensolver.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace magque {

namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using BlockOp = std::function<void(const Mat&, Mat&)>;
using VecOp = std::function<void(const cplx*, cplx*)>;
// Given Ritz vectors X, A X and Ritz values; returns true when done and may replace the pairs.
using Acceptor = std::function<bool(Mat&, Mat&, Vec&, double&)>;

class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
  void fill(Eigen::Ref<Eigen::VectorXcd> v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double re = g_(rng_);
      v[i] = cplx(re, g_(rng_));
    }
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> g_;
};

void project_out(const Mat& v, int cur, Eigen::Ref<Mat> p) {
  if (cur == 0) return;
  const auto basis = v.leftCols(cur);
  p.noalias() -= basis * (basis.adjoint() * p);
}

// Orthonormalize p against the first cur columns of v and within itself.
void orthonormalize(const Mat& v, int cur, Mat& p, Gaussian& rng) {
  const Eigen::VectorXd n0 = p.colwise().norm().transpose();
  project_out(v, cur, p);
  project_out(v, cur, p);
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    double ref = n0[c];
    for (int attempt = 0;; ++attempt) {
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index q = 0; q < c; ++q) p.col(c) -= p.col(q) * p.col(q).dot(p.col(c));
      double nr = p.col(c).norm();
      if (nr < 1e-3 * ref && nr > 1e-10 * ref) {
        // heavy cancellation: one more sweep against the basis
        project_out(v, cur, p.col(c));
        for (Eigen::Index q = 0; q < c; ++q) p.col(c) -= p.col(q) * p.col(q).dot(p.col(c));
        nr = p.col(c).norm();
      }
      if (nr > 1e-10 * ref && nr > 0.0) {
        p.col(c) /= nr;
        break;
      }
      if (attempt > 8) throw NoConvergence("could not extend the Krylov basis");
      rng.fill(p.col(c));
      ref = p.col(c).norm();
      project_out(v, cur, p.col(c));
      project_out(v, cur, p.col(c));
    }
  }
}

struct KrylovResult {
  Mat x;
  Vec theta;
  long matvecs = 0;
  int restarts = 0;
};

KrylovResult thick_restart_lanczos(int n, int nwant, int b, int mmax, const BlockOp& op,
                                   const Acceptor& accept, std::uint64_t seed, long max_matvecs,
                                   long& matvec_counter) {
  Gaussian rng(seed);
  Mat v(n, mmax), av(n, mmax);
  Mat p(n, b);
  for (int c = 0; c < b; ++c) rng.fill(p.col(c));
  Mat ap(n, b);
  int cur = 0;
  KrylovResult out;
  double worst = 0.0;
  for (;;) {
    while (cur + b <= mmax) {
      orthonormalize(v, cur, p, rng);
      v.middleCols(cur, b) = p;
      op(p, ap);
      av.middleCols(cur, b) = ap;
      p = ap;
      cur += b;
    }
    Mat t = v.leftCols(cur).adjoint() * av.leftCols(cur);
    t = (0.5 * (t + t.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(t);
    const int keep = std::min(cur - b, std::max(nwant + 2 * b, (2 * mmax) / 5));
    const Mat y = es.eigenvectors().leftCols(keep);
    Mat x = v.leftCols(cur) * y;
    Mat ax = av.leftCols(cur) * y;
    Vec theta = es.eigenvalues().head(keep);

    Mat xw = x.leftCols(nwant), axw = ax.leftCols(nwant);
    Vec tw = theta.head(nwant);
    if (accept(xw, axw, tw, worst)) {
      out.x = std::move(xw);
      out.theta = std::move(tw);
      out.matvecs = matvec_counter;
      return out;
    }
    if (matvec_counter > max_matvecs) {
      std::ostringstream os;
      os << "after " << matvec_counter << " matvecs and " << out.restarts
         << " restarts, worst relative residual " << worst;
      throw NoConvergence(os.str());
    }
    // next Lanczos block, orthogonal to the whole current basis
    project_out(v, cur, p);
    project_out(v, cur, p);
    v.leftCols(keep) = x;
    av.leftCols(keep) = ax;
    cur = keep;
    ++out.restarts;
  }
}

double rel_residual(const Eigen::Ref<const Eigen::VectorXcd>& ax, const Eigen::Ref<const Eigen::VectorXcd>& x,
                    double theta) {
  return (ax - theta * x).norm() / std::max(1.0, std::abs(theta));
}

// Rayleigh-Ritz with H itself on the span of x; on success x, ax, theta hold H pairs.
bool rayleigh_ritz_accept(const SparseHermitianOperator& h, Mat& x, Mat& ax, Vec& theta,
                          double& worst, double tol, long& matvecs) {
  Mat hx(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) h.apply(x.col(c).data(), hx.col(c).data());
  matvecs += x.cols();
  Mat g = x.adjoint() * hx;
  g = (0.5 * (g + g.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  Mat y = x * es.eigenvectors();
  Mat hy = hx * es.eigenvectors();
  Vec mu = es.eigenvalues();
  worst = 0.0;
  for (Eigen::Index i = 0; i < y.cols(); ++i)
    worst = std::max(worst, rel_residual(hy.col(i), y.col(i), mu[i]));
  if (worst > tol) return false;
  x = std::move(y);
  ax = std::move(hy);
  theta = std::move(mu);
  return true;
}

EigenResult finish(const SparseHermitianOperator& h, const Mat& x, const Vec& theta,
                   const EigenTarget& target, long matvecs, int restarts) {
  EigenResult r;
  r.target = target;
  r.matvecs = matvecs;
  r.restarts = restarts;
  std::vector<int> order(theta.size());
  for (int i = 0; i < int(order.size()); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return theta[a] < theta[b]; });
  const double scale = h.n();
  for (int i : order) {
    GridWavefunction u(h.n(), h.flux(), h.origin());
    for (int j = 0; j < h.dim(); ++j) u.data()[j] = x(j, i) * scale;
    r.eigenvalues.push_back(theta[i]);
    r.eigenvectors.push_back(std::move(u));
  }
  r.residuals = residual_report(h, r);
  r.clusters = cluster_eigenvalues(r.eigenvalues);
  return r;
}

int default_block(const SparseHermitianOperator& h, const SolverOptions& o) {
  return o.block_size > 0 ? o.block_size : std::max(std::abs(h.flux()) + 1, 2);
}

int default_basis(int k, int b, const SolverOptions& o) {
  int m = o.max_basis > 0 ? o.max_basis : std::max(120, 4 * k + 12 * b);
  m = std::max(m, k + 4 * b);
  return (m / b) * b;
}

void check_request(const SparseHermitianOperator& h, int k) {
  if (k <= 0 || k > h.dim() / 4) {
    std::ostringstream os;
    os << "requested " << k << " eigenpairs, allowed 1.." << h.dim() / 4;
    throw ValidationError(os.str());
  }
}

// Lowest k eigenvectors of a Hermitian operator with spectrum below upper. Above 1024 unknowns the
// Krylov operator is the Chebyshev filter -(-1)^d T_d((A - c)/e), which damps [a, upper]; a comes
// from one short unfiltered pass.
KrylovResult filtered_lowest(int n, int k, int b, const VecOp& a_op, int cost, double upper,
                             const SolverOptions& opts, const Acceptor& accept, long& matvecs) {
  const int mmax = std::min(default_basis(k, b, opts), (n / b) * b);
  Eigen::VectorXcd t0(n), t1(n), t2(n);
  int degree = 0;
  double c = 0.0, e = 1.0;
  if (opts.filter_degree >= 0 && n >= 1024) {
    const int m0 = std::min(mmax, ((std::max(40, 2 * (k + 2 * b)) + b - 1) / b) * b);
    BlockOp plain = [&](const Mat& in, Mat& out) {
      out.resize(in.rows(), in.cols());
      for (Eigen::Index j = 0; j < in.cols(); ++j) a_op(in.col(j).data(), out.col(j).data());
      matvecs += cost * in.cols();
    };
    Vec ritz;
    Acceptor first = [&](Mat&, Mat&, Vec& theta, double&) {
      ritz = theta;
      return true;
    };
    thick_restart_lanczos(n, std::min(m0 - b, k + 2 * b), b, m0, plain, first, opts.seed ^ 0x9e3779b9ULL,
                          opts.max_matvecs, matvecs);
    const double a = ritz[ritz.size() - 1];
    if (a < upper && ritz[0] < a) {
      c = 0.5 * (a + upper);
      e = 0.5 * (upper - a);
      const double reach = 2.0 * std::sqrt((a - ritz[0]) / (upper - a));
      degree = opts.filter_degree > 0 ? opts.filter_degree : std::clamp(int(std::ceil(4.0 / reach)), 1, 80);
    }
  }
  BlockOp op = [&](const Mat& in, Mat& out) {
    out.resize(in.rows(), in.cols());
    for (Eigen::Index j = 0; j < in.cols(); ++j) {
      if (degree == 0) {
        a_op(in.col(j).data(), out.col(j).data());
        matvecs += cost;
        continue;
      }
      // lowest eigenvalues of A map to the most negative values
      t0 = in.col(j);
      a_op(t0.data(), t1.data());
      t1 = (t1 - c * t0) / e;
      for (int d = 1; d < degree; ++d) {
        a_op(t1.data(), t2.data());
        t2 = (2.0 / e) * (t2 - c * t1) - t0;
        std::swap(t0, t1);
        std::swap(t1, t2);
      }
      out.col(j) = (degree % 2 == 0) ? (-t1).eval() : t1;
      matvecs += long(cost) * degree;
    }
  };
  return thick_restart_lanczos(n, k, b, mmax, op, accept, opts.seed, opts.max_matvecs, matvecs);
}

}  // namespace

std::string EigenTarget::describe() const {
  std::ostringstream os;
  if (kind == Kind::Lowest) os << "lowest-" << k;
  else os << "window(" << sigma << "," << k << ")";
  return os.str();
}

EigenResult lowest_eigenpairs(const SparseHermitianOperator& h, int k, double tol,
                              const SolverOptions& opts) {
  check_request(h, k);
  long matvecs = 0;
  const VecOp op = [&](const cplx* in, cplx* out) { h.apply(in, out); };
  Acceptor accept = [&](Mat& x, Mat& ax, Vec& theta, double& worst) {
    return rayleigh_ritz_accept(h, x, ax, theta, worst, tol, matvecs);
  };
  const KrylovResult kr =
      filtered_lowest(h.dim(), k, default_block(h, opts), op, 1, h.gershgorin_upper(), opts, accept, matvecs);
  return finish(h, kr.x, kr.theta, {EigenTarget::Kind::Lowest, k, 0.0}, kr.matvecs, kr.restarts);
}

EigenResult window_eigenpairs(const SparseHermitianOperator& h, double sigma, int k, double tol,
                              const SolverOptions& opts) {
  check_request(h, k);
  const double upper = h.gershgorin_upper();
  if (sigma < 0.0 || sigma > upper) {
    std::ostringstream os;
    os << "sigma " << sigma << " outside [0, " << upper << "]";
    throw ValidationError(os.str());
  }
  const int n = h.dim();
  long matvecs = 0;
  Eigen::VectorXcd tmp(n);
  // (H - sigma)^2
  const VecOp op = [&](const cplx* in, cplx* out) {
    h.apply(in, tmp.data());
    tmp -= sigma * Eigen::Map<const Eigen::VectorXcd>(in, n);
    h.apply(tmp.data(), out);
    Eigen::Map<Eigen::VectorXcd>(out, n) -= sigma * tmp;
  };
  const double reach = std::max(upper - sigma, sigma - h.gershgorin_lower());
  Acceptor accept = [&](Mat& x, Mat& ax, Vec& theta, double& worst) {
    return rayleigh_ritz_accept(h, x, ax, theta, worst, tol, matvecs);
  };
  const KrylovResult kr =
      filtered_lowest(n, k, default_block(h, opts), op, 2, reach * reach, opts, accept, matvecs);
  return finish(h, kr.x, kr.theta, {EigenTarget::Kind::Window, k, sigma}, kr.matvecs, kr.restarts);
}

std::vector<double> residual_report(const SparseHermitianOperator& h, const EigenResult& result) {
  if (result.eigenvalues.size() != result.eigenvectors.size())
    throw DimMismatch("eigenvalue and eigenvector counts differ");
  std::vector<double> out;
  for (std::size_t i = 0; i < result.eigenvectors.size(); ++i) {
    const GridWavefunction& u = result.eigenvectors[i];
    const double nu = u.norm();
    if (nu == 0.0) throw ZeroVector("eigenvector " + std::to_string(i) + " is zero");
    GridWavefunction r = h.apply(u);
    r -= cplx(result.eigenvalues[i]) * u;
    out.push_back(r.norm() / nu);
  }
  return out;
}

std::vector<int> cluster_eigenvalues(const std::vector<double>& sorted, double rel_gap) {
  std::vector<int> ids;
  int id = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0) {
      const double scale = std::max({1.0, std::abs(sorted[i]), std::abs(sorted[i - 1])});
      if (std::abs(sorted[i] - sorted[i - 1]) >= rel_gap * scale) ++id;
    }
    ids.push_back(id);
  }
  return ids;
}

}  // namespace magque
