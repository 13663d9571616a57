#include "tcfem/krylov.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace tcfem {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::breakdown: return "breakdown";
    case SolveStatus::max_iterations: return "max_iterations";
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

SolveResult run(const LinearMap& a, const LinearMap& m, std::span<const double> b, const KrylovOptions& opt,
                bool flexible) {
  if (!(opt.tol > 0.0 && opt.tol < 1.0)) throw std::invalid_argument("Krylov solver: tol must lie in (0, 1)");
  if (opt.maxit < 1) throw std::invalid_argument("Krylov solver: maxit must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = b.size();

  SolveResult res;
  res.x.assign(n, 0.0);
  SolveReport& rep = res.report;
  const double beta = norm(b);
  rep.residual_history.push_back(beta);
  if (beta == 0.0) {
    rep.status = SolveStatus::converged;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  }

  const auto maxit = static_cast<std::size_t>(opt.maxit);
  std::vector<std::vector<double>> v, z;
  std::vector<std::vector<double>> h;  // h[j] = column j, length j+2
  std::vector<double> cs, sn, g{beta};
  v.emplace_back(b.begin(), b.end());
  for (double& x : v[0]) x /= beta;

  std::vector<double> w(n);
  std::size_t j = 0;
  rep.status = SolveStatus::max_iterations;
  while (j < maxit) {
    std::vector<double> zj(n);
    m(v[j], zj);
    a(zj, w);
    if (flexible || opt.record_arnoldi) z.push_back(std::move(zj));

    std::vector<double> col(j + 2, 0.0);
    const double before = norm(w);
    for (std::size_t i = 0; i <= j; ++i) {
      col[i] = dot(w, v[i]);
      axpy(-col[i], v[i], w);
    }
    double hn = norm(w);
    if (hn < before / std::sqrt(2.0)) {
      for (std::size_t i = 0; i <= j; ++i) {
        const double c = dot(w, v[i]);
        col[i] += c;
        axpy(-c, v[i], w);
      }
      hn = norm(w);
    }
    col[j + 1] = hn;
    h.push_back(col);

    // Rotate the new column into upper triangular form.
    std::vector<double>& r = h.back();
    std::vector<double> rc = col;
    for (std::size_t i = 0; i < j; ++i) {
      const double t = cs[i] * rc[i] + sn[i] * rc[i + 1];
      rc[i + 1] = -sn[i] * rc[i] + cs[i] * rc[i + 1];
      rc[i] = t;
    }
    const double denom = std::hypot(rc[j], rc[j + 1]);
    const double c = denom == 0.0 ? 1.0 : rc[j] / denom;
    const double s = denom == 0.0 ? 0.0 : rc[j + 1] / denom;
    cs.push_back(c);
    sn.push_back(s);
    rc[j] = denom;
    rc[j + 1] = 0.0;
    g.push_back(-s * g[j]);
    g[j] = c * g[j];
    r.swap(rc);  // h keeps the rotated column; rc holds the raw one
    if (opt.record_arnoldi) {
      if (!res.arnoldi) res.arnoldi.emplace();
      res.arnoldi->h.push_back(rc);
    }

    ++j;
    const double resid = std::fabs(g[j]);
    rep.residual_history.push_back(resid);
    if (hn > 0.0) {
      std::vector<double> next(w);
      for (double& x : next) x /= hn;
      v.push_back(std::move(next));
    }
    if (resid <= opt.tol * beta) {
      rep.status = SolveStatus::converged;
      break;
    }
    if (hn == 0.0) {
      rep.status = SolveStatus::breakdown;
      break;
    }
  }
  rep.iterations = static_cast<int>(j);

  // Back substitution on the rotated Hessenberg matrix.
  std::vector<double> y(j, 0.0);
  for (std::size_t i = j; i-- > 0;) {
    double s = g[i];
    for (std::size_t k = i + 1; k < j; ++k) s -= h[k][i] * y[k];
    y[i] = h[i][i] == 0.0 ? 0.0 : s / h[i][i];
  }
  if (flexible) {
    for (std::size_t i = 0; i < j; ++i) axpy(y[i], z[i], res.x);
  } else {
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 0; i < j; ++i) axpy(y[i], v[i], u);
    m(u, res.x);
  }

  std::vector<double> ax(n);
  a(res.x, ax);
  double rr = 0.0;
  for (std::size_t i = 0; i < n; ++i) rr += (b[i] - ax[i]) * (b[i] - ax[i]);
  rep.final_relative_residual = std::sqrt(rr) / beta;

  if (opt.record_arnoldi) {
    res.arnoldi->v = v;
    res.arnoldi->z = z;
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace

SolveResult fgmres(const LinearMap& a, const LinearMap& m, std::span<const double> b, const KrylovOptions& opt) {
  return run(a, m, b, opt, true);
}

SolveResult gmres(const LinearMap& a, const LinearMap& m, std::span<const double> b, const KrylovOptions& opt) {
  return run(a, m, b, opt, false);
}

}  // namespace tcfem
