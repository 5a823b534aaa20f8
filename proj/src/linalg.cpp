#include "isslab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace isslab {

Mat& Mat::operator+=(const Mat& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "Mat+=: shape mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  require(rows_ == o.rows_ && cols_ == o.cols_, "Mat-=: shape mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : a_) v *= s;
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
  require(a.cols() == b.rows(), "Mat*: shape mismatch");
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vec operator*(const Mat& a, const Vec& x) {
  require(a.cols() == x.size(), "Mat*Vec: shape mismatch");
  Vec y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double dot(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

Vec axpy(double a, const Vec& x, const Vec& y) {
  require(x.size() == y.size(), "axpy: size mismatch");
  Vec z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = a * x[i] + y[i];
  return z;
}

Vec scale(double a, Vec x) {
  for (double& v : x) v *= a;
  return x;
}

double frobenius_norm(const Mat& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double operator_norm2(const Mat& a, int iterations, double tol) {
  require(a.rows() > 0 && a.cols() > 0, "operator_norm2: empty matrix");
  const std::size_t n = a.cols();
  // Deterministic, non-degenerate start vector.
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.3 * std::sin(1.7 * double(i + 1));
  double nv = norm2(v);
  for (double& x : v) x /= nv;

  const Mat at = transpose(a);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vec w = at * (a * v);
    double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    for (double& x : w) x /= nw;
    double lam = dot(w, at * (a * w));
    if (it > 0 && std::abs(lam - lambda) <= tol * std::max(1.0, lam)) {
      lambda = lam;
      break;
    }
    lambda = lam;
    v = std::move(w);
  }
  return std::sqrt(std::max(0.0, lambda));
}

namespace {

double one_norm(const Mat& a) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::abs(a(i, j));
    m = std::max(m, s);
  }
  return m;
}

}  // namespace

Mat expm(const Mat& a) {
  require(a.rows() == a.cols(), "expm: square matrix required");
  const std::size_t n = a.rows();
  // Pade(13) coefficients.
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  const double theta13 = 5.371920351148152;
  double nrm = one_norm(a);
  int squarings = 0;
  Mat as = a;
  if (nrm > theta13) {
    squarings = std::max(0, int(std::ceil(std::log2(nrm / theta13))));
    as *= std::ldexp(1.0, -squarings);
  }

  const Mat I = Mat::identity(n);
  Mat a2 = as * as;
  Mat a4 = a2 * a2;
  Mat a6 = a2 * a4;

  Mat u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
  Mat u = as * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * I);
  Mat v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
  Mat v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * I;

  // Solve (V-U) X = (V+U) column by column.
  Mat lhs = v - u;
  Mat rhs = v + u;
  Mat x(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vec col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = rhs(i, j);
    Vec sol = solve_linear(lhs, col);
    for (std::size_t i = 0; i < n; ++i) x(i, j) = sol[i];
  }
  for (int s = 0; s < squarings; ++s) x = x * x;
  return x;
}

Vec symmetric_eigenvalues(Mat a) {
  require(a.rows() == a.cols(), "symmetric_eigenvalues: square matrix required");
  const std::size_t n = a.rows();
  if (n == 0) return {};
  Vec d(n, 0.0), e(n, 0.0);

  // Householder reduction to tridiagonal form (values only, no vectors).
  for (std::size_t i = n - 1; i >= 1; --i) {
    std::size_t l = i - 1;
    double h = 0.0, s = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) s += std::abs(a(i, k));
      if (s == 0.0) {
        e[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= s;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = s * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k)
            a(j, k) -= f * e[k] + g * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);

  // Implicit QL with Wilkinson-style shifts on the tridiagonal (d, e).
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 + 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 60)
          throw std::runtime_error("symmetric_eigenvalues: QL did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

Vec solve_linear(Mat a, Vec b) {
  require(a.rows() == a.cols() && a.rows() == b.size(), "solve_linear: shape mismatch");
  const std::size_t n = a.rows();
  std::vector<std::size_t> piv(n);
  for (std::size_t i = 0; i < n; ++i) piv[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        p = i;
      }
    }
    if (best < 1e-300) throw std::runtime_error("solve_linear: singular matrix");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = a(i, k) / a(k, k);
      a(i, k) = 0.0;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

double simpson(const std::function<double(double)>& f, double a, double b,
               int n_intervals) {
  if (a == b) return 0.0;
  int n = std::max(2, n_intervals);
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

namespace {

double adsimp_rec(const std::function<double(double)>& f, double a, double b,
                  double fa, double fm, double fb, double whole, double tol,
                  int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adsimp_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adsimp_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adsimp_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace isslab
