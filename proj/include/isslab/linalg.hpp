// Dense linear algebra kernels for small systems (n <= 512): matrix
// exponential, symmetric eigensolver, induced 2-norm, quadrature helpers.
// Everything is plain double precision with row-major storage.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace isslab {

using Vec = std::vector<double>;

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return a_.empty(); }

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a);
Mat operator*(const Mat& a, const Mat& b);
Vec operator*(const Mat& a, const Vec& x);

Mat transpose(const Mat& a);

// Vector helpers.
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& x);
Vec axpy(double a, const Vec& x, const Vec& y);  // a*x + y
Vec scale(double a, Vec x);

double frobenius_norm(const Mat& a);
double max_abs(const Mat& a);

// Induced 2-norm by power iteration on A^T A (fixed iteration budget,
// deterministic start vector).
double operator_norm2(const Mat& a, int iterations = 30, double tol = 1e-10);

// Matrix exponential, scaling and squaring with a Pade(13) approximant.
Mat expm(const Mat& a);

// All eigenvalues of a symmetric matrix, ascending. Householder
// tridiagonalization followed by implicit QL with Wilkinson shifts.
Vec symmetric_eigenvalues(Mat a);

// Solve A x = b by partial-pivot LU. Throws on (numerically) singular A.
Vec solve_linear(Mat a, Vec b);

// Composite Simpson on a uniform grid; n_intervals is made even internally.
double simpson(const std::function<double(double)>& f, double a, double b,
               int n_intervals);

// Adaptive Simpson with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 30);

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace isslab
