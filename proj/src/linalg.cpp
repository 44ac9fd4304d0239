#include "matsing/linalg.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "matsing/error.hpp"

namespace matsing {

Complex complex_infinity() { return {std::numeric_limits<double>::infinity(), 0.0}; }

bool is_infinite(Complex z) { return std::isinf(z.real()) || std::isinf(z.imag()); }

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream msg;
    msg << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(msg.str());
  }
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw DomainError(std::string(what) + ": matrix has non-finite entries");
  }
}

std::vector<Complex> eigenvalues(const ComplexMatrix& m) {
  require_square(m, "eigenvalues");
  require_finite(m, "eigenvalues");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver;
  solver.compute(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigenvalues: shifted QR did not converge for a " << m.rows() << "x" << m.cols()
        << " matrix (iteration cap " << solver.getMaxIterations() << " per eigenvalue, |M|_max = "
        << max_abs(m) << ")";
    throw SolverError(msg.str());
  }
  const auto& values = solver.eigenvalues();
  return {values.data(), values.data() + values.size()};
}

std::vector<Complex> generalized_eigenvalues(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "generalized_eigenvalues(A)");
  require_square(b, "generalized_eigenvalues(B)");
  if (a.rows() != b.rows()) {
    std::ostringstream msg;
    msg << "generalized_eigenvalues: A is " << a.rows() << "x" << a.cols() << " but B is " << b.rows()
        << "x" << b.cols();
    throw DimensionError(msg.str());
  }
  require_finite(a, "generalized_eigenvalues(A)");
  require_finite(b, "generalized_eigenvalues(B)");

  const lapack_int n = static_cast<lapack_int>(a.rows());
  // zggev overwrites its inputs with the generalized Schur form.
  ComplexMatrix aa = a;
  ComplexMatrix bb = b;
  std::vector<Complex> alpha(n);
  std::vector<Complex> beta(n);
  Complex dummy{};
  const lapack_int info = LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', 'N', n, aa.data(), n, bb.data(), n,
                                        alpha.data(), beta.data(), &dummy, 1, &dummy, 1);
  if (info != 0) {
    std::ostringstream msg;
    msg << "generalized_eigenvalues: QZ iteration failed (zggev info = " << info << ") for a " << n
        << "x" << n << " pencil";
    throw SolverError(msg.str());
  }

  const double eps = std::numeric_limits<double>::epsilon();
  const double a_tol = 64.0 * eps * std::max(a.norm(), std::numeric_limits<double>::min());
  const double b_tol = 64.0 * eps * std::max(b.norm(), std::numeric_limits<double>::min());
  std::vector<Complex> out(n);
  for (lapack_int i = 0; i < n; ++i) {
    const bool alpha_zero = std::abs(alpha[i]) <= a_tol;
    const bool beta_zero = std::abs(beta[i]) <= b_tol;
    if (alpha_zero && beta_zero) {
      throw DegeneratePencilError("generalized_eigenvalues: A and B share a null direction");
    }
    out[i] = beta_zero ? complex_infinity() : alpha[i] / beta[i];
  }
  return out;
}

SchurForm schur_decompose(const ComplexMatrix& m) {
  require_square(m, "schur_decompose");
  require_finite(m, "schur_decompose");
  Eigen::ComplexSchur<ComplexMatrix> schur(m, /*computeU=*/true);
  if (schur.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "schur_decompose: shifted QR did not converge for a " << m.rows() << "x" << m.cols()
        << " matrix (iteration cap " << schur.getMaxIterations() << ")";
    throw SolverError(msg.str());
  }
  return {schur.matrixU(), schur.matrixT()};
}

std::vector<Complex> char_poly_coefficients(const ComplexMatrix& m) {
  require_square(m, "char_poly_coefficients");
  require_finite(m, "char_poly_coefficients");
  const Eigen::Index n = m.rows();
  const ComplexMatrix h = Eigen::HessenbergDecomposition<ComplexMatrix>(m).matrixH();

  // p[i] = det(zI + H_i) for the leading i x i block, expanded along the last
  // column of the Hessenberg matrix:
  //   p_i = (z + h_ii) p_{i-1} + sum_m (-1)^m h_{i-m,i} (prod of m subdiagonals) p_{i-m-1}.
  std::vector<std::vector<Complex>> p(n + 1);
  p[0] = {Complex{1.0, 0.0}};
  for (Eigen::Index i = 1; i <= n; ++i) {
    const Eigen::Index col = i - 1;
    std::vector<Complex> next(i + 1, Complex{});
    const auto& prev = p[i - 1];
    for (std::size_t d = 0; d < prev.size(); ++d) {
      next[d + 1] += prev[d];
      next[d] += h(col, col) * prev[d];
    }
    Complex subdiag_product{1.0, 0.0};
    double sign = 1.0;
    for (Eigen::Index step = 1; step < i; ++step) {
      subdiag_product *= h(col - step + 1, col - step);
      sign = -sign;
      const Complex weight = sign * h(col - step, col) * subdiag_product;
      const auto& lower = p[i - step - 1];
      for (std::size_t d = 0; d < lower.size(); ++d) next[d] += weight * lower[d];
    }
    p[i] = std::move(next);
  }
  return p[n];
}

double smallest_singular_value(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(m);
  return svd.singularValues().minCoeff();
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      re.push_back(m(i, j).real());
      im.push_back(m(i, j).imag());
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (rows <= 0 || cols <= 0) throw DimensionError("matrix_from_json: rows and cols must be positive");
  const auto expected = static_cast<std::size_t>(rows * cols);
  if (re.size() != expected || im.size() != expected) {
    std::ostringstream msg;
    msg << "matrix_from_json: expected " << expected << " entries, got re=" << re.size()
        << " im=" << im.size();
    throw DimensionError(msg.str());
  }
  ComplexMatrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index jj = 0; jj < cols; ++jj, ++k) {
      m(i, jj) = {re[k].get<double>(), im[k].get<double>()};
    }
  }
  require_finite(m, "matrix_from_json");
  return m;
}

}  // namespace matsing
