#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace matsing {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Distinguished value standing for the point at infinity of the Riemann sphere.
Complex complex_infinity();
bool is_infinite(Complex z);

/// Largest entry modulus.
double max_abs(const ComplexMatrix& m);

/// Throws DimensionError when `m` is not square; `what` names the operand.
void require_square(const ComplexMatrix& m, const char* what);

/// Throws DomainError when any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what);

/// Eigenvalues with multiplicity, from a Hessenberg reduction followed by shifted QR.
///
/// Throws DimensionError for non-square input and SolverError when the QR
/// iteration fails to converge.
std::vector<Complex> eigenvalues(const ComplexMatrix& m);

/// Solutions z of det(zB - A) = 0, computed with the QZ algorithm.
///
/// Values at infinity (B singular) are returned as complex_infinity(). A pencil
/// where A and B share a null vector throws DegeneratePencilError.
std::vector<Complex> generalized_eigenvalues(const ComplexMatrix& a, const ComplexMatrix& b);

struct SchurForm {
  ComplexMatrix unitary;     // U
  ComplexMatrix triangular;  // T, with M = U T U*
};

SchurForm schur_decompose(const ComplexMatrix& m);

/// Coefficients a_0..a_n of det(zI + M) in ascending powers (a_n = 1, a_0 = det M).
///
/// Uses a unitary Hessenberg reduction and the Hessenberg determinant recurrence,
/// so no eigenvalues are involved.
std::vector<Complex> char_poly_coefficients(const ComplexMatrix& m);

/// Smallest singular value.
double smallest_singular_value(const ComplexMatrix& m);

/// {"rows":r,"cols":c,"re":[...],"im":[...]} with row-major entries.
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace matsing
