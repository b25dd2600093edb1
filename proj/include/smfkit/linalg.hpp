#ifndef SMFKIT_LINALG_HPP
#define SMFKIT_LINALG_HPP

#include <complex>
#include <random>
#include <stdexcept>

#include "smfkit/matrix.hpp"

namespace smfkit {

// thrown when an iterative routine fails to converge within its cap
class numerical_error : public std::runtime_error {
  public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// m = u * diag(s) * v^T with s sorted descending, u: rows x cols, v: cols x cols.
// v is always a full orthogonal basis; columns of u paired with zero singular
// values are zero.
struct SvdResult {
    Matrix u;
    Vec s;
    Matrix v;
};

SvdResult svd(const Matrix& m);

// default tolerance: max(rows, cols) * eps * sigma_max
double rank_tolerance(const Matrix& m, const Vec& singular_values);
std::size_t rank(const Matrix& m);

// largest singular value (0 for empty matrices)
double norm_two(const Matrix& m);

// Moore-Penrose pseudoinverse via SVD
Matrix pinv(const Matrix& m);

// orthonormal basis of the null space, cols x (cols - rank); KtK = I
Matrix kernel_basis(const Matrix& m);

// all eigenvalues of a square matrix (Hessenberg reduction + shifted QR)
std::vector<std::complex<double>> eigenvalues(const Matrix& m);

double spectral_radius(const Matrix& m);

enum class MatrixNorm { two, inf };

// { ||f^0||, ||f^1||, ..., ||f^k_max|| }
Vec matrix_power_norm_seq(const Matrix& f, MatrixNorm which, std::size_t k_max);

// solve a x = b for square nonsingular a (Householder QR)
Vec solve(const Matrix& a, const Vec& b);
Matrix inverse(const Matrix& a);

Matrix matrix_power(const Matrix& a, std::size_t k);

// Haar-ish random orthogonal matrix: QR of a Gaussian sample
Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng);

}  // namespace smfkit

#endif
