// Copyright 2026 The cfobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cfobe {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Default relative diagonal loading applied before inverting statistics matrices.
inline constexpr double kDefaultLoading = 1e-10;

/// Thrown when a linear solve fails or degrades beyond tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}

  /// Reciprocal-condition based estimate of cond(A); infinity when singular.
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// Column-major stacking of a square matrix.
CVector vec(const CMatrix& m);

/// Inverse of vec(): reshapes a length n*n vector into an n-by-n matrix.
CMatrix unvec(const CVector& v, Eigen::Index n);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// True when m is square and |m(i,j) - conj(m(j,i))| <= rel_tol * max|m|.
bool is_hermitian(const CMatrix& m, double rel_tol = 1e-12);

/// Returns (m + m^H) / 2.
CMatrix hermitian_part(const CMatrix& m);

/// Solves (A + loading * tr(A)/dim * I) x = b for Hermitian A.
///
/// Throws std::invalid_argument when A is not Hermitian, and NumericalError
/// (carrying a condition estimate) when the loaded matrix is not positive
/// definite or the relative residual exceeds 1e-8.
CVector hpd_solve(const CMatrix& a, const CVector& b, double loading = kDefaultLoading);

struct RayleighQuotientMax {
  CVector x_star;  // (A + loading)^-1 b
  double value;    // b^H x_star
};

/// Maximizes |x^H b|^2 / (x^H A x) over nonzero x for Hermitian PD A.
RayleighQuotientMax rayleigh_quotient_max(const CMatrix& a, const CVector& b,
                                          double loading = kDefaultLoading);

/// Value of |x^H b|^2 / (x^H A x); zero when x^H A x vanishes.
/// Same maximizer, solved on the Jacobi-scaled system D^-1/2 A D^-1/2 so the
/// loading is relative to every diagonal entry rather than to their mean.
RayleighQuotientMax rayleigh_quotient_max_scaled(const CMatrix& a, const CVector& b,
                                                 double loading = kDefaultLoading);

double rayleigh_quotient(const CMatrix& a, const CVector& b, const CVector& x);

/// Reproducible random source keyed by (seed, stream id).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double uniform();                    // U[0, 1)
  double uniform(double lo, double hi);
  double normal();                     // N(0, 1)
  cdouble cnormal();                   // CN(0, 1): independent N(0, 1/2) parts
  CVector cnormal_vector(Eigen::Index n);
  std::uint64_t next_u64();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// PSD square-root factor L with L L^H = cov, via eigendecomposition.
///
/// Negative eigenvalues down to -1e-10 * tr(cov) are clipped to zero; more
/// negative ones raise std::invalid_argument.
CMatrix psd_factor(const CMatrix& cov);

/// Projects a Hermitian matrix onto the PSD cone (eigenvalues clipped at 0).
CMatrix psd_project(const CMatrix& m);

/// Draws mean + L z with z ~ CN(0, I) and L = psd_factor(cov).
CVector sample_cscg(const CVector& mean, const CMatrix& cov, RngStream& rng);

/// Same draw with a precomputed factor; hot loops should use this overload.
CVector sample_cscg_factored(const CVector& mean, const CMatrix& factor, RngStream& rng);

/// Random matrix with i.i.d. CN(0, 1) entries.
CMatrix random_cmatrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng);

/// Random Hermitian positive definite matrix B B^H + shift * I.
CMatrix random_hpd(Eigen::Index n, RngStream& rng, double shift = 0.1);

}  // namespace cfobe
