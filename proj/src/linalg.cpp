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

#include "cfobe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfobe {

CVector vec(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("vec: input must be square, got " + std::to_string(m.rows()) +
                                "x" + std::to_string(m.cols()));
  }
  // Eigen storage is column-major, so the raw buffer is already vec(m).
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvec(const CVector& v, Eigen::Index n) {
  if (n <= 0 || v.size() != n * n) {
    throw std::invalid_argument("unvec: length " + std::to_string(v.size()) +
                                " is not n*n for n=" + std::to_string(n));
  }
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

bool is_hermitian(const CMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

namespace {

CMatrix loaded(const CMatrix& a, double loading) {
  const Eigen::Index n = a.rows();
  const double mean_diag = a.diagonal().real().sum() / static_cast<double>(n);
  CMatrix out = hermitian_part(a);
  out.diagonal().array() += loading * mean_diag;
  return out;
}

// Spectral condition number of a Hermitian matrix; infinity unless PD.
double hermitian_condition(const CMatrix& a) {
  const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(a, Eigen::EigenvaluesOnly).eigenvalues();
  if (ev.size() == 0 || !(ev.minCoeff() > 0.0)) return std::numeric_limits<double>::infinity();
  return ev.maxCoeff() / ev.minCoeff();
}

}  // namespace

CVector hpd_solve(const CMatrix& a, const CVector& b, double loading) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw std::invalid_argument("hpd_solve: dimension mismatch");
  }
  if (loading < 0.0) throw std::invalid_argument("hpd_solve: negative loading");
  if (!is_hermitian(a, 1e-9)) throw std::invalid_argument("hpd_solve: matrix is not Hermitian");

  const CMatrix al = loaded(a, loading);
  Eigen::LLT<CMatrix> llt(al);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("hpd_solve: matrix is not positive definite after loading",
                         hermitian_condition(al));
  }
  CVector x = llt.solve(b);
  const double bnorm = b.norm();
  const double resid = (al * x - b).norm();
  if (!x.allFinite() || (bnorm > 0.0 && resid > 1e-8 * bnorm)) {
    throw NumericalError("hpd_solve: solve degraded (relative residual " +
                             std::to_string(bnorm > 0.0 ? resid / bnorm : resid) + ")",
                         hermitian_condition(al));
  }
  return x;
}

RayleighQuotientMax rayleigh_quotient_max(const CMatrix& a, const CVector& b, double loading) {
  CVector x = hpd_solve(a, b, loading);
  const double value = std::max(0.0, b.dot(x).real());  // b^H x
  return {std::move(x), value};
}

RayleighQuotientMax rayleigh_quotient_max_scaled(const CMatrix& a, const CVector& b,
                                                 double loading) {
  RVector d = a.diagonal().real();
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = d[i] > 0.0 ? 1.0 / std::sqrt(d[i]) : 1.0;
  const CMatrix scaled = d.asDiagonal() * a * d.asDiagonal();
  auto r = rayleigh_quotient_max(scaled, d.asDiagonal() * b, loading);
  r.x_star = d.asDiagonal() * r.x_star;
  return r;
}

double rayleigh_quotient(const CMatrix& a, const CVector& b, const CVector& x) {
  const double den = x.dot(a * x).real();
  if (den <= 0.0) return 0.0;
  return std::norm(x.dot(b)) / den;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x9e3779b9u};
  engine_.seed(seq);
}

double RngStream::uniform() { return std::generate_canonical<double, 53>(engine_); }

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::normal() { return normal_(engine_); }

cdouble RngStream::cnormal() {
  constexpr double kHalf = 0.70710678118654752440;
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {kHalf * re, kHalf * im};
}

CVector RngStream::cnormal_vector(Eigen::Index n) {
  CVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = cnormal();
  return z;
}

std::uint64_t RngStream::next_u64() { return engine_(); }

CMatrix psd_factor(const CMatrix& cov) {
  if (cov.rows() != cov.cols()) throw std::invalid_argument("psd_factor: non-square covariance");
  if (!is_hermitian(cov, 1e-9)) throw std::invalid_argument("psd_factor: covariance not Hermitian");
  const Eigen::Index n = cov.rows();
  if (cov.cwiseAbs().maxCoeff() == 0.0) return CMatrix::Zero(n, n);

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(cov));
  const double tr = std::max(0.0, cov.diagonal().real().sum());
  RVector lambda = eig.eigenvalues();
  if (lambda.minCoeff() < -1e-10 * tr) {
    throw std::invalid_argument("psd_factor: covariance is indefinite (min eigenvalue " +
                                std::to_string(lambda.minCoeff()) + ")");
  }
  lambda = lambda.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * lambda.asDiagonal();
}

CMatrix psd_project(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(m));
  const RVector lambda = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().adjoint();
}

CVector sample_cscg(const CVector& mean, const CMatrix& cov, RngStream& rng) {
  if (cov.rows() != mean.size()) throw std::invalid_argument("sample_cscg: dimension mismatch");
  return sample_cscg_factored(mean, psd_factor(cov), rng);
}

CVector sample_cscg_factored(const CVector& mean, const CMatrix& factor, RngStream& rng) {
  return mean + factor * rng.cnormal_vector(factor.cols());
}

CMatrix random_cmatrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  CMatrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = rng.cnormal();
  return out;
}

CMatrix random_hpd(Eigen::Index n, RngStream& rng, double shift) {
  const CMatrix b = random_cmatrix(n, n, rng);
  CMatrix out = b * b.adjoint();
  out.diagonal().array() += shift;
  return out;
}

}  // namespace cfobe
