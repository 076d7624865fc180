// Copyright 2026 The qmtest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qmtest {

using cplx = std::complex<double>;
/// Dense column-major complex matrix. Every operator in the library is one of these.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr const char *kLibraryVersion = "0.1.0";
inline constexpr double kDefaultCompletenessTol = 1e-8;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct CompletenessViolation : Error {
    using Error::Error;
};
struct ZeroOperator : Error {
    using Error::Error;
};
struct DegenerateLabel : Error {
    using Error::Error;
};
struct NotPowerOfDimension : Error {
    using Error::Error;
};
struct SqrtFailure : Error {
    using Error::Error;
};
struct VerificationFailure : Error {
    using Error::Error;
};
struct GramIllConditioned : Error {
    using Error::Error;
};

/// ceil(x), except that x within a relative 1e-12 of an integer rounds to that integer.
inline std::int64_t ceil_tol(double x) {
    double r = std::round(x);
    if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) {
        return static_cast<std::int64_t>(r);
    }
    return static_cast<std::int64_t>(std::ceil(x));
}

/// floor(x) with the same integer snapping as ceil_tol.
inline std::int64_t floor_tol(double x) {
    double r = std::round(x);
    if (std::abs(x - r) <= 1e-12 * std::max(1.0, std::abs(x))) {
        return static_cast<std::int64_t>(r);
    }
    return static_cast<std::int64_t>(std::floor(x));
}

inline void require_square(const ComplexMatrix &a, const char *what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw DimensionMismatch(std::string(what) + ": operator must be a non-empty square matrix");
    }
}

inline void require_same_dim(const ComplexMatrix &a, const ComplexMatrix &b, const char *what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch(std::string(what) + ": dimension mismatch (" + std::to_string(a.rows()) + " vs " +
                                std::to_string(b.rows()) + ")");
    }
}

inline double frobenius_norm(const ComplexMatrix &a) {
    return a.norm();
}

/// Hilbert-Schmidt inner product tr(A^dagger B).
inline cplx hs_inner(const ComplexMatrix &a, const ComplexMatrix &b) {
    require_same_dim(a, b, "hs_inner");
    // tr(A^dagger B) = sum_ij conj(A_ij) B_ij
    return (a.conjugate().cwiseProduct(b)).sum();
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// A (x) I_ancilla.
inline ComplexMatrix tensor_identity(const ComplexMatrix &a, Eigen::Index ancilla_dim) {
    return kron(a, ComplexMatrix::Identity(ancilla_dim, ancilla_dim));
}

struct PureState {
    ComplexVector amplitudes;
    bool normalized = false;

    Eigen::Index dim() const {
        return amplitudes.size();
    }
    double norm() const {
        return amplitudes.norm();
    }
};

inline PureState make_normalized(ComplexVector v) {
    double nrm = v.norm();
    if (nrm == 0.0) {
        throw ZeroOperator("cannot normalize the zero vector");
    }
    v /= nrm;
    return PureState{std::move(v), true};
}

struct OutcomeDistribution {
    std::vector<double> probs;

    std::size_t size() const {
        return probs.size();
    }
    double operator[](std::size_t i) const {
        return i < probs.size() ? probs[i] : 0.0;
    }
    double total() const {
        double s = 0.0;
        for (double p : probs) {
            s += p;
        }
        return s;
    }
    bool is_normalized(double tol = 1e-10) const {
        for (double p : probs) {
            if (!(p >= -tol) || !std::isfinite(p)) {
                return false;
            }
        }
        return std::abs(total() - 1.0) <= tol;
    }
};

/// An ordered list of measurement operators satisfying sum_i M_i^dagger M_i = I.
/// Operators beyond size() are the implicit zero padding.
class Measurement {
  public:
    Measurement() = default;

    static Measurement validate(std::vector<ComplexMatrix> ops, double tol = kDefaultCompletenessTol) {
        if (ops.empty()) {
            throw DimensionMismatch("measurement must have at least one operator");
        }
        const Eigen::Index dim = ops.front().rows();
        ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
        for (const auto &op : ops) {
            require_square(op, "validate_measurement");
            if (op.rows() != dim) {
                throw DimensionMismatch("validate_measurement: operators do not share a dimension");
            }
            if (!op.allFinite()) {
                throw Error("validate_measurement: operator has non-finite entries");
            }
            sum.noalias() += op.adjoint() * op;
        }
        sum -= ComplexMatrix::Identity(dim, dim);
        double residual = sum.norm();
        if (!(residual <= tol)) {
            throw CompletenessViolation("completeness residual " + std::to_string(residual) + " exceeds tolerance " +
                                        std::to_string(tol));
        }
        Measurement m;
        m.dim_ = dim;
        m.ops_ = std::move(ops);
        m.residual_ = residual;
        return m;
    }

    Eigen::Index dim() const {
        return dim_;
    }
    std::size_t size() const {
        return ops_.size();
    }
    const ComplexMatrix &operator[](std::size_t i) const {
        return ops_.at(i);
    }
    /// Operator i, or the zero operator for i >= size().
    ComplexMatrix op_or_zero(std::size_t i) const {
        if (i < ops_.size()) {
            return ops_[i];
        }
        return ComplexMatrix::Zero(dim_, dim_);
    }
    const std::vector<ComplexMatrix> &operators() const {
        return ops_;
    }
    double completeness_residual() const {
        return residual_;
    }

  private:
    Eigen::Index dim_ = 0;
    std::vector<ComplexMatrix> ops_;
    double residual_ = 0.0;
};

inline Measurement validate_measurement(std::vector<ComplexMatrix> ops, double tol = kDefaultCompletenessTol) {
    return Measurement::validate(std::move(ops), tol);
}

/// M (x) I on an appended ancilla.
inline Measurement with_ancilla(const Measurement &m, Eigen::Index ancilla_dim) {
    std::vector<ComplexMatrix> ops;
    ops.reserve(m.size());
    for (const auto &op : m.operators()) {
        ops.push_back(tensor_identity(op, ancilla_dim));
    }
    return Measurement::validate(std::move(ops));
}

struct PureMeasurementResult {
    OutcomeDistribution distribution;
    /// Normalized post-measurement state per outcome; empty for zero-probability outcomes.
    std::vector<std::optional<PureState>> post_states;
    std::vector<bool> zero_probability;
};

struct MixedMeasurementResult {
    OutcomeDistribution distribution;
    std::vector<std::optional<ComplexMatrix>> post_states;
    std::vector<bool> zero_probability;
};

inline constexpr double kZeroProbability = 1e-300;

/// Applies M to the first tensor factor of |psi>, whose remaining factor has dimension psi.dim() / M.dim().
inline PureMeasurementResult apply_measurement(const Measurement &m, const PureState &psi) {
    const Eigen::Index dim = m.dim();
    if (psi.dim() % dim != 0 || psi.dim() == 0) {
        throw DimensionMismatch("apply_measurement: state dimension is not a multiple of the measurement dimension");
    }
    const Eigen::Index anc = psi.dim() / dim;
    // Amplitudes of |psi> indexed (i * anc + j) form the dim x anc matrix Psi; (M (x) I)|psi> is M * Psi.
    ComplexMatrix psi_dense(dim, anc);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < anc; ++j) {
            psi_dense(i, j) = psi.amplitudes(i * anc + j);
        }
    }
    PureMeasurementResult out;
    const double norm2 = psi.amplitudes.squaredNorm();
    for (const auto &op : m.operators()) {
        ComplexMatrix post = op * psi_dense;
        double p = post.squaredNorm() / norm2;
        out.distribution.probs.push_back(p);
        if (p <= kZeroProbability) {
            out.post_states.emplace_back(std::nullopt);
            out.zero_probability.push_back(true);
            continue;
        }
        ComplexVector v(dim * anc);
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < anc; ++j) {
                v(i * anc + j) = post(i, j);
            }
        }
        out.post_states.emplace_back(make_normalized(std::move(v)));
        out.zero_probability.push_back(false);
    }
    return out;
}

/// Density-matrix form: p(i) = tr(M_i rho M_i^dagger), rho_i = M_i rho M_i^dagger / p(i).
inline MixedMeasurementResult apply_measurement(const Measurement &m, const ComplexMatrix &rho) {
    require_square(rho, "apply_measurement");
    if (rho.rows() != m.dim()) {
        throw DimensionMismatch("apply_measurement: density matrix dimension does not match the measurement");
    }
    MixedMeasurementResult out;
    for (const auto &op : m.operators()) {
        ComplexMatrix post = op * rho * op.adjoint();
        double p = post.trace().real();
        out.distribution.probs.push_back(p);
        if (p <= kZeroProbability) {
            out.post_states.emplace_back(std::nullopt);
            out.zero_probability.push_back(true);
        } else {
            out.post_states.emplace_back(post / p);
            out.zero_probability.push_back(false);
        }
    }
    return out;
}

/// (1/sqrt(D)) sum_i |i>|i> on dimension D^2.
inline PureState maximally_entangled(Eigen::Index dim) {
    if (dim < 1) {
        throw DimensionMismatch("maximally_entangled: dimension must be positive");
    }
    ComplexVector v = ComplexVector::Zero(dim * dim);
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) {
        v(i * dim + i) = amp;
    }
    return PureState{std::move(v), true};
}

/// |v(A)> = (A (x) I)|Phi+_D>; entry (i, j) is A_ij / sqrt(D).
inline PureState choi_vector(const ComplexMatrix &a) {
    require_square(a, "choi_vector");
    const Eigen::Index dim = a.rows();
    ComplexVector v(dim * dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            v(i * dim + j) = a(i, j) * scale;
        }
    }
    return PureState{std::move(v), false};
}

/// p(A) = ||A||_F^2 / D, the probability of outcome A on the first half of |Phi+_D>.
inline double choi_prob(const ComplexMatrix &a) {
    require_square(a, "choi_prob");
    return a.squaredNorm() / static_cast<double>(a.rows());
}

inline PureState normalized_choi(const ComplexMatrix &a) {
    if (a.norm() == 0.0) {
        throw ZeroOperator("normalized_choi: operator is zero");
    }
    return make_normalized(choi_vector(a).amplitudes);
}

/// <v~(A)|v~(B)> = <A,B> / (||A|| ||B||).
inline cplx normalized_choi_overlap(const ComplexMatrix &a, const ComplexMatrix &b) {
    double na = a.norm();
    double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        throw ZeroOperator("normalized_choi_overlap: operator is zero");
    }
    return hs_inner(a, b) / (na * nb);
}

/// Returns N' in [N] with <M_i, N'_i> real and non-negative.
inline Measurement canonical_phase_align(const Measurement &m, const Measurement &n) {
    if (m.dim() != n.dim()) {
        throw DimensionMismatch("canonical_phase_align: dimension mismatch");
    }
    std::vector<ComplexMatrix> ops;
    ops.reserve(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (i >= m.size()) {
            ops.push_back(n[i]);
            continue;
        }
        cplx ip = hs_inner(m[i], n[i]);
        if (std::abs(ip) == 0.0) {
            ops.push_back(n[i]);
        } else {
            ops.push_back(n[i] * std::polar(1.0, -std::arg(ip)));
        }
    }
    return Measurement::validate(std::move(ops), std::max(1e-6, 2 * n.completeness_residual()));
}

struct PsdSqrt {
    ComplexMatrix root;
    /// Largest magnitude of a negative eigenvalue that was clamped to zero.
    double clamped = 0.0;
};

/// Square root of a Hermitian positive semidefinite matrix; eigenvalues below -tol are an error.
inline PsdSqrt psd_sqrt(const ComplexMatrix &a, double tol = 1e-8) {
    require_square(a, "psd_sqrt");
    ComplexMatrix herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm);
    if (es.info() != Eigen::Success) {
        throw SqrtFailure("psd_sqrt: eigendecomposition failed");
    }
    Eigen::VectorXd ev = es.eigenvalues();
    PsdSqrt out;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < 0.0) {
            if (ev(i) < -tol) {
                throw SqrtFailure("psd_sqrt: eigenvalue " + std::to_string(ev(i)) + " is below -" +
                                  std::to_string(tol));
            }
            out.clamped = std::max(out.clamped, -ev(i));
            ev(i) = 0.0;
        }
        ev(i) = std::sqrt(ev(i));
    }
    out.root = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    return out;
}

} // namespace qmtest
