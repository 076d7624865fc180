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

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qmtest/core.hpp"

namespace qmtest {

/// Seeded 64-bit generator. Streams are derived from (master, stream, counter) so that
/// independent tasks never share a generator.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : Rng(seed, 0, 0) {}
    Rng(std::uint64_t master, std::uint64_t stream, std::uint64_t counter) {
        std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32)};
        engine_.seed(seq);
    }

    static Rng derive(std::uint64_t master, std::uint64_t stream, std::uint64_t counter = 0) {
        return Rng(master, stream, counter);
    }

    double uniform() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
    }
    double normal() {
        return std::normal_distribution<double>(0.0, 1.0)(engine_);
    }
    bool bernoulli(double p) {
        if (p <= 0.0) {
            return false;
        }
        if (p >= 1.0) {
            return true;
        }
        return uniform() < p;
    }
    std::uint64_t next() {
        return engine_();
    }
    std::mt19937_64 &engine() {
        return engine_;
    }

  private:
    std::mt19937_64 engine_;
};

/// Exact Binomial(trials, p) draw.
inline std::int64_t sample_binomial(std::int64_t trials, double p, Rng &rng) {
    if (trials <= 0 || p <= 0.0) {
        return 0;
    }
    if (p >= 1.0) {
        return trials;
    }
    std::binomial_distribution<std::int64_t> dist(trials, p);
    return dist(rng.engine());
}

/// Single categorical draw by inversion; probabilities need not be exactly normalized.
inline std::size_t sample_categorical(std::span<const double> probs, Rng &rng) {
    double total = 0.0;
    for (double p : probs) {
        total += std::max(p, 0.0);
    }
    double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        double p = std::max(probs[i], 0.0);
        if (p > 0.0) {
            last_nonzero = i;
        }
        acc += p;
        if (u < acc) {
            return i;
        }
    }
    return last_nonzero;
}

/// Exact Multinomial(trials, probs) via the conditional binomial chain.
inline std::vector<std::int64_t> sample_multinomial(std::int64_t trials, std::span<const double> probs, Rng &rng) {
    std::vector<std::int64_t> counts(probs.size(), 0);
    double remaining_mass = 0.0;
    for (double p : probs) {
        remaining_mass += std::max(p, 0.0);
    }
    std::int64_t remaining = trials;
    for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
        double p = std::max(probs[i], 0.0);
        if (p <= 0.0) {
            continue;
        }
        double cond = remaining_mass > 0.0 ? p / remaining_mass : 1.0;
        std::int64_t c = (cond >= 1.0) ? remaining : sample_binomial(remaining, cond, rng);
        counts[i] = c;
        remaining -= c;
        remaining_mass -= p;
    }
    if (remaining > 0) {
        // Rounding left mass unassigned; it belongs to the last category with positive probability.
        for (std::size_t i = probs.size(); i-- > 0;) {
            if (probs[i] > 0.0) {
                counts[i] += remaining;
                break;
            }
        }
    }
    return counts;
}

/// Haar-random pure state: normalized i.i.d. standard complex Gaussian vector.
inline PureState haar_random_state(Eigen::Index dim, Rng &rng) {
    if (dim < 1) {
        throw DimensionMismatch("haar_random_state: dimension must be positive");
    }
    ComplexVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        v(i) = cplx(rng.normal(), rng.normal());
    }
    return make_normalized(std::move(v));
}

inline ComplexMatrix random_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng &rng) {
    ComplexMatrix g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            g(i, j) = cplx(rng.normal(), rng.normal());
        }
    }
    return g;
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix with the R-diagonal phases fixed.
inline ComplexMatrix haar_random_unitary(Eigen::Index dim, Rng &rng) {
    ComplexMatrix g = random_gaussian_matrix(dim, dim, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < dim; ++i) {
        cplx d = r(i, i);
        double a = std::abs(d);
        if (a > 0.0) {
            q.col(i) *= d / a;
        }
    }
    return q;
}

/// Random measurement with `outcomes` operators on dimension `dim`: the blocks of a Haar isometry.
inline Measurement random_measurement(Eigen::Index dim, std::size_t outcomes, Rng &rng) {
    const Eigen::Index big = dim * static_cast<Eigen::Index>(outcomes);
    ComplexMatrix u = haar_random_unitary(big, rng);
    std::vector<ComplexMatrix> ops;
    ops.reserve(outcomes);
    for (std::size_t i = 0; i < outcomes; ++i) {
        ops.push_back(u.block(static_cast<Eigen::Index>(i) * dim, 0, dim, dim));
    }
    return Measurement::validate(std::move(ops));
}

/// Random Hermitian matrix from the Gaussian unitary ensemble, scaled to unit Frobenius norm.
inline ComplexMatrix random_hermitian(Eigen::Index dim, Rng &rng) {
    ComplexMatrix g = random_gaussian_matrix(dim, dim, rng);
    ComplexMatrix h = 0.5 * (g + g.adjoint());
    return h / h.norm();
}

/// exp(i t H) for Hermitian H.
inline ComplexMatrix unitary_exp(const ComplexMatrix &h, double t) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
    ComplexVector phases(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        phases(i) = std::polar(1.0, t * es.eigenvalues()(i));
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Measurement M_i = w_i G_i S^{-1/2} with S = sum_i w_i^2 G_i^dagger G_i and Gaussian G_i; unequal weights give
/// unequal outcome probabilities.
inline Measurement random_weighted_measurement(Eigen::Index dim, const std::vector<double> &weights, Rng &rng) {
    std::vector<ComplexMatrix> ops;
    ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
    for (double w : weights) {
        ops.push_back(w * random_gaussian_matrix(dim, dim, rng));
        s.noalias() += ops.back().adjoint() * ops.back();
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (s + s.adjoint()));
    Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
    ComplexMatrix root_inv = es.eigenvectors() * inv_sqrt.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    for (auto &op : ops) {
        op = op * root_inv;
    }
    return Measurement::validate(std::move(ops));
}

} // namespace qmtest
