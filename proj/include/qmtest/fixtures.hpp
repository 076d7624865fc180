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

#include <cmath>
#include <cstdint>
#include <vector>

#include "qmtest/core.hpp"
#include "qmtest/metric.hpp"
#include "qmtest/pauli.hpp"
#include "qmtest/random.hpp"
#include "qmtest/schur.hpp"

namespace qmtest {

inline Measurement identity_measurement(Eigen::Index dim) {
    return Measurement::validate({ComplexMatrix::Identity(dim, dim)});
}

/// {|j><j|} for j = 0..dim-1.
inline Measurement computational_basis(Eigen::Index dim) {
    std::vector<ComplexMatrix> ops;
    for (Eigen::Index j = 0; j < dim; ++j) {
        ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
        p(j, j) = 1.0;
        ops.push_back(std::move(p));
    }
    return Measurement::validate(std::move(ops));
}

/// {Pi_lambda} in partitions() order.
inline Measurement isotypic_projectors(const SchurBasis &basis) {
    std::vector<ComplexMatrix> ops;
    for (std::size_t b = 0; b < basis.blocks.size(); ++b) {
        ops.push_back(isotypic_projector(basis, b));
    }
    return Measurement::validate(std::move(ops));
}

/// {U M_i U^dagger}.
inline Measurement conjugated(const Measurement &m, const ComplexMatrix &u) {
    std::vector<ComplexMatrix> ops;
    for (const auto &op : m.operators()) {
        ops.push_back(u * op * u.adjoint());
    }
    return Measurement::validate(std::move(ops));
}

/// Projective qubit measurement {(I + r.sigma)/2, (I - r.sigma)/2} along the normalized Bloch vector r.
inline Measurement bloch_projective(double rx, double ry, double rz) {
    const double len = std::sqrt(rx * rx + ry * ry + rz * rz);
    if (len == 0.0) {
        throw ZeroOperator("bloch_projective: zero Bloch vector");
    }
    ComplexMatrix s = (rx / len) * pauli_matrix(PauliLabel{2, 1, {1}, {0}}) +
                      (ry / len) * pauli_matrix(PauliLabel{2, 1, {1}, {1}}) +
                      (rz / len) * pauli_matrix(PauliLabel{2, 1, {0}, {1}});
    ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    return Measurement::validate({0.5 * (id + s), 0.5 * (id - s)});
}

/// Amplitude-damping Kraus pair on `site` (0-based) of n qubits, identity elsewhere.
inline Measurement local_amplitude_damping(int n, double gamma, int site = 0) {
    ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - gamma);
    ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
    k1(0, 1) = std::sqrt(gamma);
    auto embed = [&](const ComplexMatrix &k) {
        ComplexMatrix out = ComplexMatrix::Identity(1, 1);
        for (int s = 0; s < n; ++s) {
            out = kron(out, s == site ? k : ComplexMatrix::Identity(2, 2));
        }
        return out;
    };
    return Measurement::validate({embed(k0), embed(k1)});
}

/// {sqrt(1 - eta) I, sqrt(eta) X^{(x)n}}: weight eta on a full-support Pauli.
inline Measurement weak_global_flip(int n, double eta) {
    const Eigen::Index dim = int_pow(2, n);
    PauliLabel x = PauliLabel::identity(2, n);
    std::fill(x.x.begin(), x.x.end(), 1);
    return Measurement::validate(
        {std::sqrt(1.0 - eta) * ComplexMatrix::Identity(dim, dim), std::sqrt(eta) * pauli_matrix(x)});
}

struct CertifiedFixture {
    Measurement measurement;
    /// Certified lower bound on the distance to the family the fixture is far from.
    double certificate = 0.0;
    std::uint64_t attempts = 0;
};

/// {U P_1 U^dagger, U P_2 U^dagger} for Haar U and P = P(0..0, 0..01), redrawn until every stabilizer
/// measurement is at least `min_delta` away under the index pairing.
inline CertifiedFixture far_stabilizer_fixture(int n, double min_delta, std::uint64_t seed) {
    Rng rng(seed, 0xfa5, 0);
    PauliLabel z = PauliLabel::identity(2, n);
    z.z[static_cast<std::size_t>(n - 1)] = 1;
    const Measurement base = stabilizer_measurement(z);
    CertifiedFixture f;
    for (f.attempts = 1; f.attempts <= 10000; ++f.attempts) {
        Measurement cand = conjugated(base, haar_random_unitary(base.dim(), rng));
        double d = distance_to_stabilizer_family(cand).best_delta;
        if (d >= min_delta) {
            f.measurement = std::move(cand);
            f.certificate = d;
            return f;
        }
    }
    throw Error("far_stabilizer_fixture: no certified instance found");
}

/// The single-qubit projective measurement along (0.4, 0.4, -0.8246), with its distance to the nearest of the
/// three single-qubit stabilizer measurements as certificate.
inline CertifiedFixture far_single_qubit_fixture() {
    CertifiedFixture f;
    f.measurement = bloch_projective(0.4, 0.4, -0.8246);
    f.certificate = 2.0;
    for (Eigen::Index idx = 1; idx < 4; ++idx) {
        f.certificate =
            std::min(f.certificate, delta(f.measurement, stabilizer_measurement(PauliLabel::from_index(idx, 2, 1))));
    }
    f.attempts = 1;
    return f;
}

} // namespace qmtest
