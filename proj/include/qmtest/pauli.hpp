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
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "qmtest/core.hpp"

namespace qmtest {

/// Number of qudits n with d^n == dim; throws NotPowerOfDimension otherwise.
inline int num_qudits(Eigen::Index dim, int d) {
    if (d < 2) {
        throw NotPowerOfDimension("local dimension must be at least 2");
    }
    int n = 0;
    Eigen::Index p = 1;
    while (p < dim) {
        p *= d;
        ++n;
    }
    if (p != dim) {
        throw NotPowerOfDimension("dimension " + std::to_string(dim) + " is not a power of " + std::to_string(d));
    }
    return n;
}

inline Eigen::Index int_pow(Eigen::Index base, int exp) {
    Eigen::Index r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= base;
    }
    return r;
}

/// Label (x, z) of the generalized Pauli operator sigma_{x,z}. Site 0 is the most significant tensor factor.
struct PauliLabel {
    int d = 2;
    int n = 0;
    std::vector<int> x;
    std::vector<int> z;

    static PauliLabel identity(int d, int n) {
        return PauliLabel{d, n, std::vector<int>(n, 0), std::vector<int>(n, 0)};
    }

    /// Inverse of index(): index = x_idx * d^n + z_idx, x_idx and z_idx read base d with site 0 most significant.
    static PauliLabel from_index(Eigen::Index index, int d, int n) {
        const Eigen::Index dim = int_pow(d, n);
        PauliLabel l = identity(d, n);
        Eigen::Index xi = index / dim;
        Eigen::Index zi = index % dim;
        for (int s = n - 1; s >= 0; --s) {
            l.x[s] = static_cast<int>(xi % d);
            l.z[s] = static_cast<int>(zi % d);
            xi /= d;
            zi /= d;
        }
        return l;
    }

    Eigen::Index x_index() const {
        Eigen::Index r = 0;
        for (int v : x) {
            r = r * d + v;
        }
        return r;
    }
    Eigen::Index z_index() const {
        Eigen::Index r = 0;
        for (int v : z) {
            r = r * d + v;
        }
        return r;
    }
    Eigen::Index index() const {
        return x_index() * int_pow(d, n) + z_index();
    }
    bool is_identity() const {
        return std::all_of(x.begin(), x.end(), [](int v) { return v == 0; }) &&
               std::all_of(z.begin(), z.end(), [](int v) { return v == 0; });
    }
    bool operator==(const PauliLabel &other) const = default;

    void check() const {
        if (static_cast<int>(x.size()) != n || static_cast<int>(z.size()) != n) {
            throw DimensionMismatch("PauliLabel: x and z must have n entries");
        }
        for (int s = 0; s < n; ++s) {
            if (x[s] < 0 || x[s] >= d || z[s] < 0 || z[s] >= d) {
                throw DimensionMismatch("PauliLabel: component out of range");
            }
        }
    }
};

namespace internal {

// Single-site normalization c(x, z): qubits use i^{xz} so that sigma_{1,1} = Y; qudits use 1.
inline cplx site_normalization(int d, int x, int z) {
    if (d == 2 && x == 1 && z == 1) {
        return cplx(0.0, 1.0);
    }
    return cplx(1.0, 0.0);
}

inline cplx omega_pow(int d, long long k) {
    k %= d;
    if (k < 0) {
        k += d;
    }
    if (d == 2) {
        return k == 0 ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);
    }
    if (k == 0) {
        return cplx(1.0, 0.0);
    }
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / d);
}

// Monomial form: sigma_L |j> = phase(L, j) |j + x>. Digits of j are written into `digits`.
inline cplx label_phase(const PauliLabel &l, Eigen::Index j, std::vector<int> &digits) {
    for (int s = l.n - 1; s >= 0; --s) {
        digits[s] = static_cast<int>(j % l.d);
        j /= l.d;
    }
    long long zsum = 0;
    cplx c(1.0, 0.0);
    for (int s = 0; s < l.n; ++s) {
        zsum += static_cast<long long>(digits[s]) * l.z[s];
        c *= site_normalization(l.d, l.x[s], l.z[s]);
    }
    return c * omega_pow(l.d, zsum);
}

inline Eigen::Index shifted_index(const PauliLabel &l, const std::vector<int> &digits) {
    Eigen::Index r = 0;
    for (int s = 0; s < l.n; ++s) {
        r = r * l.d + (digits[s] + l.x[s]) % l.d;
    }
    return r;
}

} // namespace internal

/// sigma_{x_1,z_1} (x) ... (x) sigma_{x_n,z_n}; single-site sigma_{x,z} = c(x,z) X^x Z^z.
inline ComplexMatrix pauli_matrix(const PauliLabel &l) {
    l.check();
    const Eigen::Index dim = int_pow(l.d, l.n);
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    std::vector<int> digits(l.n);
    for (Eigen::Index j = 0; j < dim; ++j) {
        cplx ph = internal::label_phase(l, j, digits);
        out(internal::shifted_index(l, digits), j) = ph;
    }
    return out;
}

inline PauliLabel label_sum(const PauliLabel &a, const PauliLabel &b) {
    if (a.d != b.d || a.n != b.n) {
        throw DimensionMismatch("PauliLabel: d or n mismatch");
    }
    PauliLabel r = PauliLabel::identity(a.d, a.n);
    for (int s = 0; s < a.n; ++s) {
        r.x[s] = (a.x[s] + b.x[s]) % a.d;
        r.z[s] = (a.z[s] + b.z[s]) % a.d;
    }
    return r;
}

/// beta with sigma_{a,b} sigma_{c,d} = beta sigma_{a+c, b+d}.
inline cplx pauli_product_phase(const PauliLabel &ab, const PauliLabel &cd) {
    ab.check();
    cd.check();
    PauliLabel sum = label_sum(ab, cd);
    const int d = ab.d;
    long long cross = 0;
    cplx c(1.0, 0.0);
    for (int s = 0; s < ab.n; ++s) {
        // Z^b X^c = omega^{bc} X^c Z^b.
        cross += static_cast<long long>(ab.z[s]) * cd.x[s];
        c *= internal::site_normalization(d, ab.x[s], ab.z[s]) * internal::site_normalization(d, cd.x[s], cd.z[s]) /
             internal::site_normalization(d, sum.x[s], sum.z[s]);
    }
    return c * internal::omega_pow(d, cross);
}

/// Coefficients mu_L(A) = d^{-n} <sigma_L, A>, indexed by PauliLabel::index().
struct PauliDecomposition {
    int d = 2;
    int n = 0;
    std::vector<cplx> coeffs;

    Eigen::Index dim() const {
        return int_pow(d, n);
    }
    cplx operator[](const PauliLabel &l) const {
        return coeffs.at(static_cast<std::size_t>(l.index()));
    }
    std::size_t size() const {
        return coeffs.size();
    }
};

inline PauliDecomposition decompose(const ComplexMatrix &a, int d) {
    require_square(a, "decompose");
    const int n = num_qudits(a.rows(), d);
    const Eigen::Index dim = a.rows();
    PauliDecomposition out{d, n, std::vector<cplx>(static_cast<std::size_t>(dim * dim))};
    const double scale = 1.0 / static_cast<double>(dim);
    std::vector<int> digits(n);
    for (Eigen::Index idx = 0; idx < dim * dim; ++idx) {
        PauliLabel l = PauliLabel::from_index(idx, d, n);
        cplx acc(0.0, 0.0);
        for (Eigen::Index j = 0; j < dim; ++j) {
            cplx ph = internal::label_phase(l, j, digits);
            acc += std::conj(ph) * a(internal::shifted_index(l, digits), j);
        }
        out.coeffs[static_cast<std::size_t>(idx)] = acc * scale;
    }
    return out;
}

inline ComplexMatrix reconstruct(const PauliDecomposition &dec) {
    const Eigen::Index dim = dec.dim();
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    std::vector<int> digits(dec.n);
    for (Eigen::Index idx = 0; idx < dim * dim; ++idx) {
        cplx mu = dec.coeffs[static_cast<std::size_t>(idx)];
        if (mu == cplx(0.0, 0.0)) {
            continue;
        }
        PauliLabel l = PauliLabel::from_index(idx, dec.d, dec.n);
        for (Eigen::Index j = 0; j < dim; ++j) {
            cplx ph = internal::label_phase(l, j, digits);
            out(internal::shifted_index(l, digits), j) += mu * ph;
        }
    }
    return out;
}

/// Sites (0-based, ascending) where x or z is nonzero.
inline std::vector<int> support(const PauliLabel &l) {
    std::vector<int> out;
    for (int s = 0; s < l.n; ++s) {
        if (l.x[s] != 0 || l.z[s] != 0) {
            out.push_back(s);
        }
    }
    return out;
}

inline std::uint64_t support_mask(const PauliLabel &l) {
    std::uint64_t m = 0;
    for (int s = 0; s < l.n; ++s) {
        if (l.x[s] != 0 || l.z[s] != 0) {
            m |= std::uint64_t{1} << s;
        }
    }
    return m;
}

inline std::uint64_t site_mask(const std::vector<int> &sites) {
    std::uint64_t m = 0;
    for (int s : sites) {
        m |= std::uint64_t{1} << s;
    }
    return m;
}

/// The part of A spanned by Paulis supported inside T (0-based sites).
inline ComplexMatrix f_T(const ComplexMatrix &a, const std::vector<int> &t, int d = 2) {
    PauliDecomposition dec = decompose(a, d);
    for (int s : t) {
        if (s < 0 || s >= dec.n) {
            throw DimensionMismatch("f_T: site index out of range");
        }
    }
    const std::uint64_t mask = site_mask(t);
    for (std::size_t idx = 0; idx < dec.coeffs.size(); ++idx) {
        PauliLabel l = PauliLabel::from_index(static_cast<Eigen::Index>(idx), dec.d, dec.n);
        if ((support_mask(l) & ~mask) != 0) {
            dec.coeffs[idx] = cplx(0.0, 0.0);
        }
    }
    return reconstruct(dec);
}

inline ComplexMatrix g_T(const ComplexMatrix &a, const std::vector<int> &t, int d = 2) {
    return a - f_T(a, t, d);
}

/// sigma_{a,b} for qubits from bit vectors.
inline PauliLabel qubit_label(const std::vector<int> &a, const std::vector<int> &b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("qubit_label: a and b differ in length");
    }
    PauliLabel l{2, static_cast<int>(a.size()), a, b};
    l.check();
    return l;
}

/// {(I + sigma_{a,b})/2, (I - sigma_{a,b})/2}.
inline Measurement stabilizer_measurement(const PauliLabel &l) {
    if (l.d != 2) {
        throw DimensionMismatch("stabilizer_measurement: qubits only");
    }
    if (l.is_identity()) {
        throw DegenerateLabel("stabilizer_measurement: label (0,0) gives {I, 0}");
    }
    ComplexMatrix s = pauli_matrix(l);
    ComplexMatrix id = ComplexMatrix::Identity(s.rows(), s.cols());
    return Measurement::validate({0.5 * (id + s), 0.5 * (id - s)});
}

inline Measurement stabilizer_measurement(const std::vector<int> &a, const std::vector<int> &b) {
    return stabilizer_measurement(qubit_label(a, b));
}

/// q_L(M_i) = |mu_L(M_i)|^2 / p(M_i), indexed by PauliLabel::index().
inline OutcomeDistribution q_distribution(const ComplexMatrix &m, int d) {
    double p = choi_prob(m);
    if (!(p > 0.0)) {
        throw ZeroOperator("q_distribution: operator is zero");
    }
    PauliDecomposition dec = decompose(m, d);
    OutcomeDistribution out;
    out.probs.reserve(dec.size());
    for (const cplx &mu : dec.coeffs) {
        out.probs.push_back(std::norm(mu) / p);
    }
    return out;
}

/// xi_L(M) = sum_i |mu_L(M_i)|^2, the label marginal of a Choi query followed by a Pauli-basis measurement.
inline OutcomeDistribution xi_distribution(const Measurement &m, int d) {
    OutcomeDistribution out;
    for (const auto &op : m.operators()) {
        PauliDecomposition dec = decompose(op, d);
        if (out.probs.empty()) {
            out.probs.assign(dec.size(), 0.0);
        }
        for (std::size_t i = 0; i < dec.size(); ++i) {
            out.probs[i] += std::norm(dec.coeffs[i]);
        }
    }
    return out;
}

} // namespace qmtest
