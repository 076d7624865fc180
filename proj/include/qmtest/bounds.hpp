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

// Randomized instance generators for the analytic bounds the testers rely on. Each check draws instances that
// satisfy the bound's hypotheses, evaluates both sides exactly, and counts violations beyond a slack.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qmtest/blackbox.hpp"
#include "qmtest/core.hpp"
#include "qmtest/metric.hpp"
#include "qmtest/pauli.hpp"
#include "qmtest/random.hpp"
#include "qmtest/schur.hpp"

namespace qmtest {

inline constexpr double kBoundSlack = 1e-9;

struct BoundCheck {
    std::string name;
    std::size_t instances = 0;
    std::size_t violations = 0;
    /// Instances drawn but discarded because they missed the hypotheses.
    std::size_t discarded = 0;
    /// min over instances of (bound - value); negative beyond -slack means a violation.
    double worst_margin = std::numeric_limits<double>::infinity();

    void record(double value, double bound, double slack = kBoundSlack) {
        ++instances;
        worst_margin = std::min(worst_margin, bound - value);
        if (!(value <= bound + slack)) {
            ++violations;
        }
    }
    bool ok() const {
        return violations == 0;
    }
};

namespace internal {

inline std::vector<double> random_weights(std::size_t k, Rng &rng) {
    // Log-uniform over three decades so that some outcomes are rare.
    std::vector<double> w(k);
    for (auto &x : w) {
        x = std::pow(10.0, -3.0 * rng.uniform());
    }
    return w;
}

} // namespace internal

/// Measurements {c V1 P1, V2 P2, s V3 P1} with c^2 + s^2 = 1 and V_j = exp(i t_j H_j) near the identity, checked
/// against Delta(M, P(a, b)) <= sqrt(8 gamma + 2 delta) with gamma, delta the tightest values meeting the
/// coefficient conditions on M_1 and M_2.
inline BoundCheck check_stabilizer_closeness(std::size_t count, std::uint64_t seed) {
    BoundCheck out{"stabilizer_closeness"};
    Rng rng(seed, 0xb01, 0);
    while (out.instances < count) {
        const int n = 1 + static_cast<int>(rng.next() % 3);
        const Eigen::Index dim = int_pow(2, n);
        Eigen::Index idx = 0;
        while (idx == 0) {
            idx = static_cast<Eigen::Index>(rng.next() % static_cast<std::uint64_t>(dim * dim));
        }
        const PauliLabel label = PauliLabel::from_index(idx, 2, n);
        const Measurement p = stabilizer_measurement(label);
        const double strength = 0.4 * rng.uniform();
        const double theta = 0.5 * rng.uniform();
        auto near_identity = [&] { return unitary_exp(random_hermitian(dim, rng), strength * rng.uniform()); };
        const Measurement m = Measurement::validate({std::cos(theta) * near_identity() * p[0], near_identity() * p[1],
                                                     std::sin(theta) * near_identity() * p[0]});
        double gamma = 0.0;
        double rho[2];
        for (int i = 0; i < 2; ++i) {
            const PauliDecomposition dec = decompose(m[static_cast<std::size_t>(i)], 2);
            const cplx mu00 = dec.coeffs[0];
            const cplx muab = dec[label];
            gamma = std::max({gamma, std::abs(std::norm(mu00) - 0.25), std::abs(std::norm(muab) - 0.25)});
            rho[i] = (std::conj(mu00) * muab).real();
        }
        const double del = std::max({0.0, 0.25 - rho[0], rho[1] + 0.25});
        if (gamma > 0.25 || del > 0.25) {
            ++out.discarded;
            continue;
        }
        out.record(delta(m, p), std::sqrt(8.0 * gamma + 2.0 * del));
    }
    return out;
}

/// Random measurements on n <= 3 qubits and random site sets T: the truncation-plus-slack construction is a valid
/// measurement and lies within sqrt(1 - eta_T(M)) of M. Compared squared: near eta = 1 the square root turns 1e-16
/// rounding into 1e-8 noise.
inline BoundCheck check_klocal_construction(std::size_t count, std::uint64_t seed) {
    BoundCheck out{"klocal_construction"};
    Rng rng(seed, 0xb02, 0);
    for (std::size_t it = 0; it < count; ++it) {
        const int n = 1 + static_cast<int>(rng.next() % 3);
        const int k = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n + 1));
        const auto subsets = site_subsets(n, k);
        const auto &t = subsets[rng.next() % subsets.size()];
        const std::size_t outcomes = 1 + rng.next() % 4;
        Measurement m = random_measurement(int_pow(2, n), outcomes, rng);
        if (rng.bernoulli(0.5)) {
            // Bias towards nearly k-local inputs, where the bound is tight.
            Approximation seedling = nearest_klocal(m, t);
            m = seedling.measurement;
        }
        const Approximation a = nearest_klocal(m, t);
        const double eta = locality_weight(m, t);
        out.record(a.delta * a.delta, 1.0 - eta);
    }
    return out;
}

/// As check_klocal_construction for the Schur-block truncation, over the supplied transforms.
inline BoundCheck check_perminv_construction(std::size_t count, std::uint64_t seed,
                                             const std::vector<const SchurBasis *> &bases) {
    BoundCheck out{"perminv_construction"};
    Rng rng(seed, 0xb03, 0);
    for (std::size_t it = 0; it < count; ++it) {
        const SchurBasis &basis = *bases[it % bases.size()];
        const Eigen::Index dim = basis.U.rows();
        const std::size_t outcomes = 1 + rng.next() % 4;
        const Measurement m = random_measurement(dim, outcomes, rng);
        const Approximation a = nearest_perminv(m, basis);
        double weight = 0.0;
        for (const auto &op : m.operators()) {
            weight += block_decompose(op, basis).hat.squaredNorm();
        }
        weight /= static_cast<double>(dim);
        out.record(a.delta * a.delta, 1.0 - weight);
    }
    return out;
}

/// Pairs M, N with Delta(M, N) = delta and count vectors L meeting the outcome-frequency hypothesis; checks
/// |<chi_L(M)|chi_L(N)>| <= (1 - 0.6 delta^2)^L in the log domain.
inline BoundCheck check_tensor_overlap_bound(std::size_t count, std::uint64_t seed) {
    BoundCheck out{"tensor_overlap_bound"};
    Rng rng(seed, 0xb05, 0);
    while (out.instances < count) {
        const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.next() % 3);
        const std::size_t k = 2 + rng.next() % 3;
        const Measurement m = random_weighted_measurement(dim, internal::random_weights(k, rng), rng);
        std::vector<ComplexMatrix> nops;
        const double strength = 2.0 * rng.uniform();
        for (const auto &op : m.operators()) {
            // N_i = U_i M_i keeps p(N_i) = p(M_i) and completeness.
            nops.push_back(unitary_exp(random_hermitian(dim, rng), strength) * op);
        }
        const Measurement nm = Measurement::validate(std::move(nops));
        const double d = delta(m, nm);
        if (!(d > 1e-3 && d < 1.0)) {
            ++out.discarded;
            continue;
        }
        const auto l0 = static_cast<std::int64_t>(1 + rng.next() % 2000);
        const OutcomeDistribution pm = choi_distribution(m);
        const OutcomeDistribution pn = choi_distribution(nm);
        std::vector<std::int64_t> counts(k);
        std::int64_t total = 0;
        for (std::size_t i = 0; i < k; ++i) {
            counts[i] = static_cast<std::int64_t>(std::floor(static_cast<double>(l0) * pm[i]));
            total += counts[i];
        }
        if (total == 0) {
            ++out.discarded;
            continue;
        }
        bool hypotheses = true;
        const double lt = static_cast<double>(total);
        for (std::size_t i = 0; i < k; ++i) {
            const double li = static_cast<double>(counts[i]);
            if (li >= 0.1 * d * d * lt / static_cast<double>(k)) {
                const double need = (1.0 - 0.1 * d * d) * li / lt;
                hypotheses = hypotheses && pm[i] >= need && pn[i] >= need;
            }
        }
        if (!hypotheses) {
            ++out.discarded;
            continue;
        }
        const LogComplex ov = tensor_power_overlap(m.operators(), nm.operators(), counts);
        const double log_bound = lt * std::log1p(-0.6 * d * d);
        // Compare logarithms relative to the bound's magnitude.
        const double value = ov.zero ? -std::numeric_limits<double>::infinity() : ov.log_abs;
        out.record(value, log_bound, kBoundSlack * std::max(1.0, std::abs(log_bound)));
    }
    return out;
}

/// Families phi_1..phi_m and psi with pairwise overlaps at most 1/(5m), including the extremal family
/// psi = alpha e_0 + beta sum_i phi_i with orthonormal phi_i; checks <psi|Pi|psi> <= 0.1.
inline BoundCheck check_projection_bound(std::size_t count, std::uint64_t seed) {
    BoundCheck out{"projection_bound"};
    Rng rng(seed, 0xb06, 0);
    while (out.instances < count) {
        const int m = 1 + static_cast<int>(rng.next() % 8);
        const Eigen::Index dim = m + 1 + static_cast<Eigen::Index>(rng.next() % 4);
        const double cap = 1.0 / (5.0 * m);
        const ComplexMatrix frame = haar_random_unitary(dim, rng);
        const double noise = cap * rng.uniform();
        std::vector<ComplexVector> phi;
        for (int i = 0; i < m; ++i) {
            ComplexVector v = frame.col(i + 1) + noise * haar_random_state(dim, rng).amplitudes / std::sqrt(2.0 * m);
            phi.push_back(v / v.norm());
        }
        const double beta = cap * rng.uniform();
        ComplexVector psi = std::sqrt(std::max(0.0, 1.0 - m * beta * beta)) * frame.col(0);
        for (int i = 0; i < m; ++i) {
            psi += beta * std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform()) * frame.col(i + 1);
        }
        psi /= psi.norm();
        bool hypotheses = true;
        ComplexMatrix gram(m, m);
        ComplexVector c(m);
        for (int i = 0; i < m; ++i) {
            c(i) = phi[static_cast<std::size_t>(i)].dot(psi);
            hypotheses = hypotheses && std::abs(c(i)) <= cap;
            for (int j = 0; j < m; ++j) {
                gram(i, j) = phi[static_cast<std::size_t>(i)].dot(phi[static_cast<std::size_t>(j)]);
                hypotheses = hypotheses && (i == j || std::abs(gram(i, j)) <= cap);
            }
        }
        if (!hypotheses) {
            ++out.discarded;
            continue;
        }
        out.record(projection_probability(gram, c), 0.1);
    }
    return out;
}

/// Skewed random measurement pairs and thresholds delta: the overlaps over outcomes rarer than delta in either
/// measurement sum to at most 2 sqrt(delta k).
inline BoundCheck check_small_outcome_tail(std::size_t count, std::uint64_t seed) {
    BoundCheck out{"small_outcome_tail"};
    Rng rng(seed, 0xb07, 0);
    for (std::size_t it = 0; it < count; ++it) {
        const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.next() % 3);
        const std::size_t k = 2 + rng.next() % 5;
        const Measurement m = random_weighted_measurement(dim, internal::random_weights(k, rng), rng);
        const Measurement n = random_weighted_measurement(dim, internal::random_weights(k, rng), rng);
        const double del = std::pow(10.0, -3.0 * rng.uniform());
        const OutcomeDistribution pm = choi_distribution(m);
        const OutcomeDistribution pn = choi_distribution(n);
        double tail = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (pm[i] <= del || pn[i] <= del) {
                tail += std::abs(hs_inner(m[i], n[i])) / static_cast<double>(dim);
            }
        }
        out.record(tail, 2.0 * std::sqrt(del * static_cast<double>(k)));
    }
    return out;
}

/// 1 - F <= D and D <= sqrt(1 - F^2) on random distribution pairs, half of them near-equal; records the worse of
/// the two margins per pair.
inline BoundCheck check_fidelity_variational(std::size_t count, std::uint64_t seed) {
    BoundCheck out{"fidelity_variational"};
    Rng rng(seed, 0xb18, 0);
    for (std::size_t it = 0; it < count; ++it) {
        const std::size_t k = 1 + rng.next() % 8;
        OutcomeDistribution p{std::vector<double>(k)};
        OutcomeDistribution q{std::vector<double>(k)};
        const bool close = rng.bernoulli(0.5);
        double sp = 0.0;
        double sq = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            p.probs[i] = -std::log(rng.uniform() + 1e-300);
            q.probs[i] = close ? p.probs[i] * (1.0 + 0.01 * rng.normal()) : -std::log(rng.uniform() + 1e-300);
            q.probs[i] = std::max(q.probs[i], 0.0);
            sp += p.probs[i];
            sq += q.probs[i];
        }
        for (std::size_t i = 0; i < k; ++i) {
            p.probs[i] /= sp;
            q.probs[i] /= sq;
        }
        const double f = fidelity(p, q);
        const double d = variational(p, q);
        const double lower_margin = d - (1.0 - f);
        const double upper_margin = std::sqrt(std::max(0.0, 1.0 - f * f)) - d;
        const double margin = std::min(lower_margin, upper_margin);
        out.record(-margin, 0.0);
    }
    return out;
}

/// D(p(M), p(N)) / sqrt(2) <= Delta(M, N) on random measurement pairs.
inline BoundCheck check_outcome_lower_bound(std::size_t count, std::uint64_t seed) {
    BoundCheck out{"outcome_lower_bound"};
    Rng rng(seed, 0xb71, 0);
    for (std::size_t it = 0; it < count; ++it) {
        const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.next() % 7);
        const Measurement m = random_weighted_measurement(dim, internal::random_weights(1 + rng.next() % 5, rng), rng);
        const Measurement n = random_weighted_measurement(dim, internal::random_weights(1 + rng.next() % 5, rng), rng);
        out.record(outcome_distance_lower_bound(m, n), delta(m, n));
    }
    return out;
}

} // namespace qmtest
