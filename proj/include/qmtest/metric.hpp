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
#include <numbers>
#include <vector>

#include "qmtest/core.hpp"
#include "qmtest/pauli.hpp"
#include "qmtest/random.hpp"
#include "qmtest/schur.hpp"

namespace qmtest {

/// Delta(A, B) = sqrt((<A,A> + <B,B> - 2|<A,B>|) / 2D).
inline double delta_op(const ComplexMatrix &a, const ComplexMatrix &b) {
    require_square(a, "delta_op");
    require_same_dim(a, b, "delta_op");
    const double two_d = 2.0 * static_cast<double>(a.rows());
    double num = a.squaredNorm() + b.squaredNorm() - 2.0 * std::abs(hs_inner(a, b));
    return std::sqrt(std::max(num, 0.0) / two_d);
}

/// inf_theta ||A - e^{i theta} B||_F / sqrt(2D) by a grid scan followed by golden-section refinement.
inline double delta_op_numeric(const ComplexMatrix &a, const ComplexMatrix &b, int grid = 256) {
    require_square(a, "delta_op_numeric");
    require_same_dim(a, b, "delta_op_numeric");
    if (grid < 8) {
        throw Error("delta_op_numeric: grid must be at least 8");
    }
    const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(a.rows()));
    auto f = [&](double theta) { return (a - std::polar(1.0, theta) * b).norm(); };
    const double step = 2.0 * std::numbers::pi / grid;
    int best = 0;
    double best_val = f(0.0);
    for (int k = 1; k < grid; ++k) {
        double v = f(k * step);
        if (v < best_val) {
            best_val = v;
            best = k;
        }
    }
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = (best - 1) * step;
    double hi = (best + 1) * step;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > 1e-12) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return std::min({best_val, f1, f2, f(0.5 * (lo + hi))}) * scale;
}

enum class DistanceMethod { closed_form, numeric_inf };

struct DistanceReport {
    double delta = 0.0;
    double delta_squared = 0.0;
    /// Delta^2(M_i, N_i), zero-padded to the longer measurement.
    std::vector<double> per_outcome_terms;
    DistanceMethod method = DistanceMethod::closed_form;
    /// |(per-outcome sum) - (1 - (1/D) sum_i |<M_i, N_i>|)|.
    double form_disagreement = 0.0;
};

/// Delta(M, N) with outcomes paired by index and the shorter list zero-padded.
inline DistanceReport delta_measurement(const Measurement &m, const Measurement &n,
                                        DistanceMethod method = DistanceMethod::closed_form) {
    if (m.dim() != n.dim()) {
        throw DimensionMismatch("delta_measurement: dimension mismatch");
    }
    const double dim = static_cast<double>(m.dim());
    const std::size_t k = std::max(m.size(), n.size());
    DistanceReport r;
    r.method = method;
    double overlap_sum = 0.0;
    double term_sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        ComplexMatrix mi = m.op_or_zero(i);
        ComplexMatrix ni = n.op_or_zero(i);
        double t = 0.0;
        if (method == DistanceMethod::closed_form) {
            t = delta_op(mi, ni);
        } else {
            t = delta_op_numeric(mi, ni);
        }
        r.per_outcome_terms.push_back(t * t);
        term_sum += t * t;
        overlap_sum += std::abs(hs_inner(mi, ni));
    }
    double closed = 1.0 - overlap_sum / dim;
    r.form_disagreement = std::abs(term_sum - closed);
    r.delta_squared = std::clamp(term_sum, 0.0, 1.0);
    r.delta = std::sqrt(r.delta_squared);
    return r;
}

inline double delta(const Measurement &m, const Measurement &n) {
    return delta_measurement(m, n).delta;
}

namespace internal {

inline void require_distribution(const OutcomeDistribution &p, const char *what) {
    if (!p.is_normalized(1e-8)) {
        throw Error(std::string(what) + ": input is not a normalized distribution");
    }
}

} // namespace internal

/// F(p, q) = sum_i sqrt(p_i q_i), zero-padded.
inline double fidelity(const OutcomeDistribution &p, const OutcomeDistribution &q) {
    internal::require_distribution(p, "fidelity");
    internal::require_distribution(q, "fidelity");
    double f = 0.0;
    for (std::size_t i = 0; i < std::max(p.size(), q.size()); ++i) {
        f += std::sqrt(std::max(p[i], 0.0) * std::max(q[i], 0.0));
    }
    return std::min(f, 1.0);
}

/// D(p, q) = (1/2) sum_i |p_i - q_i|, zero-padded.
inline double variational(const OutcomeDistribution &p, const OutcomeDistribution &q) {
    internal::require_distribution(p, "variational");
    internal::require_distribution(q, "variational");
    double s = 0.0;
    for (std::size_t i = 0; i < std::max(p.size(), q.size()); ++i) {
        s += std::abs(p[i] - q[i]);
    }
    return std::min(0.5 * s, 1.0);
}

/// (p(M_i))_i, the outcome distribution of M on half of a maximally entangled state.
inline OutcomeDistribution choi_distribution(const Measurement &m) {
    OutcomeDistribution p;
    for (const auto &op : m.operators()) {
        p.probs.push_back(choi_prob(op));
    }
    return p;
}

struct BehaviorGap {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    /// Samples whose gap exceeded `threshold`.
    std::size_t above_threshold = 0;
    double threshold = 0.0;
};

/// Monte-Carlo estimate of E_psi sum_i ||(M_i - N'_i)|psi>||^2 over Haar states, with N' phase-aligned to M.
inline BehaviorGap behavior_gap_mc(const Measurement &m, const Measurement &n, std::size_t samples, Rng &rng,
                                   double threshold = -1.0) {
    if (m.dim() != n.dim()) {
        throw DimensionMismatch("behavior_gap_mc: dimension mismatch");
    }
    Measurement aligned = canonical_phase_align(m, n);
    const std::size_t k = std::max(m.size(), aligned.size());
    std::vector<ComplexMatrix> diffs;
    for (std::size_t i = 0; i < k; ++i) {
        diffs.push_back(m.op_or_zero(i) - aligned.op_or_zero(i));
    }
    if (threshold < 0.0) {
        threshold = 10.0 * delta_measurement(m, n).delta_squared;
    }
    BehaviorGap r;
    r.samples = samples;
    r.threshold = threshold;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        PureState psi = haar_random_state(m.dim(), rng);
        double g = 0.0;
        for (const auto &dm : diffs) {
            g += (dm * psi.amplitudes).squaredNorm();
        }
        sum += g;
        sum_sq += g * g;
        if (g > threshold) {
            ++r.above_threshold;
        }
    }
    const double ns = static_cast<double>(samples);
    r.mean = sum / ns;
    double var = samples > 1 ? std::max(sum_sq / ns - r.mean * r.mean, 0.0) * ns / (ns - 1.0) : 0.0;
    r.std_error = std::sqrt(var / ns);
    return r;
}

struct StabilizerFamilyDistance {
    PauliLabel best_label;
    double best_delta = 1.0;
    /// Minimum over the same family with the two outcomes swapped.
    PauliLabel swapped_label;
    double swapped_delta = 1.0;
};

/// Brute force over all 4^n - 1 nonzero labels, ties broken by the smallest label index.
inline StabilizerFamilyDistance distance_to_stabilizer_family(const Measurement &m) {
    const int n = num_qudits(m.dim(), 2);
    if (n > 6) {
        throw DimensionMismatch("distance_to_stabilizer_family: at most 6 qubits");
    }
    StabilizerFamilyDistance r;
    r.best_delta = 2.0;
    r.swapped_delta = 2.0;
    const Eigen::Index count = int_pow(4, n);
    for (Eigen::Index idx = 1; idx < count; ++idx) {
        PauliLabel l = PauliLabel::from_index(idx, 2, n);
        Measurement p = stabilizer_measurement(l);
        double dd = delta(m, p);
        if (dd < r.best_delta) {
            r.best_delta = dd;
            r.best_label = l;
        }
        Measurement swapped = Measurement::validate({p[1], p[0]});
        double ds = delta(m, swapped);
        if (ds < r.swapped_delta) {
            r.swapped_delta = ds;
            r.swapped_label = l;
        }
    }
    return r;
}

/// A measurement built from a truncation plus the slack operator sqrt(I - sum_i N_i^dagger N_i).
struct Approximation {
    Measurement measurement;
    /// sqrt(1 - (1/D) sum_i ||N_i||_F^2) over the truncated operators.
    double bound = 0.0;
    /// Exact Delta(M, measurement).
    double delta = 0.0;
    /// Largest negative eigenvalue clamped while taking the slack square root.
    double clamped = 0.0;
};

namespace internal {

inline Approximation complete_with_slack(const Measurement &m, std::vector<ComplexMatrix> ops) {
    const Eigen::Index dim = m.dim();
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    double norm_sum = 0.0;
    for (const auto &op : ops) {
        sum.noalias() += op.adjoint() * op;
        norm_sum += op.squaredNorm();
    }
    PsdSqrt slack = psd_sqrt(ComplexMatrix::Identity(dim, dim) - sum);
    ops.push_back(slack.root);
    Approximation a;
    a.measurement = Measurement::validate(std::move(ops));
    a.bound = std::sqrt(std::max(0.0, 1.0 - norm_sum / static_cast<double>(dim)));
    a.delta = delta(m, a.measurement);
    a.clamped = slack.clamped;
    return a;
}

} // namespace internal

/// N_i = f_T(M_i) followed by the slack operator; T holds 0-based sites.
inline Approximation nearest_klocal(const Measurement &m, const std::vector<int> &t, int d = 2) {
    std::vector<ComplexMatrix> ops;
    for (const auto &op : m.operators()) {
        ops.push_back(f_T(op, t, d));
    }
    return internal::complete_with_slack(m, std::move(ops));
}

/// All size-k subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<int>> site_subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n) {
        return out;
    }
    std::vector<int> cur(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        cur[static_cast<std::size_t>(i)] = i;
    }
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++cur[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) {
            cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return out;
}

/// eta_T(M) = (1/D) sum_i ||f_T(M_i)||_F^2, the Pauli weight of M supported inside T.
inline double locality_weight(const Measurement &m, const std::vector<int> &t, int d = 2) {
    double s = 0.0;
    for (const auto &op : m.operators()) {
        s += f_T(op, t, d).squaredNorm();
    }
    return s / static_cast<double>(m.dim());
}

/// Certified lower bound on the distance from M to every k-local measurement:
/// Delta^2 >= 1 - max_{|T| = k} sqrt(eta_T(M)), clamped at 0.
inline double klocal_distance_lower_bound(const Measurement &m, int k, int d = 2) {
    const int n = num_qudits(m.dim(), d);
    if (k >= n) {
        return 0.0;
    }
    double best = 0.0;
    for (const auto &t : site_subsets(n, std::max(k, 0))) {
        best = std::max(best, locality_weight(m, t, d));
    }
    return std::sqrt(std::max(0.0, 1.0 - std::sqrt(std::min(best, 1.0))));
}

/// N_i = U M^_i U^dagger followed by the slack operator.
inline Approximation nearest_perminv(const Measurement &m, const SchurBasis &basis) {
    std::vector<ComplexMatrix> ops;
    for (const auto &op : m.operators()) {
        ops.push_back(from_schur(block_decompose(op, basis).hat, basis));
    }
    return internal::complete_with_slack(m, std::move(ops));
}

/// D(p(M), p(N)) / sqrt(2), a lower bound on Delta(M, N).
inline double outcome_distance_lower_bound(const Measurement &m, const Measurement &n) {
    return variational(choi_distribution(m), choi_distribution(n)) / std::numbers::sqrt2;
}

} // namespace qmtest
