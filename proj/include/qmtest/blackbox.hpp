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
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "qmtest/core.hpp"
#include "qmtest/pauli.hpp"
#include "qmtest/random.hpp"
#include "qmtest/schur.hpp"

namespace qmtest {

enum class SamplingMode { per_trial, aggregate };

inline const char *to_string(SamplingMode m) {
    return m == SamplingMode::per_trial ? "per-trial" : "aggregate";
}

/// Outcome of one query on half of |Phi+_D>; the post-measurement state is |v~(M_outcome)>.
struct ChoiSample {
    std::size_t outcome = 0;
};

/// A hidden measurement reachable only through queries on |Phi+_D>. Post-measurement states are never
/// materialized; every later measurement on them is sampled from the operator M_outcome directly.
class BlackBox {
  public:
    BlackBox(Measurement hidden, std::uint64_t seed, int local_dim = 2)
        : hidden_(std::move(hidden)), local_dim_(local_dim), rng_(seed) {
        qudits_ = num_qudits(hidden_.dim(), local_dim_);
        for (const auto &op : hidden_.operators()) {
            outcome_probs_.push_back(choi_prob(op));
        }
    }

    Eigen::Index dim() const {
        return hidden_.dim();
    }
    int local_dim() const {
        return local_dim_;
    }
    int qudits() const {
        return qudits_;
    }
    std::uint64_t query_count() const {
        return query_count_;
    }
    void reseed(std::uint64_t seed) {
        rng_ = Rng(seed);
    }

    ChoiSample query_on_choi() {
        ++query_count_;
        return ChoiSample{sample_categorical(outcome_probs_, rng_)};
    }

    /// Outcome counts of L queries, Multinomial(L, p(M_i)).
    std::vector<std::int64_t> query_outcome_counts(std::int64_t queries) {
        query_count_ += static_cast<std::uint64_t>(queries);
        return sample_multinomial(queries, outcome_probs_, rng_);
    }

    /// Measures |v~(M_i)> in the basis {|v(sigma_L)>}; label drawn from q(M_i).
    PauliLabel measure_choi_pauli_basis(const ChoiSample &s) {
        const auto &q = label_probs(s.outcome);
        return PauliLabel::from_index(static_cast<Eigen::Index>(sample_categorical(q, rng_)), local_dim_, qudits_);
    }

    /// Label counts of `copies` Pauli-basis measurements on |v~(M_i)>, indexed by PauliLabel::index().
    std::vector<std::int64_t> pauli_label_counts(std::size_t outcome, std::int64_t copies) {
        return sample_multinomial(copies, label_probs(outcome), rng_);
    }

    /// L queries each followed by a Pauli-basis measurement, as counts over labels: Multinomial(L, xi).
    std::vector<std::int64_t> query_label_counts(std::int64_t queries) {
        query_count_ += static_cast<std::uint64_t>(queries);
        return sample_multinomial(queries, xi(), rng_);
    }

    /// Product of single-qubit sigma_{a_j,b_j} outcomes on the first half of |v~(M_i)>.
    int measure_stabilizer_sign(const ChoiSample &s, const PauliLabel &l) {
        return rng_.bernoulli(plus_probability(s.outcome, l)) ? +1 : -1;
    }

    /// Number of -1 products among `copies` sign measurements on |v~(M_i)>.
    std::int64_t stabilizer_minus_counts(std::size_t outcome, const PauliLabel &l, std::int64_t copies) {
        return sample_binomial(copies, 1.0 - plus_probability(outcome, l), rng_);
    }

    /// tr(P_1(a,b) M_i M_i^dagger) / tr(M_i^dagger M_i).
    double plus_probability(std::size_t outcome, const PauliLabel &l) {
        if (l.d != 2 || local_dim_ != 2) {
            throw DimensionMismatch("measure_stabilizer_sign: qubits only");
        }
        auto key = std::make_pair(outcome, l.index());
        auto it = plus_cache_.find(key);
        if (it != plus_cache_.end()) {
            return it->second;
        }
        const ComplexMatrix &m = hidden_[outcome];
        ComplexMatrix rho = m * m.adjoint();
        ComplexMatrix p1 = 0.5 * (ComplexMatrix::Identity(dim(), dim()) + pauli_matrix(l));
        double p = std::clamp((p1 * rho).trace().real() / rho.trace().real(), 0.0, 1.0);
        plus_cache_.emplace(key, p);
        return p;
    }

    /// Probabilities of passing one Schur iteration through each (outcome i, block lambda):
    /// (v_lambda / D) ||(M^_i)_lambda||_F^2. Their sum is the pass probability.
    const std::vector<double> &schur_event_probs(const SchurBasis &basis) {
        if (basis.dim() != dim()) {
            throw DimensionMismatch("schur_iteration: basis does not match the hidden dimension");
        }
        if (schur_events_.empty()) {
            for (const auto &op : hidden_.operators()) {
                BlockDecomposition dec = block_decompose(op, basis);
                for (std::size_t b = 0; b < basis.blocks.size(); ++b) {
                    schur_events_.push_back(static_cast<double>(basis.blocks[b].v) *
                                            dec.per_lambda_hat[b].squaredNorm() / static_cast<double>(dim()));
                }
            }
            schur_pass_ = 0.0;
            for (double p : schur_events_) {
                schur_pass_ += p;
            }
            schur_pass_ = std::clamp(schur_pass_, 0.0, 1.0);
        }
        return schur_events_;
    }

    double schur_pass_probability(const SchurBasis &basis) {
        schur_event_probs(basis);
        return schur_pass_;
    }

    /// One iteration of the Schur test: Choi query, lambda-register comparison, V_lambda Pauli-basis check.
    bool schur_iteration(const SchurBasis &basis) {
        std::vector<double> events = schur_event_probs(basis);
        events.push_back(std::max(0.0, 1.0 - schur_pass_));
        ++query_count_;
        return sample_categorical(events, rng_) + 1 < events.size();
    }

    /// Runs up to `iterations` Schur iterations, stopping at the first failure; returns the passes.
    std::int64_t schur_passes_until_failure(const SchurBasis &basis, std::int64_t iterations) {
        double pass = schur_pass_probability(basis);
        std::int64_t passes = iterations;
        if (pass < 1.0) {
            passes = std::min<std::int64_t>(
                iterations, std::geometric_distribution<std::int64_t>(1.0 - pass)(rng_.engine()));
        }
        query_count_ += static_cast<std::uint64_t>(std::min(iterations, passes + 1));
        return passes;
    }

    /// Probability that the post-query product state prod_j |v~(M_j)>^{(x) L_j} lies in
    /// span{chi_L(candidate)}; c^dagger G^{-1} c with overlaps accumulated in log-magnitude and phase.
    double tensor_projection_probability(const std::vector<std::int64_t> &counts,
                                         const std::vector<std::vector<ComplexMatrix>> &candidates) const;

    /// Samples the projective measurement {Pi, I - Pi}; true for Pi.
    bool measure_tensor_projection(const std::vector<std::int64_t> &counts,
                                   const std::vector<std::vector<ComplexMatrix>> &candidates) {
        return rng_.bernoulli(tensor_projection_probability(counts, candidates));
    }

    /// |<v~(M_i)|v~(N_i)>| for two boxes; 0 when either operator is zero. Simulator privilege for swap tests.
    friend double choi_overlap(const BlackBox &m, const BlackBox &n, std::size_t outcome) {
        if (m.dim() != n.dim()) {
            throw DimensionMismatch("choi_overlap: dimension mismatch");
        }
        ComplexMatrix a = m.hidden_.op_or_zero(outcome);
        ComplexMatrix b = n.hidden_.op_or_zero(outcome);
        if (a.norm() == 0.0 || b.norm() == 0.0) {
            return 0.0;
        }
        return std::min(1.0, std::abs(normalized_choi_overlap(a, b)));
    }

    Rng &rng() {
        return rng_;
    }

  private:
    const std::vector<double> &label_probs(std::size_t outcome) {
        auto it = q_cache_.find(outcome);
        if (it == q_cache_.end()) {
            it = q_cache_.emplace(outcome, q_distribution(hidden_[outcome], local_dim_).probs).first;
        }
        return it->second;
    }

    const std::vector<double> &xi() {
        if (xi_.empty()) {
            xi_ = xi_distribution(hidden_, local_dim_).probs;
        }
        return xi_;
    }

    Measurement hidden_;
    int local_dim_ = 2;
    int qudits_ = 0;
    Rng rng_;
    std::uint64_t query_count_ = 0;
    std::vector<double> outcome_probs_;
    std::map<std::size_t, std::vector<double>> q_cache_;
    std::map<std::pair<std::size_t, Eigen::Index>, double> plus_cache_;
    std::vector<double> xi_;
    std::vector<double> schur_events_;
    double schur_pass_ = 0.0;
};

/// log|z| and arg z of a product of powers, kept apart so that L ~ 1e9 factors never underflow.
struct LogComplex {
    double log_abs = 0.0;
    double phase = 0.0;
    bool zero = false;

    void mul_pow(cplx z, std::int64_t power) {
        if (power == 0) {
            return;
        }
        if (std::abs(z) == 0.0) {
            zero = true;
            return;
        }
        log_abs += static_cast<double>(power) * std::log(std::abs(z));
        phase = std::remainder(phase + std::remainder(static_cast<double>(power) * std::arg(z), 2.0 * std::numbers::pi),
                               2.0 * std::numbers::pi);
    }
    cplx value() const {
        return zero ? cplx(0.0, 0.0) : std::polar(std::exp(log_abs), phase);
    }
};

/// prod_j <v~(X_j)|v~(Y_j)>^{L_j} over outcomes with L_j > 0.
inline LogComplex tensor_power_overlap(const std::vector<ComplexMatrix> &x, const std::vector<ComplexMatrix> &y,
                                       const std::vector<std::int64_t> &counts) {
    LogComplex r;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] == 0) {
            continue;
        }
        if (j >= x.size() || j >= y.size() || x[j].norm() == 0.0 || y[j].norm() == 0.0) {
            throw ZeroOperator("tensor_power_overlap: chi_L undefined for a zero operator with L_j > 0");
        }
        r.mul_pow(normalized_choi_overlap(x[j], y[j]), counts[j]);
    }
    return r;
}

inline constexpr double kGramFloor = 1e-12;

/// c^dagger G^{-1} c where G_lm = <chi_l|chi_m> and c_l = <chi_l|psi>.
inline double projection_probability(const ComplexMatrix &gram, const ComplexVector &c) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (gram + gram.adjoint()));
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < kGramFloor) {
        throw GramIllConditioned("Gram matrix of candidate tensor-power states is singular");
    }
    ComplexVector y = es.eigenvectors().adjoint() * c;
    double p = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        p += std::norm(y(i)) / es.eigenvalues()(i);
    }
    return std::clamp(p, 0.0, 1.0);
}

inline double BlackBox::tensor_projection_probability(const std::vector<std::int64_t> &counts,
                                                      const std::vector<std::vector<ComplexMatrix>> &candidates) const {
    const auto t = static_cast<Eigen::Index>(candidates.size());
    if (t == 0) {
        return 0.0;
    }
    std::vector<ComplexMatrix> hidden_ops;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        hidden_ops.push_back(hidden_.op_or_zero(j));
    }
    ComplexMatrix gram(t, t);
    ComplexVector c(t);
    for (Eigen::Index l = 0; l < t; ++l) {
        for (Eigen::Index m = l; m < t; ++m) {
            cplx g = l == m ? cplx(1.0, 0.0)
                            : tensor_power_overlap(candidates[static_cast<std::size_t>(l)],
                                                   candidates[static_cast<std::size_t>(m)], counts)
                                  .value();
            gram(l, m) = g;
            gram(m, l) = std::conj(g);
        }
        c(l) = tensor_power_overlap(candidates[static_cast<std::size_t>(l)], hidden_ops, counts).value();
    }
    return projection_probability(gram, c);
}

/// Swap test on a pair with |<phi|psi>| = overlap: outcome 0 with probability (1 + overlap^2) / 2.
inline int swap_test_sample(double overlap, Rng &rng) {
    return rng.bernoulli(0.5 * (1.0 + overlap * overlap)) ? 0 : 1;
}

/// Number of 0 outcomes among `copies` swap tests.
inline std::int64_t swap_test_zero_count(double overlap, std::int64_t copies, Rng &rng) {
    return sample_binomial(copies, 0.5 * (1.0 + overlap * overlap), rng);
}

/// Smallest n with 2 exp(-2 n eps^2) <= delta.
inline std::int64_t chernoff_samples(double eps, double delta) {
    if (!(eps > 0.0) || !(delta > 0.0)) {
        throw Error("chernoff_samples: eps and delta must be positive");
    }
    if (delta >= 2.0) {
        return 0;
    }
    return ceil_tol(std::log(2.0 / delta) / (2.0 * eps * eps));
}

inline std::vector<std::int64_t> aggregate_multinomial(std::int64_t trials, const OutcomeDistribution &probs,
                                                       Rng &rng) {
    return sample_multinomial(trials, probs.probs, rng);
}

} // namespace qmtest
