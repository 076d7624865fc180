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

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qmtest/blackbox.hpp"
#include "qmtest/core.hpp"
#include "qmtest/metric.hpp"
#include "qmtest/pauli.hpp"
#include "qmtest/schur.hpp"

namespace qmtest {

struct TesterConfig {
    double epsilon = 0.1;
    std::uint64_t seed = 0;
    SamplingMode mode = SamplingMode::aggregate;
    /// Multiplies every sample-size constant; 1 reproduces the printed constants.
    double constant_scale = 1.0;

    void check() const {
        if (!(epsilon > 0.0 && epsilon < 1.0)) {
            throw Error("epsilon must lie in (0, 1)");
        }
        if (!(constant_scale > 0.0)) {
            throw Error("constant_scale must be positive");
        }
    }
};

struct Verdict {
    std::string tester;
    bool accept = false;
    /// Present iff accept is false.
    std::optional<std::string> reject_stage;
    std::uint64_t query_count = 0;
    std::map<std::string, double> stage_stats;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;
    double constant_scale = 1.0;
    SamplingMode mode = SamplingMode::aggregate;
    /// Distance estimate, for the estimators only.
    std::optional<double> estimate;
    std::vector<std::string> notes;

    std::string decision() const {
        return accept ? "accept" : "reject";
    }
    /// "accept" or the reject stage.
    std::string category() const {
        return accept ? "accept" : reject_stage.value_or("reject");
    }
};

namespace internal {

inline Verdict start_verdict(const char *tester, const TesterConfig &cfg) {
    cfg.check();
    Verdict v;
    v.tester = tester;
    v.seed = cfg.seed;
    v.constant_scale = cfg.constant_scale;
    v.mode = cfg.mode;
    v.params["epsilon"] = cfg.epsilon;
    if (cfg.constant_scale != 1.0) {
        v.notes.push_back("constant_scale_not_1");
    }
    return v;
}

inline Verdict &reject(Verdict &v, const char *stage) {
    v.accept = false;
    v.reject_stage = stage;
    return v;
}

inline Verdict &accept(Verdict &v) {
    v.accept = true;
    v.reject_stage.reset();
    return v;
}

inline std::int64_t positive(std::int64_t x) {
    return std::max<std::int64_t>(x, 1);
}

} // namespace internal

struct StabilizerConstants {
    std::int64_t L = 0;
    std::int64_t N = 0;
    std::int64_t T = 0;
    std::int64_t W = 0;
};

inline StabilizerConstants stabilizer_constants(double eps, double scale = 1.0) {
    StabilizerConstants c;
    c.L = internal::positive(ceil_tol(scale * 20000.0 / std::pow(eps, 4)));
    c.N = floor_tol((0.5 - eps * eps / 64.0) * static_cast<double>(c.L));
    c.T = ceil_tol(0.99 * static_cast<double>(c.N));
    c.W = internal::positive(ceil_tol(scale * 12.0 / (eps * eps)));
    return c;
}

inline std::int64_t klocal_queries(int k, double eps, double scale = 1.0) {
    const double kk = static_cast<double>(k);
    return internal::positive(ceil_tol(scale * 1200.0 * kk / (eps * eps) * (std::log(kk / eps) + 1.0)));
}

inline std::int64_t perminv_queries(double eps, double scale = 1.0) {
    return internal::positive(ceil_tol(scale * 5.0 / (eps * eps)));
}

struct FiniteSetConstants {
    std::int64_t term_outcomes = 0;
    std::int64_t term_members = 0;
    std::int64_t L = 0;
};

/// a = min(eps, gamma); L = max(ceil(5000 k^2 ln(20k) / a^8), ceil(2 ln(5m) / a^2)).
inline FiniteSetConstants finite_set_constants(int k, std::size_t m, double a, double scale = 1.0) {
    const double kk = static_cast<double>(k);
    FiniteSetConstants c;
    c.term_outcomes = ceil_tol(scale * 5000.0 * kk * kk * std::log(20.0 * kk) / std::pow(a, 8));
    c.term_members = ceil_tol(scale * 2.0 * std::log(5.0 * static_cast<double>(m)) / (a * a));
    c.L = internal::positive(std::max(c.term_outcomes, c.term_members));
    return c;
}

inline std::int64_t overlap_copies(double eps, double delta, double scale = 1.0) {
    return internal::positive(ceil_tol(scale * 2.0 * std::log(2.0 / delta) / std::pow(eps, 4)));
}

struct DistanceConstants {
    std::int64_t L = 0;
    std::int64_t T = 0;
    double threshold = 0.0;
};

/// L = ceil(50000 k^5 ln(40k) / eps^12), threshold = eps^4/16k - eps^4/36k^2, T = floor(threshold L).
inline DistanceConstants distance_constants(int k, double eps, double scale = 1.0) {
    const double kk = static_cast<double>(k);
    DistanceConstants c;
    c.L = internal::positive(ceil_tol(scale * 50000.0 * std::pow(kk, 5) * std::log(40.0 * kk) / std::pow(eps, 12)));
    const double e4 = std::pow(eps, 4);
    c.threshold = e4 / (16.0 * kk) - e4 / (36.0 * kk * kk);
    c.T = floor_tol(c.threshold * static_cast<double>(c.L));
    return c;
}

/// Stabilizer tester on n <= 6 qubits. Reject stages: outcomes, outcome_fraction, label_ambiguous, labels,
/// label_fraction, sign.
inline Verdict test_stabilizer(BlackBox &box, const TesterConfig &cfg) {
    Verdict v = internal::start_verdict("stabilizer", cfg);
    const int n = num_qudits(box.dim(), 2);
    if (box.local_dim() != 2 || n > 6) {
        throw NotPowerOfDimension("test_stabilizer: hidden dimension must be 2^n with n <= 6");
    }
    const double eps = cfg.epsilon;
    const StabilizerConstants c = stabilizer_constants(eps, cfg.constant_scale);
    const double window = eps * eps / 64.0;
    v.params["L"] = static_cast<double>(c.L);
    v.params["N"] = static_cast<double>(c.N);
    v.params["T"] = static_cast<double>(c.T);
    v.params["W"] = static_cast<double>(c.W);
    const std::uint64_t q0 = box.query_count();
    auto finish = [&](Verdict &out) -> Verdict {
        out.query_count = box.query_count() - q0;
        return out;
    };

    std::vector<std::int64_t> counts;
    if (cfg.mode == SamplingMode::aggregate) {
        counts = box.query_outcome_counts(c.L);
    } else {
        for (std::int64_t q = 0; q < c.L; ++q) {
            std::size_t o = box.query_on_choi().outcome;
            if (o >= counts.size()) {
                counts.resize(o + 1, 0);
            }
            ++counts[o];
        }
    }
    counts.resize(std::max<std::size_t>(counts.size(), 2), 0);
    for (std::size_t i = 2; i < counts.size(); ++i) {
        if (counts[i] > 0) {
            v.stage_stats["first_extra_outcome"] = static_cast<double>(i);
            return finish(internal::reject(v, "outcomes"));
        }
    }
    const double f1 = static_cast<double>(counts[0]) / static_cast<double>(c.L);
    v.stage_stats["outcome1_fraction"] = f1;
    if (std::abs(f1 - 0.5) > window) {
        return finish(internal::reject(v, "outcome_fraction"));
    }
    for (std::size_t b = 0; b < 2; ++b) {
        if (counts[b] < c.T + c.W) {
            v.notes.push_back("fewer_than_T_plus_W_copies_branch_" + std::to_string(b + 1));
        }
    }

    // Pauli-basis measurements on T copies of each branch.
    const Eigen::Index num_labels = int_pow(4, n);
    std::vector<std::vector<std::int64_t>> label_counts(2);
    for (std::size_t b = 0; b < 2; ++b) {
        if (cfg.mode == SamplingMode::aggregate) {
            label_counts[b] = box.pauli_label_counts(b, c.T);
        } else {
            label_counts[b].assign(static_cast<std::size_t>(num_labels), 0);
            for (std::int64_t t = 0; t < c.T; ++t) {
                ++label_counts[b][static_cast<std::size_t>(box.measure_choi_pauli_basis(ChoiSample{b}).index())];
            }
        }
    }
    std::set<Eigen::Index> nonzero_labels;
    for (std::size_t b = 0; b < 2; ++b) {
        for (Eigen::Index l = 1; l < num_labels; ++l) {
            if (label_counts[b][static_cast<std::size_t>(l)] > 0) {
                nonzero_labels.insert(l);
            }
        }
    }
    v.stage_stats["distinct_nonidentity_labels"] = static_cast<double>(nonzero_labels.size());
    if (nonzero_labels.empty()) {
        v.notes.push_back("only_identity_label_observed");
        return finish(internal::reject(v, "label_ambiguous"));
    }
    if (nonzero_labels.size() > 1) {
        return finish(internal::reject(v, "labels"));
    }
    const PauliLabel ab = PauliLabel::from_index(*nonzero_labels.begin(), 2, n);
    v.stage_stats["label_index"] = static_cast<double>(ab.index());
    for (std::size_t b = 0; b < 2; ++b) {
        const double f0 = c.T > 0 ? static_cast<double>(label_counts[b][0]) / static_cast<double>(c.T) : 0.0;
        v.stage_stats["identity_label_fraction_" + std::to_string(b + 1)] = f0;
    }
    for (std::size_t b = 0; b < 2; ++b) {
        const double f0 = v.stage_stats["identity_label_fraction_" + std::to_string(b + 1)];
        if (std::abs(f0 - 0.5) > window) {
            return finish(internal::reject(v, "label_fraction"));
        }
    }

    // Sign checks: branch 1 must give +1, branch 2 must give -1.
    for (std::size_t b = 0; b < 2; ++b) {
        const int expected = b == 0 ? +1 : -1;
        std::int64_t wrong = 0;
        if (cfg.mode == SamplingMode::aggregate) {
            std::int64_t minus = box.stabilizer_minus_counts(b, ab, c.W);
            wrong = expected == +1 ? minus : c.W - minus;
        } else {
            for (std::int64_t w = 0; w < c.W && wrong == 0; ++w) {
                if (box.measure_stabilizer_sign(ChoiSample{b}, ab) != expected) {
                    ++wrong;
                }
            }
        }
        if (wrong > 0) {
            v.stage_stats["sign_failure_branch"] = static_cast<double>(b + 1);
            return finish(internal::reject(v, "sign"));
        }
    }
    return finish(internal::accept(v));
}

/// k-local tester: accept iff the union of supports of L sampled labels has at most k sites.
inline Verdict test_klocal(BlackBox &box, int k, const TesterConfig &cfg) {
    Verdict v = internal::start_verdict("klocal", cfg);
    if (k < 0) {
        throw Error("test_klocal: k must be non-negative");
    }
    const std::int64_t L = klocal_queries(std::max(k, 1), cfg.epsilon, cfg.constant_scale);
    v.params["L"] = static_cast<double>(L);
    v.params["k"] = k;
    const std::uint64_t q0 = box.query_count();
    const int n = box.qudits();
    std::uint64_t mask = 0;
    if (cfg.mode == SamplingMode::aggregate) {
        auto counts = box.query_label_counts(L);
        for (std::size_t idx = 0; idx < counts.size(); ++idx) {
            if (counts[idx] > 0) {
                mask |= support_mask(PauliLabel::from_index(static_cast<Eigen::Index>(idx), box.local_dim(), n));
            }
        }
    } else {
        for (std::int64_t q = 0; q < L; ++q) {
            ChoiSample s = box.query_on_choi();
            mask |= support_mask(box.measure_choi_pauli_basis(s));
        }
    }
    const int size = std::popcount(mask);
    v.stage_stats["support_size"] = size;
    v.stage_stats["support_mask"] = static_cast<double>(mask);
    v.query_count = box.query_count() - q0;
    return size <= k ? internal::accept(v) : internal::reject(v, "support");
}

/// Permutation-invariance tester: L Schur iterations, reject at the first failure.
inline Verdict test_perminv(BlackBox &box, const SchurBasis &basis, const TesterConfig &cfg) {
    Verdict v = internal::start_verdict("perminv", cfg);
    if (basis.dim() != box.dim() || basis.d != box.local_dim()) {
        throw DimensionMismatch("test_perminv: Schur basis does not match the hidden measurement");
    }
    const std::int64_t L = perminv_queries(cfg.epsilon, cfg.constant_scale);
    v.params["L"] = static_cast<double>(L);
    const std::uint64_t q0 = box.query_count();
    std::int64_t passes = 0;
    if (cfg.mode == SamplingMode::aggregate) {
        passes = box.schur_passes_until_failure(basis, L);
    } else {
        while (passes < L && box.schur_iteration(basis)) {
            ++passes;
        }
    }
    v.stage_stats["passes"] = static_cast<double>(passes);
    v.stage_stats["audit_pass_probability"] = box.schur_pass_probability(basis);
    v.query_count = box.query_count() - q0;
    return passes >= L ? internal::accept(v) : internal::reject(v, "schur_iteration");
}

/// Members S, their maximum outcome count k and minimum pairwise distance gamma.
struct FiniteSetSpec {
    std::vector<Measurement> members;
    double gamma = 0.0;
    int k = 0;

    static FiniteSetSpec make(std::vector<Measurement> members) {
        if (members.empty()) {
            throw Error("FiniteSetSpec: at least one member required");
        }
        FiniteSetSpec s;
        s.gamma = 1.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (members[i].dim() != members[0].dim()) {
                throw DimensionMismatch("FiniteSetSpec: members differ in dimension");
            }
            s.k = std::max(s.k, static_cast<int>(members[i].size()));
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                s.gamma = std::min(s.gamma, delta(members[i], members[j]));
            }
        }
        if (!(s.gamma > 0.0)) {
            throw Error("FiniteSetSpec: two members are at distance 0");
        }
        s.members = std::move(members);
        return s;
    }
};

/// Finite-set tester. Reject stages: outcome_beyond_k, no_candidates, projection.
inline Verdict test_finite_set(BlackBox &box, const FiniteSetSpec &set, const TesterConfig &cfg) {
    Verdict v = internal::start_verdict("finite-set", cfg);
    for (const auto &m : set.members) {
        if (m.dim() != box.dim()) {
            throw DimensionMismatch("test_finite_set: member dimension differs from the hidden measurement");
        }
    }
    const int k = set.k;
    const double a = std::min(cfg.epsilon, set.gamma);
    const FiniteSetConstants c = finite_set_constants(k, set.members.size(), a, cfg.constant_scale);
    const std::int64_t L = c.L;
    v.params["L"] = static_cast<double>(L);
    v.params["k"] = k;
    v.params["m"] = static_cast<double>(set.members.size());
    v.params["gamma"] = set.gamma;
    v.params["a"] = a;
    const std::uint64_t q0 = box.query_count();
    auto finish = [&](Verdict &out) -> Verdict {
        out.query_count = box.query_count() - q0;
        return out;
    };

    std::vector<std::int64_t> counts;
    if (cfg.mode == SamplingMode::aggregate) {
        counts = box.query_outcome_counts(L);
    } else {
        for (std::int64_t q = 0; q < L; ++q) {
            std::size_t o = box.query_on_choi().outcome;
            if (o >= counts.size()) {
                counts.resize(o + 1, 0);
            }
            ++counts[o];
        }
    }
    for (std::size_t j = static_cast<std::size_t>(k); j < counts.size(); ++j) {
        if (counts[j] > 0) {
            return finish(internal::reject(v, "outcome_beyond_k"));
        }
    }
    counts.resize(static_cast<std::size_t>(k), 0);

    const double big = 0.1 * a * a * static_cast<double>(L) / k;
    std::vector<std::vector<ComplexMatrix>> candidates;
    std::vector<std::size_t> candidate_ids;
    for (std::size_t i = 0; i < set.members.size(); ++i) {
        const Measurement &m = set.members[i];
        bool in = true;
        bool undefined = false;
        for (std::size_t j = 0; j < counts.size(); ++j) {
            const double pj = choi_prob(m.op_or_zero(j));
            if (static_cast<double>(counts[j]) >= big &&
                !(pj >= (1.0 - 0.1 * a * a) * static_cast<double>(counts[j]) / static_cast<double>(L))) {
                in = false;
            }
            if (counts[j] > 0 && pj == 0.0) {
                undefined = true;
            }
        }
        if (in && undefined) {
            v.notes.push_back("member_" + std::to_string(i) + "_excluded_zero_operator");
            in = false;
        }
        if (in) {
            std::vector<ComplexMatrix> ops;
            for (std::size_t j = 0; j < counts.size(); ++j) {
                ops.push_back(m.op_or_zero(j));
            }
            candidates.push_back(std::move(ops));
            candidate_ids.push_back(i);
        }
    }
    v.stage_stats["candidates"] = static_cast<double>(candidates.size());
    if (candidates.empty()) {
        return finish(internal::reject(v, "no_candidates"));
    }
    const double p = box.tensor_projection_probability(counts, candidates);
    v.stage_stats["projection_probability"] = p;
    if (candidate_ids.size() == 1) {
        v.stage_stats["candidate_index"] = static_cast<double>(candidate_ids[0]);
    }
    return finish(box.rng().bernoulli(p) ? internal::accept(v) : internal::reject(v, "projection"));
}

/// sqrt(max(2 p0 - 1, 0)) from `copies` swap tests on pairs with |<phi|psi>| = overlap.
inline double estimate_overlap(std::int64_t copies, double overlap, Rng &rng,
                               SamplingMode mode = SamplingMode::aggregate) {
    if (copies < 1) {
        throw Error("estimate_overlap: at least one copy required");
    }
    overlap = std::clamp(overlap, 0.0, 1.0);
    std::int64_t zeros = 0;
    if (mode == SamplingMode::aggregate) {
        zeros = swap_test_zero_count(overlap, copies, rng);
    } else {
        for (std::int64_t c = 0; c < copies; ++c) {
            zeros += swap_test_sample(overlap, rng) == 0 ? 1 : 0;
        }
    }
    const double p0 = static_cast<double>(zeros) / static_cast<double>(copies);
    return std::sqrt(std::max(2.0 * p0 - 1.0, 0.0));
}

/// Distance estimator on two boxes with at most k outcomes each. Returns
/// sqrt(max(0, 1 - sum_{A cap B} sqrt(a_i b_i) lambda_i)).
inline Verdict estimate_distance(BlackBox &m, BlackBox &n, int k, const TesterConfig &cfg) {
    Verdict v = internal::start_verdict("estimate", cfg);
    if (m.dim() != n.dim()) {
        throw DimensionMismatch("estimate_distance: dimension mismatch");
    }
    if (k < 1) {
        throw Error("estimate_distance: k must be positive");
    }
    const DistanceConstants c = distance_constants(k, cfg.epsilon, cfg.constant_scale);
    v.params["L"] = static_cast<double>(c.L);
    v.params["T"] = static_cast<double>(c.T);
    v.params["k"] = k;
    v.params["threshold"] = c.threshold;
    const std::uint64_t q0 = m.query_count() + n.query_count();

    auto counts_of = [&](BlackBox &box) {
        std::vector<std::int64_t> counts;
        if (cfg.mode == SamplingMode::aggregate) {
            counts = box.query_outcome_counts(c.L);
        } else {
            for (std::int64_t q = 0; q < c.L; ++q) {
                std::size_t o = box.query_on_choi().outcome;
                if (o >= counts.size()) {
                    counts.resize(o + 1, 0);
                }
                ++counts[o];
            }
        }
        for (std::size_t j = static_cast<std::size_t>(k); j < counts.size(); ++j) {
            if (counts[j] > 0) {
                v.notes.push_back("outcome_beyond_k_ignored");
                break;
            }
        }
        counts.resize(static_cast<std::size_t>(k), 0);
        return counts;
    };
    const auto ca = counts_of(m);
    const auto cb = counts_of(n);

    Rng rng = Rng::derive(cfg.seed, 6);
    const std::int64_t copies = std::max<std::int64_t>(c.T, 1);
    if (c.T < 1) {
        v.notes.push_back("T_below_1_used_1");
    }
    double sum = 0.0;
    int used = 0;
    for (int i = 0; i < k; ++i) {
        const double ai = static_cast<double>(ca[static_cast<std::size_t>(i)]) / static_cast<double>(c.L);
        const double bi = static_cast<double>(cb[static_cast<std::size_t>(i)]) / static_cast<double>(c.L);
        if (ai < c.threshold || bi < c.threshold) {
            continue;
        }
        if (ca[static_cast<std::size_t>(i)] < copies || cb[static_cast<std::size_t>(i)] < copies) {
            v.notes.push_back("fewer_than_T_copies_outcome_" + std::to_string(i + 1));
        }
        const double lambda = estimate_overlap(copies, choi_overlap(m, n, static_cast<std::size_t>(i)), rng, cfg.mode);
        v.stage_stats["lambda_" + std::to_string(i + 1)] = lambda;
        sum += std::sqrt(ai * bi) * lambda;
        ++used;
    }
    v.stage_stats["outcomes_compared"] = used;
    v.stage_stats["weighted_overlap_sum"] = sum;
    v.stage_stats["printed_formula_value"] = std::sqrt(std::max(sum, 0.0));
    v.estimate = std::sqrt(std::max(0.0, 1.0 - sum));
    v.query_count = m.query_count() + n.query_count() - q0;
    return internal::accept(v);
}

/// Identity test under the promise Delta = 0 or Delta >= eps: estimate at eps/2, accept "same" iff below eps/2.
inline Verdict test_identity(BlackBox &m, BlackBox &n, int k, const TesterConfig &cfg) {
    TesterConfig half = cfg;
    half.epsilon = cfg.epsilon / 2.0;
    Verdict v = estimate_distance(m, n, k, half);
    v.tester = "identity";
    v.params["epsilon"] = cfg.epsilon;
    v.params["estimate_precision"] = half.epsilon;
    v.notes.push_back("promise_unchecked");
    if (*v.estimate < half.epsilon) {
        internal::accept(v);
    } else {
        internal::reject(v, "different");
    }
    return v;
}

} // namespace qmtest
