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

// Acceptance gate: one line per criterion, nonzero exit if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include "qmtest/qmtest.hpp"

namespace {

using namespace qmtest;

struct Outcome {
    bool pass = false;
    std::string detail;
};

TesterConfig config(double eps, std::uint64_t seed, double scale = 1.0,
                    SamplingMode mode = SamplingMode::aggregate) {
    TesterConfig c;
    c.epsilon = eps;
    c.seed = seed;
    c.constant_scale = scale;
    c.mode = mode;
    return c;
}

std::string fmt(const char *f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome metric_closed_form() {
    Rng rng(101);
    double worst = 0.0;
    int pairs = 0;
    for (Eigen::Index d : {2, 4, 8}) {
        for (int t = 0; t < 167; ++t, ++pairs) {
            ComplexMatrix a = random_gaussian_matrix(d, d, rng);
            ComplexMatrix b = random_gaussian_matrix(d, d, rng);
            worst = std::max(worst, std::abs(delta_op(a, b) - delta_op_numeric(a, b)));
        }
    }
    return {pairs >= 500 && worst <= 1e-9, std::to_string(pairs) + " pairs, max |closed - numeric| " + fmt("%.2e", worst)};
}

Outcome metric_axioms() {
    Rng rng(102);
    std::map<std::string, int> violations;
    int triples = 0;
    for (Eigen::Index d : {2, 4, 8}) {
        for (int t = 0; t < 500; ++t, ++triples) {
            Measurement a = random_measurement(d, 1 + rng.next() % 4, rng);
            Measurement b = random_measurement(d, 1 + rng.next() % 4, rng);
            Measurement c = random_measurement(d, 1 + rng.next() % 4, rng);
            const double ab = delta(a, b);
            const double ba = delta(b, a);
            const double ac = delta(a, c);
            const double cb = delta(c, b);
            violations["nonnegative"] += !(ab >= 0.0);
            violations["symmetry"] += std::abs(ab - ba) > 1e-12;
            violations["triangle"] += ab > ac + cb + 1e-10;
            violations["bounded"] += ab > 1.0 + 1e-12;
            std::vector<ComplexMatrix> phased;
            for (const auto &op : a.operators()) {
                phased.push_back(std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform()) * op);
            }
            violations["phase_class_zero"] += delta(a, Measurement::validate(phased)) > 1e-6;
            violations["distinct_positive"] += !(ab > 0.0);
            if (d <= 4) {
                const Eigen::Index anc = 1 + static_cast<Eigen::Index>(rng.next() % 3);
                violations["ancilla"] += std::abs(ab - delta(with_ancilla(a, anc), with_ancilla(b, anc))) > 1e-10;
            }
        }
    }
    int total = 0;
    std::string detail = std::to_string(triples) + " triples;";
    for (const auto &[name, count] : violations) {
        total += count;
        detail += " " + name + "=" + std::to_string(count);
    }
    return {total == 0, detail};
}

Outcome behavior_gap() {
    Rng rng(103);
    int within = 0;
    for (int t = 0; t < 20; ++t) {
        Measurement m = random_measurement(4, 2 + rng.next() % 2, rng);
        Measurement n = random_measurement(4, 2 + rng.next() % 2, rng);
        BehaviorGap g = behavior_gap_mc(m, n, 100000, rng);
        within += std::abs(g.mean - 2.0 * delta_measurement(m, n).delta_squared) <= 3.0 * g.std_error;
    }
    return {within >= 18, std::to_string(within) + "/20 pairs with mean within 3 standard errors of 2 Delta^2"};
}

Outcome stabilizer_tester() {
    const Measurement p = stabilizer_measurement({1, 0}, {0, 1});
    const CertifiedFixture far = far_stabilizer_fixture(2, 0.4, 1);
    const Measurement four = computational_basis(4);
    const double four_cert = distance_to_stabilizer_family(four).best_delta;
    int accept_p = 0;
    int reject_far = 0;
    int reject_four = 0;
    for (std::uint64_t s = 1; s <= 40; ++s) {
        BlackBox bp(p, s);
        accept_p += test_stabilizer(bp, config(0.4, s)).accept;
        BlackBox bf(far.measurement, s);
        reject_far += !test_stabilizer(bf, config(0.4, s)).accept;
        BlackBox b4(four, s);
        reject_four += !test_stabilizer(b4, config(0.4, s)).accept;
    }
    std::ostringstream os;
    os << "stabilizer accepted " << accept_p << "/40; far fixture (certificate " << fmt("%.4f", far.certificate)
       << ") rejected " << reject_far << "/40; 4-outcome (certificate " << fmt("%.4f", four_cert) << ") rejected "
       << reject_four << "/40";
    return {accept_p >= 30 && far.certificate >= 0.4 && reject_far >= 30 && four_cert >= 0.4 && reject_four == 40,
            os.str()};
}

Outcome klocal_tester() {
    const Measurement local = local_amplitude_damping(3, 0.3, 0);
    const Measurement full = stabilizer_measurement({1, 1, 1}, {0, 0, 0});
    const double cert = klocal_distance_lower_bound(full, 1);
    int accept_local = 0;
    int reject_full = 0;
    for (std::uint64_t s = 1; s <= 40; ++s) {
        BlackBox bl(local, s);
        accept_local += test_klocal(bl, 1, config(0.4, s)).accept;
        BlackBox bf(full, s);
        reject_full += !test_klocal(bf, 1, config(0.4, s)).accept;
    }
    std::ostringstream os;
    os << "1-local accepted " << accept_local << "/40; full-support stabilizer (certificate " << fmt("%.4f", cert)
       << ") rejected " << reject_full << "/40";
    return {accept_local == 40 && cert >= 0.5411 && reject_full >= 30, os.str()};
}

Outcome perminv_tester() {
    const SchurBasis basis = build_schur_transform(2, 2);
    const Measurement iso = isotypic_projectors(basis);
    const Measurement comp = computational_basis(4);
    int accept_iso = 0;
    int accept_comp = 0;
    for (std::uint64_t s = 1; s <= 400; ++s) {
        BlackBox bi(iso, s);
        accept_iso += test_perminv(bi, basis, config(0.5, s)).accept;
        BlackBox bc(comp, s);
        accept_comp += test_perminv(bc, basis, config(0.5, s)).accept;
    }
    const double p = std::pow(0.75, 20);
    const double sigma = std::sqrt(p * (1.0 - p) / 400.0);
    const double freq = accept_comp / 400.0;
    std::ostringstream os;
    os << "isotypic accepted " << accept_iso << "/400; computational basis accepted " << accept_comp
       << "/400 (expected " << fmt("%.4f", p) << ", 3 sigma " << fmt("%.4f", 3 * sigma) << ")";
    return {accept_iso == 400 && std::abs(freq - p) <= 3.0 * sigma, os.str()};
}

Outcome finite_set_tester() {
    const FiniteSetSpec set = FiniteSetSpec::make(
        {stabilizer_measurement({0}, {1}), stabilizer_measurement({1}, {0}), stabilizer_measurement({1}, {1})});
    const CertifiedFixture far = far_single_qubit_fixture();
    int accept_member = 0;
    int reject_far = 0;
    std::uint64_t queries = 0;
    for (std::uint64_t s = 1; s <= 40; ++s) {
        BlackBox bm(set.members[0], s);
        Verdict v = test_finite_set(bm, set, config(0.5, s));
        accept_member += v.accept;
        queries = v.query_count;
        BlackBox bf(far.measurement, s);
        reject_far += !test_finite_set(bf, set, config(0.5, s)).accept;
    }
    std::ostringstream os;
    os << "gamma " << fmt("%.4f", set.gamma) << ", k " << set.k << ", L " << queries << "; member accepted "
       << accept_member << "/40; far fixture (certificate " << fmt("%.4f", far.certificate) << ") rejected "
       << reject_far << "/40";
    const bool gamma_ok = std::abs(set.gamma - 1.0 / std::numbers::sqrt2) <= 1e-9 && set.k == 2;
    return {gamma_ok && far.certificate >= 0.5 && accept_member >= 30 && reject_far >= 30, os.str()};
}

Outcome distance_estimator() {
    const Measurement a = stabilizer_measurement({0}, {1});
    const Measurement b = stabilizer_measurement({1}, {0});
    const double exact = delta(a, b);
    int close = 0;
    int small = 0;
    for (std::uint64_t s = 1; s <= 25; ++s) {
        BlackBox ba(a, s);
        BlackBox bb(b, 1000 + s);
        close += std::abs(*estimate_distance(ba, bb, 2, config(0.6, s)).estimate - exact) <= 0.6;
        BlackBox ca(a, s);
        BlackBox cb(a, 2000 + s);
        small += *estimate_distance(ca, cb, 2, config(0.6, s)).estimate <= 0.6;
    }
    std::ostringstream os;
    os << "exact Delta " << fmt("%.5f", exact) << "; pair within 0.6 in " << close << "/25; identical boxes <= 0.6 in "
       << small << "/25";
    return {std::abs(exact - 0.70711) <= 1e-5 && close >= 20 && small >= 20, os.str()};
}

Outcome schur_transform() {
    double worst_unitarity = 0.0;
    double worst_block = 0.0;
    bool counts_ok = true;
    bool all_perms = true;
    for (auto [d, n] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{2, 4}, std::pair{2, 5}, std::pair{3, 2},
                        std::pair{3, 3}}) {
        SchurBasis basis = build_schur_transform(d, n);
        SchurResiduals r = schur_residuals(basis, 20);
        worst_unitarity = std::max(worst_unitarity, r.unitarity);
        worst_block = std::max({worst_block, r.permutation, r.tensor_power});
        std::int64_t fact = 1;
        for (int k = 2; k <= n; ++k) {
            fact *= k;
        }
        all_perms = all_perms && static_cast<std::int64_t>(r.permutations_checked) == fact && r.operators_checked == 20;
        std::int64_t total = 0;
        for (const auto &p : partitions(n, d)) {
            total += dim_sn(p) * dim_gl(p, d);
        }
        counts_ok = counts_ok && total == int_pow(d, n);
    }
    const std::int64_t v531 = dim_sn(Partition{{5, 3, 1}});
    std::ostringstream os;
    os << "max unitarity residual " << fmt("%.2e", worst_unitarity) << ", max block residual "
       << fmt("%.2e", worst_block) << ", dimension audit " << (counts_ok ? "exact" : "FAILED") << ", v_(5,3,1) = "
       << v531;
    return {worst_unitarity <= 1e-10 && worst_block <= 1e-8 && counts_ok && all_perms && v531 == 162, os.str()};
}

Outcome bound_suites() {
    const SchurBasis b22 = build_schur_transform(2, 2);
    const SchurBasis b23 = build_schur_transform(2, 3);
    const SchurBasis b32 = build_schur_transform(3, 2);
    std::vector<std::pair<BoundCheck, std::size_t>> checks{
        {check_stabilizer_closeness(200, 1001), 200},
        {check_klocal_construction(100, 1002), 100},
        {check_perminv_construction(100, 1003, {&b22, &b23, &b32}), 100},
        {check_tensor_overlap_bound(100, 1004), 100},
        {check_projection_bound(100, 1005), 100},
        {check_small_outcome_tail(100, 1006), 100},
        {check_fidelity_variational(10000, 1007), 10000},
        {check_outcome_lower_bound(500, 1008), 500},
    };
    bool ok = true;
    std::string detail;
    for (const auto &[c, want] : checks) {
        ok = ok && c.ok() && c.instances == want;
        detail += (detail.empty() ? "" : "; ") + c.name + " " + std::to_string(c.violations) + "/" +
                  std::to_string(c.instances);
    }
    return {ok, "violations: " + detail};
}

// Categorical verdict frequencies from the two sampling modes agree within 3 sigma per category.
bool modes_agree(const std::map<std::string, int> &a, const std::map<std::string, int> &b, int runs,
                 std::string &detail) {
    std::map<std::string, int> keys = a;
    for (const auto &[k, v] : b) {
        keys[k] += 0;
    }
    bool ok = true;
    for (const auto &[k, unused] : keys) {
        const double fa = (a.count(k) ? a.at(k) : 0) / static_cast<double>(runs);
        const double fb = (b.count(k) ? b.at(k) : 0) / static_cast<double>(runs);
        const double pooled = 0.5 * (fa + fb);
        const double sigma = std::sqrt(pooled * (1.0 - pooled) * 2.0 / runs);
        const bool agree = std::abs(fa - fb) <= 3.0 * sigma;
        ok = ok && agree;
        detail += " " + k + " " + fmt("%.3f", fa) + "/" + fmt("%.3f", fb);
    }
    return ok;
}

Outcome mode_equivalence() {
    const int runs = 200;
    const double scale = 0.01;
    const SchurBasis basis = build_schur_transform(2, 2);
    const CertifiedFixture far = far_stabilizer_fixture(2, 0.4, 1);
    const Measurement flip = weak_global_flip(3, 0.005);
    const Measurement comp = computational_basis(4);
    struct Case {
        std::string name;
        std::function<Verdict(std::uint64_t, SamplingMode)> run;
    };
    std::vector<Case> cases{
        {"stabilizer",
         [&](std::uint64_t s, SamplingMode m) {
             BlackBox box(far.measurement, s);
             return test_stabilizer(box, config(0.4, s, scale, m));
         }},
        {"klocal",
         [&](std::uint64_t s, SamplingMode m) {
             BlackBox box(flip, s);
             return test_klocal(box, 1, config(0.4, s, scale, m));
         }},
        {"perminv",
         [&](std::uint64_t s, SamplingMode m) {
             BlackBox box(comp, s);
             return test_perminv(box, basis, config(0.5, s, scale, m));
         }},
    };
    bool ok = true;
    std::string detail = "accept-or-stage frequencies aggregate/per-trial:";
    for (const auto &c : cases) {
        std::map<std::string, int> agg;
        std::map<std::string, int> per;
        for (int r = 0; r < runs; ++r) {
            ++agg[c.run(static_cast<std::uint64_t>(r + 1), SamplingMode::aggregate).category()];
            ++per[c.run(static_cast<std::uint64_t>(r + 100001), SamplingMode::per_trial).category()];
        }
        detail += " [" + c.name;
        ok = modes_agree(agg, per, runs, detail) && ok;
        detail += "]";
    }
    return {ok, detail};
}

struct Criterion {
    const char *name;
    double budget_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"metric closed form matches the numeric phase infimum", 10, metric_closed_form},
        {"metric axioms hold on random measurement triples", 60, metric_axioms},
        {"behavior gap mean equals twice the squared distance", 120, behavior_gap},
        {"stabilizer tester accepts members and rejects certified-far inputs", 300, stabilizer_tester},
        {"k-local tester accepts local inputs and rejects full support", 60, klocal_tester},
        {"permutation-invariance tester matches the Schur pass probability", 60, perminv_tester},
        {"finite-set tester separates members from a certified-far input", 300, finite_set_tester},
        {"distance estimator is within epsilon with confidence 0.8", 600, distance_estimator},
        {"Schur transform residuals and dimension audit", 120, schur_transform},
        {"analytic bound suites report zero violations", 120, bound_suites},
        {"aggregate and per-trial sampling give matching verdicts", 180, mode_equivalence},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs <= criteria[i].budget_seconds;
        failures += !pass;
        std::printf("%s %2zu %s: %s (%.2fs, budget %.0fs)\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    o.detail.c_str(), secs, criteria[i].budget_seconds);
        std::fflush(stdout);
    }
    std::printf("%s: %zu/%zu criteria passed\n", failures == 0 ? "ACCEPTED" : "NOT ACCEPTED",
                criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
