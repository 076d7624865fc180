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
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

#include "qmtest/core.hpp"
#include "qmtest/pauli.hpp"
#include "qmtest/random.hpp"

namespace qmtest {

/// Non-increasing positive parts.
struct Partition {
    std::vector<int> parts;

    int n() const {
        return std::accumulate(parts.begin(), parts.end(), 0);
    }
    int rows() const {
        return static_cast<int>(parts.size());
    }
    bool operator==(const Partition &) const = default;
    std::string str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) {
                s += ",";
            }
            s += std::to_string(parts[i]);
        }
        return s + ")";
    }
};

/// Partitions of n into at most d parts, lexicographically decreasing.
inline std::vector<Partition> partitions(int n, int d) {
    std::vector<Partition> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int remaining, int max_part) {
        if (remaining == 0) {
            out.push_back(Partition{cur});
            return;
        }
        if (static_cast<int>(cur.size()) == d) {
            return;
        }
        for (int p = std::min(remaining, max_part); p >= 1; --p) {
            cur.push_back(p);
            rec(remaining - p, p);
            cur.pop_back();
        }
    };
    if (n >= 1 && d >= 1) {
        rec(n, n);
    }
    return out;
}

/// hooks[i][j] = arm + leg + 1 for the box in row i, column j (0-based).
inline std::vector<std::vector<int>> hook_lengths(const Partition &lambda) {
    std::vector<std::vector<int>> hooks(lambda.parts.size());
    for (std::size_t i = 0; i < lambda.parts.size(); ++i) {
        for (int j = 0; j < lambda.parts[i]; ++j) {
            int arm = lambda.parts[i] - j - 1;
            int leg = 0;
            for (std::size_t r = i + 1; r < lambda.parts.size() && lambda.parts[r] > j; ++r) {
                ++leg;
            }
            hooks[i].push_back(arm + leg + 1);
        }
    }
    return hooks;
}

/// v_lambda = n! / prod hooks.
inline std::int64_t dim_sn(const Partition &lambda) {
    __int128 num = 1;
    for (int k = 2; k <= lambda.n(); ++k) {
        num *= k;
    }
    __int128 den = 1;
    for (const auto &row : hook_lengths(lambda)) {
        for (int h : row) {
            den *= h;
        }
    }
    if (num % den != 0) {
        throw Error("dim_sn: hook-length quotient is not an integer for " + lambda.str());
    }
    return static_cast<std::int64_t>(num / den);
}

/// w_{lambda,d} = prod (d + j - i) / hook(i, j); zero when lambda has more than d rows.
inline std::int64_t dim_gl(const Partition &lambda, int d) {
    if (lambda.rows() > d) {
        return 0;
    }
    __int128 num = 1;
    __int128 den = 1;
    auto hooks = hook_lengths(lambda);
    for (std::size_t i = 0; i < lambda.parts.size(); ++i) {
        for (int j = 0; j < lambda.parts[i]; ++j) {
            num *= d + j - static_cast<int>(i);
            den *= hooks[i][static_cast<std::size_t>(j)];
        }
    }
    if (num % den != 0) {
        throw Error("dim_gl: quotient is not an integer for " + lambda.str());
    }
    return static_cast<std::int64_t>(num / den);
}

/// tau[m] is the image of position m (0-based).
using Permutation = std::vector<int>;

inline Permutation identity_permutation(int n) {
    Permutation p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    return p;
}

/// (sigma o tau)(m) = sigma(tau(m)).
inline Permutation compose(const Permutation &sigma, const Permutation &tau) {
    Permutation out(tau.size());
    for (std::size_t m = 0; m < tau.size(); ++m) {
        out[m] = sigma[static_cast<std::size_t>(tau[m])];
    }
    return out;
}

inline Permutation adjacent_transposition(int n, int k) {
    Permutation p = identity_permutation(n);
    std::swap(p[static_cast<std::size_t>(k)], p[static_cast<std::size_t>(k + 1)]);
    return p;
}

inline void check_permutation(const Permutation &tau) {
    std::vector<bool> seen(tau.size(), false);
    for (int v : tau) {
        if (v < 0 || v >= static_cast<int>(tau.size()) || seen[static_cast<std::size_t>(v)]) {
            throw Error("invalid permutation");
        }
        seen[static_cast<std::size_t>(v)] = true;
    }
}

/// Basis-index action of the tensor-factor permutation: out[j] is the image of basis state j.
inline std::vector<Eigen::Index> permutation_index_map(const Permutation &tau, int d) {
    const int n = static_cast<int>(tau.size());
    const Eigen::Index dim = int_pow(d, n);
    std::vector<Eigen::Index> out(static_cast<std::size_t>(dim));
    std::vector<int> in_digits(static_cast<std::size_t>(n));
    std::vector<int> out_digits(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < dim; ++j) {
        Eigen::Index t = j;
        for (int s = n - 1; s >= 0; --s) {
            in_digits[static_cast<std::size_t>(s)] = static_cast<int>(t % d);
            t /= d;
        }
        for (int m = 0; m < n; ++m) {
            out_digits[static_cast<std::size_t>(tau[static_cast<std::size_t>(m)])] = in_digits[static_cast<std::size_t>(m)];
        }
        Eigen::Index r = 0;
        for (int s = 0; s < n; ++s) {
            r = r * d + out_digits[static_cast<std::size_t>(s)];
        }
        out[static_cast<std::size_t>(j)] = r;
    }
    return out;
}

/// Moves the tensor factor at position m to position tau(m): |phi_1..phi_n> -> |phi_{tau^-1(1)}..phi_{tau^-1(n)}>.
inline ComplexMatrix permutation_operator(const Permutation &tau, int d) {
    check_permutation(tau);
    auto map = permutation_index_map(tau, d);
    const Eigen::Index dim = static_cast<Eigen::Index>(map.size());
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        out(map[static_cast<std::size_t>(j)], j) = 1.0;
    }
    return out;
}

/// All n! permutations in lexicographic order.
inline std::vector<Permutation> all_permutations(int n) {
    std::vector<Permutation> out;
    Permutation p = identity_permutation(n);
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/// A standard Young tableau stored as (row, col) of each entry 0..n-1.
struct Tableau {
    std::vector<int> row;
    std::vector<int> col;

    int content(int k) const {
        return col[static_cast<std::size_t>(k)] - row[static_cast<std::size_t>(k)];
    }
    bool operator<(const Tableau &o) const {
        return std::tie(row, col) < std::tie(o.row, o.col);
    }
    bool operator==(const Tableau &o) const = default;
};

/// Standard tableaux of lambda, ordered by the row word (entries placed 0..n-1), lexicographically.
inline std::vector<Tableau> standard_tableaux(const Partition &lambda) {
    const int n = lambda.n();
    std::vector<Tableau> out;
    std::vector<int> filled(lambda.parts.size(), 0);
    Tableau cur{std::vector<int>(static_cast<std::size_t>(n)), std::vector<int>(static_cast<std::size_t>(n))};
    std::function<void(int)> rec = [&](int k) {
        if (k == n) {
            out.push_back(cur);
            return;
        }
        for (std::size_t r = 0; r < lambda.parts.size(); ++r) {
            bool fits = filled[r] < lambda.parts[r] && (r == 0 || filled[r - 1] > filled[r]);
            if (!fits) {
                continue;
            }
            cur.row[static_cast<std::size_t>(k)] = static_cast<int>(r);
            cur.col[static_cast<std::size_t>(k)] = filled[r];
            ++filled[r];
            rec(k + 1);
            --filled[r];
        }
    };
    rec(0);
    std::sort(out.begin(), out.end());
    return out;
}

/// Young's orthogonal form of the adjacent transposition (k, k+1) on the tableaux basis.
inline Eigen::MatrixXd young_orthogonal_generator(const std::vector<Tableau> &tableaux, int k) {
    const Eigen::Index v = static_cast<Eigen::Index>(tableaux.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(v, v);
    for (Eigen::Index t = 0; t < v; ++t) {
        const Tableau &tab = tableaux[static_cast<std::size_t>(t)];
        const std::size_t k0 = static_cast<std::size_t>(k);
        const std::size_t k1 = k0 + 1;
        if (tab.row[k0] == tab.row[k1]) {
            out(t, t) = 1.0;
            continue;
        }
        if (tab.col[k0] == tab.col[k1]) {
            out(t, t) = -1.0;
            continue;
        }
        const double r = static_cast<double>(tab.content(k + 1) - tab.content(k));
        out(t, t) = 1.0 / r;
        Tableau swapped = tab;
        std::swap(swapped.row[k0], swapped.row[k1]);
        std::swap(swapped.col[k0], swapped.col[k1]);
        auto it = std::lower_bound(tableaux.begin(), tableaux.end(), swapped);
        if (it == tableaux.end() || !(*it == swapped)) {
            throw Error("young_orthogonal_generator: swapped tableau missing");
        }
        out(static_cast<Eigen::Index>(it - tableaux.begin()), t) = std::sqrt(1.0 - 1.0 / (r * r));
    }
    return out;
}

/// Irreducible orthogonal representations of every element of S_n, one per partition.
struct SymmetricGroupReps {
    int n = 0;
    std::vector<Permutation> elements;
    std::map<Permutation, std::size_t> index_of;
    /// reps[block][element].
    std::vector<std::vector<Eigen::MatrixXd>> reps;
};

/// BFS over S_n from the identity using rho(s_k o tau) = rho(s_k) rho(tau).
inline SymmetricGroupReps symmetric_group_reps(int n, const std::vector<Partition> &lambdas) {
    SymmetricGroupReps out;
    out.n = n;
    out.reps.resize(lambdas.size());
    std::vector<std::vector<Eigen::MatrixXd>> gens(lambdas.size());
    for (std::size_t b = 0; b < lambdas.size(); ++b) {
        auto tabs = standard_tableaux(lambdas[b]);
        for (int k = 0; k + 1 < n; ++k) {
            gens[b].push_back(young_orthogonal_generator(tabs, k));
        }
    }
    std::deque<std::size_t> queue;
    auto add = [&](Permutation p, const std::vector<Eigen::MatrixXd> &mats) {
        std::size_t idx = out.elements.size();
        out.index_of.emplace(p, idx);
        out.elements.push_back(std::move(p));
        for (std::size_t b = 0; b < lambdas.size(); ++b) {
            out.reps[b].push_back(mats[b]);
        }
        queue.push_back(idx);
    };
    std::vector<Eigen::MatrixXd> id;
    for (std::size_t b = 0; b < lambdas.size(); ++b) {
        const auto v = static_cast<Eigen::Index>(dim_sn(lambdas[b]));
        id.push_back(Eigen::MatrixXd::Identity(v, v));
    }
    add(identity_permutation(n), id);
    while (!queue.empty()) {
        std::size_t cur = queue.front();
        queue.pop_front();
        for (int k = 0; k + 1 < n; ++k) {
            Permutation next = compose(adjacent_transposition(n, k), out.elements[cur]);
            if (out.index_of.count(next)) {
                continue;
            }
            std::vector<Eigen::MatrixXd> mats;
            for (std::size_t b = 0; b < lambdas.size(); ++b) {
                mats.push_back(gens[b][static_cast<std::size_t>(k)] * out.reps[b][cur]);
            }
            add(std::move(next), mats);
        }
    }
    return out;
}

struct SchurBlock {
    Partition lambda;
    /// Dimension of the symmetric-group irrep V_lambda.
    std::int64_t v = 0;
    /// Dimension of the unitary-group irrep W_{lambda,d}.
    std::int64_t w = 0;
    /// First Schur-basis index of the block; entry (a, b) sits at offset + a * v + b.
    Eigen::Index offset = 0;
};

struct SchurIndex {
    int block = 0;
    int a = 0;
    int b = 0;
};

/// Columns of U are the Schur vectors |lambda, a, b>, so U^dagger tau U = (+)_lambda I_w (x) rho_lambda(tau)
/// and U^dagger E^{(x)n} U = (+)_lambda W_lambda(E) (x) I_v.
struct SchurBasis {
    int d = 2;
    int n = 0;
    ComplexMatrix U;
    std::vector<SchurBlock> blocks;
    std::vector<SchurIndex> index_map;
    SymmetricGroupReps group;

    Eigen::Index dim() const {
        return U.rows();
    }
};

namespace internal {

inline ComplexMatrix tensor_power(const ComplexMatrix &e, int n) {
    ComplexMatrix out = e;
    for (int i = 1; i < n; ++i) {
        out = kron(out, e);
    }
    return out;
}

// Frobenius distance of U^dagger P U from (+) I_w (x) rho(tau).
inline double permutation_residual(const SchurBasis &basis, std::size_t element) {
    auto map = permutation_index_map(basis.group.elements[element], basis.d);
    const Eigen::Index dim = basis.dim();
    ComplexMatrix pu(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        pu.row(map[static_cast<std::size_t>(j)]) = basis.U.row(j);
    }
    ComplexMatrix m = basis.U.adjoint() * pu;
    for (std::size_t b = 0; b < basis.blocks.size(); ++b) {
        const SchurBlock &blk = basis.blocks[b];
        const auto &rho = basis.group.reps[b][element];
        for (std::int64_t a = 0; a < blk.w; ++a) {
            m.block(blk.offset + a * blk.v, blk.offset + a * blk.v, blk.v, blk.v) -= rho.cast<cplx>();
        }
    }
    return m.norm();
}

// Frobenius distance of U^dagger E^{(x)n} U from the nearest (+) X_lambda (x) I_v.
inline double tensor_power_residual(const SchurBasis &basis, const ComplexMatrix &e) {
    ComplexMatrix m = basis.U.adjoint() * tensor_power(e, basis.n) * basis.U;
    for (const SchurBlock &blk : basis.blocks) {
        for (std::int64_t a = 0; a < blk.w; ++a) {
            for (std::int64_t a2 = 0; a2 < blk.w; ++a2) {
                cplx avg(0.0, 0.0);
                for (std::int64_t b = 0; b < blk.v; ++b) {
                    avg += m(blk.offset + a * blk.v + b, blk.offset + a2 * blk.v + b);
                }
                avg /= static_cast<double>(blk.v);
                for (std::int64_t b = 0; b < blk.v; ++b) {
                    m(blk.offset + a * blk.v + b, blk.offset + a2 * blk.v + b) -= avg;
                }
            }
        }
    }
    return m.norm();
}

inline ComplexMatrix random_unit_operator(Eigen::Index d, Rng &rng) {
    ComplexMatrix e = random_gaussian_matrix(d, d, rng);
    return e / e.norm();
}

} // namespace internal

struct SchurResiduals {
    double unitarity = 0.0;
    /// Max over checked permutations.
    double permutation = 0.0;
    /// Max over checked random E.
    double tensor_power = 0.0;
    std::size_t permutations_checked = 0;
    std::size_t operators_checked = 0;
};

/// Residual audit over every permutation in S_n and `random_operators` random E with ||E||_F = 1.
inline SchurResiduals schur_residuals(const SchurBasis &basis, int random_operators = 20, std::uint64_t seed = 0x5c1u) {
    SchurResiduals r;
    const Eigen::Index dim = basis.dim();
    r.unitarity = (basis.U.adjoint() * basis.U - ComplexMatrix::Identity(dim, dim)).norm();
    for (std::size_t g = 0; g < basis.group.elements.size(); ++g) {
        r.permutation = std::max(r.permutation, internal::permutation_residual(basis, g));
        ++r.permutations_checked;
    }
    Rng rng(seed, 0x5c4, 1);
    for (int i = 0; i < random_operators; ++i) {
        ComplexMatrix e = internal::random_unit_operator(basis.d, rng);
        r.tensor_power = std::max(r.tensor_power, internal::tensor_power_residual(basis, e));
        ++r.operators_checked;
    }
    return r;
}

inline constexpr Eigen::Index kMaxSchurDim = 1024;
inline constexpr double kSchurTolerance = 1e-8;

/// Builds U from group-algebra matrix units E_{b0} = (v/n!) sum_g rho(g)_{b0} P(g) applied to an orthonormal
/// basis of range(E_00). Verifies unitarity, the generators s_k, and three random E.
inline SchurBasis build_schur_transform(int d, int n) {
    if (d < 2 || n < 1) {
        throw DimensionMismatch("build_schur_transform: need d >= 2 and n >= 1");
    }
    if (n > 6 || int_pow(d, n) > kMaxSchurDim) {
        throw DimensionMismatch("build_schur_transform: d^n must be at most 1024 and n at most 6");
    }
    SchurBasis basis;
    basis.d = d;
    basis.n = n;
    const Eigen::Index dim = int_pow(d, n);
    std::vector<Partition> lambdas = partitions(n, d);
    basis.group = symmetric_group_reps(n, lambdas);
    const auto &elements = basis.group.elements;
    std::vector<std::vector<Eigen::Index>> maps;
    maps.reserve(elements.size());
    for (const auto &g : elements) {
        maps.push_back(permutation_index_map(g, d));
    }
    const double order = static_cast<double>(elements.size());

    basis.U = ComplexMatrix::Zero(dim, dim);
    Eigen::Index offset = 0;
    for (std::size_t bi = 0; bi < lambdas.size(); ++bi) {
        SchurBlock blk{lambdas[bi], dim_sn(lambdas[bi]), dim_gl(lambdas[bi], d), offset};
        const auto &reps = basis.group.reps[bi];
        std::vector<Eigen::MatrixXd> units;
        for (std::int64_t b = 0; b < blk.v; ++b) {
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim, dim);
            for (std::size_t g = 0; g < elements.size(); ++g) {
                double c = reps[g](b, 0);
                if (c == 0.0) {
                    continue;
                }
                for (Eigen::Index j = 0; j < dim; ++j) {
                    e(maps[g][static_cast<std::size_t>(j)], j) += c;
                }
            }
            units.push_back(e * (static_cast<double>(blk.v) / order));
        }
        // Orthonormal basis {u_a} of range(E_00) by Gram-Schmidt over its columns in order.
        std::vector<Eigen::VectorXd> us;
        for (Eigen::Index c = 0; c < dim && static_cast<std::int64_t>(us.size()) < blk.w; ++c) {
            Eigen::VectorXd col = units[0].col(c);
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto &u : us) {
                    col -= u.dot(col) * u;
                }
            }
            double nrm = col.norm();
            if (nrm > 1e-6) {
                us.push_back(col / nrm);
            }
        }
        if (static_cast<std::int64_t>(us.size()) != blk.w) {
            throw VerificationFailure("build_schur_transform: multiplicity space of " + blk.lambda.str() +
                                      " has wrong dimension");
        }
        for (std::int64_t a = 0; a < blk.w; ++a) {
            for (std::int64_t b = 0; b < blk.v; ++b) {
                Eigen::VectorXd vec = units[static_cast<std::size_t>(b)] * us[static_cast<std::size_t>(a)];
                basis.U.col(offset + a * blk.v + b) = vec.cast<cplx>();
                basis.index_map.push_back(SchurIndex{static_cast<int>(bi), static_cast<int>(a), static_cast<int>(b)});
            }
        }
        offset += blk.v * blk.w;
        basis.blocks.push_back(blk);
    }
    if (offset != dim) {
        throw VerificationFailure("build_schur_transform: block dimensions do not sum to d^n");
    }

    double unit = (basis.U.adjoint() * basis.U - ComplexMatrix::Identity(dim, dim)).norm();
    if (!(unit <= kSchurTolerance)) {
        throw VerificationFailure("build_schur_transform: unitarity residual " + std::to_string(unit));
    }
    for (int k = 0; k + 1 < n; ++k) {
        std::size_t g = basis.group.index_of.at(adjacent_transposition(n, k));
        double res = internal::permutation_residual(basis, g);
        if (!(res <= kSchurTolerance)) {
            throw VerificationFailure("build_schur_transform: permutation residual " + std::to_string(res));
        }
    }
    Rng rng(0x5c1u, 0x5c3, 0);
    for (int i = 0; i < 3; ++i) {
        double res = internal::tensor_power_residual(basis, internal::random_unit_operator(d, rng));
        if (!(res <= kSchurTolerance)) {
            throw VerificationFailure("build_schur_transform: tensor-power residual " + std::to_string(res));
        }
    }
    return basis;
}

inline ComplexMatrix to_schur(const ComplexMatrix &a, const SchurBasis &basis) {
    require_same_dim(a, basis.U, "to_schur");
    return basis.U.adjoint() * a * basis.U;
}

inline ComplexMatrix from_schur(const ComplexMatrix &a, const SchurBasis &basis) {
    require_same_dim(a, basis.U, "from_schur");
    return basis.U * a * basis.U.adjoint();
}

/// Projector onto the lambda isotypic component, in the computational basis.
inline ComplexMatrix isotypic_projector(const SchurBasis &basis, std::size_t block) {
    const SchurBlock &blk = basis.blocks.at(block);
    const Eigen::Index size = blk.v * blk.w;
    ComplexMatrix cols = basis.U.middleCols(blk.offset, size);
    return cols * cols.adjoint();
}

/// Parts of U^dagger A U: hat = (+) A^_lambda (x) I_v, tilde = diagonal blocks minus hat, bar = off-diagonal blocks.
struct BlockDecomposition {
    ComplexMatrix hat;
    ComplexMatrix tilde;
    ComplexMatrix bar;
    /// A^_lambda = tr_V(A_{lambda,lambda}) / v_lambda, a w x w matrix per block.
    std::vector<ComplexMatrix> per_lambda_hat;
};

inline ComplexMatrix partial_trace_v(const ComplexMatrix &blk, std::int64_t w, std::int64_t v) {
    ComplexMatrix out = ComplexMatrix::Zero(w, w);
    for (std::int64_t a = 0; a < w; ++a) {
        for (std::int64_t a2 = 0; a2 < w; ++a2) {
            cplx s(0.0, 0.0);
            for (std::int64_t b = 0; b < v; ++b) {
                s += blk(a * v + b, a2 * v + b);
            }
            out(a, a2) = s;
        }
    }
    return out;
}

inline BlockDecomposition block_decompose(const ComplexMatrix &a, const SchurBasis &basis) {
    ComplexMatrix s = to_schur(a, basis);
    const Eigen::Index dim = basis.dim();
    BlockDecomposition out;
    out.hat = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix diag = ComplexMatrix::Zero(dim, dim);
    for (const SchurBlock &blk : basis.blocks) {
        const Eigen::Index size = blk.v * blk.w;
        ComplexMatrix sub = s.block(blk.offset, blk.offset, size, size);
        diag.block(blk.offset, blk.offset, size, size) = sub;
        ComplexMatrix h = partial_trace_v(sub, blk.w, blk.v) / static_cast<double>(blk.v);
        out.hat.block(blk.offset, blk.offset, size, size) =
            kron(h, ComplexMatrix::Identity(blk.v, blk.v));
        out.per_lambda_hat.push_back(std::move(h));
    }
    out.tilde = diag - out.hat;
    out.bar = s - diag;
    return out;
}

/// Components A~_{lambda,j} = tr_V(A_{lambda,lambda} (I (x) g_j^dagger)) / v_lambda against the generalized Paulis
/// g_j on V_lambda, j = x * v + z; component 0 is A^_lambda.
inline std::vector<ComplexMatrix> lambda_pauli_components(const ComplexMatrix &a, const SchurBasis &basis,
                                                          std::size_t block) {
    const SchurBlock &blk = basis.blocks.at(block);
    const Eigen::Index size = blk.v * blk.w;
    ComplexMatrix sub = to_schur(a, basis).block(blk.offset, blk.offset, size, size);
    std::vector<ComplexMatrix> out;
    const int v = static_cast<int>(blk.v);
    for (int x = 0; x < v; ++x) {
        for (int z = 0; z < v; ++z) {
            if (v == 1) {
                out.push_back(partial_trace_v(sub, blk.w, blk.v));
                continue;
            }
            ComplexMatrix g = pauli_matrix(PauliLabel{v, 1, {x}, {z}});
            ComplexMatrix prod = sub * kron(ComplexMatrix::Identity(blk.w, blk.w), g.adjoint());
            out.push_back(partial_trace_v(prod, blk.w, blk.v) / static_cast<double>(v));
        }
    }
    return out;
}

/// 1 - (1/D) sum_i ||M^_i||_F^2.
inline double perminv_defect(const Measurement &m, const SchurBasis &basis) {
    double s = 0.0;
    for (const auto &op : m.operators()) {
        s += block_decompose(op, basis).hat.squaredNorm();
    }
    return std::clamp(1.0 - s / static_cast<double>(m.dim()), 0.0, 1.0);
}

} // namespace qmtest
