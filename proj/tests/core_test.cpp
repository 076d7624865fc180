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

#include <gtest/gtest.h>

#include <numbers>

#include "test_util.hpp"

namespace qmtest {
namespace {

using testing::mat_i;
using testing::mat_x;
using testing::mat_z;

TEST(FrobeniusNorm, IdentityAndPauliAndProjector) {
    EXPECT_DOUBLE_EQ(frobenius_norm(ComplexMatrix::Identity(4, 4)), 2.0);
    EXPECT_NEAR(frobenius_norm(mat_x()), std::numbers::sqrt2, 1e-15);
    EXPECT_NEAR(frobenius_norm(0.5 * (mat_i() + mat_x())), 1.0, 1e-15);
}

TEST(HsInner, BasicValues) {
    EXPECT_NEAR(std::abs(hs_inner(mat_i(), mat_i()) - cplx(2, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(hs_inner(mat_x(), mat_z())), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(hs_inner(0.5 * (mat_i() + mat_x()), 0.5 * (mat_i() + mat_z())) - cplx(0.5, 0)), 0.0, 1e-15);
}

TEST(HsInner, ConjugateLinearInFirstArgument) {
    Rng rng(3);
    ComplexMatrix a = random_gaussian_matrix(3, 3, rng);
    ComplexMatrix b = random_gaussian_matrix(3, 3, rng);
    const cplx c(0.3, -1.2);
    EXPECT_NEAR(std::abs(hs_inner(c * a, b) - std::conj(c) * hs_inner(a, b)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))), 0.0, 1e-12);
}

TEST(ValidateMeasurement, AcceptsCompleteSets) {
    Measurement trivial = Measurement::validate({mat_i()});
    EXPECT_EQ(trivial.completeness_residual(), 0.0);
    Measurement proj = Measurement::validate({0.5 * (mat_i() + mat_x()), 0.5 * (mat_i() - mat_x())});
    EXPECT_EQ(proj.size(), 2u);
    EXPECT_LE(proj.completeness_residual(), 1e-15);
}

TEST(ValidateMeasurement, RejectsIncompleteOrMalformed) {
    EXPECT_THROW(Measurement::validate({mat_i(), mat_i()}), CompletenessViolation);
    EXPECT_THROW(Measurement::validate({}), DimensionMismatch);
    EXPECT_THROW(Measurement::validate({mat_i(), ComplexMatrix::Zero(3, 3)}), DimensionMismatch);
    EXPECT_THROW(Measurement::validate({ComplexMatrix::Zero(2, 3)}), DimensionMismatch);
    ComplexMatrix nan = mat_i();
    nan(0, 0) = std::nan("");
    EXPECT_THROW(Measurement::validate({nan}), Error);
}

TEST(ValidateMeasurement, ToleranceIsHonoured) {
    ComplexMatrix almost = (1.0 + 1e-7) * mat_i();
    EXPECT_THROW(Measurement::validate({almost}), CompletenessViolation);
    EXPECT_NO_THROW(Measurement::validate({almost}, 1e-6));
}

TEST(ValidateMeasurement, ZeroPaddingBeyondSize) {
    Measurement m = Measurement::validate({mat_i()});
    EXPECT_EQ(m.op_or_zero(5).norm(), 0.0);
    EXPECT_EQ(m.op_or_zero(5).rows(), 2);
}

TEST(ApplyMeasurement, ComputationalBasisOnPlusState) {
    Measurement comp = computational_basis(2);
    ComplexVector plus(2);
    plus << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
    PureMeasurementResult r = apply_measurement(comp, PureState{plus, true});
    EXPECT_NEAR(r.distribution[0], 0.5, 1e-15);
    EXPECT_NEAR(r.distribution[1], 0.5, 1e-15);
    ASSERT_TRUE(r.post_states[0].has_value());
    EXPECT_NEAR(std::abs(r.post_states[0]->amplitudes(0)), 1.0, 1e-15);
}

TEST(ApplyMeasurement, IdentityLeavesDensityMatrixUnchanged) {
    Rng rng(4);
    ComplexMatrix g = random_gaussian_matrix(3, 3, rng);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    MixedMeasurementResult r = apply_measurement(identity_measurement(3), rho);
    EXPECT_NEAR(r.distribution[0], 1.0, 1e-14);
    EXPECT_NEAR((*r.post_states[0] - rho).norm(), 0.0, 1e-14);
}

TEST(ApplyMeasurement, StabilizerOnMaximallyEntangledIsUniform) {
    for (int n = 1; n <= 3; ++n) {
        Rng rng(static_cast<std::uint64_t>(n));
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::Index idx = 1 + static_cast<Eigen::Index>(rng.next() % (int_pow(4, n) - 1));
            Measurement p = stabilizer_measurement(PauliLabel::from_index(idx, 2, n));
            PureMeasurementResult r = apply_measurement(p, maximally_entangled(p.dim()));
            EXPECT_NEAR(r.distribution[0], 0.5, 1e-14);
            EXPECT_NEAR(r.distribution[1], 0.5, 1e-14);
        }
    }
}

TEST(ApplyMeasurement, ZeroProbabilityOutcomeHasNoPostState) {
    ComplexVector zero(2);
    zero << 1.0, 0.0;
    PureMeasurementResult r = apply_measurement(computational_basis(2), PureState{zero, true});
    EXPECT_TRUE(r.zero_probability[1]);
    EXPECT_FALSE(r.post_states[1].has_value());
}

TEST(ApplyMeasurement, DimensionMismatchThrows) {
    EXPECT_THROW(apply_measurement(computational_basis(2), PureState{ComplexVector::Ones(3), false}),
                 DimensionMismatch);
}

TEST(MaximallyEntangled, SmallDimensions) {
    PureState one = maximally_entangled(1);
    ASSERT_EQ(one.dim(), 1);
    EXPECT_NEAR(std::abs(one.amplitudes(0) - cplx(1, 0)), 0.0, 1e-15);
    PureState bell = maximally_entangled(2);
    EXPECT_NEAR(bell.amplitudes(0).real(), 1.0 / std::numbers::sqrt2, 1e-15);
    EXPECT_NEAR(bell.amplitudes(3).real(), 1.0 / std::numbers::sqrt2, 1e-15);
    EXPECT_EQ(std::abs(bell.amplitudes(1)), 0.0);
    PureState four = maximally_entangled(4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        EXPECT_NEAR(four.amplitudes(i * 4 + i).real(), 0.5, 1e-15);
    }
    EXPECT_NEAR(four.norm(), 1.0, 1e-15);
}

TEST(ChoiVector, IdentityAndPauliX) {
    PureState v = choi_vector(ComplexMatrix::Identity(3, 3));
    EXPECT_NEAR((v.amplitudes - maximally_entangled(3).amplitudes).norm(), 0.0, 1e-15);
    PureState x = choi_vector(mat_x());
    EXPECT_NEAR(x.amplitudes(1).real(), 1.0 / std::numbers::sqrt2, 1e-15);
    EXPECT_NEAR(x.amplitudes(2).real(), 1.0 / std::numbers::sqrt2, 1e-15);
    EXPECT_EQ(std::abs(x.amplitudes(0)), 0.0);
    EXPECT_NEAR(choi_vector(0.5 * (mat_i() + mat_x())).amplitudes.squaredNorm(), 0.5, 1e-15);
}

TEST(ChoiVector, InnerProductIsScaledHilbertSchmidt) {
    Rng rng(9);
    ComplexMatrix a = random_gaussian_matrix(4, 4, rng);
    ComplexMatrix b = random_gaussian_matrix(4, 4, rng);
    cplx lhs = choi_vector(a).amplitudes.dot(choi_vector(b).amplitudes);
    EXPECT_NEAR(std::abs(lhs - hs_inner(a, b) / 4.0), 0.0, 1e-12);
}

TEST(ChoiProb, Values) {
    EXPECT_DOUBLE_EQ(choi_prob(ComplexMatrix::Identity(4, 4)), 1.0);
    EXPECT_NEAR(choi_prob(testing::qubit_stabilizer(1, 0)[0]), 0.5, 1e-15);
    EXPECT_EQ(choi_prob(ComplexMatrix::Zero(2, 2)), 0.0);
}

TEST(NormalizedChoi, ProjectorAndZero) {
    PureState v = normalized_choi(0.5 * (mat_i() + mat_x()));
    for (Eigen::Index i = 0; i < 4; ++i) {
        EXPECT_NEAR(v.amplitudes(i).real(), 0.5, 1e-15);
    }
    EXPECT_THROW(normalized_choi(ComplexMatrix::Zero(2, 2)), ZeroOperator);
    EXPECT_NEAR((normalized_choi(ComplexMatrix::Identity(2, 2)).amplitudes - maximally_entangled(2).amplitudes).norm(),
                0.0, 1e-15);
}

TEST(CanonicalPhaseAlign, FixedPointsAndPhaseRemoval) {
    Rng rng(11);
    Measurement m = random_measurement(4, 3, rng);
    Measurement same = canonical_phase_align(m, m);
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_NEAR((same[i] - m[i]).norm(), 0.0, 1e-14);
    }
    std::vector<ComplexMatrix> rotated;
    for (const auto &op : m.operators()) {
        rotated.push_back(std::polar(1.0, std::numbers::pi / 3) * op);
    }
    Measurement back = canonical_phase_align(m, Measurement::validate(rotated));
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_NEAR((back[i] - m[i]).norm(), 0.0, 1e-13);
    }
}

TEST(CanonicalPhaseAlign, RandomPairsHaveRealNonNegativeOverlaps) {
    Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        Measurement m = random_measurement(4, 3, rng);
        Measurement n = random_measurement(4, 3, rng);
        Measurement a = canonical_phase_align(m, n);
        for (std::size_t i = 0; i < 3; ++i) {
            cplx ip = hs_inner(m[i], a[i]);
            EXPECT_LE(std::abs(ip.imag()), 1e-12);
            EXPECT_GE(ip.real(), 0.0);
        }
    }
}

TEST(PsdSqrt, SquaresBackAndRejectsNegative) {
    Rng rng(13);
    ComplexMatrix g = random_gaussian_matrix(4, 4, rng);
    ComplexMatrix p = g * g.adjoint();
    PsdSqrt r = psd_sqrt(p);
    EXPECT_NEAR((r.root * r.root - p).norm(), 0.0, 1e-10);
    EXPECT_NEAR((r.root - r.root.adjoint()).norm(), 0.0, 1e-12);
    EXPECT_THROW(psd_sqrt(-ComplexMatrix::Identity(2, 2)), SqrtFailure);
    ComplexMatrix tiny = ComplexMatrix::Zero(2, 2);
    tiny(0, 0) = -1e-12;
    EXPECT_NEAR(psd_sqrt(tiny).clamped, 1e-12, 1e-20);
}

TEST(Kron, DimensionsAndMixedProduct) {
    ComplexMatrix xz = kron(mat_x(), mat_z());
    EXPECT_EQ(xz.rows(), 4);
    EXPECT_NEAR((xz * xz - ComplexMatrix::Identity(4, 4)).norm(), 0.0, 1e-15);
    EXPECT_EQ(xz(0, 2), cplx(1, 0));
    EXPECT_EQ(xz(1, 3), cplx(-1, 0));
}

TEST(AncillaExtension, PreservesCompleteness) {
    Rng rng(14);
    Measurement m = random_measurement(2, 3, rng);
    Measurement ext = with_ancilla(m, 3);
    EXPECT_EQ(ext.dim(), 6);
    EXPECT_LE(ext.completeness_residual(), 1e-12);
}

TEST(TolerantRounding, SnapsNearIntegers) {
    EXPECT_EQ(ceil_tol(3.0000000000000004), 3);
    EXPECT_EQ(ceil_tol(3.1), 4);
    EXPECT_EQ(floor_tol(2.9999999999999996), 3);
    EXPECT_EQ(floor_tol(2.5), 2);
}

} // namespace
} // namespace qmtest
