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

#include <filesystem>

#include "test_util.hpp"

namespace qmtest {
namespace {

TEST(MeasurementFile, JsonRoundTrip) {
    Rng rng(1);
    MeasurementFile f = make_measurement_file(random_measurement(4, 3, rng), 2, {{"origin", "random"}});
    Json j = measurement_file_to_json(f);
    MeasurementFile g = measurement_file_from_json(j);
    EXPECT_EQ(g.d, 2);
    EXPECT_EQ(g.n, 2);
    EXPECT_EQ(g.metadata.at("origin"), "random");
    ASSERT_EQ(g.measurement.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ((g.measurement[i] - f.measurement[i]).norm(), 0.0);
    }
}

TEST(MeasurementFile, EmitIsCanonical) {
    MeasurementFile f = make_measurement_file(stabilizer_measurement({1}, {1}), 2);
    const std::string text = emit_json(measurement_file_to_json(f));
    EXPECT_EQ(emit_json(parse_json_text(text)), text);
}

TEST(MeasurementFile, RejectsStructuralErrors) {
    EXPECT_THROW(parse_json_text("{\"version\": 1, \"d\": 2"), ParseError);
    EXPECT_THROW(measurement_file_from_json(Json::array()), ParseError);
    Json j = measurement_file_to_json(make_measurement_file(computational_basis(2), 2));
    Json bad_version = j;
    bad_version["version"] = 2;
    EXPECT_THROW(measurement_file_from_json(bad_version), ParseError);
    Json bad_entry = j;
    bad_entry["operators"][0][0][0] = "x";
    EXPECT_THROW(measurement_file_from_json(bad_entry), ParseError);
    Json bad_rows = j;
    bad_rows["n"] = 2;
    EXPECT_THROW(measurement_file_from_json(bad_rows), ParseError);
    Json no_ops = j;
    no_ops["operators"] = Json::array();
    EXPECT_THROW(measurement_file_from_json(no_ops), ParseError);
}

TEST(MeasurementFile, IncompleteOperatorsAreACompletenessViolation) {
    Json j = measurement_file_to_json(make_measurement_file(computational_basis(2), 2));
    j["operators"][1] = j["operators"][0];
    j["operators"][0] = matrix_to_json(ComplexMatrix::Identity(2, 2));
    j["operators"][1] = matrix_to_json(ComplexMatrix::Identity(2, 2));
    EXPECT_THROW(measurement_file_from_json(j), CompletenessViolation);
}

TEST(MeasurementFile, SaveAndLoad) {
    const auto path = std::filesystem::temp_directory_path() / "qmtest_io_test.json";
    MeasurementFile f = make_measurement_file(local_amplitude_damping(2, 0.25), 2);
    save_measurement_file(path.string(), f);
    MeasurementFile g = load_measurement_file(path.string());
    EXPECT_NEAR(delta(f.measurement, g.measurement), 0.0, 1e-7);
    std::filesystem::remove(path);
    EXPECT_THROW(load_measurement_file(path.string()), ParseError);
}

TEST(VerdictJson, FieldsAndRoundTrip) {
    BlackBox box(computational_basis(4), 3);
    TesterConfig cfg;
    cfg.epsilon = 0.4;
    cfg.seed = 3;
    Verdict v = test_stabilizer(box, cfg);
    Json j = verdict_to_json(v);
    EXPECT_EQ(j["decision"], "reject");
    EXPECT_EQ(j["reject_stage"], "outcomes");
    EXPECT_EQ(j["sampling"], "aggregate");
    EXPECT_EQ(j["seed"], 3);
    const std::string text = emit_json(j);
    EXPECT_EQ(emit_json(parse_json_text(text)), text);
}

TEST(SchurCache, RoundTripReverifies) {
    SchurBasis b = build_schur_transform(2, 3);
    Json j = schur_to_json(b, schur_residuals(b));
    SchurBasis c = schur_from_json(parse_json_text(emit_json(j)));
    EXPECT_EQ(c.blocks.size(), b.blocks.size());
    EXPECT_EQ((c.U - b.U).norm(), 0.0);
    Json tampered = j;
    tampered["U"][0][0][0] = 0.5;
    EXPECT_THROW(schur_from_json(tampered), VerificationFailure);
    Json wrong_blocks = j;
    wrong_blocks["blocks"][0]["v"] = 7;
    EXPECT_THROW(schur_from_json(wrong_blocks), ParseError);
}

} // namespace
} // namespace qmtest
