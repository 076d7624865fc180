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

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qmtest/core.hpp"
#include "qmtest/pauli.hpp"
#include "qmtest/schur.hpp"
#include "qmtest/testers.hpp"

namespace qmtest {

using Json = nlohmann::json;

inline constexpr int kMeasurementFileVersion = 1;
inline constexpr int kSchurCacheVersion = 1;

/// Malformed or unsupported input file.
struct ParseError : Error {
    using Error::Error;
};

struct MeasurementFile {
    int d = 2;
    int n = 0;
    Measurement measurement;
    std::map<std::string, std::string> metadata;
};

inline Json matrix_to_json(const ComplexMatrix &a) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            row.push_back(Json::array({a(r, c).real(), a(r, c).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexMatrix matrix_from_json(const Json &j, Eigen::Index dim) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim) {
        throw ParseError("operator must be an array of " + std::to_string(dim) + " rows");
    }
    ComplexMatrix a(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const Json &row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
            throw ParseError("operator row must have " + std::to_string(dim) + " entries");
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
            const Json &e = row[static_cast<std::size_t>(c)];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw ParseError("operator entry must be a [re, im] pair");
            }
            a(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    return a;
}

inline Json measurement_file_to_json(const MeasurementFile &f) {
    Json j;
    j["version"] = kMeasurementFileVersion;
    j["d"] = f.d;
    j["n"] = f.n;
    Json ops = Json::array();
    for (const auto &op : f.measurement.operators()) {
        ops.push_back(matrix_to_json(op));
    }
    j["operators"] = std::move(ops);
    j["metadata"] = f.metadata;
    return j;
}

inline MeasurementFile make_measurement_file(Measurement m, int d, std::map<std::string, std::string> metadata = {}) {
    MeasurementFile f;
    f.d = d;
    f.n = num_qudits(m.dim(), d);
    f.measurement = std::move(m);
    f.metadata = std::move(metadata);
    return f;
}

/// Structural errors raise ParseError; a completeness failure raises CompletenessViolation.
inline MeasurementFile measurement_file_from_json(const Json &j, double tol = kDefaultCompletenessTol) {
    if (!j.is_object()) {
        throw ParseError("measurement file must be a JSON object");
    }
    if (!j.contains("version") || !j["version"].is_number_integer()) {
        throw ParseError("measurement file has no integer version");
    }
    if (j["version"].get<int>() != kMeasurementFileVersion) {
        throw ParseError("unsupported measurement file version " + std::to_string(j["version"].get<int>()));
    }
    for (const char *key : {"d", "n"}) {
        if (!j.contains(key) || !j[key].is_number_integer()) {
            throw ParseError(std::string("measurement file field '") + key + "' must be an integer");
        }
    }
    MeasurementFile f;
    f.d = j["d"].get<int>();
    f.n = j["n"].get<int>();
    if (f.d < 2 || f.n < 0 || f.n > 12) {
        throw ParseError("measurement file has out-of-range d or n");
    }
    const Eigen::Index dim = int_pow(f.d, f.n);
    if (dim > 4096) {
        throw ParseError("measurement dimension exceeds 4096");
    }
    if (!j.contains("operators") || !j["operators"].is_array() || j["operators"].empty()) {
        throw ParseError("measurement file needs a non-empty 'operators' array");
    }
    std::vector<ComplexMatrix> ops;
    for (const auto &op : j["operators"]) {
        ops.push_back(matrix_from_json(op, dim));
    }
    if (j.contains("metadata")) {
        if (!j["metadata"].is_object()) {
            throw ParseError("metadata must be an object of strings");
        }
        for (const auto &[key, value] : j["metadata"].items()) {
            if (!value.is_string()) {
                throw ParseError("metadata values must be strings");
            }
            f.metadata[key] = value.get<std::string>();
        }
    }
    f.measurement = Measurement::validate(std::move(ops), tol);
    return f;
}

inline std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << text;
}

inline Json parse_json_text(const std::string &text) {
    try {
        return Json::parse(text);
    } catch (const Json::exception &e) {
        throw ParseError(std::string("JSON parse error: ") + e.what());
    }
}

inline MeasurementFile load_measurement_file(const std::string &path, double tol = kDefaultCompletenessTol) {
    return measurement_file_from_json(parse_json_text(read_text_file(path)), tol);
}

/// Canonical text form: sorted keys, two-space indent, trailing newline. Parsing and re-emitting is the identity.
inline std::string emit_json(const Json &j) {
    return j.dump(2) + "\n";
}

inline void save_measurement_file(const std::string &path, const MeasurementFile &f) {
    write_text_file(path, emit_json(measurement_file_to_json(f)));
}

inline Json verdict_to_json(const Verdict &v) {
    Json j;
    j["tester"] = v.tester;
    j["decision"] = v.decision();
    j["reject_stage"] = v.reject_stage ? Json(*v.reject_stage) : Json(nullptr);
    j["query_count"] = v.query_count;
    j["stage_stats"] = v.stage_stats;
    j["params"] = v.params;
    j["seed"] = v.seed;
    j["constant_scale"] = v.constant_scale;
    j["sampling"] = to_string(v.mode);
    j["estimate"] = v.estimate ? Json(*v.estimate) : Json(nullptr);
    j["notes"] = v.notes;
    return j;
}

inline Json schur_to_json(const SchurBasis &basis, const SchurResiduals &res) {
    Json j;
    j["version"] = kSchurCacheVersion;
    j["d"] = basis.d;
    j["n"] = basis.n;
    Json blocks = Json::array();
    for (const auto &b : basis.blocks) {
        blocks.push_back({{"lambda", b.lambda.parts}, {"v", b.v}, {"w", b.w}, {"offset", b.offset}});
    }
    j["blocks"] = std::move(blocks);
    j["U"] = matrix_to_json(basis.U);
    j["residuals"] = {{"unitarity", res.unitarity},
                      {"permutation", res.permutation},
                      {"tensor_power", res.tensor_power},
                      {"permutations_checked", res.permutations_checked},
                      {"operators_checked", res.operators_checked}};
    return j;
}

/// Loads a cached transform and re-verifies it; VerificationFailure if the cached U fails any residual check.
inline SchurBasis schur_from_json(const Json &j) {
    if (!j.is_object() || !j.contains("version") || !j["version"].is_number_integer()) {
        throw ParseError("Schur cache has no integer version");
    }
    if (j["version"].get<int>() != kSchurCacheVersion) {
        throw ParseError("unsupported Schur cache version");
    }
    SchurBasis basis;
    try {
        basis.d = j.at("d").get<int>();
        basis.n = j.at("n").get<int>();
    } catch (const Json::exception &e) {
        throw ParseError(std::string("Schur cache: ") + e.what());
    }
    if (basis.d < 2 || basis.n < 1 || basis.n > 6 || int_pow(basis.d, basis.n) > kMaxSchurDim) {
        throw ParseError("Schur cache: unsupported (d, n)");
    }
    const Eigen::Index dim = int_pow(basis.d, basis.n);
    std::vector<Partition> lambdas = partitions(basis.n, basis.d);
    if (!j.contains("blocks") || !j["blocks"].is_array() || j["blocks"].size() != lambdas.size()) {
        throw ParseError("Schur cache: block list does not match the partitions of n");
    }
    Eigen::Index offset = 0;
    for (std::size_t b = 0; b < lambdas.size(); ++b) {
        SchurBlock blk{lambdas[b], dim_sn(lambdas[b]), dim_gl(lambdas[b], basis.d), offset};
        const Json &jb = j["blocks"][b];
        if (jb.value("lambda", std::vector<int>{}) != blk.lambda.parts || jb.value("v", -1) != blk.v ||
            jb.value("w", -1) != blk.w || jb.value("offset", Eigen::Index{-1}) != blk.offset) {
            throw ParseError("Schur cache: block " + blk.lambda.str() + " does not match");
        }
        for (std::int64_t a = 0; a < blk.w; ++a) {
            for (std::int64_t bb = 0; bb < blk.v; ++bb) {
                basis.index_map.push_back(SchurIndex{static_cast<int>(b), static_cast<int>(a), static_cast<int>(bb)});
            }
        }
        offset += blk.v * blk.w;
        basis.blocks.push_back(blk);
    }
    basis.U = matrix_from_json(j.at("U"), dim);
    basis.group = symmetric_group_reps(basis.n, lambdas);
    SchurResiduals r = schur_residuals(basis, 3);
    if (!(r.unitarity <= kSchurTolerance && r.permutation <= kSchurTolerance && r.tensor_power <= kSchurTolerance)) {
        throw VerificationFailure("Schur cache failed re-verification");
    }
    return basis;
}

} // namespace qmtest
