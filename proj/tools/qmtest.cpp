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

// qmtest: command-line front end. Every command prints one JSON run report on stdout.
// Exit codes: 0 accept / ok, 1 reject / invalid input, 2 error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmtest/qmtest.hpp"

namespace fs = std::filesystem;
using namespace qmtest;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

struct Options {
    std::vector<std::string> files;
    std::vector<std::string> set;
    double epsilon = 0.1;
    std::optional<std::uint64_t> seed;
    int k = 0;
    double scale = 1.0;
    std::string mode = "aggregate";
    double tol = kDefaultCompletenessTol;
    bool identity = false;
    std::string schur_cache;
    std::string kind;
    std::string out;
    int n = 2;
    int d = 2;
    std::string report;
};

std::uint64_t resolve_seed(const Options &o) {
    if (o.seed) {
        return *o.seed;
    }
    if (const char *env = std::getenv("QMTEST_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception &) {
            throw Error(std::string("QMTEST_SEED is not an unsigned integer: ") + env);
        }
    }
    return 0;
}

SamplingMode parse_mode(const std::string &s) {
    if (s == "aggregate") {
        return SamplingMode::aggregate;
    }
    if (s == "per-trial") {
        return SamplingMode::per_trial;
    }
    throw Error("unknown sampling mode '" + s + "'");
}

const char *error_kind(const std::exception &e) {
    if (dynamic_cast<const ParseError *>(&e)) {
        return "ParseError";
    }
    if (dynamic_cast<const CompletenessViolation *>(&e)) {
        return "CompletenessViolation";
    }
    if (dynamic_cast<const DimensionMismatch *>(&e)) {
        return "DimensionMismatch";
    }
    if (dynamic_cast<const NotPowerOfDimension *>(&e)) {
        return "NotPowerOfDimension";
    }
    if (dynamic_cast<const ZeroOperator *>(&e)) {
        return "ZeroOperator";
    }
    if (dynamic_cast<const DegenerateLabel *>(&e)) {
        return "DegenerateLabel";
    }
    if (dynamic_cast<const GramIllConditioned *>(&e)) {
        return "GramIllConditioned";
    }
    if (dynamic_cast<const VerificationFailure *>(&e)) {
        return "VerificationFailure";
    }
    if (dynamic_cast<const SqrtFailure *>(&e)) {
        return "SqrtFailure";
    }
    if (dynamic_cast<const Error *>(&e)) {
        return "Error";
    }
    return "InternalError";
}

TesterConfig tester_config(const Options &o, std::uint64_t seed) {
    TesterConfig cfg;
    cfg.epsilon = o.epsilon;
    cfg.seed = seed;
    cfg.mode = parse_mode(o.mode);
    cfg.constant_scale = o.scale;
    return cfg;
}

Json tester_params(const Options &o) {
    Json p;
    p["epsilon"] = o.epsilon;
    p["constant_scale"] = o.scale;
    p["sampling"] = o.mode;
    if (o.k > 0) {
        p["k"] = o.k;
    }
    if (!o.set.empty()) {
        p["set"] = o.set;
    }
    p["files"] = o.files;
    return p;
}

SchurBasis load_or_build_schur(const Options &o, int d, int n) {
    if (!o.schur_cache.empty() && fs::exists(o.schur_cache)) {
        SchurBasis b = schur_from_json(parse_json_text(read_text_file(o.schur_cache)));
        if (b.d != d || b.n != n) {
            throw DimensionMismatch("Schur cache is for a different (d, n)");
        }
        return b;
    }
    SchurBasis b = build_schur_transform(d, n);
    if (!o.schur_cache.empty()) {
        write_text_file(o.schur_cache, emit_json(schur_to_json(b, schur_residuals(b))));
    }
    return b;
}

int verdict_exit(const Verdict &v) {
    return v.accept ? kExitOk : kExitReject;
}

int cmd_validate(const Options &o, Json &report) {
    report["params"] = {{"files", o.files}, {"tolerance", o.tol}};
    try {
        MeasurementFile f = load_measurement_file(o.files.at(0), o.tol);
        report["result"] = {{"valid", true},
                            {"d", f.d},
                            {"n", f.n},
                            {"outcomes", f.measurement.size()},
                            {"completeness_residual", f.measurement.completeness_residual()}};
        return kExitOk;
    } catch (const CompletenessViolation &e) {
        report["result"] = {{"valid", false}, {"error", {{"type", error_kind(e)}, {"message", e.what()}}}};
        return kExitReject;
    }
}

int cmd_distance(const Options &o, Json &report) {
    report["params"] = {{"files", o.files}};
    const MeasurementFile a = load_measurement_file(o.files.at(0), o.tol);
    const MeasurementFile b = load_measurement_file(o.files.at(1), o.tol);
    const DistanceReport exact = delta_measurement(a.measurement, b.measurement);
    const DistanceReport numeric = delta_measurement(a.measurement, b.measurement, DistanceMethod::numeric_inf);
    report["result"] = {{"delta", exact.delta},
                        {"delta_squared", exact.delta_squared},
                        {"per_outcome_terms", exact.per_outcome_terms},
                        {"form_disagreement", exact.form_disagreement},
                        {"numeric_delta", numeric.delta},
                        {"numeric_disagreement", std::abs(numeric.delta - exact.delta)}};
    return kExitOk;
}

int cmd_test(const std::string &which, const Options &o, std::uint64_t seed, Json &report) {
    report["params"] = tester_params(o);
    const TesterConfig cfg = tester_config(o, seed);
    const MeasurementFile f = load_measurement_file(o.files.at(0), o.tol);
    BlackBox box(f.measurement, seed, f.d);
    Verdict v;
    if (which == "stabilizer") {
        if (f.d != 2) {
            throw Error("the stabilizer tester needs qubits (d = 2)");
        }
        v = test_stabilizer(box, cfg);
    } else if (which == "klocal") {
        if (o.k < 0) {
            throw Error("--k must be non-negative");
        }
        v = test_klocal(box, o.k, cfg);
    } else if (which == "perminv") {
        v = test_perminv(box, load_or_build_schur(o, f.d, f.n), cfg);
    } else {
        std::vector<Measurement> members;
        for (const auto &path : o.set) {
            members.push_back(load_measurement_file(path, o.tol).measurement);
        }
        v = test_finite_set(box, FiniteSetSpec::make(std::move(members)), cfg);
    }
    report["result"] = verdict_to_json(v);
    report["query_count"] = v.query_count;
    return verdict_exit(v);
}

int cmd_estimate(const Options &o, std::uint64_t seed, Json &report) {
    report["params"] = tester_params(o);
    report["params"]["identity"] = o.identity;
    const TesterConfig cfg = tester_config(o, seed);
    const MeasurementFile a = load_measurement_file(o.files.at(0), o.tol);
    const MeasurementFile b = load_measurement_file(o.files.at(1), o.tol);
    const int k = o.k > 0 ? o.k : static_cast<int>(std::max(a.measurement.size(), b.measurement.size()));
    BlackBox ma(a.measurement, seed, a.d);
    BlackBox mb(b.measurement, Rng::derive(seed, 1).next(), b.d);
    Verdict v = o.identity ? test_identity(ma, mb, k, cfg) : estimate_distance(ma, mb, k, cfg);
    report["result"] = verdict_to_json(v);
    report["query_count"] = v.query_count;
    return o.identity ? verdict_exit(v) : kExitOk;
}

std::string label_name(const PauliLabel &l) {
    static const char *names[2][2] = {{"I", "Z"}, {"X", "Y"}};
    std::string s;
    for (int j = 0; j < l.n; ++j) {
        s += names[l.x[static_cast<std::size_t>(j)]][l.z[static_cast<std::size_t>(j)]];
    }
    return s;
}

int cmd_fixtures(const Options &o, std::uint64_t seed, Json &report) {
    report["params"] = {{"kind", o.kind}, {"n", o.n}, {"d", o.d}, {"out", o.out}};
    if (o.out.empty()) {
        throw Error("fixtures: --out is required");
    }
    fs::create_directories(o.out);
    Json written = Json::array();
    auto emit = [&](const std::string &name, Measurement m, int d, std::map<std::string, std::string> meta) {
        meta["kind"] = o.kind;
        const std::string path = (fs::path(o.out) / (name + ".json")).string();
        save_measurement_file(path, make_measurement_file(std::move(m), d, std::move(meta)));
        written.push_back(path);
    };
    if (o.kind == "stabilizer") {
        const Eigen::Index dim = int_pow(2, o.n);
        for (Eigen::Index idx = 1; idx < dim * dim; ++idx) {
            const PauliLabel l = PauliLabel::from_index(idx, 2, o.n);
            emit("stabilizer_" + label_name(l), stabilizer_measurement(l), 2, {{"label", label_name(l)}});
        }
    } else if (o.kind == "far-stabilizer") {
        CertifiedFixture f = o.n == 1 ? far_single_qubit_fixture() : far_stabilizer_fixture(o.n, 0.4, seed);
        emit("far_stabilizer_n" + std::to_string(o.n), std::move(f.measurement), 2,
             {{"certificate_delta", std::to_string(f.certificate)}, {"certificate", "min over stabilizer measurements"}});
    } else if (o.kind == "klocal") {
        emit("amplitude_damping_site0_n" + std::to_string(o.n), local_amplitude_damping(o.n, 0.3, 0), 2,
             {{"support", "0"}});
        PauliLabel full = PauliLabel::identity(2, o.n);
        std::fill(full.x.begin(), full.x.end(), 1);
        const double bound = klocal_distance_lower_bound(stabilizer_measurement(full), 1);
        emit("full_support_stabilizer_n" + std::to_string(o.n), stabilizer_measurement(full), 2,
             {{"label", label_name(full)}, {"certificate_delta_1local", std::to_string(bound)}});
    } else if (o.kind == "perminv") {
        const SchurBasis basis = load_or_build_schur(o, o.d, o.n);
        std::string blocks;
        for (const auto &b : basis.blocks) {
            blocks += (blocks.empty() ? "" : " ") + b.lambda.str();
        }
        emit("isotypic_d" + std::to_string(o.d) + "_n" + std::to_string(o.n), isotypic_projectors(basis), o.d,
             {{"blocks", blocks}});
    } else if (o.kind == "compbasis") {
        emit("compbasis_d" + std::to_string(o.d) + "_n" + std::to_string(o.n), computational_basis(int_pow(o.d, o.n)),
             o.d, {});
    } else {
        throw Error("unknown fixture kind '" + o.kind + "'");
    }
    report["result"] = {{"files", written}};
    return kExitOk;
}

int cmd_schur(const Options &o, Json &report) {
    report["params"] = {{"d", o.d}, {"n", o.n}, {"out", o.out}};
    if (o.d < 2 || o.n < 1) {
        throw Error("schur: need d >= 2 and n >= 1");
    }
    if (o.n > 6 || int_pow(o.d, o.n) > kMaxSchurDim) {
        throw Error("schur: d^n exceeds " + std::to_string(kMaxSchurDim) + " or n exceeds 6");
    }
    const SchurBasis basis = build_schur_transform(o.d, o.n);
    const SchurResiduals r = schur_residuals(basis);
    if (!o.out.empty()) {
        write_text_file(o.out, emit_json(schur_to_json(basis, r)));
    }
    Json blocks = Json::array();
    for (const auto &b : basis.blocks) {
        blocks.push_back({{"lambda", b.lambda.parts}, {"v", b.v}, {"w", b.w}});
    }
    report["result"] = {{"blocks", blocks},
                        {"residuals",
                         {{"unitarity", r.unitarity},
                          {"permutation", r.permutation},
                          {"tensor_power", r.tensor_power},
                          {"permutations_checked", r.permutations_checked},
                          {"operators_checked", r.operators_checked}}}};
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Property testers for quantum measurements"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--seed", o.seed, "RNG seed (default: $QMTEST_SEED, else 0)");
        sub->add_option("--tol", o.tol, "completeness tolerance for input files");
        sub->add_option("--report", o.report, "also write the report to this path");
    };
    auto add_tester = [&](CLI::App *sub) {
        add_common(sub);
        sub->add_option("--epsilon", o.epsilon, "distance parameter in (0, 1)");
        sub->add_option("--scale", o.scale, "multiplier on every sample-size constant");
        sub->add_option("--mode", o.mode, "sampling mode")->check(CLI::IsMember({"aggregate", "per-trial"}));
    };

    auto *validate = app.add_subcommand("validate", "parse a measurement file and check completeness");
    validate->add_option("file", o.files)->required()->expected(1);
    add_common(validate);

    auto *distance = app.add_subcommand("distance", "exact Delta between two measurement files");
    distance->add_option("files", o.files)->required()->expected(2);
    add_common(distance);

    auto *test = app.add_subcommand("test", "run a property tester on a measurement file");
    test->require_subcommand(1);
    std::vector<CLI::App *> testers;
    for (const char *name : {"stabilizer", "klocal", "perminv", "finite-set"}) {
        auto *sub = test->add_subcommand(name);
        sub->add_option("file", o.files)->required()->expected(1);
        add_tester(sub);
        testers.push_back(sub);
    }
    testers[1]->add_option("--k", o.k, "locality")->required();
    testers[2]->add_option("--schur-cache", o.schur_cache, "Schur transform cache file (read if present)");
    testers[3]->add_option("--set", o.set, "member measurement file (repeatable)")->required();

    auto *estimate = app.add_subcommand("estimate", "estimate Delta between two boxes");
    estimate->add_option("files", o.files)->required()->expected(2);
    estimate->add_option("--k", o.k, "outcome bound (default: the larger outcome count)");
    estimate->add_flag("--identity", o.identity, "decide Delta = 0 versus Delta >= epsilon");
    add_tester(estimate);

    auto *fixtures = app.add_subcommand("fixtures", "write canonical fixture files");
    fixtures->add_option("kind", o.kind)
        ->required()
        ->check(CLI::IsMember({"stabilizer", "far-stabilizer", "klocal", "perminv", "compbasis"}));
    fixtures->add_option("--out", o.out, "output directory")->required();
    fixtures->add_option("--n", o.n, "number of qudits");
    fixtures->add_option("--d", o.d, "local dimension");
    fixtures->add_option("--schur-cache", o.schur_cache, "Schur transform cache file");
    add_common(fixtures);

    auto *schur = app.add_subcommand("schur", "build, verify and cache the Schur transform");
    schur->add_option("--d", o.d, "local dimension")->required();
    schur->add_option("--n", o.n, "number of qudits")->required();
    schur->add_option("--out", o.out, "cache file to write");
    add_common(schur);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kExitOk : kExitError;
    }

    Json report;
    Json command = Json::array();
    for (int i = 1; i < argc; ++i) {
        command.push_back(argv[i]);
    }
    report["command"] = command;
    report["library_version"] = kLibraryVersion;
    report["query_count"] = 0;
    const auto t0 = std::chrono::steady_clock::now();
    int code = kExitError;
    try {
        const std::uint64_t seed = resolve_seed(o);
        report["seed"] = seed;
        if (*validate) {
            code = cmd_validate(o, report);
        } else if (*distance) {
            code = cmd_distance(o, report);
        } else if (*test) {
            for (auto *sub : testers) {
                if (*sub) {
                    code = cmd_test(sub->get_name(), o, seed, report);
                }
            }
        } else if (*estimate) {
            code = cmd_estimate(o, seed, report);
        } else if (*fixtures) {
            code = cmd_fixtures(o, seed, report);
        } else if (*schur) {
            code = cmd_schur(o, report);
        }
    } catch (const std::exception &e) {
        report["error"] = {{"type", error_kind(e)}, {"message", e.what()}};
        code = kExitError;
    }
    report["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report["exit_code"] = code;
    const std::string text = emit_json(report);
    std::cout << text;
    if (!o.report.empty()) {
        try {
            write_text_file(o.report, text);
        } catch (const std::exception &e) {
            std::cerr << "qmtest: " << e.what() << "\n";
            return kExitError;
        }
    }
    return code;
}
