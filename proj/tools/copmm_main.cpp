// copmm: coded private matrix multiplication over prime fields.
// Subcommands: threshold, run, audit, bench, verify-tensor.
// Exit codes: 0 success, 2 validation error, 3 below threshold / insufficient
// workers, 4 audit or verification failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "copmm/audit.hpp"
#include "copmm/sim.hpp"

using namespace copmm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitBelowThreshold = 3;
constexpr int kExitAuditFailure = 4;

Family parse_family(const std::string& s) {
    if (s == "poly" || s == "polynomial") return Family::PolyCode;
    if (s == "lagrange") return Family::LagrangeCode;
    throw ValidationError("unknown family \"" + s + "\" (expected poly or lagrange)");
}

Problem parse_problem(const std::string& s) {
    if (s == "smm") return Problem::SMM;
    if (s == "psmm") return Problem::PSMM;
    if (s == "fpmm") return Problem::FPMM;
    throw ValidationError("unknown problem \"" + s + "\" (expected smm, psmm or fpmm)");
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw ValidationError("malformed JSON in " + path + ": " + e.what());
    }
}

template <typename T>
T require_field(const json& j, const char* name) {
    if (!j.contains(name))
        throw ValidationError(std::string("config is missing required field \"") + name + "\"");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("config field \"") + name + "\" has the wrong type");
    }
}

template <typename T>
T optional_field(const json& j, const char* name, T fallback) {
    if (!j.contains(name)) return fallback;
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("config field \"") + name + "\" has the wrong type");
    }
}

// ---------------------------------------------------------------------------
// threshold
// ---------------------------------------------------------------------------

std::string pu_formula(std::size_t m, std::size_t p) {
    return "N/" + std::to_string(m * p);
}

std::string pd_formula(std::uint64_t K, std::size_t m, std::size_t n) {
    return Rational(K, m * n).str();
}

int cmd_threshold(const std::string& family, std::size_t m, std::size_t p, std::size_t n,
                  std::size_t T, std::optional<std::size_t> R, const std::string& variant,
                  bool table1) {
    if (table1) {
        std::cout << "partition  T  poly_K  lagrange_K (R)\n";
        const struct { std::size_t mpn; std::size_t R; } rows[] = {{2, 7}, {3, 23}, {5, 98}};
        for (const auto& row : rows) {
            ThresholdReport poly =
                recovery_threshold(ThresholdFamily::PolyMin, row.mpn, row.mpn, row.mpn, T);
            ThresholdReport lag =
                recovery_threshold(ThresholdFamily::Lagrange, row.mpn, row.mpn, row.mpn, T, row.R);
            std::cout << "(" << row.mpn << "," << row.mpn << "," << row.mpn << ")  " << T << "  "
                      << poly.K << "  " << lag.K << " (R=" << row.R << ")\n";
        }
        return 0;
    }

    const auto report_poly = [&](ThresholdFamily fam, const char* label) {
        ThresholdReport r = recovery_threshold(fam, m, p, n, T);
        std::cout << label << ": K=" << r.K << "  P_u=" << pu_formula(m, p)
                  << "  P_d=" << pd_formula(r.K, m, n) << "\n";
    };
    if (family == "poly" || family == "both") {
        if (variant == "v1") report_poly(ThresholdFamily::PolyV1, "poly(v1)");
        else if (variant == "v2") report_poly(ThresholdFamily::PolyV2, "poly(v2)");
        else if (variant == "v3") report_poly(ThresholdFamily::PolyV3, "poly(v3)");
        else {
            ThresholdReport r = recovery_threshold(ThresholdFamily::PolyMin, m, p, n, T);
            const char* chosen = r.chosen_variant == PresetVariant::V1   ? "v1"
                                 : r.chosen_variant == PresetVariant::V2 ? "v2"
                                                                         : "v3";
            std::cout << "poly(min=" << chosen << "): K=" << r.K << "  P_u=" << pu_formula(m, p)
                      << "  P_d=" << pd_formula(r.K, m, n) << "\n";
        }
    }
    if (family == "lagrange" || family == "both") {
        if (!R)
            throw ValidationError("lagrange thresholds need --R (the tensor rank)");
        ThresholdReport r = recovery_threshold(ThresholdFamily::Lagrange, m, p, n, T, *R);
        std::cout << "lagrange(R=" << *R << "): K=" << r.K << "  P_u=" << pu_formula(m, p)
                  << "  P_d=" << pd_formula(r.K, m, n) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

BilinearTensor tensor_from_config(const json& cfg, std::size_t m, std::size_t p, std::size_t n) {
    if (!cfg.contains("tensor")) return naive_tensor(m, p, n);
    const json& t = cfg.at("tensor");
    BilinearTensor tensor = [&] {
        if (t.is_string()) {
            const std::string name = t.get<std::string>();
            if (name == "strassen") return strassen_tensor();
            if (name == "naive") return naive_tensor(m, p, n);
            if (name == "strassen2") return kronecker_compose(strassen_tensor(), strassen_tensor());
            throw ValidationError("unknown tensor \"" + name + "\"");
        }
        if (t.is_object() && t.contains("file"))
            return load_tensor_file(t.at("file").get<std::string>());
        throw ValidationError("tensor must be a name or {\"file\": path}");
    }();
    // User-supplied constructions are validated before use.
    TensorCheckReport check = verify_tensor(tensor, 50, FieldConfig(FieldConfig::kDefaultModulus));
    if (!check)
        throw ValidationError("tensor failed validation: " + check.failure);
    return tensor;
}

std::optional<DegreeAssignment> assignment_from_config(const json& cfg, std::size_t m,
                                                       std::size_t p, std::size_t n,
                                                       std::size_t T) {
    if (!cfg.contains("assignment")) return std::nullopt;
    const json& a = cfg.at("assignment");
    if (a.is_object() && a.contains("variant")) {
        const std::string v = a.at("variant").get<std::string>();
        if (v == "v1") return preset_assignment(PresetVariant::V1, m, p, n, T);
        if (v == "v2") return preset_assignment(PresetVariant::V2, m, p, n, T);
        if (v == "v3") return preset_assignment(PresetVariant::V3, m, p, n, T);
        if (v == "min") return std::nullopt; // resolved to the min-threshold preset
        throw ValidationError("unknown assignment variant \"" + v + "\"");
    }
    if (a.is_object() && a.contains("a")) {
        const auto flat = [](const json& arr) {
            std::vector<std::uint64_t> out;
            for (const auto& row : arr)
                for (const auto& v : row) out.push_back(v.get<std::uint64_t>());
            return out;
        };
        return DegreeAssignment(m, p, n, T, flat(a.at("a")), flat(a.at("b")),
                                a.at("c").get<std::vector<std::uint64_t>>(),
                                a.at("d").get<std::vector<std::uint64_t>>());
    }
    throw ValidationError("assignment must be {\"variant\": ...} or explicit exponent arrays");
}

struct LoadedInputs {
    std::optional<Matrix> A, B;
    std::optional<MatrixLibrary> libA, libB;
};

LoadedInputs inputs_from_config(const json& cfg, Problem problem, const FieldConfig& field,
                                const fs::path& base, std::size_t U, std::size_t V) {
    if (!cfg.contains("inputs"))
        throw ValidationError("config is missing required field \"inputs\"");
    const json& in = cfg.at("inputs");
    LoadedInputs out;
    const auto resolve = [&](const std::string& rel) { return (base / rel).string(); };

    if (in.contains("generate")) {
        const json& g = in.at("generate");
        const std::size_t lambda = require_field<std::size_t>(g, "lambda");
        const std::size_t omega = require_field<std::size_t>(g, "omega");
        const std::size_t gamma = require_field<std::size_t>(g, "gamma");
        SplitMix64 rng(optional_field<std::uint64_t>(g, "data_seed", 1));
        if (problem == Problem::FPMM) {
            std::vector<Matrix> liba;
            for (std::size_t u = 0; u < U; ++u) liba.push_back(Matrix::random(lambda, omega, field, rng));
            out.libA = MatrixLibrary(std::move(liba));
        } else {
            out.A = Matrix::random(lambda, omega, field, rng);
        }
        if (problem == Problem::SMM) {
            out.B = Matrix::random(omega, gamma, field, rng);
        } else {
            std::vector<Matrix> libb;
            for (std::size_t v = 0; v < V; ++v) libb.push_back(Matrix::random(omega, gamma, field, rng));
            out.libB = MatrixLibrary(std::move(libb));
        }
        return out;
    }

    if (in.contains("a_file")) out.A = read_fqmx_file(resolve(in.at("a_file").get<std::string>()));
    if (in.contains("b_file")) out.B = read_fqmx_file(resolve(in.at("b_file").get<std::string>()));
    if (in.contains("library_a"))
        out.libA = load_library_manifest(resolve(in.at("library_a").get<std::string>()));
    if (in.contains("library_b"))
        out.libB = load_library_manifest(resolve(in.at("library_b").get<std::string>()));
    return out;
}

std::size_t round_up(std::size_t v, std::size_t d) { return (v + d - 1) / d * d; }

// "pad": true extends every input with zero rows/columns until the partition
// parameters divide the dimensions. The decoded product then carries the
// padded dimensions, which is why this never happens implicitly.
void apply_padding(LoadedInputs& inputs, std::size_t m, std::size_t p, std::size_t n) {
    std::size_t lambda = 0, omega = 0, gamma = 0;
    if (inputs.A) { lambda = inputs.A->rows(); omega = inputs.A->cols(); }
    if (inputs.libA) { lambda = inputs.libA->rows(); omega = inputs.libA->cols(); }
    if (inputs.B) { omega = std::max(omega, inputs.B->rows()); gamma = inputs.B->cols(); }
    if (inputs.libB) { omega = std::max(omega, inputs.libB->rows()); gamma = inputs.libB->cols(); }
    lambda = round_up(lambda, m);
    omega = round_up(omega, p);
    gamma = round_up(gamma, n);
    if (inputs.A) inputs.A = zero_pad(*inputs.A, lambda, omega);
    if (inputs.B) inputs.B = zero_pad(*inputs.B, omega, gamma);
    const auto pad_library = [&](MatrixLibrary& lib, std::size_t rows, std::size_t cols) {
        std::vector<Matrix> mats;
        for (std::size_t i = 0; i < lib.size(); ++i) mats.push_back(zero_pad(lib.at(i), rows, cols));
        lib = MatrixLibrary(std::move(mats));
    };
    if (inputs.libA) pad_library(*inputs.libA, lambda, omega);
    if (inputs.libB) pad_library(*inputs.libB, omega, gamma);
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool verify_oracle) {
    const json cfg = load_json_file(config_path);
    const fs::path base = fs::path(config_path).parent_path();

    SimJob job;
    job.problem = parse_problem(require_field<std::string>(cfg, "problem"));
    job.params.family = parse_family(require_field<std::string>(cfg, "family"));
    const FieldConfig field(optional_field<std::uint64_t>(cfg, "modulus", FieldConfig::kDefaultModulus));
    job.params.m = require_field<std::size_t>(cfg, "m");
    job.params.p = require_field<std::size_t>(cfg, "p");
    job.params.n = require_field<std::size_t>(cfg, "n");
    job.params.T = require_field<std::size_t>(cfg, "T");
    job.params.N = require_field<std::size_t>(cfg, "N");
    job.params.seed = optional_field<std::uint64_t>(cfg, "seed", 0);

    const std::size_t U = optional_field<std::size_t>(cfg, "U", 0);
    const std::size_t V = optional_field<std::size_t>(cfg, "V", 0);
    job.theta = optional_field<std::size_t>(cfg, "theta", 0);
    job.theta1 = optional_field<std::size_t>(cfg, "theta1", 0);
    job.theta2 = optional_field<std::size_t>(cfg, "theta2", 0);

    if (job.params.family == Family::PolyCode)
        job.params.assign =
            assignment_from_config(cfg, job.params.m, job.params.p, job.params.n, job.params.T);
    else
        job.params.tensor = tensor_from_config(cfg, job.params.m, job.params.p, job.params.n);

    LoadedInputs inputs = inputs_from_config(cfg, job.problem, field, base, U, V);
    if (optional_field<bool>(cfg, "pad", false))
        apply_padding(inputs, job.params.m, job.params.p, job.params.n);
    job.A = std::move(inputs.A);
    job.B = std::move(inputs.B);
    job.libA = std::move(inputs.libA);
    job.libB = std::move(inputs.libB);
    if (job.libB && V && job.libB->size() != V)
        throw ValidationError("library_b holds " + std::to_string(job.libB->size())
                              + " matrices but V=" + std::to_string(V));
    if (job.libA && U && job.libA->size() != U)
        throw ValidationError("library_a holds " + std::to_string(job.libA->size())
                              + " matrices but U=" + std::to_string(U));

    std::vector<WorkerProfile> profiles = cfg.contains("workers")
                                              ? profiles_from_json(cfg.at("workers"))
                                              : all_prompt_profiles(job.params.N);

    SimResult result = simulate(job, profiles);
    const CostReport cost = cost_report(result.metrics, result.run);

    fs::create_directories(out_dir);
    write_fqmx_file((fs::path(out_dir) / "decoded.fqmx").string(), *result.run.decoded);
    {
        std::ofstream out(fs::path(out_dir) / "transcript.json");
        out << run_to_json(result.run).dump(2) << "\n";
    }

    std::cout << problem_name(job.problem) << "/" << family_name(job.params.family)
              << ": decoded " << result.run.decoded->rows() << "x" << result.run.decoded->cols()
              << " product, K=" << result.run.plan.K
              << ", waited until t=" << result.metrics.completion_time
              << ", P_u=" << cost.upload_cost.str() << ", P_d=" << cost.download_cost.str() << "\n";

    if (verify_oracle) {
        Matrix expect = [&] {
            switch (job.problem) {
                case Problem::SMM: return mat_mul(*job.A, *job.B);
                case Problem::PSMM: return mat_mul(*job.A, job.libB->at(job.theta - 1));
                case Problem::FPMM:
                default:
                    return mat_mul(job.libA->at(job.theta1 - 1), job.libB->at(job.theta2 - 1));
            }
        }();
        if (*result.run.decoded != expect) {
            std::cerr << "oracle mismatch: decoded product differs from the direct computation\n";
            return 1;
        }
        std::cout << "oracle check passed\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

TinyAuditConfig tiny_config_from_json(const json& cfg) {
    TinyAuditConfig out;
    out.problem = parse_problem(optional_field<std::string>(cfg, "problem", "psmm"));
    out.family = parse_family(optional_field<std::string>(cfg, "family", "poly"));
    out.q = require_field<std::uint64_t>(cfg, "q");
    out.m = optional_field<std::size_t>(cfg, "m", 1);
    out.p = optional_field<std::size_t>(cfg, "p", 1);
    out.n = optional_field<std::size_t>(cfg, "n", 1);
    out.T = optional_field<std::size_t>(cfg, "T", 1);
    out.N = require_field<std::size_t>(cfg, "N");
    out.V = optional_field<std::size_t>(cfg, "V", 1);
    out.U = optional_field<std::size_t>(cfg, "U", 1);
    out.lambda = optional_field<std::size_t>(cfg, "lambda", out.m);
    out.omega = optional_field<std::size_t>(cfg, "omega", out.p);
    out.gamma = optional_field<std::size_t>(cfg, "gamma", out.n);
    out.theta = optional_field<std::size_t>(cfg, "theta", 1);
    out.data_seed = optional_field<std::uint64_t>(cfg, "data_seed", 7);
    out.space_limit = optional_field<std::uint64_t>(cfg, "space_limit", 10'000'000ULL);
    if (cfg.contains("pinned_noise_index"))
        out.pinned_noise_index = cfg.at("pinned_noise_index").get<std::size_t>();
    return out;
}

int cmd_audit(const std::string& mode, const std::string& config_path, const std::string& out_path) {
    const json cfg = load_json_file(config_path);
    nlohmann::ordered_json report_json;
    bool pass = false;

    if (mode == "privacy" || mode == "security") {
        TinyAuditConfig tiny = tiny_config_from_json(cfg);
        CollusionSet colluders;
        colluders.ids = require_field<std::vector<std::size_t>>(cfg, "colluders");
        AuditReport report = mode == "privacy" ? exhaustive_privacy_audit(tiny, colluders)
                                               : exhaustive_security_audit(tiny, colluders);
        report_json = audit_report_to_json(report);
        report_json["mode"] = mode;
        pass = report.pass;
    } else if (mode == "structure") {
        const FieldConfig field(require_field<std::uint64_t>(cfg, "q"));
        const std::size_t N = require_field<std::size_t>(cfg, "N");
        const std::size_t T = require_field<std::size_t>(cfg, "T");
        const bool exhaustive = optional_field<bool>(cfg, "exhaustive", true);
        const Family family = parse_family(optional_field<std::string>(cfg, "family", "poly"));
        Lemma1Report report;
        if (family == Family::PolyCode) {
            std::vector<std::uint64_t> exponents;
            if (cfg.contains("exponents")) {
                exponents = cfg.at("exponents").get<std::vector<std::uint64_t>>();
            } else {
                // default: the d-exponents of the requested preset
                const std::size_t m = optional_field<std::size_t>(cfg, "m", 1);
                const std::size_t p = optional_field<std::size_t>(cfg, "p", 1);
                const std::size_t n = optional_field<std::size_t>(cfg, "n", 1);
                exponents = preset_assignment(PresetVariant::V1, m, p, n, T).d;
            }
            EvaluationPoints pts = default_poly_points(field, N);
            report = check_lemma1_monomial(exponents, pts.alphas, T, exhaustive);
        } else {
            const std::size_t R = require_field<std::size_t>(cfg, "R");
            EvaluationPoints pts = default_lagrange_points(field, N, R, T);
            report = check_lemma1_lagrange(pts.betas, R, T, pts.alphas, exhaustive);
        }
        report_json = lemma1_report_to_json(report);
        report_json["mode"] = "structure";
        pass = report.ok;
    } else {
        throw ValidationError("unknown audit mode \"" + mode + "\"");
    }

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << report_json.dump(2) << "\n";
    }
    std::cout << report_json.dump(2) << "\n";
    return pass ? 0 : kExitAuditFailure;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchRow {
    std::string family;
    std::size_t size, K;
    long long encode_us, worker_us, decode_us;
    std::uint64_t encode_ops, worker_ops, decode_ops;
};

BenchRow bench_one(const std::string& family_name_str, Family family, Problem problem,
                   std::size_t size, std::size_t m, std::size_t p, std::size_t n, std::size_t T,
                   std::size_t V, std::size_t U) {
    using clock = std::chrono::steady_clock;
    const FieldConfig field(FieldConfig::kDefaultModulus);
    SplitMix64 rng(size * 31 + 7);

    RunParams params;
    params.family = family;
    params.m = m; params.p = p; params.n = n; params.T = T;
    const std::size_t R = m * p * n;
    params.N = family == Family::PolyCode
                   ? recovery_threshold(ThresholdFamily::PolyMin, m, p, n, T).K
                   : 2 * R + 2 * T - 1;
    params.seed = 17;

    BenchRow row;
    row.family = family_name_str;
    row.size = size;

    // encode phase (master side): preparing queries and shares
    const auto t0 = clock::now();
    StrategyRun run;
    SeededNoise noise(params.seed);
    if (problem == Problem::PSMM) {
        Matrix A = Matrix::random(size, size, field, rng);
        std::vector<Matrix> libm;
        for (std::size_t v = 0; v < V; ++v) libm.push_back(Matrix::random(size, size, field, rng));
        MatrixLibrary lib(std::move(libm));
        run = prepare_psmm(A, lib, V, params, noise);
    } else {
        std::vector<Matrix> liba, libb;
        for (std::size_t u = 0; u < U; ++u) liba.push_back(Matrix::random(size, size, field, rng));
        for (std::size_t v = 0; v < V; ++v) libb.push_back(Matrix::random(size, size, field, rng));
        run = prepare_fpmm(MatrixLibrary(std::move(liba)), MatrixLibrary(std::move(libb)), U, V,
                           params, noise);
    }
    const auto t1 = clock::now();

    // worker phase re-timed with real parallel execution over the workers
    std::vector<Matrix> responses(run.N, Matrix(1, 1, field));
    parallel_for(run.N, [&](std::size_t i) {
        responses[i] = mat_mul(run.a_shares[i], run.b_shares[i]);
    });
    const auto t2 = clock::now();

    std::vector<std::size_t> ids(run.plan.K);
    for (std::size_t i = 0; i < run.plan.K; ++i) ids[i] = i + 1;
    decode_run(run, ids);
    const auto t3 = clock::now();

    row.K = run.plan.K;
    row.encode_us = std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
    row.worker_us = std::chrono::duration_cast<std::chrono::microseconds>(t2 - t1).count();
    row.decode_us = std::chrono::duration_cast<std::chrono::microseconds>(t3 - t2).count();
    row.encode_ops = run.cost.encode_mul_adds;
    row.worker_ops = run.cost.worker_mul_adds;
    row.decode_ops = run.cost.decode_mul_adds;
    return row;
}

int cmd_bench(const std::vector<std::size_t>& sizes, const std::vector<std::string>& families,
              std::size_t m, std::size_t p, std::size_t n, std::size_t T, std::size_t V,
              std::size_t U, const std::string& out_path) {
    if (sizes.empty())
        throw ValidationError("bench needs a non-empty --sizes list");
    if (families.empty())
        throw ValidationError("bench needs a non-empty --families list");
    std::ostringstream csv;
    csv << "family,size,K,encode_us,worker_us,decode_us,encode_ops,worker_ops,decode_ops\n";
    for (const std::string& fam : families) {
        Problem problem;
        Family family;
        if (fam == "psmm-poly") { problem = Problem::PSMM; family = Family::PolyCode; }
        else if (fam == "psmm-lagrange") { problem = Problem::PSMM; family = Family::LagrangeCode; }
        else if (fam == "fpmm-poly") { problem = Problem::FPMM; family = Family::PolyCode; }
        else if (fam == "fpmm-lagrange") { problem = Problem::FPMM; family = Family::LagrangeCode; }
        else throw ValidationError("unknown bench family \"" + fam + "\"");
        for (const std::size_t size : sizes) {
            if (size % m || size % p || size % n)
                throw ValidationError("bench size must be divisible by m, p and n");
            BenchRow row = bench_one(fam, family, problem, size, m, p, n, T, V, U);
            csv << row.family << "," << row.size << "," << row.K << "," << row.encode_us << ","
                << row.worker_us << "," << row.decode_us << "," << row.encode_ops << ","
                << row.worker_ops << "," << row.decode_ops << "\n";
        }
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << csv.str();
    }
    std::cout << csv.str();
    return 0;
}

// ---------------------------------------------------------------------------
// verify-tensor
// ---------------------------------------------------------------------------

int cmd_verify_tensor(const std::string& path, std::size_t trials, std::uint64_t modulus) {
    BilinearTensor tensor = load_tensor_file(path);
    TensorCheckReport report = verify_tensor(tensor, trials, FieldConfig(modulus));
    std::cout << "shape (" << tensor.m << "," << tensor.p << "," << tensor.n << "), rank R="
              << tensor.R << "\n"
              << "random trials: " << report.trials_run << ", symbolic check: "
              << (report.symbolic_checked ? "ran" : "skipped (mpn > 64)") << "\n";
    if (!report.ok) {
        std::cout << "FAIL: " << report.failure << "\n";
        return kExitAuditFailure;
    }
    std::cout << "PASS\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coded private matrix multiplication toolkit"};
    app.require_subcommand(1);

    // threshold
    auto* threshold = app.add_subcommand("threshold", "recovery threshold and cost calculator");
    std::string th_problem = "psmm", th_family = "both", th_variant = "min";
    std::size_t th_m = 1, th_p = 1, th_n = 1, th_T = 1;
    std::optional<std::size_t> th_R;
    bool th_table1 = false;
    threshold->add_option("--problem", th_problem, "smm | psmm | fpmm");
    threshold->add_option("--family", th_family, "poly | lagrange | both");
    threshold->add_option("--m", th_m);
    threshold->add_option("--p", th_p);
    threshold->add_option("--n", th_n);
    threshold->add_option("--T", th_T);
    threshold->add_option("--R", th_R, "tensor rank (lagrange)");
    threshold->add_option("--variant", th_variant, "v1 | v2 | v3 | min");
    threshold->add_flag("--table1", th_table1, "print the standard comparison rows");

    // run
    auto* run = app.add_subcommand("run", "execute a strategy end-to-end from a JSON config");
    std::string run_config, run_out = "copmm-out";
    bool run_verify = false;
    run->add_option("config", run_config, "JSON run configuration")->required();
    run->add_option("--out-dir", run_out, "output directory for decoded.fqmx and transcript.json");
    run->add_flag("--verify-oracle", run_verify, "compare the decode against direct multiplication");

    // audit
    auto* audit = app.add_subcommand("audit", "privacy/security/structure audits");
    std::string audit_mode, audit_config, audit_out;
    audit->add_option("--mode", audit_mode, "privacy | security | structure")->required();
    audit->add_option("config", audit_config, "JSON audit configuration")->required();
    audit->add_option("--out", audit_out, "write the JSON report here");

    // bench
    auto* bench = app.add_subcommand("bench", "phase timings and operation counts as CSV");
    std::vector<std::size_t> bench_sizes;
    std::vector<std::string> bench_families;
    std::size_t b_m = 2, b_p = 2, b_n = 2, b_T = 1, b_V = 2, b_U = 2;
    std::string bench_out;
    bench->add_option("--sizes", bench_sizes, "square matrix sizes")->delimiter(',');
    bench->add_option("--families", bench_families,
                      "psmm-poly | psmm-lagrange | fpmm-poly | fpmm-lagrange")->delimiter(',');
    bench->add_option("--m", b_m);
    bench->add_option("--p", b_p);
    bench->add_option("--n", b_n);
    bench->add_option("--T", b_T);
    bench->add_option("--V", b_V);
    bench->add_option("--U", b_U);
    bench->add_option("--out", bench_out, "also write the CSV here");

    // verify-tensor
    auto* vt = app.add_subcommand("verify-tensor", "validate a bilinear tensor file");
    std::string vt_path;
    std::size_t vt_trials = 100;
    std::uint64_t vt_modulus = FieldConfig::kDefaultModulus;
    vt->add_option("tensor", vt_path, "tensor JSON file")->required();
    vt->add_option("--trials", vt_trials, "random trials");
    vt->add_option("--modulus", vt_modulus, "field modulus for the random trials");

    CLI11_PARSE(app, argc, argv);

    try {
        if (threshold->parsed())
            return cmd_threshold(th_family, th_m, th_p, th_n, th_T, th_R, th_variant, th_table1);
        if (run->parsed()) return cmd_run(run_config, run_out, run_verify);
        if (audit->parsed()) return cmd_audit(audit_mode, audit_config, audit_out);
        if (bench->parsed())
            return cmd_bench(bench_sizes, bench_families, b_m, b_p, b_n, b_T, b_V, b_U, bench_out);
        if (vt->parsed()) return cmd_verify_tensor(vt_path, vt_trials, vt_modulus);
    } catch (const BelowThresholdError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBelowThreshold;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
