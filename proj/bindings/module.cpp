// Python bindings for the main operations: field/matrix primitives, bilinear
// tensors, threshold calculator, the SMM/PSMM/FPMM pipelines and the audits.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "copmm/audit.hpp"
#include "copmm/sim.hpp"

namespace py = pybind11;
using namespace copmm;

namespace {

Matrix matrix_from_array(const py::array_t<std::uint64_t>& arr, const FieldConfig& field) {
    if (arr.ndim() != 2)
        throw ValidationError("expected a 2-D uint64 array");
    const auto view = arr.unchecked<2>();
    Matrix out(static_cast<std::size_t>(view.shape(0)), static_cast<std::size_t>(view.shape(1)),
               field);
    for (py::ssize_t r = 0; r < view.shape(0); ++r)
        for (py::ssize_t c = 0; c < view.shape(1); ++c)
            out.set_raw(r, c, view(r, c));
    return out;
}

py::array_t<std::uint64_t> matrix_to_array(const Matrix& mat) {
    py::array_t<std::uint64_t> out({mat.rows(), mat.cols()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t r = 0; r < mat.rows(); ++r)
        for (std::size_t c = 0; c < mat.cols(); ++c) view(r, c) = mat.raw(r, c);
    return out;
}

MatrixLibrary library_from_list(const std::vector<py::array_t<std::uint64_t>>& mats,
                                const FieldConfig& field) {
    std::vector<Matrix> out;
    out.reserve(mats.size());
    for (const auto& m : mats) out.push_back(matrix_from_array(m, field));
    return MatrixLibrary(std::move(out));
}

Family family_from_string(const std::string& s) {
    if (s == "poly") return Family::PolyCode;
    if (s == "lagrange") return Family::LagrangeCode;
    throw ValidationError("family must be \"poly\" or \"lagrange\"");
}

PresetVariant variant_from_string(const std::string& s) {
    if (s == "v1") return PresetVariant::V1;
    if (s == "v2") return PresetVariant::V2;
    if (s == "v3") return PresetVariant::V3;
    throw ValidationError("variant must be \"v1\", \"v2\" or \"v3\"");
}

py::dict cost_to_dict(const CostReport& cost) {
    py::dict d;
    d["upload_cost"] = cost.upload_cost.str();
    d["download_cost"] = cost.download_cost.str();
    d["upload_is_query_only"] = cost.upload_is_query_only;
    d["uploaded_symbols"] = cost.uploaded_symbols;
    d["downloaded_symbols"] = cost.downloaded_symbols;
    d["query_scalars_per_worker"] = cost.query_scalars_per_worker;
    d["query_scalars_total"] = cost.query_scalars_total;
    d["encode_mul_adds"] = cost.encode_mul_adds;
    d["worker_mul_adds"] = cost.worker_mul_adds;
    d["decode_mul_adds"] = cost.decode_mul_adds;
    return d;
}

py::dict run_to_dict(const StrategyRun& run) {
    py::dict d;
    d["K"] = run.plan.K;
    d["N"] = run.N;
    d["decoded"] = matrix_to_array(*run.decoded);
    d["used_workers"] = run.used_workers;
    d["cost"] = cost_to_dict(run.cost);
    d["query_scalars_per_worker"] = run.cost.query_scalars_per_worker;
    return d;
}

RunParams build_params(const std::string& family, std::size_t m, std::size_t p, std::size_t n,
                       std::size_t T, std::size_t N, std::uint64_t seed,
                       const std::optional<BilinearTensor>& tensor,
                       const std::optional<std::string>& variant) {
    RunParams params;
    params.family = family_from_string(family);
    params.m = m; params.p = p; params.n = n; params.T = T; params.N = N;
    params.seed = seed;
    if (params.family == Family::LagrangeCode)
        params.tensor = tensor ? *tensor : naive_tensor(m, p, n);
    else if (variant)
        params.assign = preset_assignment(variant_from_string(*variant), m, p, n, T);
    return params;
}

py::dict audit_to_dict(const AuditReport& r) {
    py::dict d;
    d["pass"] = r.pass;
    d["refused"] = r.refused;
    d["refusal"] = r.refusal;
    d["space_size"] = r.space_size;
    d["noise_scalars"] = r.noise_scalars;
    d["labels"] = r.labels;
    py::list pairs;
    for (const AuditPairTV& p : r.pairs) {
        py::dict e;
        e["first"] = p.first_label;
        e["second"] = p.second_label;
        e["tv"] = p.tv.str();
        pairs.append(e);
    }
    d["pairs"] = pairs;
    return d;
}

TinyAuditConfig audit_config(const std::string& problem, const std::string& family,
                             std::uint64_t q, std::size_t m, std::size_t p, std::size_t n,
                             std::size_t T, std::size_t N, std::size_t V, std::size_t U,
                             std::size_t lam, std::size_t omega, std::size_t gamma,
                             std::size_t theta, std::uint64_t data_seed,
                             std::optional<std::size_t> pinned) {
    TinyAuditConfig cfg;
    if (problem == "psmm") cfg.problem = Problem::PSMM;
    else if (problem == "fpmm") cfg.problem = Problem::FPMM;
    else throw ValidationError("audit problem must be \"psmm\" or \"fpmm\"");
    cfg.family = family_from_string(family);
    cfg.q = q;
    cfg.m = m; cfg.p = p; cfg.n = n; cfg.T = T; cfg.N = N;
    cfg.V = V; cfg.U = U;
    cfg.lambda = lam; cfg.omega = omega; cfg.gamma = gamma;
    cfg.theta = theta;
    cfg.data_seed = data_seed;
    cfg.pinned_noise_index = pinned;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "coded private matrix multiplication over prime fields";

    py::register_exception<ValidationError>(mod, "ValidationError", PyExc_ValueError);
    py::register_exception<BelowThresholdError>(mod, "BelowThresholdError", PyExc_RuntimeError);

    mod.def("is_prime", &is_prime_u64, py::arg("n"));

    mod.def(
        "mat_mul",
        [](const py::array_t<std::uint64_t>& a, const py::array_t<std::uint64_t>& b,
           std::uint64_t q) {
            const FieldConfig field(q);
            return matrix_to_array(mat_mul(matrix_from_array(a, field), matrix_from_array(b, field)));
        },
        py::arg("a"), py::arg("b"), py::arg("q"), "Exact matrix product over F_q.");

    py::class_<BilinearTensor>(mod, "BilinearTensor")
        .def_readonly("m", &BilinearTensor::m)
        .def_readonly("p", &BilinearTensor::p)
        .def_readonly("n", &BilinearTensor::n)
        .def_readonly("R", &BilinearTensor::R);

    mod.def("naive_tensor", &naive_tensor, py::arg("m"), py::arg("p"), py::arg("n"));
    mod.def("strassen_tensor", &strassen_tensor);
    mod.def("kronecker_compose", &kronecker_compose, py::arg("t1"), py::arg("t2"));
    mod.def("load_tensor_file", &load_tensor_file, py::arg("path"));
    mod.def(
        "verify_tensor",
        [](const BilinearTensor& t, std::size_t trials, std::uint64_t q) {
            TensorCheckReport r = verify_tensor(t, trials, FieldConfig(q));
            py::dict d;
            d["ok"] = r.ok;
            d["symbolic_checked"] = r.symbolic_checked;
            d["trials_run"] = r.trials_run;
            d["failure"] = r.failure;
            return d;
        },
        py::arg("tensor"), py::arg("trials") = 100,
        py::arg("q") = FieldConfig::kDefaultModulus);

    py::class_<DegreeAssignment>(mod, "DegreeAssignment")
        .def_readonly("a", &DegreeAssignment::a)
        .def_readonly("b", &DegreeAssignment::b)
        .def_readonly("c", &DegreeAssignment::c)
        .def_readonly("d", &DegreeAssignment::d)
        .def("threshold", &DegreeAssignment::threshold);

    mod.def(
        "preset_assignment",
        [](const std::string& variant, std::size_t m, std::size_t p, std::size_t n, std::size_t T) {
            return preset_assignment(variant_from_string(variant), m, p, n, T);
        },
        py::arg("variant"), py::arg("m"), py::arg("p"), py::arg("n"), py::arg("T"));

    mod.def(
        "verify_c1",
        [](const DegreeAssignment& assign) {
            C1Report r = verify_c1(assign);
            py::dict d;
            d["ok"] = r.ok;
            d["e_map"] = r.e_map;
            d["failure"] = r.failure;
            return d;
        },
        py::arg("assignment"));

    mod.def(
        "verify_c2",
        [](const DegreeAssignment& assign, std::uint64_t q, std::size_t N, bool exhaustive) {
            const FieldConfig field(q);
            EvaluationPoints pts = default_poly_points(field, N);
            C2Report r = verify_c2(assign, pts.alphas, exhaustive);
            py::dict d;
            d["ok"] = r.ok;
            d["exhaustive"] = r.exhaustive;
            d["subsets_checked"] = r.subsets_checked;
            d["failure"] = r.failure;
            return d;
        },
        py::arg("assignment"), py::arg("q") = FieldConfig::kDefaultModulus, py::arg("N") = 10,
        py::arg("exhaustive") = true);

    mod.def(
        "recovery_threshold",
        [](const std::string& family, std::size_t m, std::size_t p, std::size_t n, std::size_t T,
           std::optional<std::size_t> R) {
            const ThresholdReport r =
                family == "lagrange"
                    ? recovery_threshold(ThresholdFamily::Lagrange, m, p, n, T, R)
                    : recovery_threshold(ThresholdFamily::PolyMin, m, p, n, T);
            py::dict d;
            d["K"] = r.K;
            d["family"] = family;
            return d;
        },
        py::arg("family"), py::arg("m"), py::arg("p"), py::arg("n"), py::arg("T"),
        py::arg("R") = std::nullopt);

    mod.def(
        "smm_run",
        [](const py::array_t<std::uint64_t>& A, const py::array_t<std::uint64_t>& B,
           const std::string& family, std::size_t m, std::size_t p, std::size_t n, std::size_t T,
           std::size_t N, std::uint64_t q, std::uint64_t seed,
           const std::optional<BilinearTensor>& tensor, const std::optional<std::string>& variant) {
            const FieldConfig field(q);
            RunParams params = build_params(family, m, p, n, T, N, seed, tensor, variant);
            StrategyRun run = smm_run(matrix_from_array(A, field), matrix_from_array(B, field), params);
            return run_to_dict(run);
        },
        py::arg("A"), py::arg("B"), py::arg("family"), py::arg("m"), py::arg("p"), py::arg("n"),
        py::arg("T"), py::arg("N"), py::arg("q") = FieldConfig::kDefaultModulus,
        py::arg("seed") = 0, py::arg("tensor") = std::nullopt, py::arg("variant") = std::nullopt);

    mod.def(
        "psmm_run",
        [](const py::array_t<std::uint64_t>& A, const std::vector<py::array_t<std::uint64_t>>& lib,
           std::size_t theta, const std::string& family, std::size_t m, std::size_t p,
           std::size_t n, std::size_t T, std::size_t N, std::uint64_t q, std::uint64_t seed,
           const std::optional<BilinearTensor>& tensor, const std::optional<std::string>& variant) {
            const FieldConfig field(q);
            RunParams params = build_params(family, m, p, n, T, N, seed, tensor, variant);
            StrategyRun run =
                psmm_run(matrix_from_array(A, field), library_from_list(lib, field), theta, params);
            return run_to_dict(run);
        },
        py::arg("A"), py::arg("library_b"), py::arg("theta"), py::arg("family"), py::arg("m"),
        py::arg("p"), py::arg("n"), py::arg("T"), py::arg("N"),
        py::arg("q") = FieldConfig::kDefaultModulus, py::arg("seed") = 0,
        py::arg("tensor") = std::nullopt, py::arg("variant") = std::nullopt);

    mod.def(
        "fpmm_run",
        [](const std::vector<py::array_t<std::uint64_t>>& libA,
           const std::vector<py::array_t<std::uint64_t>>& libB, std::size_t theta1,
           std::size_t theta2, const std::string& family, std::size_t m, std::size_t p,
           std::size_t n, std::size_t T, std::size_t N, std::uint64_t q, std::uint64_t seed,
           const std::optional<BilinearTensor>& tensor, const std::optional<std::string>& variant) {
            const FieldConfig field(q);
            RunParams params = build_params(family, m, p, n, T, N, seed, tensor, variant);
            StrategyRun run = fpmm_run(library_from_list(libA, field),
                                       library_from_list(libB, field), theta1, theta2, params);
            return run_to_dict(run);
        },
        py::arg("library_a"), py::arg("library_b"), py::arg("theta1"), py::arg("theta2"),
        py::arg("family"), py::arg("m"), py::arg("p"), py::arg("n"), py::arg("T"), py::arg("N"),
        py::arg("q") = FieldConfig::kDefaultModulus, py::arg("seed") = 0,
        py::arg("tensor") = std::nullopt, py::arg("variant") = std::nullopt);

    mod.def(
        "privacy_audit",
        [](const std::string& problem, const std::string& family, std::uint64_t q, std::size_t m,
           std::size_t p, std::size_t n, std::size_t T, std::size_t N, std::size_t V,
           std::size_t U, std::size_t lam, std::size_t omega, std::size_t gamma,
           const std::vector<std::size_t>& colluders, std::uint64_t data_seed,
           std::optional<std::size_t> pinned_noise_index) {
            const TinyAuditConfig cfg = audit_config(problem, family, q, m, p, n, T, N, V, U, lam,
                                                     omega, gamma, 1, data_seed,
                                                     pinned_noise_index);
            return audit_to_dict(exhaustive_privacy_audit(cfg, CollusionSet{colluders}));
        },
        py::arg("problem"), py::arg("family"), py::arg("q"), py::arg("m"), py::arg("p"),
        py::arg("n"), py::arg("T"), py::arg("N"), py::arg("V"), py::arg("U") = 1,
        py::arg("lam") = 1, py::arg("omega") = 1, py::arg("gamma") = 1,
        py::arg("colluders") = std::vector<std::size_t>{1}, py::arg("data_seed") = 7,
        py::arg("pinned_noise_index") = std::nullopt);

    mod.def(
        "security_audit",
        [](const std::string& family, std::uint64_t q, std::size_t m, std::size_t p, std::size_t n,
           std::size_t T, std::size_t N, std::size_t V, std::size_t lam, std::size_t omega,
           std::size_t gamma, std::size_t theta, const std::vector<std::size_t>& colluders,
           std::uint64_t data_seed) {
            const TinyAuditConfig cfg = audit_config("psmm", family, q, m, p, n, T, N, V, 1, lam,
                                                     omega, gamma, theta, data_seed, std::nullopt);
            return audit_to_dict(exhaustive_security_audit(cfg, CollusionSet{colluders}));
        },
        py::arg("family"), py::arg("q"), py::arg("m"), py::arg("p"), py::arg("n"), py::arg("T"),
        py::arg("N"), py::arg("V") = 1, py::arg("lam") = 1, py::arg("omega") = 1,
        py::arg("gamma") = 1, py::arg("theta") = 1,
        py::arg("colluders") = std::vector<std::size_t>{1}, py::arg("data_seed") = 7);

#ifdef COPMM_VERSION
    mod.attr("__version__") = COPMM_VERSION;
#else
    mod.attr("__version__") = "dev";
#endif
}
