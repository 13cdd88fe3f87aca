#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "copmm/private_mm.hpp"

#include <nlohmann/json_fwd.hpp>

namespace copmm {

struct WorkerBehavior {
    enum class Kind { Prompt, Delayed, Dropped };
    Kind kind = Kind::Prompt;
    std::uint64_t latency = 0; // simulated latency units, Delayed only
};

struct WorkerProfile {
    std::size_t id = 0; // 1..N
    WorkerBehavior behavior;
};

/// Profiles JSON: [{"id":1,"behavior":"prompt"}, {"id":2,"behavior":{"delayed":5}},
/// {"id":3,"behavior":"dropped"}].
std::vector<WorkerProfile> profiles_from_json(const nlohmann::json& j);

std::vector<WorkerProfile> all_prompt_profiles(std::size_t N);

struct RunMetrics {
    std::uint64_t uploaded_symbols = 0;
    std::uint64_t query_scalars_total = 0;
    std::uint64_t downloaded_symbols = 0;
    std::uint64_t worker_mul_adds = 0; // max over workers
    std::uint64_t decode_mul_adds = 0;
    std::uint64_t completion_time = 0; // simulated time of the K-th arrival
    std::vector<std::size_t> responses_used; // 1-based ids, arrival order
};

/// One distributed job: problem selection plus its already-loaded inputs.
struct SimJob {
    Problem problem = Problem::SMM;
    RunParams params;
    std::optional<Matrix> A, B;
    std::optional<MatrixLibrary> libA, libB;
    std::size_t theta = 0, theta1 = 0, theta2 = 0;
};

struct SimResult {
    StrategyRun run;
    RunMetrics metrics;
};

/// Runs sharing/computation, then reconstructs from the K earliest completions
/// by simulated time (ties by lower id). Dropped workers never complete; with
/// fewer than K responsive workers the run fails with "insufficient responsive
/// workers" and never returns a wrong product.
SimResult simulate(const SimJob& job, std::span<const WorkerProfile> profiles);

/// Cost report derived from the metrics; asserts the measured P_u and P_d
/// match the closed forms N/(mp) and K/(mn).
CostReport cost_report(const RunMetrics& metrics, const StrategyRun& run);

/// Worker parallelism cap: COPMM_THREADS when set, hardware concurrency
/// otherwise. Used by the wall-clock bench path only; the simulated-time path
/// stays single-threaded and deterministic.
std::size_t worker_thread_cap();

/// Runs fn(0..count-1) on up to worker_thread_cap() threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace copmm
