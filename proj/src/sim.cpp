#include "copmm/sim.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

namespace copmm {

std::vector<WorkerProfile> profiles_from_json(const nlohmann::json& j) {
    if (!j.is_array())
        throw ValidationError("worker profiles must be a JSON array");
    std::vector<WorkerProfile> out;
    for (const auto& entry : j) {
        WorkerProfile p;
        if (!entry.contains("id") || !entry["id"].is_number_unsigned())
            throw ValidationError("worker profile needs a positive integer id");
        p.id = entry["id"].get<std::size_t>();
        if (!entry.contains("behavior"))
            throw ValidationError("worker profile needs a behavior");
        const auto& b = entry["behavior"];
        if (b.is_string()) {
            const std::string s = b.get<std::string>();
            if (s == "prompt")
                p.behavior.kind = WorkerBehavior::Kind::Prompt;
            else if (s == "dropped")
                p.behavior.kind = WorkerBehavior::Kind::Dropped;
            else
                throw ValidationError("unknown worker behavior \"" + s + "\"");
        } else if (b.is_object() && b.contains("delayed")) {
            p.behavior.kind = WorkerBehavior::Kind::Delayed;
            p.behavior.latency = b["delayed"].get<std::uint64_t>();
        } else {
            throw ValidationError("worker behavior must be \"prompt\", \"dropped\" or {\"delayed\": t}");
        }
        out.push_back(p);
    }
    return out;
}

std::vector<WorkerProfile> all_prompt_profiles(std::size_t N) {
    std::vector<WorkerProfile> out(N);
    for (std::size_t i = 0; i < N; ++i) out[i].id = i + 1;
    return out;
}

SimResult simulate(const SimJob& job, std::span<const WorkerProfile> profiles) {
    const std::size_t N = job.params.N;
    if (profiles.size() != N)
        throw ValidationError("need exactly one profile per worker");
    std::set<std::size_t> ids;
    for (const WorkerProfile& p : profiles) {
        if (p.id == 0 || p.id > N)
            throw ValidationError("worker profile id out of range");
        if (!ids.insert(p.id).second)
            throw ValidationError("duplicate worker profile id");
    }

    SeededNoise noise(job.params.seed);
    StrategyRun run;
    switch (job.problem) {
        case Problem::SMM:
            if (!job.A || !job.B)
                throw ValidationError("SMM needs matrices A and B");
            run = prepare_smm(*job.A, *job.B, job.params, noise);
            break;
        case Problem::PSMM:
            if (!job.A || !job.libB)
                throw ValidationError("PSMM needs matrix A and the B library");
            run = prepare_psmm(*job.A, *job.libB, job.theta, job.params, noise);
            break;
        case Problem::FPMM:
            if (!job.libA || !job.libB)
                throw ValidationError("FPMM needs both libraries");
            run = prepare_fpmm(*job.libA, *job.libB, job.theta1, job.theta2, job.params, noise);
            break;
    }

    // Arrival schedule: prompt completes at time 0, delayed at its latency,
    // dropped never. Ties break towards the lower worker id.
    std::vector<std::pair<std::uint64_t, std::size_t>> arrivals;
    for (const WorkerProfile& p : profiles) {
        switch (p.behavior.kind) {
            case WorkerBehavior::Kind::Prompt: arrivals.push_back({0, p.id}); break;
            case WorkerBehavior::Kind::Delayed: arrivals.push_back({p.behavior.latency, p.id}); break;
            case WorkerBehavior::Kind::Dropped: break;
        }
    }
    std::sort(arrivals.begin(), arrivals.end());
    if (arrivals.size() < run.plan.K)
        throw BelowThresholdError("insufficient responsive workers: " + std::to_string(arrivals.size())
                                  + " responsive, need K=" + std::to_string(run.plan.K));

    std::vector<std::size_t> used;
    used.reserve(run.plan.K);
    for (std::size_t i = 0; i < run.plan.K; ++i) used.push_back(arrivals[i].second);
    decode_run(run, used);

    SimResult result;
    result.metrics.uploaded_symbols = run.cost.uploaded_symbols;
    result.metrics.query_scalars_total = run.cost.query_scalars_total;
    result.metrics.downloaded_symbols = run.cost.downloaded_symbols;
    result.metrics.worker_mul_adds = run.cost.worker_mul_adds;
    result.metrics.decode_mul_adds = run.cost.decode_mul_adds;
    result.metrics.completion_time = arrivals[run.plan.K - 1].first;
    result.metrics.responses_used = used;
    result.run = std::move(run);
    return result;
}

CostReport cost_report(const RunMetrics& metrics, const StrategyRun& run) {
    CostReport cost = run.cost;
    if (run.problem != Problem::FPMM) {
        const Rational want_pu(run.N, run.m * run.p);
        if (run.problem == Problem::PSMM && cost.upload_cost != want_pu)
            throw std::logic_error("measured upload cost disagrees with N/(mp)");
    }
    const Rational want_pd(run.plan.K, run.m * run.n);
    if (cost.download_cost != want_pd)
        throw std::logic_error("measured download cost disagrees with K/(mn)");
    if (metrics.downloaded_symbols != cost.downloaded_symbols)
        throw std::logic_error("metrics and cost report disagree on downloaded symbols");
    return cost;
}

std::size_t worker_thread_cap() {
    if (const char* env = std::getenv("COPMM_THREADS")) {
        const long v = std::atol(env);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const std::size_t threads = std::min(worker_thread_cap(), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace copmm
