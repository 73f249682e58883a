#include "paprtr/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

namespace paprtr {

namespace {

void require(bool cond, const char* message) {
    if (!cond) {
        throw InvariantError(message);
    }
}

constexpr double kQpskLevel = 0.7071067811865476;  // 1/sqrt(2)

// 16-QAM axis levels scaled to unit average symbol power.
const double kQamLevels[4] = {-3.0 / std::sqrt(10.0), -1.0 / std::sqrt(10.0),
                              1.0 / std::sqrt(10.0), 3.0 / std::sqrt(10.0)};

struct TrialContext {
    const CampaignConfig* cfg;
    SparseFpConfig sparse;  // with the campaign-level target applied
    double rho_star_linear;
};

MethodOutcome run_method(Method method, const TrialContext& ctx, const FreqVector& d,
                         const ToneAllocation& alloc) {
    MethodOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    switch (method) {
        case Method::None: {
            out.papr_db = papr(idft(d)).db;
            out.active_prt = 0;
            out.status = "ok";
            break;
        }
        case Method::Sota: {
            const SotaResult res = reduce_sota(d, alloc, ctx.cfg->sota);
            out.papr_db = res.achieved_papr.db;
            for (Index tone : alloc.prt_indices()) {
                if (std::abs(res.r_freq.entries(tone)) >= ctx.sparse.epsilon) {
                    ++out.active_prt;
                }
            }
            switch (res.status) {
                case SolveStatus::Optimal: out.status = "optimal"; break;
                case SolveStatus::Infeasible: out.status = "infeasible"; break;
                case SolveStatus::IterationLimit: out.status = "iteration-limit"; break;
                case SolveStatus::NumericalFailure: out.status = "numerical-failure"; break;
            }
            break;
        }
        case Method::SparseFp: {
            const ReductionResult res = reduce_sparse(d, alloc, ctx.sparse);
            out.papr_db = res.achieved_papr.db;
            out.active_prt = static_cast<Index>(res.active_prt.size());
            out.status = res.status == ReductionStatus::Refined ? "refined" : "fallback";
            if (res.status == ReductionStatus::Refined) {
                // Re-verify the guarantee by direct evaluation of the composed
                // signal, independent of what the reducer reported.
                auto [x_freq, x_time] = compose(d, res.r_freq, alloc);
                double peak = 0.0;
                double sum = 0.0;
                for (Index k = 0; k < x_time.size(); ++k) {
                    const double p = std::norm(x_time.samples(k));
                    peak = std::max(peak, p);
                    sum += p;
                }
                const double rho = peak / (sum / static_cast<double>(x_time.size()));
                const bool papr_ok = rho <= ctx.rho_star_linear * (1.0 + 1e-4);
                const bool power_ok =
                    res.r_freq.entries.squaredNorm() <= res.p_max_used * (1.0 + 1e-6);
                if (!papr_ok || !power_ok) {
                    out.status = "refined-violation";
                }
            }
            break;
        }
    }
    const auto t1 = std::chrono::steady_clock::now();
    out.millis = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return out;
}

TrialRecord run_trial(int trial, const TrialContext& ctx) {
    const CampaignConfig& cfg = *ctx.cfg;
    TrialRng rng(cfg.seed, static_cast<std::uint64_t>(trial));

    const ToneAllocation alloc =
        cfg.fixed_prt.empty() ? sample_allocation(cfg.n_total, cfg.n_prt, rng)
                              : ToneAllocation(cfg.n_total, cfg.fixed_prt);
    const FreqVector d = gen_data_symbols(alloc, cfg.constellation, rng);

    TrialRecord rec;
    rec.trial = trial;
    rec.outcomes.reserve(cfg.methods.size());
    for (Method method : cfg.methods) {
        try {
            rec.outcomes.push_back(run_method(method, ctx, d, alloc));
        } catch (const std::exception& err) {
            MethodOutcome failed;
            failed.papr_db = std::numeric_limits<double>::quiet_NaN();
            failed.status = std::string("error: ") + err.what();
            rec.outcomes.push_back(std::move(failed));
        }
    }
    return rec;
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::None: return "none";
        case Method::Sota: return "sota";
        case Method::SparseFp: return "sparse-fp";
    }
    return "unknown";
}

FreqVector gen_data_symbols(const ToneAllocation& alloc, Constellation constellation,
                            TrialRng& rng) {
    ComplexVec entries = ComplexVec::Zero(alloc.n_total());
    for (Index tone : alloc.data_indices()) {
        if (constellation == Constellation::Qpsk) {
            const std::uint64_t bits = rng.below(4);
            entries(tone) = Complex((bits & 1) ? kQpskLevel : -kQpskLevel,
                                    (bits & 2) ? kQpskLevel : -kQpskLevel);
        } else {
            const std::uint64_t bits = rng.below(16);
            entries(tone) = Complex(kQamLevels[bits & 3], kQamLevels[(bits >> 2) & 3]);
        }
    }
    return FreqVector(std::move(entries));
}

std::vector<std::pair<double, double>> ecdf(std::vector<double> values) {
    require(!values.empty(), "ecdf: empty input");
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> steps;
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i + 1 == values.size() || values[i + 1] != values[i]) {
            steps.emplace_back(values[i], static_cast<double>(i + 1) / n);
        }
    }
    return steps;
}

std::vector<std::pair<Index, double>> pmf(const std::vector<Index>& counts) {
    require(!counts.empty(), "pmf: empty input");
    std::map<Index, Index> histogram;
    for (Index c : counts) {
        ++histogram[c];
    }
    std::vector<std::pair<Index, double>> out;
    out.reserve(histogram.size());
    const double n = static_cast<double>(counts.size());
    for (const auto& [count, occurrences] : histogram) {
        out.emplace_back(count, static_cast<double>(occurrences) / n);
    }
    return out;
}

CampaignResult run_campaign(const CampaignConfig& cfg) {
    require(cfg.n_trials >= 1, "run_campaign: need at least one trial");
    require(!cfg.methods.empty(), "run_campaign: no methods enabled");
    require(cfg.n_prt >= 1 && cfg.n_prt < cfg.n_total, "run_campaign: n_prt out of range");
    if (!cfg.fixed_prt.empty()) {
        require(static_cast<Index>(cfg.fixed_prt.size()) == cfg.n_prt,
                "run_campaign: fixed PRT set size does not match n_prt");
    }

    TrialContext ctx;
    ctx.cfg = &cfg;
    ctx.sparse = cfg.sparse_fp;
    ctx.sparse.rho_star_db = cfg.rho_star_db;  // campaign-level target is authoritative
    ctx.sparse.sota = cfg.sota;
    ctx.rho_star_linear = std::pow(10.0, cfg.rho_star_db / 10.0);

    std::vector<TrialRecord> records(static_cast<std::size_t>(cfg.n_trials));

    int threads = cfg.threads == 0
        ? static_cast<int>(std::thread::hardware_concurrency())
        : cfg.threads;
    threads = std::clamp(threads, 1, cfg.n_trials);

    if (threads == 1) {
        for (int trial = 0; trial < cfg.n_trials; ++trial) {
            records[static_cast<std::size_t>(trial)] = run_trial(trial, ctx);
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (int trial = next.fetch_add(1); trial < cfg.n_trials;
                     trial = next.fetch_add(1)) {
                    records[static_cast<std::size_t>(trial)] = run_trial(trial, ctx);
                }
            });
        }
        for (auto& worker : pool) {
            worker.join();
        }
    }

    CampaignResult result;
    result.records = std::move(records);
    result.summaries.reserve(cfg.methods.size());
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
        MethodSummary summary;
        summary.method = cfg.methods[mi];
        std::vector<double> paprs;
        std::vector<Index> counts;
        Index successes = 0;
        paprs.reserve(result.records.size());
        counts.reserve(result.records.size());
        for (const TrialRecord& rec : result.records) {
            const MethodOutcome& out = rec.outcomes[mi];
            paprs.push_back(out.papr_db);
            counts.push_back(out.active_prt);
            if (out.papr_db <= cfg.rho_star_db + 1e-9) {
                ++successes;
            }
            if (out.status == "refined-violation") {
                ++summary.refined_violations;
            }
        }
        summary.ecdf = ecdf(std::move(paprs));
        summary.pmf = pmf(counts);
        summary.success_rate =
            static_cast<double>(successes) / static_cast<double>(cfg.n_trials);
        result.summaries.push_back(std::move(summary));
    }
    return result;
}

void write_campaign_csv(const CampaignResult& result, const CampaignConfig& cfg,
                        const std::filesystem::path& out_dir, const std::string& tag) {
    std::filesystem::create_directories(out_dir);

    {
        std::ofstream os(out_dir / ("trials" + tag + ".csv"));
        require(os.good(), "write_campaign_csv: cannot open trials.csv");
        os.precision(12);
        os << "trial,method,papr_db,active_prt,status,millis\n";
        for (const TrialRecord& rec : result.records) {
            for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
                const MethodOutcome& out = rec.outcomes[mi];
                os << rec.trial << ',' << method_name(cfg.methods[mi]) << ','
                   << out.papr_db << ',' << out.active_prt << ',' << out.status << ','
                   << out.millis << '\n';
            }
        }
    }

    for (const MethodSummary& summary : result.summaries) {
        const std::string name = method_name(summary.method);
        {
            std::ofstream os(out_dir / ("ecdf_" + name + tag + ".csv"));
            require(os.good(), "write_campaign_csv: cannot open ecdf csv");
            os.precision(12);
            os << "papr_db,cdf\n";
            for (const auto& [value, prob] : summary.ecdf) {
                os << value << ',' << prob << '\n';
            }
        }
        {
            std::ofstream os(out_dir / ("pmf_" + name + tag + ".csv"));
            require(os.good(), "write_campaign_csv: cannot open pmf csv");
            os.precision(12);
            os << "count,prob\n";
            for (const auto& [count, prob] : summary.pmf) {
                os << count << ',' << prob << '\n';
            }
        }
    }
}

}  // namespace paprtr
