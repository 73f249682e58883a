#ifndef PAPRTR_MONTECARLO_HPP
#define PAPRTR_MONTECARLO_HPP

/**
 * @file montecarlo.hpp
 * @brief Seeded Monte Carlo campaigns over random OFDM symbols, with the
 *        empirical statistics (PAPR ECDFs, active-PRT PMFs, success rates)
 *        behind the reproduction figures, and their CSV serialization.
 *
 * Reproducibility contract: a campaign is a pure function of its
 * configuration. Every trial draws from an independent stream derived from
 * (seed, trial index), trials may run on any number of threads, and the
 * aggregation is a deterministic fold in trial order, so the numerical
 * results are identical regardless of parallelism. Only the recorded
 * wall-clock times vary between runs.
 */

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "paprtr/rng.hpp"
#include "paprtr/signal.hpp"
#include "paprtr/sota.hpp"
#include "paprtr/sparse_fp.hpp"

namespace paprtr {

enum class Constellation { Qpsk, Qam16 };

enum class Method { None, Sota, SparseFp };

std::string method_name(Method m);

struct CampaignConfig {
    Index n_total = 128;
    Index n_prt = 20;
    Constellation constellation = Constellation::Qpsk;
    int n_trials = 1;
    std::uint64_t seed = 1;
    std::vector<Method> methods = {Method::None, Method::Sota, Method::SparseFp};
    /// Success target shared by all methods (fraction of trials with
    /// achieved PAPR <= this value); also the sparse reducer's target.
    double rho_star_db = 6.0;
    SparseFpConfig sparse_fp{};
    SotaConfig sota{};
    /// Default: a fresh uniform-random PRT set per trial. Set to use one
    /// fixed set for every trial instead.
    std::vector<Index> fixed_prt{};
    int threads = 1;  ///< 0 = hardware concurrency
};

struct MethodOutcome {
    double papr_db = 0.0;
    Index active_prt = 0;
    std::string status;
    double millis = 0.0;  ///< wall time; the only non-deterministic field
};

struct TrialRecord {
    int trial = 0;
    std::vector<MethodOutcome> outcomes;  ///< aligned with CampaignConfig::methods
};

struct MethodSummary {
    Method method;
    std::vector<std::pair<double, double>> ecdf;  ///< (papr_db, cumulative prob)
    std::vector<std::pair<Index, double>> pmf;    ///< (active count, probability)
    double success_rate = 0.0;
    /// Refined results that failed the direct re-check of the target PAPR and
    /// power budget; must stay zero.
    Index refined_violations = 0;
};

struct CampaignResult {
    std::vector<TrialRecord> records;
    std::vector<MethodSummary> summaries;
};

/**
 * @brief I.i.d. unit-average-power constellation symbols on the data tones,
 *        zeros on the PRTs.
 */
FreqVector gen_data_symbols(const ToneAllocation& alloc, Constellation constellation,
                            TrialRng& rng);

/// Right-continuous empirical CDF with steps of 1/n at each distinct value.
std::vector<std::pair<double, double>> ecdf(std::vector<double> values);

/// Normalized histogram of integer counts, sorted by count.
std::vector<std::pair<Index, double>> pmf(const std::vector<Index>& counts);

CampaignResult run_campaign(const CampaignConfig& cfg);

/**
 * @brief Write trials.csv, ecdf_<method>.csv and pmf_<method>.csv into
 *        out_dir. A non-empty tag is appended to the per-method file stems
 *        (used by the multi-size sweep).
 */
void write_campaign_csv(const CampaignResult& result, const CampaignConfig& cfg,
                        const std::filesystem::path& out_dir, const std::string& tag = "");

}  // namespace paprtr

#endif  // PAPRTR_MONTECARLO_HPP
