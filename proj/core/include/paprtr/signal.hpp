#ifndef PAPRTR_SIGNAL_HPP
#define PAPRTR_SIGNAL_HPP

/**
 * @file signal.hpp
 * @brief OFDM baseband signal model: frequency/time vectors linked by the
 *        unitary DFT, the PAPR metric, and data/PRT tone allocation.
 *
 * Conventions used throughout the library:
 *  - The DFT is unitary (symmetric 1/sqrt(N) scaling), so signal energy is
 *    identical in both domains and power constraints are domain-independent.
 *  - Subcarrier indices are zero-based.
 *  - All types are immutable value objects after construction; every
 *    operation is a pure function and safe to call concurrently.
 */

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace paprtr {

using Complex = std::complex<double>;
using ComplexVec = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Thrown when an input violates a documented precondition or invariant.
class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * @brief Frequency-domain vector: one complex symbol amplitude per subcarrier.
 *
 * Length must be >= 2 and every entry finite.
 */
struct FreqVector {
    ComplexVec entries;

    explicit FreqVector(ComplexVec e);

    Index size() const { return entries.size(); }
};

/**
 * @brief Time-domain signal: one complex sample per time index.
 *
 * Produced from a FreqVector by the unitary inverse DFT, so it carries the
 * same energy as its frequency-domain counterpart.
 */
struct TimeSignal {
    ComplexVec samples;

    explicit TimeSignal(ComplexVec s);

    Index size() const { return samples.size(); }
};

/**
 * @brief Partition of the N subcarriers into data tones and peak-reduction
 *        tones (PRTs).
 *
 * The two index sets are disjoint, sorted ascending, and together cover
 * {0, ..., N-1}. Both sets are nonempty.
 */
class ToneAllocation {
public:
    ToneAllocation(Index n_total, std::vector<Index> prt_indices);

    Index n_total() const { return n_total_; }
    Index n_prt() const { return static_cast<Index>(prt_.size()); }
    Index n_data() const { return static_cast<Index>(data_.size()); }

    const std::vector<Index>& prt_indices() const { return prt_; }
    const std::vector<Index>& data_indices() const { return data_; }

    bool is_prt(Index tone) const { return prt_mask_[static_cast<std::size_t>(tone)]; }

private:
    Index n_total_;
    std::vector<Index> prt_;
    std::vector<Index> data_;
    std::vector<bool> prt_mask_;
};

/// PRT placement: n_prt indices drawn uniformly without replacement.
struct RandomPlacement {
    std::uint64_t seed = 0;
};

/// PRT placement: a caller-supplied index list.
struct FixedPlacement {
    std::vector<Index> prt_indices;
};

using PlacementStrategy = std::variant<RandomPlacement, FixedPlacement>;

/**
 * @brief Peak-to-average power ratio of a time-domain signal.
 *
 * linear = ||x||_inf^2 / ((1/N) ||x||_2^2), db = 10 log10(linear).
 * For any nonzero signal of length N, 1 <= linear <= N.
 */
struct PaprValue {
    double linear;
    double db;
};

/**
 * @brief Unitary inverse DFT: x_k = (1/sqrt(N)) sum_n v_n exp(+j 2 pi n k / N).
 *
 * Energy-preserving; dft(idft(v)) == v up to roundoff.
 */
TimeSignal idft(const FreqVector& v);

/// Unitary forward DFT, the exact inverse of idft().
FreqVector dft(const TimeSignal& x);

/**
 * @brief PAPR of the N Nyquist-rate samples.
 * @throws InvariantError if x is identically zero (PAPR undefined).
 */
PaprValue papr(const TimeSignal& x);

/**
 * @brief PAPR evaluated on an oversampled grid: zero-padded unitary IDFT of
 *        length L*N. With L == 1 this reduces to papr(idft(v)).
 *
 * Provided for continuous-peak studies; the optimizers and statistics in this
 * library use the Nyquist-rate metric (L == 1).
 */
PaprValue papr_oversampled(const FreqVector& v, Index oversample_factor);

/**
 * @brief Superpose data and PRT symbols: returns (d + r, IDFT(d + r)).
 *
 * @throws InvariantError if d has energy on a PRT tone or r has energy on a
 *         data tone (magnitude above 1e-12).
 */
std::pair<FreqVector, TimeSignal> compose(const FreqVector& d,
                                          const FreqVector& r,
                                          const ToneAllocation& alloc);

/**
 * @brief Build a tone allocation for n_total subcarriers with n_prt PRTs.
 *
 * The random strategy draws PRT indices uniformly without replacement from a
 * seeded generator and is deterministic for a fixed seed. The fixed strategy
 * validates the supplied list (size n_prt, in range, no duplicates).
 */
ToneAllocation make_allocation(Index n_total, Index n_prt, const PlacementStrategy& strategy);

class TrialRng;

/// Draw a uniform random allocation from an existing stream (one per trial).
ToneAllocation sample_allocation(Index n_total, Index n_prt, TrialRng& rng);

/// Max magnitude of v outside the allowed index set (support violation measure).
double support_violation(const FreqVector& v, const std::vector<Index>& allowed, Index n_total);

/// Write "index,re,im" rows (with header) for debugging.
void write_csv(const FreqVector& v, std::ostream& os);
void write_csv(const TimeSignal& x, std::ostream& os);

}  // namespace paprtr

#endif  // PAPRTR_SIGNAL_HPP
