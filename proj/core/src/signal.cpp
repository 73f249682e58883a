#include "paprtr/signal.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "paprtr/rng.hpp"

namespace paprtr {

namespace {

void require(bool cond, const std::string& message) {
    if (!cond) {
        throw InvariantError(message);
    }
}

// One FFT object per thread; it caches kissfft plans per transform size, so
// repeated transforms of the same length do not re-derive twiddle tables.
Eigen::FFT<double>& fft_engine() {
    static thread_local Eigen::FFT<double> fft;
    return fft;
}

}  // namespace

FreqVector::FreqVector(ComplexVec e) : entries(std::move(e)) {
    require(entries.size() >= 2, "FreqVector: length must be >= 2");
    require(entries.allFinite(), "FreqVector: entries must be finite");
}

TimeSignal::TimeSignal(ComplexVec s) : samples(std::move(s)) {
    require(samples.size() >= 2, "TimeSignal: length must be >= 2");
    require(samples.allFinite(), "TimeSignal: samples must be finite");
}

ToneAllocation::ToneAllocation(Index n_total, std::vector<Index> prt_indices)
    : n_total_(n_total), prt_(std::move(prt_indices)) {
    require(n_total_ >= 2, "ToneAllocation: need at least 2 subcarriers");
    const auto n_prt = static_cast<Index>(prt_.size());
    require(n_prt >= 1 && n_prt < n_total_,
            "ToneAllocation: PRT count must satisfy 1 <= n_prt < n_total");

    std::sort(prt_.begin(), prt_.end());
    prt_mask_.assign(static_cast<std::size_t>(n_total_), false);
    for (Index tone : prt_) {
        require(tone >= 0 && tone < n_total_, "ToneAllocation: PRT index out of range");
        require(!prt_mask_[static_cast<std::size_t>(tone)],
                "ToneAllocation: duplicate PRT index");
        prt_mask_[static_cast<std::size_t>(tone)] = true;
    }

    data_.reserve(static_cast<std::size_t>(n_total_ - n_prt));
    for (Index tone = 0; tone < n_total_; ++tone) {
        if (!prt_mask_[static_cast<std::size_t>(tone)]) {
            data_.push_back(tone);
        }
    }
}

TimeSignal idft(const FreqVector& v) {
    const Index n = v.size();
    ComplexVec out(n);
    fft_engine().inv(out, v.entries);
    // Eigen's inverse applies 1/N; rescale to the unitary 1/sqrt(N) convention.
    out *= std::sqrt(static_cast<double>(n));
    return TimeSignal(std::move(out));
}

FreqVector dft(const TimeSignal& x) {
    const Index n = x.size();
    ComplexVec out(n);
    fft_engine().fwd(out, x.samples);
    out /= std::sqrt(static_cast<double>(n));
    return FreqVector(std::move(out));
}

PaprValue papr(const TimeSignal& x) {
    const Index n = x.size();
    double peak = 0.0;
    double sum = 0.0;
    for (Index k = 0; k < n; ++k) {
        const double p = std::norm(x.samples(k));
        peak = std::max(peak, p);
        sum += p;
    }
    require(peak > 0.0, "papr: undefined for the all-zero signal");
    const double linear = peak / (sum / static_cast<double>(n));
    return PaprValue{linear, 10.0 * std::log10(linear)};
}

PaprValue papr_oversampled(const FreqVector& v, Index oversample_factor) {
    require(oversample_factor >= 1, "papr_oversampled: factor must be >= 1");
    const Index n = v.size();
    if (oversample_factor == 1) {
        return papr(idft(v));
    }

    // Zero-pad in the middle of the spectrum so tones keep their signed
    // frequencies, then evaluate the length L*N interpolation.
    const Index ln = n * oversample_factor;
    ComplexVec padded = ComplexVec::Zero(ln);
    const Index half = (n + 1) / 2;
    padded.head(half) = v.entries.head(half);
    padded.tail(n - half) = v.entries.tail(n - half);

    ComplexVec out(ln);
    fft_engine().inv(out, padded);
    out *= static_cast<double>(ln) / std::sqrt(static_cast<double>(n));
    return papr(TimeSignal(std::move(out)));
}

double support_violation(const FreqVector& v, const std::vector<Index>& allowed, Index n_total) {
    std::vector<bool> ok(static_cast<std::size_t>(n_total), false);
    for (Index tone : allowed) {
        ok[static_cast<std::size_t>(tone)] = true;
    }
    double worst = 0.0;
    for (Index k = 0; k < v.size(); ++k) {
        if (!ok[static_cast<std::size_t>(k)]) {
            worst = std::max(worst, std::abs(v.entries(k)));
        }
    }
    return worst;
}

std::pair<FreqVector, TimeSignal> compose(const FreqVector& d,
                                          const FreqVector& r,
                                          const ToneAllocation& alloc) {
    const Index n = alloc.n_total();
    require(d.size() == n && r.size() == n, "compose: vector length mismatch");
    require(support_violation(d, alloc.data_indices(), n) <= 1e-12,
            "compose: data vector has energy on a PRT tone");
    require(support_violation(r, alloc.prt_indices(), n) <= 1e-12,
            "compose: PRT vector has energy on a data tone");

    FreqVector sum(d.entries + r.entries);
    TimeSignal time = idft(sum);
    return {std::move(sum), std::move(time)};
}

ToneAllocation sample_allocation(Index n_total, Index n_prt, TrialRng& rng) {
    require(n_total >= 2, "sample_allocation: need at least 2 subcarriers");
    require(n_prt >= 1 && n_prt < n_total, "sample_allocation: n_prt out of range");

    // Partial Fisher-Yates: the first n_prt entries are a uniform sample
    // without replacement.
    std::vector<Index> pool(static_cast<std::size_t>(n_total));
    for (Index i = 0; i < n_total; ++i) {
        pool[static_cast<std::size_t>(i)] = i;
    }
    for (Index i = 0; i < n_prt; ++i) {
        const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n_total - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(n_prt));
    return ToneAllocation(n_total, std::move(pool));
}

ToneAllocation make_allocation(Index n_total, Index n_prt, const PlacementStrategy& strategy) {
    require(n_total >= 2, "make_allocation: need at least 2 subcarriers");
    require(n_prt >= 1 && n_prt < n_total, "make_allocation: n_prt out of range");

    if (const auto* fixed = std::get_if<FixedPlacement>(&strategy)) {
        require(static_cast<Index>(fixed->prt_indices.size()) == n_prt,
                "make_allocation: fixed placement size does not match n_prt");
        return ToneAllocation(n_total, fixed->prt_indices);
    }

    TrialRng rng(std::get<RandomPlacement>(strategy).seed, /*stream=*/0x70727400ULL);
    return sample_allocation(n_total, n_prt, rng);
}

namespace {

void write_complex_csv(const ComplexVec& v, std::ostream& os) {
    const auto flags = os.flags();
    const auto precision = os.precision();
    os.precision(std::numeric_limits<double>::max_digits10);
    os << "index,re,im\n";
    for (Index k = 0; k < v.size(); ++k) {
        os << k << ',' << v(k).real() << ',' << v(k).imag() << '\n';
    }
    os.flags(flags);
    os.precision(precision);
}

}  // namespace

void write_csv(const FreqVector& v, std::ostream& os) { write_complex_csv(v.entries, os); }

void write_csv(const TimeSignal& x, std::ostream& os) { write_complex_csv(x.samples, os); }

}  // namespace paprtr
