#include "ecgfog/hrv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace ecgfog {

namespace {

// Symmetric moving average with edge truncation: windows hanging over the
// stream edge simply get shorter.
std::vector<double> moving_average(const std::vector<EcgSample>& samples, int half_width) {
    const auto n = static_cast<std::int64_t>(samples.size());
    std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::int64_t i = 0; i < n; ++i)
        prefix[static_cast<std::size_t>(i) + 1] =
            prefix[static_cast<std::size_t>(i)] + samples[static_cast<std::size_t>(i)].value;

    std::vector<double> ma(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t lo = std::max<std::int64_t>(0, i - half_width);
        const std::int64_t hi = std::min<std::int64_t>(n - 1, i + half_width);
        ma[static_cast<std::size_t>(i)] =
            (prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)]) /
            static_cast<double>(hi - lo + 1);
    }
    return ma;
}

std::vector<std::int64_t> candidates_above(const std::vector<EcgSample>& samples,
                                           const std::vector<double>& ma, double pct) {
    std::vector<std::int64_t> peaks;
    const double gain = 1.0 + pct / 100.0;
    const auto n = static_cast<std::int64_t>(samples.size());
    std::int64_t region_start = -1;
    for (std::int64_t i = 0; i <= n; ++i) {
        const bool above =
            i < n && samples[static_cast<std::size_t>(i)].value >
                         ma[static_cast<std::size_t>(i)] * gain;
        if (above && region_start < 0) {
            region_start = i;
        } else if (!above && region_start >= 0) {
            std::int64_t best = region_start;
            for (std::int64_t j = region_start + 1; j < i; ++j)
                if (samples[static_cast<std::size_t>(j)].value >
                    samples[static_cast<std::size_t>(best)].value)
                    best = j;
            peaks.push_back(best);
            region_start = -1;
        }
    }
    return peaks;
}

std::vector<double> intervals_ms(const std::vector<std::int64_t>& peaks, double fs_hz) {
    std::vector<double> rr;
    for (std::size_t i = 1; i < peaks.size(); ++i)
        rr.push_back(static_cast<double>(peaks[i] - peaks[i - 1]) * 1000.0 / fs_hz);
    return rr;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_sd(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

void PeakDetectionConfig::validate() const {
    if (ma_window_s <= 0.0) throw ParameterError("ma_window_s must be positive");
    if (threshold_sweep_pct.empty()) throw ParameterError("threshold sweep must be non-empty");
    if (bpm_min <= 0.0 || bpm_min >= bpm_max)
        throw ParameterError("need 0 < bpm_min < bpm_max");
    if (outlier_rr_pct <= 0.0) throw ParameterError("outlier_rr_pct must be positive");
}

PeakList detect_peaks(const SampleStream& stream, const PeakDetectionConfig& cfg) {
    cfg.validate();
    const auto n = static_cast<std::int64_t>(stream.samples.size());
    const auto min_len = static_cast<std::int64_t>(2.0 * cfg.ma_window_s * stream.fs_hz);
    if (n < min_len)
        throw InsufficientData("stream too short for peak detection: " + std::to_string(n) +
                               " samples, need " + std::to_string(min_len));

    const int half_width =
        std::max(1, static_cast<int>(std::lround(cfg.ma_window_s * stream.fs_hz / 2.0)));
    const std::vector<double> ma = moving_average(stream.samples, half_width);

    struct SweepEntry {
        double pct;
        std::vector<std::int64_t> peaks;
        double bpm;
        double rrsd;
    };

    std::optional<SweepEntry> best;
    for (double pct : cfg.threshold_sweep_pct) {
        SweepEntry entry{pct, candidates_above(stream.samples, ma, pct), 0.0, 0.0};
        if (entry.peaks.size() < 2) continue;
        const std::vector<double> rr = intervals_ms(entry.peaks, stream.fs_hz);
        entry.bpm = 60000.0 / mean(rr);
        entry.rrsd = population_sd(rr);
        if (entry.bpm < cfg.bpm_min || entry.bpm > cfg.bpm_max) continue;
        if (entry.rrsd <= cfg.rrsd_min_ms &&
            static_cast<int>(rr.size()) < cfg.regular_min_intervals)
            continue;
        if (!best || entry.rrsd < best->rrsd) best = std::move(entry);
    }
    if (!best)
        throw NoPlausiblePeaks("no threshold in the sweep produced a plausible heart rate");

    // Uncertain-peak rejection: compare each interval to the running mean of
    // the accepted ones (seeded with the global mean) and re-link across
    // rejected candidates.
    PeakList out;
    out.fs_hz = stream.fs_hz;
    out.chosen_threshold_pct = best->pct;

    const std::vector<double> all_rr = intervals_ms(best->peaks, stream.fs_hz);
    double running_mean = mean(all_rr);
    std::vector<double> accepted_rr;
    out.peak_indices.push_back(best->peaks.front());
    for (std::size_t i = 1; i < best->peaks.size(); ++i) {
        const double rr = static_cast<double>(best->peaks[i] - out.peak_indices.back()) *
                          1000.0 / stream.fs_hz;
        if (std::abs(rr - running_mean) > cfg.outlier_rr_pct / 100.0 * running_mean) {
            out.rejected_indices.push_back(best->peaks[i]);
            continue;
        }
        out.peak_indices.push_back(best->peaks[i]);
        accepted_rr.push_back(rr);
        out.rr_ms.push_back(rr);
        running_mean = mean(accepted_rr);
    }
    return out;
}

HrvMeasures compute_measures(const PeakList& peaks) {
    if (peaks.peak_indices.size() < 2 || peaks.rr_ms.empty())
        throw InsufficientBeats("need at least 2 accepted peaks for HRV measures");

    const std::vector<double>& rr = peaks.rr_ms;
    HrvMeasures m;
    m.ibi_ms = mean(rr);
    m.bpm = 60000.0 / m.ibi_ms;
    m.sdnn_ms = population_sd(rr);

    if (rr.size() < 2) {
        m.rmssd_ms = 0.0;
        m.pnn50_pct = 0.0;
        m.variability_limited = true;
        return m;
    }
    double acc = 0.0;
    int over50 = 0;
    for (std::size_t i = 1; i < rr.size(); ++i) {
        const double d = rr[i] - rr[i - 1];
        acc += d * d;
        if (std::abs(d) > 50.0) ++over50;
    }
    const auto n_diff = static_cast<double>(rr.size() - 1);
    m.rmssd_ms = std::sqrt(acc / n_diff);
    m.pnn50_pct = 100.0 * static_cast<double>(over50) / n_diff;
    return m;
}

namespace {

void check_bound(const char* name, double value, const MeasureRange& range,
                 std::vector<VitalViolation>& reasons) {
    if (range.lo && value < *range.lo) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "<%g", *range.lo);
        reasons.push_back({name, buf, value});
    }
    if (range.hi && value > *range.hi) {
        char buf[32];
        std::snprintf(buf, sizeof buf, ">%g", *range.hi);
        reasons.push_back({name, buf, value});
    }
}

}  // namespace

VitalStatus assess_vitals(const HrvMeasures& m, const VitalBounds& bounds) {
    VitalStatus status;
    check_bound("bpm", m.bpm, bounds.bpm, status.reasons);
    check_bound("ibi_ms", m.ibi_ms, bounds.ibi_ms, status.reasons);
    check_bound("sdnn_ms", m.sdnn_ms, bounds.sdnn_ms, status.reasons);
    check_bound("rmssd_ms", m.rmssd_ms, bounds.rmssd_ms, status.reasons);
    check_bound("pnn50_pct", m.pnn50_pct, bounds.pnn50_pct, status.reasons);
    status.abnormal = !status.reasons.empty();
    return status;
}

}  // namespace ecgfog
