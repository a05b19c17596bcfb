#include "ecgfog/delineation.hpp"

#include <algorithm>
#include <cmath>

namespace ecgfog {

namespace {

constexpr double kQsWindowMs = 60.0;
constexpr double kPWindowLoMs = 250.0;  // before R
constexpr double kPWindowHiMs = 80.0;
constexpr double kTWindowLoMs = 80.0;  // after R
constexpr double kTWindowHiMs = 400.0;
constexpr double kSlopeFraction = 0.1;

struct SlopeView {
    const std::vector<EcgSample>* samples;
    double dt_ms;

    // central difference, codes per ms; valid for 1 <= i <= n-2
    double operator()(std::int64_t i) const {
        return ((*samples)[static_cast<std::size_t>(i + 1)].value -
                (*samples)[static_cast<std::size_t>(i - 1)].value) /
               (2.0 * dt_ms);
    }
};

// Walks outward from `from` looking for the point where |slope| falls back
// below `theta` after having exceeded it. Returns the crossing in ms
// (linearly interpolated between samples), or nullopt when the walk runs out
// of room or the slope never arms.
std::optional<double> slope_crossing(const SlopeView& slope, std::int64_t n, std::int64_t from,
                                     int direction, double theta, std::int64_t max_steps) {
    bool armed = false;
    double prev_abs = std::abs(slope(from));
    for (std::int64_t step = 1; step <= max_steps; ++step) {
        const std::int64_t i = from + direction * step;
        if (i < 1 || i > n - 2) return std::nullopt;
        const double cur = std::abs(slope(i));
        if (!armed) {
            if (cur >= theta) armed = true;
        } else if (cur < theta) {
            const double frac = (prev_abs - theta) / (prev_abs - cur);
            const double t_prev = static_cast<double>(from + direction * (step - 1));
            return (t_prev + direction * frac) * slope.dt_ms;
        }
        prev_abs = cur;
    }
    return std::nullopt;
}

enum class Extremum { minimum, maximum };

// Strict-interior extremum in the open window (lo_ms, hi_ms) relative to the
// R sample. An extremum sitting on the window edge means the wave is clipped
// or out of place, so it does not count.
std::optional<std::int64_t> find_extremum(const std::vector<EcgSample>& samples,
                                          std::int64_t r_index, double lo_ms, double hi_ms,
                                          double fs_hz, Extremum kind) {
    const auto n = static_cast<std::int64_t>(samples.size());
    auto lo = static_cast<std::int64_t>(std::floor(lo_ms * fs_hz / 1000.0)) + 1;
    auto hi = static_cast<std::int64_t>(std::ceil(hi_ms * fs_hz / 1000.0)) - 1;
    lo += r_index;
    hi += r_index;
    if (lo < 1 || hi > n - 2 || hi <= lo) return std::nullopt;

    std::int64_t best = lo;
    for (std::int64_t i = lo + 1; i <= hi; ++i) {
        const int v = samples[static_cast<std::size_t>(i)].value;
        const int bv = samples[static_cast<std::size_t>(best)].value;
        if (kind == Extremum::maximum ? v > bv : v < bv) best = i;
    }
    if (best == lo || best == hi) return std::nullopt;
    return best;
}

}  // namespace

int BeatIntervals::confident_count() const {
    return static_cast<int>(std::count_if(beats.begin(), beats.end(),
                                          [](const BeatMeasure& b) { return b.confident; }));
}

BeatIntervals delineate(const SampleStream& stream, const PeakList& peaks) {
    if (peaks.peak_indices.size() < 2)
        throw InsufficientBeats("delineation needs at least 2 accepted peaks");

    const auto n = static_cast<std::int64_t>(stream.samples.size());
    const double fs = stream.fs_hz;
    const double dt_ms = 1000.0 / fs;
    const SlopeView slope{&stream.samples, dt_ms};
    const auto ms_to_steps = [&](double ms) {
        return static_cast<std::int64_t>(std::ceil(ms / dt_ms));
    };

    BeatIntervals out;
    out.beats.reserve(peaks.peak_indices.size());

    for (std::size_t b = 0; b < peaks.peak_indices.size(); ++b) {
        const std::int64_t r = peaks.peak_indices[b];
        BeatMeasure beat;
        beat.r_index = r;
        if (b > 0)
            beat.rr_ms = static_cast<double>(r - peaks.peak_indices[b - 1]) * dt_ms;

        // the R flank dominates this maximum; it sets the 10% slope threshold
        const std::int64_t beat_lo = std::max<std::int64_t>(1, r - ms_to_steps(kPWindowLoMs + 10.0));
        const std::int64_t beat_hi = std::min<std::int64_t>(n - 2, r + ms_to_steps(kTWindowHiMs + 10.0));
        double max_slope = 0.0;
        for (std::int64_t i = beat_lo; i <= beat_hi; ++i)
            max_slope = std::max(max_slope, std::abs(slope(i)));
        const double theta = kSlopeFraction * max_slope;

        const auto q = find_extremum(stream.samples, r, -kQsWindowMs, 0.0, fs, Extremum::minimum);
        const auto s = find_extremum(stream.samples, r, 0.0, kQsWindowMs, fs, Extremum::minimum);
        const auto p = find_extremum(stream.samples, r, -kPWindowLoMs, -kPWindowHiMs, fs,
                                     Extremum::maximum);
        const auto t = find_extremum(stream.samples, r, kTWindowLoMs, kTWindowHiMs, fs,
                                     Extremum::maximum);

        bool ok = q && s && p && t && theta > 0.0;
        std::optional<double> qrs_on, qrs_off, p_on, t_off;
        if (ok) {
            qrs_on = slope_crossing(slope, n, *q, -1, theta, ms_to_steps(120.0));
            qrs_off = slope_crossing(slope, n, *s, +1, theta, ms_to_steps(120.0));
            p_on = slope_crossing(slope, n, *p, -1, theta, ms_to_steps(150.0));
            t_off = slope_crossing(slope, n, *t, +1, theta, ms_to_steps(200.0));
            ok = qrs_on && qrs_off && p_on && t_off;
        }
        if (ok) {
            beat.qrs_ms = *qrs_off - *qrs_on;
            beat.pr_ms = *qrs_on - *p_on;
            beat.qt_ms = *t_off - *qrs_on;
            // internal consistency; garbage measurements must not reach the
            // summaries
            ok = *beat.qrs_ms > 0.0 && *beat.pr_ms > 0.0 && *beat.qt_ms > 0.0 &&
                 *beat.qrs_ms < *beat.qt_ms && *t_off > *qrs_off;
            if (ok && beat.rr_ms)
                ok = *beat.pr_ms < *beat.rr_ms && *beat.qt_ms < *beat.rr_ms;
        }
        beat.confident = ok;
        out.beats.push_back(std::move(beat));
    }
    return out;
}

namespace {

struct Accumulator {
    double sum = 0.0;
    int n = 0;

    void add(const std::optional<double>& v) {
        if (v) {
            sum += *v;
            ++n;
        }
    }
    std::optional<double> mean() const {
        if (n == 0) return std::nullopt;
        return sum / n;
    }
};

}  // namespace

std::vector<PeriodMeans> summarize_periods(const BeatIntervals& intervals, int n_periods) {
    if (n_periods < 1) throw ParameterError("n_periods must be >= 1");
    const auto total = static_cast<int>(intervals.beats.size());
    if (total < n_periods)
        throw ParameterError("cannot split " + std::to_string(total) + " beats into " +
                             std::to_string(n_periods) + " periods");

    const int base = total / n_periods;  // remainder beats go to the last group
    std::vector<PeriodMeans> out;
    out.reserve(static_cast<std::size_t>(n_periods));
    for (int g = 0; g < n_periods; ++g) {
        const int lo = g * base;
        const int hi = (g == n_periods - 1) ? total : (g + 1) * base;
        Accumulator rr, pr, qrs, qt;
        int confident = 0;
        for (int i = lo; i < hi; ++i) {
            const BeatMeasure& beat = intervals.beats[static_cast<std::size_t>(i)];
            if (!beat.confident) continue;
            ++confident;
            rr.add(beat.rr_ms);
            pr.add(beat.pr_ms);
            qrs.add(beat.qrs_ms);
            qt.add(beat.qt_ms);
        }
        if (confident == 0)
            throw EmptyPeriod("period " + std::to_string(g + 1) + " has no confident beats",
                              g + 1);
        out.push_back(PeriodMeans{rr.mean(), pr.mean(), qrs.mean(), qt.mean(), confident});
    }
    return out;
}

HeartVerdict classify(const std::vector<PeriodMeans>& periods, const NormalRanges& ranges) {
    HeartVerdict verdict;
    const auto check = [&](const char* name, const std::optional<double>& value,
                           const IntervalRange& range, int period) {
        if (!value)
            throw ParameterError(std::string("period ") + std::to_string(period) +
                                 " is missing a " + name + " mean");
        if (!range.contains(*value))
            verdict.violations.push_back(RangeViolation{name, period, *value, range});
    };
    for (std::size_t i = 0; i < periods.size(); ++i) {
        const int period = static_cast<int>(i) + 1;
        check("rr", periods[i].rr_ms, ranges.rr, period);
        check("pr", periods[i].pr_ms, ranges.pr, period);
        check("qrs", periods[i].qrs_ms, ranges.qrs, period);
        check("qt", periods[i].qt_ms, ranges.qt, period);
    }
    verdict.healthy = verdict.violations.empty();
    return verdict;
}

}  // namespace ecgfog
