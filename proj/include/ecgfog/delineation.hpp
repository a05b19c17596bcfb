#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecgfog/hrv.hpp"
#include "ecgfog/signal.hpp"

namespace ecgfog {

struct IntervalRange {
    double lo_ms = 0.0;
    double hi_ms = 0.0;

    bool contains(double v) const { return v >= lo_ms && v <= hi_ms; }
};

// Inclusive clinical normal ranges used for the healthy / out-of-range call.
struct NormalRanges {
    IntervalRange rr{600.0, 1200.0};
    IntervalRange qt{320.0, 440.0};
    IntervalRange pr{120.0, 200.0};
    IntervalRange qrs{80.0, 100.0};
};

struct BeatMeasure {
    std::int64_t r_index = 0;        // sample position of the R peak
    std::optional<double> rr_ms;     // to the previous accepted beat
    std::optional<double> pr_ms;
    std::optional<double> qrs_ms;
    std::optional<double> qt_ms;
    bool confident = false;
};

struct BeatIntervals {
    std::vector<BeatMeasure> beats;

    int confident_count() const;
};

struct PeriodMeans {
    std::optional<double> rr_ms;
    std::optional<double> pr_ms;
    std::optional<double> qrs_ms;
    std::optional<double> qt_ms;
    int beat_count = 0;  // confident beats in the period
};

struct RangeViolation {
    std::string parameter;  // rr | pr | qrs | qt
    int period = 0;         // 1-based
    double value_ms = 0.0;
    IntervalRange range{};
};

struct HeartVerdict {
    bool healthy = true;
    std::vector<RangeViolation> violations;
};

// Per-beat fiducial extraction. Q and S are the local minima within 60 ms of
// the R peak; onsets/offsets are where |slope| falls back below 10% of the
// beat's maximum |slope|; P is the local maximum in (R-250, R-80) ms and T in
// (R+80, R+400) ms. Beats whose search windows are clipped, whose slope
// search fails, or whose measured intervals are not internally consistent are
// flagged low-confidence and excluded from summaries.
BeatIntervals delineate(const SampleStream& stream, const PeakList& peaks);

// Splits the beats into n_periods contiguous groups (remainder beats go to
// the last group) and averages each interval over the confident beats of the
// group.
std::vector<PeriodMeans> summarize_periods(const BeatIntervals& intervals, int n_periods);

HeartVerdict classify(const std::vector<PeriodMeans>& periods, const NormalRanges& ranges = {});

}  // namespace ecgfog
