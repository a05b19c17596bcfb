#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecgfog/signal.hpp"

namespace ecgfog {

struct PeakDetectionConfig {
    double ma_window_s = 0.75;
    std::vector<double> threshold_sweep_pct = {5,  10, 15, 20,  25,  30,  40,  50, 60,
                                               70, 80, 90, 100, 110, 120, 150, 200};
    double bpm_min = 40.0;
    double bpm_max = 180.0;
    double outlier_rr_pct = 30.0;
    // A sweep entry must show some RR spread to count as a real detection,
    // unless it found enough intervals that zero spread is legitimate
    // (perfectly regular input rather than a degenerate one-peak fit).
    double rrsd_min_ms = 0.1;
    int regular_min_intervals = 5;

    void validate() const;
};

struct PeakList {
    std::vector<std::int64_t> peak_indices;      // accepted R peaks, sample positions
    std::vector<std::int64_t> rejected_indices;  // uncertain peaks
    std::vector<double> rr_ms;                   // between consecutive accepted peaks
    double chosen_threshold_pct = 0.0;
    double fs_hz = 200.0;
};

struct HrvMeasures {
    double bpm = 0.0;
    double ibi_ms = 0.0;
    double sdnn_ms = 0.0;
    double rmssd_ms = 0.0;
    double pnn50_pct = 0.0;
    // Set when only one RR interval was available, so rmssd/pnn50 are
    // reported as 0 rather than being meaningful.
    bool variability_limited = false;
};

struct MeasureRange {
    std::optional<double> lo;
    std::optional<double> hi;
};

struct VitalBounds {
    MeasureRange bpm{50.0, 120.0};
    MeasureRange ibi_ms{};
    MeasureRange sdnn_ms{};
    MeasureRange rmssd_ms{};
    MeasureRange pnn50_pct{};
};

struct VitalViolation {
    std::string measure;
    std::string bound;  // e.g. "<50" or ">120"
    double value = 0.0;
};

struct VitalStatus {
    bool abnormal = false;
    std::vector<VitalViolation> reasons;
};

// Moving-average threshold sweep: for each percentage the moving average is
// raised by that fraction, contiguous regions above it become peak
// candidates (per-region argmax), and the percentage whose candidate RR
// series has the lowest spread at a plausible BPM wins. Candidates whose RR
// deviates more than outlier_rr_pct from the running mean are moved to
// rejected_indices.
PeakList detect_peaks(const SampleStream& stream, const PeakDetectionConfig& cfg = {});

HrvMeasures compute_measures(const PeakList& peaks);

VitalStatus assess_vitals(const HrvMeasures& m, const VitalBounds& bounds = {});

}  // namespace ecgfog
