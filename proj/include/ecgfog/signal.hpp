#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ecgfog/errors.hpp"

namespace ecgfog {

// One Gaussian bump of the synthetic beat morphology.
struct WaveShape {
    double amplitude = 0.0;  // normalized units, negative for Q/S
    double sigma_ms = 1.0;   // Gaussian width
};

// Heights/widths of the five waves plus the DC baseline. The baseline keeps
// the negative Q/S excursions above zero so the unsigned ADC does not clip
// them.
struct WaveProfile {
    WaveShape p{0.15, 11.0};
    WaveShape q{-0.15, 7.0};
    WaveShape r{1.0, 10.0};
    WaveShape s{-0.15, 7.0};
    WaveShape t{0.3, 24.0};
    double baseline = 0.15;
};

struct EcgSynthParams {
    double fs_hz = 200.0;
    double rr_ms = 800.0;
    double pr_ms = 160.0;   // P onset to QRS onset
    double qrs_ms = 90.0;   // QRS onset to QRS offset
    double qt_ms = 380.0;   // QRS onset to T offset
    WaveProfile waves{};
    double noise_std = 0.0;  // additive Gaussian noise, normalized units
    double duration_s = 30.0;
    std::uint32_t seed = 0;

    void validate() const;
};

struct AdcConfig {
    int bits = 10;
    double full_scale = 1.2;  // analog value mapping to the max code

    int max_code() const { return (1 << bits) - 1; }
    void validate() const;
};

struct EcgSample {
    std::int64_t counter = 0;
    std::int64_t timestamp_ms = 0;
    int value = 0;

    bool operator==(const EcgSample&) const = default;
};

struct SampleStream {
    double fs_hz = 200.0;
    std::vector<EcgSample> samples;

    std::size_t size() const { return samples.size(); }
    bool operator==(const SampleStream&) const = default;
};

// Ground-truth fiducials for one synthesized beat. r_time_ms is the center
// of the R bump; the interval values are the ones the waveform was
// calibrated to realize.
struct BeatAnnotation {
    int beat_index = 0;
    double r_time_ms = 0.0;
    double pr_ms = 0.0;
    double qrs_ms = 0.0;
    double qt_ms = 0.0;
};

struct SynthesisResult {
    SampleStream stream;
    std::vector<BeatAnnotation> beats;
};

// Saturating ADC transfer: clamp(round_half_up(v / full_scale * max_code), 0, max_code).
int quantize(double analog_value, const AdcConfig& cfg);

// Deterministic synthetic ECG with per-beat ground truth. Beats are placed
// at whole multiples of rr_ms; only beats whose full morphology fits inside
// the stream (enough margin for the P window before and the T window after)
// are generated and annotated.
SynthesisResult synthesize(const EcgSynthParams& params, const AdcConfig& adc = {});

// CSV columns: counter,timestamp_ms,value (header required, LF endings).
void write_csv(const SampleStream& stream, const std::filesystem::path& path);
SampleStream load_csv(const std::filesystem::path& path);

// Annotation sidecar: JSON array of {beat_index, r_time_ms, pr_ms, qrs_ms, qt_ms}.
void write_annotations_json(const std::vector<BeatAnnotation>& beats,
                            const std::filesystem::path& path);
std::vector<BeatAnnotation> load_annotations_json(const std::filesystem::path& path);

}  // namespace ecgfog
