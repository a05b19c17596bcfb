#include "ecgfog/signal.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>

#include "json.hpp"

namespace ecgfog {

namespace {

// Margins a beat needs inside the stream: room for the P search window
// before the R center and for the T window plus offset search after it.
constexpr double kPreMarginMs = 300.0;
constexpr double kPostMarginMs = 450.0;

struct Bump {
    double amp = 0.0;
    double sigma = 1.0;
    double center = 0.0;  // ms relative to the R center
};

double bump_value(const Bump& b, double t) {
    const double u = (t - b.center) / b.sigma;
    return b.amp * std::exp(-0.5 * u * u);
}

double bump_slope(const Bump& b, double t) {
    const double u = (t - b.center) / b.sigma;
    return -b.amp * u / b.sigma * std::exp(-0.5 * u * u);
}

// One beat with R centered at t = 0.
struct BeatModel {
    std::array<Bump, 5> bumps;  // p, q, r, s, t

    double slope(double t) const {
        double s = 0.0;
        for (const auto& b : bumps) s += bump_slope(b, t);
        return s;
    }
    double value(double t) const {
        double v = 0.0;
        for (const auto& b : bumps) v += bump_value(b, t);
        return v;
    }
};

constexpr double kGridMs = 0.05;

double max_abs_slope(const BeatModel& m, double lo, double hi) {
    double best = 0.0;
    for (double t = lo; t <= hi; t += kGridMs)
        best = std::max(best, std::abs(m.slope(t)));
    return best;
}

// Walk outward from `from` until |slope| has exceeded `theta` and then
// drops back below it; the crossing is the onset/offset. Linear
// interpolation between grid points keeps it sub-sample accurate.
double slope_crossing(const BeatModel& m, double from, double direction,
                      double theta, double max_walk_ms) {
    bool armed = false;
    double prev_t = from;
    double prev_s = std::abs(m.slope(from));
    for (double d = kGridMs; d <= max_walk_ms; d += kGridMs) {
        const double t = from + direction * d;
        const double s = std::abs(m.slope(t));
        if (!armed) {
            if (s >= theta) armed = true;
        } else if (s < theta) {
            const double frac = (prev_s - theta) / (prev_s - s);
            return prev_t + (t - prev_t) * frac;
        }
        prev_t = t;
        prev_s = s;
    }
    throw ParameterError("waveform calibration failed: slope never crossed threshold");
}

struct Fiducials {
    double qrs_on, qrs_off, p_on, t_off;
};

Fiducials measure(const BeatModel& m) {
    const double lo = m.bumps[0].center - 6.0 * m.bumps[0].sigma;
    const double hi = m.bumps[4].center + 6.0 * m.bumps[4].sigma;
    const double theta = 0.1 * max_abs_slope(m, lo, hi);
    Fiducials f{};
    f.qrs_on = slope_crossing(m, m.bumps[1].center, -1.0, theta, 120.0);
    f.qrs_off = slope_crossing(m, m.bumps[3].center, +1.0, theta, 120.0);
    f.p_on = slope_crossing(m, m.bumps[0].center, -1.0, theta, 150.0);
    f.t_off = slope_crossing(m, m.bumps[4].center, +1.0, theta, 200.0);
    return f;
}

// Solve for bump centers so that the slope-rule fiducials of the continuous
// waveform land exactly on the requested pr/qrs/qt. Interactions between
// bumps are weak, so moving each center by its own fiducial error converges
// in a handful of rounds.
BeatModel calibrate(const EcgSynthParams& p) {
    const double qrs_on = -p.qrs_ms / 2.0;
    const double qrs_off = +p.qrs_ms / 2.0;
    const double p_on = qrs_on - p.pr_ms;
    const double t_off = qrs_on + p.qt_ms;

    BeatModel m;
    m.bumps[0] = {p.waves.p.amplitude, p.waves.p.sigma_ms, p_on + 1.6 * p.waves.p.sigma_ms};
    m.bumps[1] = {p.waves.q.amplitude, p.waves.q.sigma_ms, qrs_on + 2.0 * p.waves.q.sigma_ms};
    m.bumps[2] = {p.waves.r.amplitude, p.waves.r.sigma_ms, 0.0};
    m.bumps[3] = {p.waves.s.amplitude, p.waves.s.sigma_ms, qrs_off - 2.0 * p.waves.s.sigma_ms};
    m.bumps[4] = {p.waves.t.amplitude, p.waves.t.sigma_ms, t_off - 1.5 * p.waves.t.sigma_ms};

    for (int round = 0; round < 40; ++round) {
        const Fiducials f = measure(m);
        const double e_on = qrs_on - f.qrs_on;
        const double e_off = qrs_off - f.qrs_off;
        const double e_p = p_on - f.p_on;
        const double e_t = t_off - f.t_off;
        m.bumps[1].center += e_on;
        m.bumps[3].center += e_off;
        m.bumps[0].center += e_p;
        m.bumps[4].center += e_t;
        if (std::max({std::abs(e_on), std::abs(e_off), std::abs(e_p), std::abs(e_t)}) < 0.02)
            return m;
    }
    throw ParameterError("waveform calibration did not converge for the requested intervals");
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::int64_t parse_int_field(const std::string& field, std::size_t line_no,
                             const char* column) {
    std::int64_t out = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw FormatError(std::string("non-integer ") + column + " value '" + field + "'",
                          line_no);
    return out;
}

}  // namespace

void EcgSynthParams::validate() const {
    if (fs_hz <= 0.0) throw ParameterError("fs_hz must be positive");
    if (duration_s < 0.0) throw ParameterError("duration_s must be non-negative");
    if (rr_ms <= 0.0 || pr_ms <= 0.0 || qrs_ms <= 0.0 || qt_ms <= 0.0)
        throw ParameterError("interval parameters must be positive");
    if (pr_ms >= rr_ms) throw ParameterError("pr_ms must be smaller than rr_ms");
    if (qt_ms >= rr_ms) throw ParameterError("qt_ms must be smaller than rr_ms");
    if (noise_std < 0.0) throw ParameterError("noise_std must be non-negative");
    for (const WaveShape* w : {&waves.p, &waves.q, &waves.r, &waves.s, &waves.t})
        if (w->sigma_ms <= 0.0) throw ParameterError("wave widths must be positive");
}

void AdcConfig::validate() const {
    if (bits < 1 || bits > 16) throw ParameterError("adc bits must be in [1,16]");
    if (full_scale <= 0.0) throw ParameterError("adc full_scale must be positive");
}

int quantize(double analog_value, const AdcConfig& cfg) {
    cfg.validate();
    const double scaled = analog_value / cfg.full_scale * cfg.max_code();
    const double rounded = std::floor(scaled + 0.5);  // half-up
    return static_cast<int>(std::clamp(rounded, 0.0, static_cast<double>(cfg.max_code())));
}

SynthesisResult synthesize(const EcgSynthParams& params, const AdcConfig& adc) {
    params.validate();
    adc.validate();

    const BeatModel beat = calibrate(params);
    const double duration_ms = params.duration_s * 1000.0;

    // Beat k sits at k*rr_ms; keep only beats with full morphology inside
    // the stream.
    std::vector<double> beat_times;
    const int k_first = std::max<int>(1, static_cast<int>(std::ceil(kPreMarginMs / params.rr_ms)));
    for (int k = k_first;; ++k) {
        const double t = k * params.rr_ms;
        if (t > duration_ms - kPostMarginMs) break;
        beat_times.push_back(t);
    }

    SynthesisResult out;
    out.stream.fs_hz = params.fs_hz;
    const auto n_samples = static_cast<std::int64_t>(std::llround(params.duration_s * params.fs_hz));
    out.stream.samples.reserve(static_cast<std::size_t>(n_samples));

    std::mt19937 rng(params.seed);
    std::normal_distribution<double> noise(0.0, params.noise_std > 0.0 ? params.noise_std : 1.0);

    const double reach_ms = 700.0;  // bump support never extends this far from R
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) * 1000.0 / params.fs_hz;
        double v = params.waves.baseline;
        if (!beat_times.empty()) {
            const auto lo = static_cast<std::int64_t>(std::floor((t - reach_ms) / params.rr_ms));
            const auto hi = static_cast<std::int64_t>(std::ceil((t + reach_ms) / params.rr_ms));
            for (std::int64_t k = lo; k <= hi; ++k) {
                const std::int64_t idx = k - k_first;
                if (idx < 0 || idx >= static_cast<std::int64_t>(beat_times.size())) continue;
                v += beat.value(t - beat_times[static_cast<std::size_t>(idx)]);
            }
        }
        if (params.noise_std > 0.0) v += noise(rng);
        out.stream.samples.push_back(EcgSample{
            i, std::llround(t), quantize(v, adc)});
    }

    out.beats.reserve(beat_times.size());
    for (std::size_t b = 0; b < beat_times.size(); ++b)
        out.beats.push_back(BeatAnnotation{static_cast<int>(b), beat_times[b],
                                           params.pr_ms, params.qrs_ms, params.qt_ms});
    return out;
}

void write_csv(const SampleStream& stream, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path.string());
    f << "counter,timestamp_ms,value\n";
    for (const auto& s : stream.samples)
        f << s.counter << ',' << s.timestamp_ms << ',' << s.value << '\n';
    if (!f) throw Error("write failed: " + path.string());
}

SampleStream load_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open file: " + path.string());

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(f, line)) throw FormatError("empty file, expected header", 1);
    ++line_no;
    strip_cr(line);
    if (line != "counter,timestamp_ms,value")
        throw FormatError("bad header, expected 'counter,timestamp_ms,value'", line_no);

    SampleStream stream;
    while (std::getline(f, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;

        std::array<std::string, 3> fields;
        std::size_t start = 0;
        for (int c = 0; c < 3; ++c) {
            const std::size_t comma = line.find(',', start);
            if (c < 2) {
                if (comma == std::string::npos)
                    throw FormatError("expected 3 comma-separated columns", line_no);
                fields[static_cast<std::size_t>(c)] = line.substr(start, comma - start);
                start = comma + 1;
            } else {
                if (comma != std::string::npos)
                    throw FormatError("expected 3 comma-separated columns", line_no);
                fields[static_cast<std::size_t>(c)] = line.substr(start);
            }
        }

        EcgSample s;
        s.counter = parse_int_field(fields[0], line_no, "counter");
        s.timestamp_ms = parse_int_field(fields[1], line_no, "timestamp_ms");
        const std::int64_t value = parse_int_field(fields[2], line_no, "value");
        if (s.counter < 0) throw FormatError("negative counter", line_no);
        if (value < 0) throw FormatError("negative sample value", line_no);
        s.value = static_cast<int>(value);

        if (!stream.samples.empty()) {
            const auto& prev = stream.samples.back();
            if (s.counter != prev.counter + 1)
                throw FormatError("counter gap: expected " + std::to_string(prev.counter + 1) +
                                      ", got " + std::to_string(s.counter),
                                  line_no);
            if (s.timestamp_ms < prev.timestamp_ms)
                throw FormatError("timestamps must be non-decreasing", line_no);
        }
        stream.samples.push_back(s);
    }

    if (stream.samples.size() >= 2) {
        const auto dt = stream.samples[1].timestamp_ms - stream.samples[0].timestamp_ms;
        stream.fs_hz = dt > 0 ? 1000.0 / static_cast<double>(dt) : 200.0;
    }
    return stream;
}

void write_annotations_json(const std::vector<BeatAnnotation>& beats,
                            const std::filesystem::path& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : beats)
        arr.push_back({{"beat_index", b.beat_index},
                       {"r_time_ms", b.r_time_ms},
                       {"pr_ms", b.pr_ms},
                       {"qrs_ms", b.qrs_ms},
                       {"qt_ms", b.qt_ms}});
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open for writing: " + path.string());
    f << arr.dump(2) << '\n';
}

std::vector<BeatAnnotation> load_annotations_json(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open file: " + path.string());
    nlohmann::json arr = nlohmann::json::parse(f);
    std::vector<BeatAnnotation> beats;
    for (const auto& j : arr)
        beats.push_back(BeatAnnotation{j.at("beat_index").get<int>(),
                                       j.at("r_time_ms").get<double>(),
                                       j.at("pr_ms").get<double>(),
                                       j.at("qrs_ms").get<double>(),
                                       j.at("qt_ms").get<double>()});
    return beats;
}

}  // namespace ecgfog
