#include "spectre/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "spectre/error.hpp"
#include "spectre/rng.hpp"

namespace spectre {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kScaleEps = 1e-8;
constexpr double kNotchQ = 30.0;
constexpr int kBandpassPoles = 4;

void require_finite(const SignalSegment& seg, const char* op) {
  if (!seg.data.allFinite()) {
    throw Error(ErrorCode::numeric, std::string(op) + ": non-finite input sample");
  }
}

// Type-7 quantile (linear interpolation) of a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = q * static_cast<double>(n - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double wrapped_angle_dist(double a, double b) {
  return std::abs(std::atan2(std::sin(a - b), std::cos(a - b)));
}

}  // namespace

void PreprocessConfig::validate(double sample_rate_hz) const {
  const double nyquist = sample_rate_hz / 2.0;
  if (!(band_lo_hz > 0.0) || !(band_lo_hz < band_hi_hz) || !(band_hi_hz < nyquist)) {
    throw Error(ErrorCode::config, "band edges must satisfy 0 < lo < hi < Nyquist");
  }
  if (!(notch_base_hz > 0.0) || notch_harmonics < 1) {
    throw Error(ErrorCode::config, "notch base and harmonic count must be positive");
  }
  if (!(notch_base_hz * notch_harmonics < nyquist)) {
    throw Error(ErrorCode::config, "notch harmonic at or above Nyquist");
  }
  if (!(clip_bound > 0.0)) {
    throw Error(ErrorCode::config, "clip bound must be positive");
  }
  if (!(scale_q_lo > 0.0) || !(scale_q_lo < scale_q_hi) || !(scale_q_hi < 1.0)) {
    throw Error(ErrorCode::config, "scale quantiles must be strictly increasing in (0,1)");
  }
}

SignalSegment bandpass(const SignalSegment& seg, const PreprocessConfig& cfg) {
  cfg.validate(seg.sample_rate_hz);
  require_finite(seg, "bandpass");
  if (seg.length() < 8 * kBandpassPoles) {
    throw Error(ErrorCode::config, "segment shorter than band-pass warm-up");
  }
  const auto sos =
      dsp::butter_bandpass(kBandpassPoles, cfg.band_lo_hz, cfg.band_hi_hz, seg.sample_rate_hz);
  SignalSegment out = seg;
  for (int c = 0; c < seg.channels(); ++c) {
    out.data.row(c) = dsp::sosfiltfilt(sos, seg.data.row(c).transpose()).transpose();
  }
  return out;
}

SignalSegment notch(const SignalSegment& seg, const PreprocessConfig& cfg) {
  cfg.validate(seg.sample_rate_hz);
  require_finite(seg, "notch");
  std::vector<dsp::Biquad> sos;
  for (int h = 1; h <= cfg.notch_harmonics; ++h) {
    sos.push_back(dsp::notch_biquad(cfg.notch_base_hz * h, kNotchQ, seg.sample_rate_hz));
  }
  if (seg.length() < 8 * 2 * static_cast<int>(sos.size())) {
    throw Error(ErrorCode::config, "segment shorter than notch warm-up");
  }
  SignalSegment out = seg;
  for (int c = 0; c < seg.channels(); ++c) {
    out.data.row(c) = dsp::sosfiltfilt(sos, seg.data.row(c).transpose()).transpose();
  }
  return out;
}

SignalSegment robust_scale_clip(const SignalSegment& seg, const PreprocessConfig& cfg) {
  cfg.validate(seg.sample_rate_hz);
  require_finite(seg, "robust_scale_clip");
  SignalSegment out = seg;
  std::vector<double> buf(seg.length());
  for (int c = 0; c < seg.channels(); ++c) {
    for (int i = 0; i < seg.length(); ++i) buf[i] = seg.data(c, i);
    std::sort(buf.begin(), buf.end());
    const double med = quantile_sorted(buf, 0.5);
    const double iqr = quantile_sorted(buf, cfg.scale_q_hi) - quantile_sorted(buf, cfg.scale_q_lo);
    const double denom = iqr > kScaleEps ? iqr : kScaleEps;
    out.data.row(c) = ((seg.data.row(c).array() - med) / denom)
                          .cwiseMax(-cfg.clip_bound)
                          .cwiseMin(cfg.clip_bound);
  }
  return out;
}

SignalSegment preprocess(const SignalSegment& seg, const PreprocessConfig& cfg) {
  return robust_scale_clip(notch(bandpass(seg, cfg), cfg), cfg);
}

void SynthConfig::validate() const {
  if (channels < 2 || length < 64 || dof < 1 || segments < 1) {
    throw Error(ErrorCode::config, "synth shape parameters out of range");
  }
  if (!(sample_rate_hz > 0.0) || !(carrier_lo_hz > 0.0) ||
      !(carrier_lo_hz < carrier_hi_hz) || !(carrier_hi_hz < sample_rate_hz / 2.0)) {
    throw Error(ErrorCode::config, "synth carrier band invalid");
  }
  if (noise_sigma < 0.0 || gain_kappa < 0.0) {
    throw Error(ErrorCode::config, "synth noise and kappa must be non-negative");
  }
}

std::vector<SignalSegment> synthesize_dataset(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, 0x5e6));

  const int C = cfg.channels;
  const int L = cfg.length;
  const double dt = 1.0 / cfg.sample_rate_hz;

  // Carrier band-limiter shared across segments.
  PreprocessConfig carrier_band;
  carrier_band.band_lo_hz = cfg.carrier_lo_hz;
  carrier_band.band_hi_hz = cfg.carrier_hi_hz;
  const auto carrier_sos =
      dsp::butter_bandpass(kBandpassPoles, cfg.carrier_lo_hz, cfg.carrier_hi_hz, cfg.sample_rate_hz);

  std::vector<SignalSegment> dataset;
  dataset.reserve(cfg.segments);

  for (int s = 0; s < cfg.segments; ++s) {
    SignalSegment seg;
    seg.sample_rate_hz = cfg.sample_rate_hz;
    seg.data = Eigen::MatrixXd::Zero(C, L);
    seg.targets = Eigen::VectorXd::Zero(cfg.dof);

    for (int f = 0; f < cfg.dof; ++f) {
      // Smooth activation curve: 2-4 sinusoids at 0.2-1.5 Hz, random phase,
      // min-max rescaled to [0,1] over the window.
      const int n_sin = 2 + static_cast<int>(rng.uniform_int(3));
      Eigen::VectorXd y = Eigen::VectorXd::Zero(L);
      for (int k = 0; k < n_sin; ++k) {
        const double freq = rng.uniform(0.2, 1.5);
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        const double amp = rng.uniform(0.5, 1.0);
        for (int i = 0; i < L; ++i) y[i] += amp * std::sin(2.0 * kPi * freq * i * dt + phase);
      }
      const double y_min = y.minCoeff();
      const double y_max = y.maxCoeff();
      const double span = y_max - y_min;
      if (span > 0.0) {
        y = (y.array() - y_min) / span;
      } else {
        y.setConstant(0.5);
      }
      seg.targets[f] = y[L - 1];

      // Band-limited unit-variance carrier shared by all channels for this DoF.
      Eigen::VectorXd carrier(L);
      for (int i = 0; i < L; ++i) carrier[i] = rng.normal();
      carrier = dsp::sosfiltfilt(carrier_sos, carrier);
      const double sd = std::sqrt(carrier.squaredNorm() / L);
      if (sd > 0.0) carrier /= sd;

      // Angular coupling: channel c sits at 2*pi*c/C, the DoF at alpha.
      const double alpha = rng.uniform(0.0, 2.0 * kPi);
      Eigen::VectorXd gain(C);
      for (int c = 0; c < C; ++c) {
        const double d = wrapped_angle_dist(2.0 * kPi * c / C, alpha);
        gain[c] = std::exp(-cfg.gain_kappa * d * d);
      }
      gain /= gain.maxCoeff();  // nearest channel keeps unit gain at any kappa

      for (int c = 0; c < C; ++c) {
        if (gain[c] == 0.0) continue;
        seg.data.row(c) += gain[c] * (y.array() * carrier.array()).matrix().transpose();
      }
    }

    if (cfg.noise_sigma > 0.0) {
      for (int c = 0; c < C; ++c) {
        for (int i = 0; i < L; ++i) seg.data(c, i) += cfg.noise_sigma * rng.normal();
      }
    }
    dataset.push_back(std::move(seg));
  }
  return dataset;
}

namespace {

constexpr char kDatasetMagic[4] = {'S', 'P', 'T', 'R'};
constexpr uint32_t kDatasetVersion = 1;

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error(ErrorCode::truncated, "dataset file truncated");
  return v;
}

}  // namespace

void write_dataset(const std::string& path, const std::vector<SignalSegment>& segments) {
  if (segments.empty()) {
    throw Error(ErrorCode::config, "refusing to write empty dataset");
  }
  const int C = segments[0].channels();
  const int L = segments[0].length();
  const int dof = static_cast<int>(segments[0].targets.size());
  const double fs = segments[0].sample_rate_hz;
  for (const auto& seg : segments) {
    if (seg.channels() != C || seg.length() != L ||
        static_cast<int>(seg.targets.size()) != dof || seg.sample_rate_hz != fs) {
      throw Error(ErrorCode::shape_mismatch, "segments in one dataset must share shape");
    }
  }

  const auto dir = std::filesystem::path(path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::missing_artifact, "cannot open for write: " + path);

  os.write(kDatasetMagic, 4);
  write_raw<uint32_t>(os, kDatasetVersion);
  write_raw<uint32_t>(os, static_cast<uint32_t>(C));
  write_raw<uint32_t>(os, static_cast<uint32_t>(L));
  write_raw<uint32_t>(os, static_cast<uint32_t>(dof));
  write_raw<float>(os, static_cast<float>(fs));
  write_raw<uint32_t>(os, static_cast<uint32_t>(segments.size()));

  std::vector<float> row(L);
  for (const auto& seg : segments) {
    for (int c = 0; c < C; ++c) {
      for (int i = 0; i < L; ++i) row[i] = static_cast<float>(seg.data(c, i));
      os.write(reinterpret_cast<const char*>(row.data()), sizeof(float) * L);
    }
    for (int f = 0; f < dof; ++f) write_raw<float>(os, static_cast<float>(seg.targets[f]));
  }
  if (!os) throw Error(ErrorCode::corrupt, "write failed: " + path);
}

std::vector<SignalSegment> read_dataset(const std::string& path, int expected_patch_len) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::missing_artifact, "missing input artifact: " + path);

  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kDatasetMagic, 4) != 0) {
    throw Error(ErrorCode::bad_magic, "bad magic in " + path);
  }
  const auto version = read_raw<uint32_t>(is);
  if (version != kDatasetVersion) {
    throw Error(ErrorCode::bad_version, "unsupported dataset version in " + path);
  }
  const auto C = read_raw<uint32_t>(is);
  const auto L = read_raw<uint32_t>(is);
  const auto dof = read_raw<uint32_t>(is);
  const auto fs = read_raw<float>(is);
  const auto count = read_raw<uint32_t>(is);
  if (C == 0 || L == 0 || count == 0 || !(fs > 0.0f)) {
    throw Error(ErrorCode::shape_mismatch, "inconsistent dataset header in " + path);
  }
  if (expected_patch_len > 0 && L % static_cast<uint32_t>(expected_patch_len) != 0) {
    throw Error(ErrorCode::patch_misalignment,
                "segment length " + std::to_string(L) + " not a multiple of patch length " +
                    std::to_string(expected_patch_len));
  }

  std::vector<SignalSegment> segments(count);
  std::vector<float> row(L);
  for (auto& seg : segments) {
    seg.sample_rate_hz = static_cast<double>(fs);
    seg.data.resize(C, L);
    for (uint32_t c = 0; c < C; ++c) {
      is.read(reinterpret_cast<char*>(row.data()), sizeof(float) * L);
      if (!is) throw Error(ErrorCode::truncated, "dataset payload truncated in " + path);
      for (uint32_t i = 0; i < L; ++i) seg.data(c, i) = static_cast<double>(row[i]);
    }
    if (dof > 0) {
      seg.targets.resize(dof);
      for (uint32_t f = 0; f < dof; ++f) {
        seg.targets[f] = static_cast<double>(read_raw<float>(is));
      }
    }
  }
  return segments;
}

}  // namespace spectre
