#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace spectre {

// One recording window: C channels x L samples, plus optional window-level
// kinematic targets (one value per degree of freedom, in [0,1]).
struct SignalSegment {
  Eigen::MatrixXd data;     // C x L
  double sample_rate_hz = 2000.0;
  Eigen::VectorXd targets;  // DoF entries; empty when unlabeled

  int channels() const { return static_cast<int>(data.rows()); }
  int length() const { return static_cast<int>(data.cols()); }
  bool has_targets() const { return targets.size() > 0; }
};

struct PreprocessConfig {
  double band_lo_hz = 8.0;
  double band_hi_hz = 500.0;
  double notch_base_hz = 50.0;
  int notch_harmonics = 10;  // 50, 100, ..., 500 Hz at the defaults
  double clip_bound = 20.0;
  double scale_q_lo = 0.25;
  double scale_q_hi = 0.75;

  void validate(double sample_rate_hz) const;
};

// Zero-phase 4th-order Butterworth band-pass, per channel.
SignalSegment bandpass(const SignalSegment& seg, const PreprocessConfig& cfg);

// Zero-phase IIR notch cascade (Q=30) at notch_base_hz and its harmonics.
SignalSegment notch(const SignalSegment& seg, const PreprocessConfig& cfg);

// Per channel: (x - median) / (q_hi - q_lo), clamped to +/- clip_bound.
// Channels with inter-quantile range <= 1e-8 divide by 1e-8 instead.
SignalSegment robust_scale_clip(const SignalSegment& seg, const PreprocessConfig& cfg);

// Fixed order: bandpass -> notch -> robust_scale_clip.
SignalSegment preprocess(const SignalSegment& seg, const PreprocessConfig& cfg);

// Synthetic data generator. Each DoF gets a smooth target curve in [0,1]
// (sum of random-phase sinusoids) and a "muscle angle" on the channel ring;
// channels pick up each DoF's band-limited carrier with a gain that falls
// off with angular distance, plus per-channel white noise.
struct SynthConfig {
  int channels = 12;
  int length = 2000;
  int dof = 5;
  int segments = 256;
  uint64_t seed = 1;
  double sample_rate_hz = 2000.0;
  double noise_sigma = 0.1;   // per-channel white noise level
  double gain_kappa = 2.0;    // angular falloff of DoF->channel coupling
  double carrier_lo_hz = 20.0;
  double carrier_hi_hz = 450.0;

  void validate() const;
};

std::vector<SignalSegment> synthesize_dataset(const SynthConfig& cfg);

// Dataset file: little-endian, magic "SPTR", version 1. All segments in a
// file share (C, L, DoF, sample_rate).
void write_dataset(const std::string& path, const std::vector<SignalSegment>& segments);
std::vector<SignalSegment> read_dataset(const std::string& path, int expected_patch_len = 0);

// Internal filter machinery, exposed for the response-probe tests.
namespace dsp {

// Normalized biquad (a0 == 1).
struct Biquad {
  double b0, b1, b2, a1, a2;
};

// Band-pass with `poles` poles (must be even) from a Butterworth prototype,
// as second-order sections. Gain normalized to 1 at the analog center
// frequency's image.
std::vector<Biquad> butter_bandpass(int poles, double lo_hz, double hi_hz, double fs_hz);

Biquad notch_biquad(double f0_hz, double q, double fs_hz);

// Forward-backward filtering through a section cascade with odd-reflection
// padding and steady-state initial conditions (zero phase, zero DC
// transient).
Eigen::VectorXd sosfiltfilt(const std::vector<Biquad>& sos, const Eigen::VectorXd& x);

}  // namespace dsp

}  // namespace spectre
