#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "spectre/signal.hpp"

namespace spectre {

struct StftConfig {
  int window_len = 64;
  int hop = 32;
  bool log_magnitude = true;  // log(1 + |X|) instead of raw magnitude

  int bins() const { return window_len / 2 + 1; }
  // Frames lie fully inside the patch; no zero padding.
  int frames(int patch_len) const { return (patch_len - window_len) / hop + 1; }
  int feature_dim(int patch_len) const { return bins() * frames(patch_len); }
  void validate(int patch_len) const;
};

// How a patch is turned into a feature vector for clustering.
enum class PatchFeature : uint32_t {
  stft_log_mag = 0,  // flattened STFT of the patch
  raw = 1,           // the raw patch samples (ablation target)
};

// Short-time Fourier magnitude of one patch, Hann window, one-sided bins.
// Result is F x T with F = window_len/2 + 1.
Eigen::MatrixXd patch_stft(const Eigen::VectorXd& patch, const StftConfig& cfg);

// Frequency-major (row-major) flattening; inverse of unflatten_spectral.
Eigen::VectorXd flatten_spectral(const Eigen::MatrixXd& s);
Eigen::MatrixXd unflatten_spectral(const Eigen::VectorXd& v, int bins, int frames);

struct SpectralCodebook {
  Eigen::MatrixXd centroids;  // K x D_s
  StftConfig stft_cfg;
  PatchFeature feature = PatchFeature::stft_log_mag;
  uint64_t fit_seed = 0;
  double inertia = 0.0;

  int k() const { return static_cast<int>(centroids.rows()); }
  int dim() const { return static_cast<int>(centroids.cols()); }
};

// Lloyd's algorithm with k-means++ seeding. Deterministic given
// (vectors, k, seed); empty clusters are re-seeded to the point farthest
// from its assigned centroid. `inertia_history`, when given, receives the
// inertia after seeding and after every update step.
SpectralCodebook kmeans_fit(const Eigen::MatrixXd& vectors, int k, uint64_t seed,
                            int max_iters = 300,
                            std::vector<double>* inertia_history = nullptr);

// Nearest centroid by squared Euclidean distance; ties -> lowest index.
std::vector<int> assign_pseudolabels(const SpectralCodebook& codebook,
                                     const Eigen::MatrixXd& vectors);

// Feature vectors for every patch of every segment, rows in token order
// (channel-major: row index = segment*(C*T) + c*T + t).
Eigen::MatrixXd dataset_patch_features(const std::vector<SignalSegment>& segments,
                                       int patch_len, const StftConfig& cfg,
                                       PatchFeature feature);

// Convenience: featurize + cluster.
SpectralCodebook fit_codebook(const std::vector<SignalSegment>& segments, int patch_len,
                              const StftConfig& cfg, PatchFeature feature, int k,
                              uint64_t seed);

// Codebook file: magic "SPCB", version 1.
void write_codebook(const std::string& path, const SpectralCodebook& cb);
SpectralCodebook read_codebook(const std::string& path);

}  // namespace spectre
