#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "spectre/error.hpp"
#include "spectre/signal.hpp"

namespace spectre::dsp {

namespace {

constexpr double kPi = std::numbers::pi;

using cplx = std::complex<double>;

// One DF2T pass through a biquad with explicit initial state.
void biquad_pass(const Biquad& s, Eigen::VectorXd& x, double z1, double z2) {
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double in = x[n];
    const double out = s.b0 * in + z1;
    z1 = s.b1 * in - s.a1 * out + z2;
    z2 = s.b2 * in - s.a2 * out;
    x[n] = out;
  }
}

// Steady-state DF2T state for a constant input u, so a constant signal
// produces H(1)*u from the very first sample.
void steady_state(const Biquad& s, double u, double* z1, double* z2) {
  const double denom = 1.0 + s.a1 + s.a2;
  const double h1 = (s.b0 + s.b1 + s.b2) / denom;
  *z1 = (h1 - s.b0) * u;
  *z2 = (s.b2 - s.a2 * h1) * u;
}

void cascade_pass(const std::vector<Biquad>& sos, Eigen::VectorXd& x) {
  for (const Biquad& s : sos) {
    double z1, z2;
    steady_state(s, x[0], &z1, &z2);
    biquad_pass(s, x, z1, z2);
  }
}

cplx cascade_response(const std::vector<Biquad>& sos, double omega) {
  const cplx z = std::exp(cplx(0.0, omega));
  const cplx zi = 1.0 / z;
  cplx h = 1.0;
  for (const Biquad& s : sos) {
    h *= (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
  }
  return h;
}

}  // namespace

std::vector<Biquad> butter_bandpass(int poles, double lo_hz, double hi_hz, double fs_hz) {
  if (poles < 2 || poles % 2 != 0) {
    throw Error(ErrorCode::config, "band-pass pole count must be a positive even number");
  }
  if (!(lo_hz > 0.0) || !(lo_hz < hi_hz) || !(hi_hz < fs_hz / 2.0)) {
    throw Error(ErrorCode::config, "band edges must satisfy 0 < lo < hi < Nyquist");
  }

  const int n_proto = poles / 2;
  const double k = 2.0 * fs_hz;  // bilinear constant
  const double w_lo = k * std::tan(kPi * lo_hz / fs_hz);
  const double w_hi = k * std::tan(kPi * hi_hz / fs_hz);
  const double w0 = std::sqrt(w_lo * w_hi);
  const double bw = w_hi - w_lo;

  // Butterworth prototype poles on the unit circle, left half-plane.
  std::vector<cplx> analog_poles;
  for (int m = 1; m <= n_proto; ++m) {
    const double phi = kPi * (2.0 * m + n_proto - 1.0) / (2.0 * n_proto);
    const cplx p(std::cos(phi), std::sin(phi));
    // Low-pass -> band-pass: s^2 - bw*p*s + w0^2 = 0.
    const cplx bp = bw * p;
    const cplx disc = std::sqrt(bp * bp - 4.0 * w0 * w0);
    analog_poles.push_back((bp + disc) / 2.0);
    analog_poles.push_back((bp - disc) / 2.0);
  }

  // Bilinear transform; zeros land at z=+1 (from s=0) and z=-1 (from s=inf).
  std::vector<cplx> zpoles;
  for (const cplx& s : analog_poles) zpoles.push_back((k + s) / (k - s));

  // Pair complex-conjugate poles into sections with numerator (z-1)(z+1).
  std::vector<cplx> upper;
  for (const cplx& p : zpoles) {
    if (p.imag() > 0.0) upper.push_back(p);
  }
  std::sort(upper.begin(), upper.end(),
            [](const cplx& a, const cplx& b) { return a.real() < b.real(); });
  if (static_cast<int>(upper.size()) != n_proto) {
    throw Error(ErrorCode::numeric, "band-pass pole pairing failed");
  }

  std::vector<Biquad> sos;
  for (const cplx& p : upper) {
    Biquad s{};
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;
    s.a1 = -2.0 * p.real();
    s.a2 = std::norm(p);
    sos.push_back(s);
  }

  // Normalize to unit gain where the analog center frequency maps to.
  const double f_center = (fs_hz / kPi) * std::atan(w0 / k);
  const double omega_c = 2.0 * kPi * f_center / fs_hz;
  const double mag = std::abs(cascade_response(sos, omega_c));
  const double section_gain = std::pow(1.0 / mag, 1.0 / n_proto);
  for (Biquad& s : sos) {
    s.b0 *= section_gain;
    s.b1 *= section_gain;
    s.b2 *= section_gain;
  }
  return sos;
}

Biquad notch_biquad(double f0_hz, double q, double fs_hz) {
  if (!(f0_hz > 0.0) || !(f0_hz < fs_hz / 2.0)) {
    throw Error(ErrorCode::config, "notch frequency must lie below Nyquist");
  }
  const double w0 = 2.0 * kPi * f0_hz / fs_hz;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0);
  const double a0 = 1.0 + alpha;
  Biquad s{};
  s.b0 = 1.0 / a0;
  s.b1 = -2.0 * c / a0;
  s.b2 = 1.0 / a0;
  s.a1 = -2.0 * c / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

Eigen::VectorXd sosfiltfilt(const std::vector<Biquad>& sos, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  const Eigen::Index pad = 3 * (2 * static_cast<Eigen::Index>(sos.size()) + 1);
  if (n <= pad) {
    throw Error(ErrorCode::config, "signal shorter than filter warm-up");
  }

  // Odd reflection at both ends.
  Eigen::VectorXd ext(n + 2 * pad);
  for (Eigen::Index i = 0; i < pad; ++i) ext[i] = 2.0 * x[0] - x[pad - i];
  ext.segment(pad, n) = x;
  for (Eigen::Index i = 0; i < pad; ++i) ext[n + pad + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  cascade_pass(sos, ext);
  ext.reverseInPlace();
  cascade_pass(sos, ext);
  ext.reverseInPlace();
  return ext.segment(pad, n);
}

}  // namespace spectre::dsp
