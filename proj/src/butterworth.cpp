#include "sril/butterworth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sril {

namespace {

using cplx = std::complex<double>;

std::vector<double> convolve(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> out(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
  return out;
}

/// Mirror padding about the first/last sample (edge sample not repeated).
std::vector<double> reflect_pad(const std::vector<double>& x, std::size_t pad) {
  std::vector<double> ext;
  ext.reserve(x.size() + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(x[pad - i]);
  ext.insert(ext.end(), x.begin(), x.end());
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(x[n - 2 - i]);
  return ext;
}

}  // namespace

ButterworthFilter ButterworthFilter::design(int order, double cutoff_hz, double fs_hz) {
  if (order < 1) throw std::invalid_argument("butterworth: order must be >= 1");
  if (!(fs_hz > 0.0)) throw std::invalid_argument("butterworth: fs must be > 0");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= 0.5 * fs_hz)
    throw std::invalid_argument("butterworth: cutoff must lie in (0, fs/2)");

  // Pre-warped analog cutoff so the digital response hits -3 dB exactly
  // at cutoff_hz after the bilinear transform.
  const double warped = 2.0 * fs_hz * std::tan(std::numbers::pi * cutoff_hz / fs_hz);
  const double k_bt = 2.0 * fs_hz;

  ButterworthFilter f;
  f.order_ = order;

  // Conjugate pole pairs of the analog prototype, scaled to the warped
  // cutoff, then mapped to the z plane. Each pair becomes one biquad with
  // both zeros at z = -1, normalized to unity DC gain.
  for (int k = 0; k < order / 2; ++k) {
    const double theta =
        std::numbers::pi / 2.0 + std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order);
    const cplx p = warped * cplx(std::cos(theta), std::sin(theta));
    const cplx zp = (k_bt + p) / (k_bt - p);
    BiquadSection s;
    s.a1 = -2.0 * zp.real();
    s.a2 = std::norm(zp);
    const double gain = (1.0 + s.a1 + s.a2) / 4.0;
    s.b0 = gain;
    s.b1 = 2.0 * gain;
    s.b2 = gain;
    f.sections_.push_back(s);
  }
  if (order % 2 != 0) {
    const double p = -warped;  // real prototype pole at -1
    const double zp = (k_bt + p) / (k_bt - p);
    BiquadSection s;
    s.a1 = -zp;
    s.a2 = 0.0;
    const double gain = (1.0 + s.a1) / 2.0;
    s.b0 = gain;
    s.b1 = gain;
    s.b2 = 0.0;
    f.sections_.push_back(s);
  }

  f.b_poly_ = {1.0};
  f.a_poly_ = {1.0};
  for (const BiquadSection& s : f.sections_) {
    if (s.a2 == 0.0 && s.b2 == 0.0) {
      f.b_poly_ = convolve(f.b_poly_, {s.b0, s.b1});
      f.a_poly_ = convolve(f.a_poly_, {1.0, s.a1});
    } else {
      f.b_poly_ = convolve(f.b_poly_, {s.b0, s.b1, s.b2});
      f.a_poly_ = convolve(f.a_poly_, {1.0, s.a1, s.a2});
    }
  }
  return f;
}

double ButterworthFilter::dc_gain() const {
  double sb = 0.0, sa = 0.0;
  for (double v : b_poly_) sb += v;
  for (double v : a_poly_) sa += v;
  return sb / sa;
}

std::complex<double> ButterworthFilter::response(double freq_hz, double fs_hz) const {
  const cplx zinv = std::exp(cplx(0.0, -2.0 * std::numbers::pi * freq_hz / fs_hz));
  cplx h(1.0, 0.0);
  for (const BiquadSection& s : sections_) {
    const cplx num = s.b0 + s.b1 * zinv + s.b2 * zinv * zinv;
    const cplx den = 1.0 + s.a1 * zinv + s.a2 * zinv * zinv;
    h *= num / den;
  }
  return h;
}

std::vector<double> ButterworthFilter::apply(const std::vector<double>& x,
                                             bool steady_state_init) const {
  std::vector<double> y = x;
  for (const BiquadSection& s : sections_) {
    // Direct form II transposed. The steady-state initial conditions make
    // a constant input pass through unchanged from the first sample.
    double s0 = 0.0, s1 = 0.0;
    if (steady_state_init && !y.empty()) {
      s1 = (s.b2 - s.a2) * y.front();
      s0 = (s.b1 - s.a1) * y.front() + s1;
    }
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + s0;
      s0 = s.b1 * in - s.a1 * out + s1;
      s1 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

FilterOutput butterworth_lowpass(const std::vector<double>& series, const FilterConfig& cfg,
                                 double fs_hz) {
  const ButterworthFilter filt = ButterworthFilter::design(cfg.order, cfg.cutoff_hz, fs_hz);

  FilterOutput out;
  const std::size_t min_len = static_cast<std::size_t>(3 * cfg.order);
  if (series.size() < min_len || series.size() < 2) {
    out.values = series;
    out.too_short = true;
    return out;
  }

  const std::size_t pad = std::min<std::size_t>(min_len, series.size() - 1);
  std::vector<double> ext = reflect_pad(series, pad);
  ext = filt.apply(ext, true);
  if (cfg.zero_phase) {
    std::reverse(ext.begin(), ext.end());
    ext = filt.apply(ext, true);
    std::reverse(ext.begin(), ext.end());
  }
  out.values.assign(ext.begin() + pad, ext.end() - pad);
  return out;
}

}  // namespace sril
