#pragma once

#include <complex>
#include <vector>

namespace sril {

struct FilterConfig {
  int order = 2;
  double cutoff_hz = 0.5;
  bool zero_phase = true;

  bool operator==(const FilterConfig&) const = default;
};

/// One second-order section, a0 normalized to 1. First-order sections
/// (odd filter orders) carry b2 = a2 = 0.
struct BiquadSection {
  double b0 = 0, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;
};

/// Digital Butterworth low-pass designed by bilinear transform with
/// frequency pre-warping. Kept as a cascade of unity-DC-gain sections;
/// the expanded numerator/denominator polynomials are exposed for
/// direct-evaluation checks.
class ButterworthFilter {
 public:
  /// Throws std::invalid_argument for order < 1 or cutoff outside
  /// (0, fs/2).
  static ButterworthFilter design(int order, double cutoff_hz, double fs_hz);

  int order() const { return order_; }
  const std::vector<BiquadSection>& sections() const { return sections_; }
  const std::vector<double>& numerator() const { return b_poly_; }
  const std::vector<double>& denominator() const { return a_poly_; }

  /// H(1) = sum(b)/sum(a); exactly 1 for any low-pass Butterworth.
  double dc_gain() const;
  /// Complex frequency response at freq_hz for the design sample rate.
  std::complex<double> response(double freq_hz, double fs_hz) const;

  /// Single causal pass over x. steady_state_init seeds the filter state
  /// so that a constant input produces that constant immediately.
  std::vector<double> apply(const std::vector<double>& x, bool steady_state_init) const;

 private:
  int order_ = 0;
  std::vector<BiquadSection> sections_;
  std::vector<double> b_poly_, a_poly_;
};

struct FilterOutput {
  std::vector<double> values;
  /// Set when the input was shorter than 3*order and returned unfiltered.
  bool too_short = false;
};

/// Filters a series with reflective padding of length 3*order at both
/// ends. zero_phase runs the filter forward then backward (squared
/// magnitude response, zero phase distortion). Series shorter than
/// 3*order come back unfiltered with too_short set.
FilterOutput butterworth_lowpass(const std::vector<double>& series, const FilterConfig& cfg,
                                 double fs_hz);

}  // namespace sril
