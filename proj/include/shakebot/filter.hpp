#pragma once

#include <span>
#include <vector>

namespace shakebot::motion {

enum class FilterKind { LowPass, HighPass };

struct FilterSpec {
  FilterKind kind = FilterKind::LowPass;
  int order = 2;
  double cutoff_hz = 20.0;
};

/// One direct-form-II-transposed section. First-order sections keep b2 = a2 = 0.
struct Section {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
  bool first_order = false;
};

/// Digital Butterworth design (bilinear transform, prewarped cutoff) split into
/// second-order sections, plus a trailing first-order section for odd orders.
std::vector<Section> butterworth_sections(const FilterSpec& spec, double sample_rate_hz);

/// Minimum series length accepted by apply_filter for this spec.
std::size_t filter_warm_up_length(const FilterSpec& spec);

/// Zero-phase (forward-backward) filtering with odd-symmetric edge padding and
/// steady-state initial conditions. Output has the length of the input.
/// Throws DomainError on invalid spec, cutoff at/above Nyquist, or a series
/// shorter than filter_warm_up_length().
std::vector<double> apply_filter(std::span<const double> series, double dt, const FilterSpec& spec);

}  // namespace shakebot::motion
