#pragma once

#include <string>
#include <vector>

namespace pharec {

struct RawSignal {
  std::vector<double> times;  // uniform
  std::vector<double> values;
  std::string label;
};

struct ExtractedChannel {
  std::vector<double> times;
  std::vector<double> theta;  // wrapped to [0, 2π)
  std::vector<double> r;
  std::vector<bool> edge;     // first and last 5% of samples
  double dominant_frequency = 0.0;
  std::string label;
};

// Analytic signal of the demeaned record from its spectrum with negative
// frequencies zeroed and positive ones doubled.
ExtractedChannel extract_phase_amplitude(const RawSignal& signal);

// Extracts every channel; per-channel results do not depend on jobs.
std::vector<ExtractedChannel> extract_channels(const std::vector<RawSignal>& signals, int jobs = 1);

}  // namespace pharec
