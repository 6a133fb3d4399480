#include "pharec/signal_extract.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <string>

#include "pharec/error.hpp"
#include "pharec/parallel.hpp"

namespace pharec {

namespace {

constexpr double kEdgeFraction = 0.05;
constexpr double kMinPeriods = 4.0;

// The FFTW planner is not reentrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_uniform(const std::vector<double>& t) {
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(h > 0.0)) throw Error(ErrorCode::NonUniformSampling, "times must increase");
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs(t[k] - t[k - 1] - h) > 1e-6 * h) {
      throw Error(ErrorCode::NonUniformSampling, "sample spacing deviates at index " + std::to_string(k));
    }
  }
}

}  // namespace

ExtractedChannel extract_phase_amplitude(const RawSignal& signal) {
  const std::size_t n = signal.values.size();
  if (signal.times.size() != n) throw Error(ErrorCode::ShapeMismatch, "times and values differ in length");
  if (n < 16) throw Error(ErrorCode::TooShort, "need at least 16 samples");
  check_uniform(signal.times);
  double mean = 0.0;
  for (double v : signal.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteState, "signal contains non-finite values");
    mean += v;
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : signal.values) var += (v - mean) * (v - mean);
  if (!(var > 1e-24 * static_cast<double>(n) * (1.0 + mean * mean))) {
    throw Error(ErrorCode::ZeroVariance, "signal " + signal.label + " is constant");
  }

  std::vector<std::complex<double>> buf(n);
  for (std::size_t k = 0; k < n; ++k) buf[k] = signal.values[k] - mean;
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_1d(static_cast<int>(n), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(fwd);

  const double h = (signal.times.back() - signal.times.front()) / static_cast<double>(n - 1);
  const double duration = h * static_cast<double>(n);
  std::size_t peak = 1;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    if (std::abs(buf[k]) > std::abs(buf[peak])) peak = k;
  }
  const double f_peak = static_cast<double>(peak) / duration;

  // Bins 1..ceil(n/2)-1 doubled, Nyquist (even n) and DC kept, rest zeroed.
  const std::size_t half = (n + 1) / 2;
  for (std::size_t k = 1; k < half; ++k) buf[k] *= 2.0;
  for (std::size_t k = n / 2 + 1; k < n; ++k) buf[k] = 0.0;
  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }

  if (f_peak * duration < kMinPeriods) {
    throw Error(ErrorCode::TooShort, "record holds fewer than 4 periods of the dominant frequency");
  }

  ExtractedChannel out;
  out.label = signal.label;
  out.times = signal.times;
  out.dominant_frequency = f_peak;
  out.theta.resize(n);
  out.r.resize(n);
  out.edge.resize(n);
  const std::size_t margin = static_cast<std::size_t>(std::ceil(kEdgeFraction * static_cast<double>(n)));
  const double twopi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k < n; ++k) {
    const std::complex<double> z = buf[k] / static_cast<double>(n);
    double a = std::arg(z);
    if (a < 0.0) a += twopi;
    if (a >= twopi) a -= twopi;
    out.theta[k] = a;
    out.r[k] = std::abs(z);
    out.edge[k] = k < margin || k + margin >= n;
  }
  return out;
}

std::vector<ExtractedChannel> extract_channels(const std::vector<RawSignal>& signals, int jobs) {
  std::vector<ExtractedChannel> out(signals.size());
  parallel_for(signals.size(), jobs, [&](std::size_t i) { out[i] = extract_phase_amplitude(signals[i]); });
  return out;
}

}  // namespace pharec
