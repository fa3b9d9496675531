#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "hdseizure/errors.hpp"
#include "hdseizure/features.hpp"

namespace hdseizure {
namespace {

constexpr double kMinSpectralFs = 90.0;

struct FftwDeleter {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

// fftw plan creation is not thread-safe; execution on new arrays is.
fftw_plan PlanForLength(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, fftw_plan> plans;
  std::lock_guard lock(mu);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;
  std::unique_ptr<double, FftwDeleter> in(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwDeleter> out(fftw_alloc_complex(n / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  plans.emplace(n, plan);
  return plan;
}

}  // namespace

std::vector<double> WelchPsd(std::span<const double> x, double fs) {
  if (fs < kMinSpectralFs) {
    throw InvalidArgument("sampling rate " + std::to_string(fs) +
                          " Hz too low to resolve bands up to 45 Hz");
  }
  const auto seg = static_cast<std::size_t>(std::lround(fs));
  if (x.size() < seg) throw InvalidArgument("spectral features need at least one second of samples");
  const std::size_t hop = seg / 2;
  const std::size_t bins = seg / 2 + 1;

  std::vector<double> window(seg);
  double window_power = 0.0;
  for (std::size_t i = 0; i < seg; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(seg));
    window_power += window[i] * window[i];
  }

  fftw_plan plan = PlanForLength(seg);
  std::unique_ptr<double, FftwDeleter> in(fftw_alloc_real(seg));
  std::unique_ptr<fftw_complex, FftwDeleter> out(fftw_alloc_complex(bins));

  std::vector<double> psd(bins, 0.0);
  std::size_t segments = 0;
  for (std::size_t start = 0; start + seg <= x.size(); start += hop) {
    for (std::size_t i = 0; i < seg; ++i) in.get()[i] = x[start + i] * window[i];
    fftw_execute_dft_r2c(plan, in.get(), out.get());
    for (std::size_t k = 0; k < bins; ++k) {
      const double re = out.get()[k][0];
      const double im = out.get()[k][1];
      psd[k] += re * re + im * im;
    }
    ++segments;
  }
  const double norm = 1.0 / (fs * window_power * static_cast<double>(segments));
  for (std::size_t k = 0; k < bins; ++k) {
    const bool edge = k == 0 || (seg % 2 == 0 && k == bins - 1);
    psd[k] *= norm * (edge ? 1.0 : 2.0);
  }
  return psd;
}

SpectralFeatures ComputeSpectralFeatures(std::span<const double> x, double fs) {
  const std::vector<double> psd = WelchPsd(x, fs);
  const double df = fs / std::round(fs);  // 1 Hz resolution for 1 s segments
  constexpr std::array<double, 7> kEdges{0.0, 0.5, 4.0, 8.0, 12.0, 30.0, 45.0};

  SpectralFeatures out;
  double total = 0.0;
  std::size_t peak = 0;
  for (std::size_t k = 0; k < psd.size(); ++k) {
    total += psd[k];
    if (psd[k] > psd[peak]) peak = k;
    const double f = static_cast<double>(k) * df;
    for (std::size_t b = 0; b < 6; ++b) {
      const bool last = b == 5;
      if (f >= kEdges[b] && (f < kEdges[b + 1] || (last && f <= kEdges[b + 1]))) {
        out.relative_power[b] += psd[k];
        break;
      }
    }
  }
  out.total_power = total * df;
  if (total <= 0.0 || !std::isfinite(total)) {
    out.total_power = 0.0;
    out.relative_power.fill(0.0);
    out.peak_frequency = 0.0;
    return out;
  }
  for (auto& p : out.relative_power) p /= total;
  out.peak_frequency = static_cast<double>(peak) * df;
  return out;
}

std::array<double, 8> SpectralFeatures::Flatten() const {
  return {total_power,       relative_power[0], relative_power[1], relative_power[2],
          relative_power[3], relative_power[4], relative_power[5], peak_frequency};
}

}  // namespace hdseizure
