#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>

#include "antikz/error.hpp"
#include "antikz/noise.hpp"

namespace antikz {
namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double correlation(const std::vector<double>& a, const std::vector<double>& b, std::size_t lag = 0) {
  const std::size_t n = a.size() - lag;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += a[i] * b[i + lag];
    saa += a[i] * a[i];
    sbb += b[i + lag] * b[i + lag];
  }
  return sab / std::sqrt(saa * sbb);
}

NoiseSpec spec(double w2, double dt, std::size_t n, std::uint64_t realization = 0) {
  return {w2, dt, n, StreamKey{0, 1, 2, 3, realization}};
}

TEST(NoiseTest, ZeroIntensityGivesZeros) {
  const auto r = sample_realization(spec(0.0, 0.37, 100), 42);
  ASSERT_EQ(r.n_steps(), 100u);
  for (double x : r.samples) EXPECT_EQ(x, 0.0);
}

TEST(NoiseTest, MeanAndVarianceMatchDiscretizedWhiteNoise) {
  const auto r = sample_realization(spec(1.0, 0.01, 1'000'000), 1);
  // 5 sigma CLT bound on the mean: 5 sqrt(W^2 / (dt n)) = 0.05.
  EXPECT_LT(std::abs(mean_of(r.samples)), 0.05);
  // Expected variance W^2 / dt = 100; 5 sigma band is +-0.71.
  const double var = variance_of(r.samples);
  EXPECT_GT(var, 99.0);
  EXPECT_LT(var, 101.0);
}

TEST(NoiseTest, DeterministicForSameInputs) {
  const auto a = sample_realization(spec(0.5, 0.02, 5000), 99);
  const auto b = sample_realization(spec(0.5, 0.02, 5000), 99);
  EXPECT_EQ(a.samples, b.samples);
  const auto c = sample_realization(spec(0.5, 0.02, 5000), 100);
  EXPECT_NE(a.samples, c.samples);
}

TEST(NoiseTest, StreamsAreIndependent) {
  const std::size_t n = 200'000;
  const double bound = 5.0 / std::sqrt(static_cast<double>(n));
  const auto base = sample_realization(spec(1.0, 0.01, n, 0), 3);
  for (std::uint64_t r = 1; r < 6; ++r) {
    const auto other = sample_realization(spec(1.0, 0.01, n, r), 3);
    EXPECT_LT(std::abs(correlation(base.samples, other.samples)), bound);
  }
  NoiseSpec other_k = spec(1.0, 0.01, n);
  other_k.key.k_index = 7;
  EXPECT_LT(std::abs(correlation(base.samples, sample_realization(other_k, 3).samples)), bound);
}

TEST(NoiseTest, SamplesAreWhite) {
  const std::size_t n = 200'000;
  const auto r = sample_realization(spec(2.0, 0.005, n), 17);
  for (std::size_t lag = 1; lag <= 20; ++lag) {
    EXPECT_LT(std::abs(correlation(r.samples, r.samples, lag)), 5.0 / std::sqrt(static_cast<double>(n)))
        << "lag " << lag;
  }
}

TEST(NoiseTest, FourfoldIntensityDoublesSamples) {
  const auto a = sample_realization(spec(0.3, 0.01, 10000), 5);
  const auto b = sample_realization(spec(1.2, 0.01, 10000), 5);
  for (std::size_t i = 0; i < a.samples.size(); ++i) ASSERT_EQ(b.samples[i], 2.0 * a.samples[i]);
}

TEST(NoiseTest, RejectsInvalidSpec) {
  EXPECT_THROW(sample_realization(spec(-1.0, 0.01, 10), 0), Error);
  EXPECT_THROW(sample_realization(spec(1.0, 0.0, 10), 0), Error);
  EXPECT_THROW(sample_realization(spec(1.0, 0.01, 0), 0), Error);
  std::vector<double> buf(5);
  EXPECT_THROW(sample_into(spec(1.0, 0.01, 10), 0, buf), Error);
}

TEST(PsdTest, ZeroSignalHasZeroPower) {
  const auto bins = psd_estimate(silent_realization(0.01, 512));
  ASSERT_EQ(bins.size(), 257u);
  for (const auto& b : bins) EXPECT_EQ(b.power, 0.0);
  EXPECT_DOUBLE_EQ(bins.back().frequency, 50.0);  // Nyquist 1 / (2 dt)
}

TEST(PsdTest, SinusoidConcentratesInOneBin) {
  const std::size_t n = 1024;
  NoiseRealization r = silent_realization(0.01, n);
  const std::size_t bin = 37;
  for (std::size_t i = 0; i < n; ++i) {
    r.samples[i] = std::sin(2.0 * std::numbers::pi * bin * static_cast<double>(i) / n);
  }
  const auto bins = psd_estimate(r);
  const auto peak = std::max_element(bins.begin(), bins.end(),
                                     [](const auto& a, const auto& b) { return a.power < b.power; });
  EXPECT_EQ(static_cast<std::size_t>(peak - bins.begin()), bin);
  double rest = 0.0;
  for (std::size_t j = 0; j < bins.size(); ++j) {
    if (j != bin) rest += bins[j].power;
  }
  EXPECT_LT(rest, 1e-20 * peak->power);
}

TEST(PsdTest, WhiteNoiseSpectrumIsFlatAcrossDecades) {
  const std::size_t n = 1 << 16;
  const double dt = 0.01;
  const int realizations = 64;
  std::vector<double> mean_power(n / 2 + 1, 0.0);
  std::vector<double> freq;
  for (int r = 0; r < realizations; ++r) {
    const auto bins = psd_estimate(sample_realization(spec(1.0, dt, n, r), 11));
    if (freq.empty()) {
      for (const auto& b : bins) freq.push_back(b.frequency);
    }
    for (std::size_t j = 0; j < bins.size(); ++j) mean_power[j] += bins[j].power / realizations;
  }
  double global = 0.0;
  for (std::size_t j = 1; j < mean_power.size(); ++j) global += mean_power[j];
  global /= static_cast<double>(mean_power.size() - 1);
  EXPECT_NEAR(global, 1.0, 0.02);  // mean periodogram level equals W^2

  const double f_min = freq[1];
  for (double lo = f_min; lo < freq.back(); lo *= 10.0) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t j = 1; j < freq.size(); ++j) {
      if (freq[j] >= lo && freq[j] < 10.0 * lo) {
        sum += mean_power[j];
        ++count;
      }
    }
    ASSERT_GT(count, 0);
    EXPECT_NEAR(sum / count / global, 1.0, 0.2) << "band starting at " << lo;
  }
}

TEST(PsdTest, RejectsShortRealization) {
  try {
    psd_estimate(silent_realization(0.1, 255));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Length);
  }
}

TEST(ModulationTest, MapsDeviationAndDepthToIntensity) {
  EXPECT_DOUBLE_EQ(modulation_to_intensity({ModulationChannel::FM, 60.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(modulation_to_intensity({ModulationChannel::AM, 0.0, 0.1}), 0.1 * 0.1);
  EXPECT_DOUBLE_EQ(modulation_to_intensity({ModulationChannel::FM, 0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(modulation_to_intensity({ModulationChannel::FM, 30.0, 0.0}), 0.25);
  EXPECT_THROW(modulation_to_intensity({ModulationChannel::AM, 0.0, 1.5}), Error);
  EXPECT_THROW(modulation_to_intensity({ModulationChannel::FM, -1.0, 0.0}), Error);
}

TEST(NoiseTest, CsvDumpHasOneRowPerStep) {
  const auto path = std::filesystem::temp_directory_path() / "antikz_noise_dump.csv";
  const auto r = sample_realization(spec(1.0, 0.5, 4), 8);
  write_realization_csv(path, r);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step_index,t,eta");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace antikz
