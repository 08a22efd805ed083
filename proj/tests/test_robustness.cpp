#include "rydgate/robustness.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <iostream>

using namespace rydgate;

namespace {

bool bit_equal(const FidelityStats& a, const FidelityStats& b) {
  return a.n_samples == b.n_samples && std::memcmp(&a.mean_fidelity, &b.mean_fidelity, sizeof(double)) == 0 &&
         std::memcmp(&a.std_fidelity, &b.std_fidelity, sizeof(double)) == 0 &&
         std::memcmp(a.percentiles.data(), b.percentiles.data(), sizeof(a.percentiles)) == 0 &&
         std::memcmp(&a.mean_phi_c_error, &b.mean_phi_c_error, sizeof(double)) == 0 &&
         std::memcmp(&a.nominal_fidelity, &b.nominal_fidelity, sizeof(double)) == 0;
}

class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) {
    if (const char* old = std::getenv("RYDGATE_THREADS")) saved_ = old;
    setenv("RYDGATE_THREADS", value, 1);
  }
  ~ThreadsEnv() {
    if (saved_.empty())
      unsetenv("RYDGATE_THREADS");
    else
      setenv("RYDGATE_THREADS", saved_.c_str(), 1);
  }

 private:
  std::string saved_;
};

}  // namespace

TEST(robustness, v_of_spacing_examples) {
  EXPECT_DOUBLE_EQ(v_of_spacing(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(v_of_spacing(64.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(v_of_spacing(5.0, 1.3) / v_of_spacing(5.0, 2.6), 64.0);
  EXPECT_THROW(v_of_spacing(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(v_of_spacing(1.0, -1.0), std::invalid_argument);
  EXPECT_NEAR(v_of_spacing(3.0, spacing_for(3.0, 0.7)), 0.7, 1e-14);
}

TEST(robustness, noise_model_validation) {
  EXPECT_THROW(NoiseModel({-0.1, 0.0, 1.0, 1.0, 0}).validate(), std::invalid_argument);
  EXPECT_THROW(NoiseModel({0.0, 0.0, 1.0, 0.0, 0}).validate(), std::invalid_argument);
  const auto p = GateProtocol::geometric(1.65, 1.0);
  EXPECT_THROW(monte_carlo_fidelity(p, noise_for(p, 0.0, 0.0, 1), 0), std::invalid_argument);
  // Spacing that does not reproduce the protocol's V is rejected.
  EXPECT_THROW(monte_carlo_fidelity(p, {0.0, 0.0, 1.0, 1.0, 1}, 1), std::invalid_argument);
}

TEST(robustness, gaussian_substreams) {
  EXPECT_NE(substream_seed(1, 0), substream_seed(1, 1));
  EXPECT_NE(substream_seed(1, 0), substream_seed(2, 0));
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto z = gaussian_pair(7, i);
    sum += z[0] + z[1];
    sq += z[0] * z[0] + z[1] * z[1];
  }
  EXPECT_NEAR(sum / (2 * n), 0.0, 0.03);
  EXPECT_NEAR(sq / (2 * n), 1.0, 0.03);
}

TEST(robustness, zero_noise_is_nominal) {
  for (const auto& p : {GateProtocol::geometric(1.65, 1.0), GateProtocol::blockade(1.0, 100.0)}) {
    const auto st = monte_carlo_fidelity(p, noise_for(p, 0.0, 0.0, 5), 16);
    EXPECT_EQ(st.std_fidelity, 0.0);
    EXPECT_EQ(st.mean_fidelity, st.nominal_fidelity);
    EXPECT_EQ(st.mean_phi_c_error, 0.0);
  }
}

TEST(robustness, rabi_noise_regression_anchor) {
  // Recorded from this implementation: geometric kappa = 1.65, Omega = 1,
  // sigma_Omega = 1%, n = 2000, seed 42, C6 = 1.
  const auto p = GateProtocol::geometric(1.65, 1.0);
  const auto st = monte_carlo_fidelity(p, noise_for(p, 0.01, 0.0, 42), 2000);
  EXPECT_NEAR(st.target_phi, -3.131759302029905, 1e-12);
  EXPECT_NEAR(st.nominal_fidelity, 0.9986402576855529, 1e-12);
  EXPECT_NEAR(1.0 - st.mean_fidelity, 0.0013978463697728039, 1e-12);
  EXPECT_NEAR(st.std_fidelity, 0.00030353565369244264, 1e-12);
  EXPECT_LT(st.mean_fidelity, st.nominal_fidelity);
}

TEST(robustness, identical_seeds_bit_identical) {
  const auto p = GateProtocol::geometric(1.65, 1.0);
  const auto noise = noise_for(p, 0.02, 0.01, 99);
  const auto a = monte_carlo_fidelity(p, noise, 200);
  const auto b = monte_carlo_fidelity(p, noise, 200);
  EXPECT_TRUE(bit_equal(a, b));
  const auto c = monte_carlo_fidelity(p, noise_for(p, 0.02, 0.01, 100), 200);
  EXPECT_NE(a.mean_fidelity, c.mean_fidelity);
}

TEST(robustness, thread_count_does_not_change_results) {
  const auto p = GateProtocol::blockade(1.0, 50.0);
  const auto noise = noise_for(p, 0.01, 0.02, 3);
  FidelityStats serial, threaded;
  {
    ThreadsEnv env("1");
    serial = monte_carlo_fidelity(p, noise, 300);
  }
  {
    ThreadsEnv env("4");
    threaded = monte_carlo_fidelity(p, noise, 300);
  }
  EXPECT_TRUE(bit_equal(serial, threaded));
}

TEST(robustness, doubling_samples_is_statistically_consistent) {
  const auto p = GateProtocol::geometric(1.65, 1.0);
  const auto a = monte_carlo_fidelity(p, noise_for(p, 0.02, 0.0, 11), 500);
  const auto b = monte_carlo_fidelity(p, noise_for(p, 0.02, 0.0, 12), 1000);
  const double se = std::sqrt(a.std_fidelity * a.std_fidelity / 500 + b.std_fidelity * b.std_fidelity / 1000);
  EXPECT_LT(std::abs(a.mean_fidelity - b.mean_fidelity), 3 * se);
}

TEST(robustness, percentiles_monotone_and_bounded) {
  const auto p = GateProtocol::geometric(1.2, 1.5);
  const auto st = monte_carlo_fidelity(p, noise_for(p, 0.05, 0.03, 8), 400);
  for (std::size_t k = 1; k < st.percentiles.size(); ++k) EXPECT_LE(st.percentiles[k - 1], st.percentiles[k]);
  EXPECT_GE(st.percentiles.front(), 0.0);
  EXPECT_LE(st.percentiles.back(), 1.0);
  EXPECT_GE(st.mean_fidelity, st.percentiles.front());
  EXPECT_LE(st.mean_fidelity, st.percentiles.back());
}

TEST(robustness, percentile_interpolation) {
  const std::vector<double> v = {1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(percentile_sorted(v, 50), 3.0);
  EXPECT_DOUBLE_EQ(percentile_sorted(v, 0), 1.0);
  EXPECT_DOUBLE_EQ(percentile_sorted(v, 100), 5.0);
  EXPECT_DOUBLE_EQ(percentile_sorted(v, 12.5), 1.5);
}

TEST(robustness, spacing_noise_contrast_table) {
  const auto rows = spacing_noise_contrast(0.01, 300, 21);
  ASSERT_EQ(rows.size(), 2u);
  std::cout << "protocol,v_over_omega,mean_fidelity,mean_phi_c_error\n";
  for (const auto& r : rows) {
    std::cout << r.protocol << "," << r.v_over_omega << "," << r.stats.mean_fidelity << "," << r.stats.mean_phi_c_error
              << "\n";
    EXPECT_GT(r.stats.mean_phi_c_error, 0.0);
    EXPECT_GE(r.stats.mean_fidelity, 0.0);
    EXPECT_LE(r.stats.mean_fidelity, 1.0);
  }
  EXPECT_NEAR(rows[1].v_over_omega, 20.0, 1e-12);
}
