#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wenods/cnn.hpp"
#include "wenods/random.hpp"

using namespace wenods;

namespace {

// Direct triple loop, written without the library's gather/dot helpers.
std::vector<double> naive_forward(const ConvNet& net, std::vector<std::vector<double>> x) {
  auto p = net.params();
  std::size_t off = 0;
  for (const auto& l : net.layers()) {
    std::size_t out_len = x[0].size() - (l.kernel_size - 1);
    std::vector<std::vector<double>> y(l.out_channels, std::vector<double>(out_len));
    for (int o = 0; o < l.out_channels; ++o)
      for (std::size_t i = 0; i < out_len; ++i) {
        double z = p[off + l.weight_count() + o];
        for (int c = 0; c < l.in_channels; ++c)
          for (int j = 0; j < l.kernel_size; ++j)
            z += p[off + (o * l.in_channels + c) * l.kernel_size + j] * x[c][i + j];
        y[o][i] = l.activation == Activation::ELU ? (z > 0 ? z : std::exp(z) - 1) : 1 / (1 + std::exp(-z));
      }
    x = y;
    off += l.param_count();
  }
  return x[0];
}

ConvNet random_net(std::uint64_t seed, std::vector<int> kernels = {5, 5, 5}, std::vector<int> hidden = {4, 3}) {
  ConvNet net = make_net(kernels, hidden);
  Rng rng(seed);
  net.initialize(rng);
  // Non-zero biases so that path is exercised too.
  std::vector<double> p(net.params().begin(), net.params().end());
  for (double& v : p)
    if (v == 0.0) v = rng.uniform(-0.3, 0.3);
  net.set_params(p);
  return net;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("wenods_test_" + name)).string();
}

}  // namespace

TEST(Features, DifferencesOfAnExample) {
  std::vector<double> f{1, 4, 9, 16, 25};
  auto ft = features(std::span<const double>(f));
  ASSERT_EQ(ft.size(), 2u);
  EXPECT_EQ(ft[0], (std::vector<double>{8, 12, 16}));
  EXPECT_EQ(ft[1], (std::vector<double>{2, 2, 2}));
}

TEST(Features, LinearDataHasZeroSecondDifference) {
  std::vector<double> f{0.5, 1.5, 2.5, 3.5};
  auto ft = features(std::span<const double>(f));
  for (double v : ft[1]) EXPECT_EQ(v, 0.0);
  for (double v : ft[0]) EXPECT_EQ(v, 2.0);
}

TEST(Features, TooShortThrows) {
  std::vector<double> f{1, 2};
  EXPECT_THROW(features(std::span<const double>(f)), std::invalid_argument);
}

TEST(ConvNet, ShapesAndRadius) {
  ConvNet net = make_net({5, 5, 5}, {16, 16});
  EXPECT_EQ(net.receptive_radius(), 6);
  EXPECT_EQ(net.total_params(), (16u * 2 * 5 + 16) + (16u * 16 * 5 + 16) + (16u * 5 + 1));
  EXPECT_EQ(make_net({3}, {}).receptive_radius(), 1);
  EXPECT_THROW(make_net({4, 5}, {3}), model_error);
  EXPECT_THROW(make_net({5, 5}, {3, 3}), std::invalid_argument);
}

TEST(ConvNet, ForwardMatchesNaiveConvolution) {
  Rng rng(17);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ConvNet net = random_net(seed);
    std::vector<std::vector<double>> in(2, std::vector<double>(30));
    for (auto& ch : in)
      for (double& v : ch) v = rng.uniform(-2, 2);
    auto got = net.forward(in);
    auto want = naive_forward(net, in);
    ASSERT_EQ(got.size(), 30u - 12u);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-14);
  }
}

TEST(ConvNet, ZeroParametersGiveOneHalf) {
  ConvNet net = make_net({5, 5, 5}, {16, 16});
  std::vector<std::vector<double>> in(2, std::vector<double>(20, 3.0));
  for (double v : net.forward(in)) EXPECT_EQ(v, 0.5);
}

TEST(ConvNet, OutputsLieInUnitInterval) {
  ConvNet net = random_net(3);
  Rng rng(4);
  std::vector<std::vector<double>> in(2, std::vector<double>(64));
  for (auto& ch : in)
    for (double& v : ch) v = rng.uniform(-50, 50);
  for (double v : net.forward(in)) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(ConvNet, ShiftEquivariant) {
  ConvNet net = random_net(9);
  Rng rng(10);
  std::vector<double> f(40);
  for (double& v : f) v = rng.uniform(-1, 1);
  auto a = net.forward(features(std::span<const double>(f)));
  std::vector<double> g(f.begin() + 3, f.end());
  auto b = net.forward(features(std::span<const double>(g)));
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b[i], a[i + 3]);
}

TEST(ConvNet, RejectsWrongInputs) {
  ConvNet net = random_net(1);
  EXPECT_THROW(net.forward(std::vector<std::vector<double>>(1, std::vector<double>(30))), model_error);
  EXPECT_THROW(net.forward(std::vector<std::vector<double>>(2, std::vector<double>(12))), std::invalid_argument);
  std::vector<double> p(net.total_params(), 0.0);
  p[0] = NAN;
  EXPECT_THROW(net.set_params(p), model_error);
  EXPECT_THROW(net.set_params(std::vector<double>(3)), model_error);
}

TEST(ConvNet, InitializationBounds) {
  ConvNet net = make_net({5, 3}, {7});
  Rng rng(12);
  net.initialize(rng);
  auto p = net.params();
  double b0 = 1 / std::sqrt(10.0), b1 = 1 / std::sqrt(21.0);
  for (int k = 0; k < 70; ++k) EXPECT_LE(std::abs(p[k]), b0);
  for (int k = 70; k < 77; ++k) EXPECT_EQ(p[k], 0.0);
  for (int k = 77; k < 98; ++k) EXPECT_LE(std::abs(p[k]), b1);
  EXPECT_EQ(p[98], 0.0);
}

TEST(ShiftMultipliers, Triples) {
  std::vector<double> d{0.1, 0.2, 0.3, 0.4};
  auto t = shift_multipliers(std::span<const double>(d));
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0], (Triple<double>{0.1, 0.2, 0.3}));
  EXPECT_EQ(t[1], (Triple<double>{0.2, 0.3, 0.4}));
  std::vector<double> shorter{1, 2};
  EXPECT_THROW(shift_multipliers(std::span<const double>(shorter)), std::invalid_argument);
}

TEST(Multipliers, ConstantSource) {
  auto src = constant_multipliers<double>(0.9);
  std::vector<double> ext(12, 1.0);
  auto d = src.eval(ext, 10, Branch::Positive);
  ASSERT_EQ(d.size(), 12u);
  for (double v : d) EXPECT_EQ(v, 0.9);
}

TEST(Multipliers, NetSourceCoversNodesMinusOneToN) {
  DsModel model{random_net(5), random_net(6), 0.1};
  auto src = net_multipliers(model);
  EXPECT_EQ(src.ghost, model.receptive_radius() + 2);
  const int n = 16;
  Rng rng(2);
  std::vector<double> ext(n + 2 * src.ghost);
  for (double& v : ext) v = rng.uniform(0, 1);
  auto dp = src.eval(ext, n, Branch::Positive);
  auto dn = src.eval(ext, n, Branch::Negative);
  ASSERT_EQ(dp.size(), static_cast<std::size_t>(n + 2));
  EXPECT_NE(dp, dn);
  auto direct = model.positive.forward(features(std::span<const double>(ext)));
  EXPECT_EQ(dp, direct);
}

TEST(ModelFile, SaveLoadIsByteIdentical) {
  DsModel model{random_net(21), random_net(22, {3, 3}, {5}), 0.1};
  std::string p1 = temp_path("m1.json"), p2 = temp_path("m2.json");
  save_model(model, p1);
  DsModel back = load_model(p1);
  save_model(back, p2);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  EXPECT_EQ(slurp(p1), slurp(p2));
  EXPECT_EQ(back.C, 0.1);
  auto a = model.positive.params(), b = back.positive.params();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
  EXPECT_EQ(back.negative.receptive_radius(), 2);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST(ModelFile, RejectsMalformedInput) {
  DsModel model = make_model({3, 3}, {2});
  std::string good = model_to_string(model);
  EXPECT_NO_THROW(model_from_string(good));
  EXPECT_THROW(model_from_string("{not json"), model_error);
  EXPECT_THROW(model_from_string("[]"), model_error);

  auto mutate = [&](auto&& edit) {
    nlohmann::json j = nlohmann::json::parse(good);
    edit(j);
    return j.dump();
  };
  EXPECT_THROW(model_from_string(mutate([](auto& j) { j["format_version"] = 99; })), model_error);
  EXPECT_THROW(model_from_string(mutate([](auto& j) { j["C"] = -1.0; })), model_error);
  EXPECT_THROW(model_from_string(mutate([](auto& j) { j.erase("negative"); })), model_error);
  EXPECT_THROW(model_from_string(mutate([](auto& j) { j["positive"]["layers"][0]["weights"].push_back(0.0); })),
               model_error);
  EXPECT_THROW(model_from_string(mutate([](auto& j) { j["positive"]["layers"][0]["bias"][0] = nullptr; })),
               model_error);
  EXPECT_THROW(model_from_string(mutate([](auto& j) { j["positive"]["layers"][1]["activation"] = "relu"; })),
               model_error);
  EXPECT_THROW(model_from_string(mutate([](auto& j) { j["positive"]["layers"][0]["kernel_size"] = 4; })),
               model_error);
  EXPECT_THROW(load_model(temp_path("does_not_exist.json")), model_error);
}
