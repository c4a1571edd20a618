#include <gtest/gtest.h>

#include <sstream>

#include "momentsnet/errors.hpp"
#include "momentsnet/experiment.hpp"

using namespace momentsnet;

namespace {

// Small enough to train in well under a second.
ExperimentConfig tiny_config() {
  ExperimentConfig c;
  set_parameter(c, "classes", "3");
  set_parameter(c, "rotations", "4");
  set_parameter(c, "replicas", "3");
  set_parameter(c, "size", "16");
  set_parameter(c, "l1", "4");
  set_parameter(c, "k", "5");
  set_parameter(c, "h", "8");
  set_parameter(c, "threshold", "0.05");
  set_parameter(c, "epochs", "10");
  return c;
}

}  // namespace

TEST(Parameters, SetAndResolveDefaults) {
  ExperimentConfig c;
  set_parameter(c, "family", "tchebichef");
  set_parameter(c, "l1", "7");
  set_parameter(c, "k", "9");
  set_parameter(c, "h", "6");
  set_parameter(c, "R", "0.25");
  set_parameter(c, "t", "0.125");
  set_parameter(c, "C", "4");
  const auto net = c.resolved_net();
  EXPECT_EQ(net.family.tag, Family::Tchebichef);
  EXPECT_EQ(net.l2, 7u);
  EXPECT_EQ(net.k2, 9u);
  EXPECT_EQ(net.h2, 6u);
  EXPECT_EQ(net.overlap, 0.25);
  EXPECT_EQ(net.threshold, 0.125);
  EXPECT_EQ(c.C, 4.0);
  set_parameter(c, "l2", "3");
  set_parameter(c, "k2", "5");
  EXPECT_EQ(c.resolved_net().l2, 3u);
  EXPECT_EQ(c.resolved_net().k2, 5u);
  EXPECT_EQ(c.resolved_net().input_rows, 32u);
}

TEST(Parameters, ErrorsNameTheKey) {
  ExperimentConfig c;
  auto message = [&](std::string_view key, std::string_view value) {
    try {
      set_parameter(c, key, value);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_EQ(message("l1", "nine").rfind("l1:", 0), 0u);
  EXPECT_EQ(message("overlap", "0.5x").rfind("overlap:", 0), 0u);
  EXPECT_EQ(message("family", "hermite").rfind("family:", 0), 0u);
  EXPECT_NE(message("bogus", "1").find("bogus"), std::string::npos);
  EXPECT_EQ(message("auto-threshold", "maybe").rfind("auto-threshold:", 0), 0u);
}

TEST(Parameters, EveryNameIsAccepted) {
  ExperimentConfig c;
  for (auto key : parameter_names()) {
    const std::string value = key == "family"         ? "zernike"
                              : key == "reduction"    ? "modulus"
                              : key == "auto-threshold" || key == "timing" ? "true"
                              : key == "dataset" || key == "out" ? "somewhere"
                              : key == "krawtchouk-p1" || key == "krawtchouk-p2" || key == "train-fraction" ||
                                        key == "target-lo" || key == "target-hi" || key == "hahn-c"
                                  ? "0.5"
                                  : "2";
    EXPECT_NO_THROW(set_parameter(c, key, value)) << key;
  }
}

TEST(Parameters, WrittenConfigReloads) {
  auto c = tiny_config();
  set_parameter(c, "family", "krawtchouk");
  set_parameter(c, "krawtchouk-p1", "0.3");
  std::ostringstream out;
  write_config(out, c);
  ExperimentConfig back;
  std::istringstream in(out.str());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    set_parameter(back, line.substr(0, eq), line.substr(eq + 1));
  }
  std::ostringstream again;
  write_config(again, back);
  EXPECT_EQ(out.str(), again.str());
}

TEST(Axes, ListsAndRanges) {
  const auto list = parse_axis("family=zernike,tchebichef");
  EXPECT_EQ(list.name, "family");
  EXPECT_EQ(list.values, (std::vector<std::string>{"zernike", "tchebichef"}));
  const auto range = parse_axis("t=0.1:0.2:0.01");
  ASSERT_EQ(range.values.size(), 11u);
  EXPECT_EQ(range.values[3], "0.13");
  EXPECT_EQ(range.values.back(), "0.2");
  EXPECT_THROW(parse_axis("t"), ConfigError);
  EXPECT_THROW(parse_axis("t=0.2:0.1:0.01"), ConfigError);
  EXPECT_THROW(parse_axis("t=0:1000:1"), ConfigError);
  EXPECT_THROW(parse_axis("l1=1,,2"), ConfigError);
}

TEST(Axes, SweepSizeIsProductAndOrderRowMajor) {
  auto c = tiny_config();
  c.axes = {parse_axis("l1=2,3"), parse_axis("t=0.1:0.13:0.01"), parse_axis("h=4,8,16")};
  const auto points = expand_sweep(c);
  ASSERT_EQ(points.size(), 2u * 4u * 3u);
  EXPECT_EQ(points[0].net.l1, 2u);
  EXPECT_EQ(points[1].net.h1, 8u);       // last axis fastest
  EXPECT_EQ(points[3].net.threshold, 0.11);
  EXPECT_EQ(points[12].net.l1, 3u);
}

TEST(Axes, BudgetAndNameChecks) {
  auto c = tiny_config();
  c.axes = {parse_axis("l1=1,2"), parse_axis("k=3,5"), parse_axis("h=4,8"), parse_axis("t=0,1")};
  EXPECT_THROW(expand_sweep(c), ConfigError);
  c.axes = {parse_axis("t=0:0.99:0.01"), parse_axis("l1=1,2,3,4,5,6")};  // 600 points
  EXPECT_THROW(expand_sweep(c), ConfigError);
  c.axes = {parse_axis("out=a,b")};
  EXPECT_THROW(expand_sweep(c), ConfigError);
  c.axes = {parse_axis("h=4,40")};
  EXPECT_THROW(expand_sweep(c), GeometryError);
}

TEST(Run, SmallPointIsDeterministic) {
  const auto c = tiny_config();
  const auto [train, test] = prepare_data(c);
  EXPECT_EQ(train.size(), 18u);
  EXPECT_EQ(test.size(), 18u);
  const auto a = run_point(c, train, test, 1);
  const auto b = run_point(c, train, test, 2);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.test_accuracy, b.test_accuracy);
  EXPECT_EQ(a.feature_dim, c.resolved_net().feature_dim());
  EXPECT_GE(a.train_accuracy, 0.0);
  EXPECT_LE(a.test_accuracy, 1.0);
  std::ostringstream x, y;
  write_results_header(x, false);
  write_result_row(x, a, false, false);
  write_results_header(y, false);
  write_result_row(y, b, false, false);
  EXPECT_EQ(x.str(), y.str());
  EXPECT_EQ(x.str().substr(0, x.str().find('\n')),
            "family,stages,L1,k1,h1,R,t,train_acc,test_acc,feat_dim,wall_seconds");
}

TEST(Run, AutoThresholdLandsInTarget) {
  auto c = tiny_config();
  set_parameter(c, "auto-threshold", "true");
  const auto [train, test] = prepare_data(c);
  const auto r = run_point(c, train, test, 1);
  EXPECT_GE(r.ones_fraction, c.target.lo);
  EXPECT_LE(r.ones_fraction, c.target.hi);
  EXPECT_EQ(r.net.threshold, r.threshold);
}

TEST(Run, SweepMatchesIndividualPoints) {
  auto c = tiny_config();
  c.axes = {parse_axis("t=0.02,0.08")};
  c.jobs = 2;
  const auto [train, test] = prepare_data(c);
  const auto results = run_sweep(c, train, test);
  ASSERT_EQ(results.size(), 2u);
  const auto points = expand_sweep(c);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(results[i].model, run_point(points[i], train, test, 1).model);
  }
}

TEST(Run, MomentBaselineAndPca) {
  auto c = tiny_config();
  const auto [train, test] = prepare_data(c);
  const auto base = run_moment_baseline(c, train, test, 6, 1);
  EXPECT_EQ(base.feature_dim, 16u);  // Zernike orders with m >= 0 and n <= 6
  set_parameter(c, "family", "pca");
  EXPECT_THROW(run_moment_baseline(c, train, test, 6, 1), ConfigError);
  const auto pca = run_point(c, train, test, 1);
  EXPECT_EQ(pca.feature_dim, c.resolved_net().feature_dim());
  EXPECT_EQ(pca.net.family.tag, Family::PCA);
}
