#include <gtest/gtest.h>

#include <string>

#include "gmcf/config.hpp"
#include "gmcf/errors.hpp"

using namespace gmcf;

namespace {

std::string error_of(std::string_view text,
                     std::optional<RunMode> mode = std::nullopt) {
  try {
    parse_config(text, mode);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, MinimalCoupledGetsDefaults) {
  const auto c = parse_config("[runtime]\nmodels = driver:60, les:0.5\n");
  EXPECT_EQ(c.mode, RunMode::Coupled);
  ASSERT_EQ(c.models.size(), 2u);
  EXPECT_EQ(c.models[0].name, "driver");
  EXPECT_EQ(c.models[1].dt_seconds, 0.5);
  EXPECT_EQ(c.intervals, 5);
  EXPECT_EQ(c.les.im, 16);
  EXPECT_EQ(c.les.press_iter, 50);
  EXPECT_EQ(c.sor.n_iter, 50);
  EXPECT_EQ(c.execution, ExecutionMode::Threaded);
  EXPECT_EQ(c.model_id("les"), 2);
  EXPECT_FALSE(c.model_id("wrf"));
}

TEST(Config, CommentsAndWhitespace) {
  const auto c = parse_config(
      "# header\n\n[runtime]   # trailing\n  intervals =  3  \nseed=9\n",
      RunMode::SorBench);
  EXPECT_EQ(c.mode, RunMode::SorBench);
  EXPECT_EQ(c.intervals, 3);
  EXPECT_EQ(c.seed, 9u);
}

TEST(Config, TwinnedWithWorkersAccepted) {
  const auto c = parse_config("[sor]\nscheme = twinned\nworkers = 4\n", RunMode::SorBench);
  EXPECT_EQ(c.sor.scheme, SorScheme::Twinned);
  EXPECT_EQ(c.sor.workers, 4);
}

TEST(Config, RedBlackWithWorkersRejected) {
  const auto msg = error_of("[sor]\nscheme = redblack\nworkers = 4\n", RunMode::SorBench);
  EXPECT_NE(msg.find("unsupported combination"), std::string::npos) << msg;
  EXPECT_NE(msg.find("sor.workers"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, UnknownKeyNamesKeyAndLine) {
  const auto msg = error_of("[les]\nim = 8\nlambda = 3\n", RunMode::LesStandalone);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("lambda"), std::string::npos) << msg;
}

TEST(Config, UnknownSectionRejected) {
  EXPECT_FALSE(error_of("[wrf]\nx = 1\n", RunMode::SorBench).empty());
}

TEST(Config, TypeMismatchNamesKeyAndLine) {
  const auto msg = error_of("[sor]\n\nn_iter = fifty\n", RunMode::SorBench);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("sor.n_iter"), std::string::npos) << msg;
}

TEST(Config, CoupledModelSetChecks) {
  EXPECT_FALSE(error_of("[runtime]\nmodels = les:0.5\n").empty());
  EXPECT_FALSE(error_of("[runtime]\nmodels = driver:60, les:0.7\n").empty());
  EXPECT_FALSE(error_of("[runtime]\nmodels = driver:60, ocean:0.5\n").empty());
}

TEST(Config, ModeKeyAndOverride) {
  EXPECT_EQ(parse_config("[runtime]\nmode = boundary-audit\n").mode, RunMode::BoundaryAudit);
  EXPECT_FALSE(error_of("[runtime]\nmode = ocean\n").empty());
}

TEST(Config, DriverLevelsAreCellCentres) {
  const auto c = parse_config("[les]\nkm = 3\nh = 2\n", RunMode::LesStandalone);
  const auto d = c.driver_config();
  EXPECT_EQ(d.kp, 3);
  EXPECT_EQ(d.level_heights, (std::vector<float>{1.0f, 3.0f, 5.0f}));
}

TEST(RunMode, RoundTrip) {
  for (RunMode m : {RunMode::Coupled, RunMode::LesStandalone, RunMode::SorBench,
                    RunMode::BoundaryAudit}) {
    EXPECT_EQ(parse_run_mode(to_string(m)), m);
  }
  EXPECT_FALSE(parse_run_mode("bench"));
}
