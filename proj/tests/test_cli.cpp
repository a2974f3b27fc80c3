#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lshape/cli.hpp"

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = lshape::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

bool has(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

} // namespace

TEST(Cli, OptimizeSym) {
  const auto r = run({"optimize", "sym", "--volume", "300", "--ratio", "2"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has(r.out, "B = 5.11 m")) << r.out;
  EXPECT_TRUE(has(r.out, "L = 10.22 m")) << r.out;
  EXPECT_TRUE(has(r.out, "H = 3.83 m")) << r.out;
  EXPECT_TRUE(has(r.out, "S = 234.89 m²")) << r.out;

  const auto j = run({"optimize", "sym", "--volume", "200", "--ratio-range", "3,4", "--format", "json"});
  EXPECT_EQ(j.status, 0) << j.err;
  const auto doc = nlohmann::json::parse(j.out);
  EXPECT_NEAR(doc["envelope"].get<double>(), 198.1156349, 1e-6);
}

TEST(Cli, OptimizeAsymBox) {
  const auto r = run({"optimize", "asym", "--volume", "200", "--ratio-ranges", "0.3,0.5,0.2,0.8"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has(r.out, "168.69")) << r.out;
  EXPECT_TRUE(has(r.out, "r1")) << r.out;

  const auto h = run({"optimize", "asym", "--volume", "3", "--ratios", "0.5,0.5", "--height", "1"});
  EXPECT_EQ(h.status, 0) << h.err;
  EXPECT_TRUE(has(h.out, "11.00")) << h.out;
}

TEST(Cli, ExitCodes) {
  const auto deg = run({"optimize", "sym", "--volume", "300", "--ratio", "1"});
  EXPECT_EQ(deg.status, 2);
  EXPECT_TRUE(has(deg.err, "degenerate")) << deg.err;

  EXPECT_EQ(run({"optimize", "sym", "--volume", "300"}).status, 2);
  EXPECT_EQ(run({"optimize", "sym", "--volume", "-5", "--ratio", "2"}).status, 2);
  EXPECT_EQ(run({"optimize", "asym", "--volume", "200", "--ratio-ranges", "0.3,0.5,0.2,0.8", "--height", "3"}).status, 2);
  EXPECT_EQ(run({"frobnicate"}).status, 2);
  EXPECT_EQ(run({}).status, 2);
  EXPECT_EQ(run({"--help"}).status, 0);
}

TEST(Cli, Degenerate) {
  const auto r = run({"degenerate", "--volume", "300"});
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(has(r.out, "8.43")) << r.out;
  EXPECT_TRUE(has(r.out, "4.22")) << r.out;
  EXPECT_TRUE(has(r.out, "213.41")) << r.out;
  EXPECT_TRUE(has(r.out, "warning")) << r.out;

  const auto h = run({"degenerate", "--volume", "0.5"});
  EXPECT_TRUE(has(h.out, "S = 3.00 m²")) << h.out;
  EXPECT_EQ(run({"degenerate", "--volume", "-1"}).status, 2);
  EXPECT_EQ(run({"degenerate", "--volume", "0"}).status, 2);
}

TEST(Cli, Analyze) {
  const auto r = run({"analyze", "--input", LSHAPE_DATA_DIR "/houses.json"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has(r.out, "ΔS(fixed ratios) = 6.6 m²")) << r.out;
  EXPECT_TRUE(has(r.out, "ΔS(fixed ratios) = 16.6 m²")) << r.out;

  const auto c = run({"analyze", "--input", LSHAPE_DATA_DIR "/houses.csv", "--report-format", "json"});
  EXPECT_EQ(c.status, 0) << c.err;
  EXPECT_EQ(nlohmann::json::parse(c.out).size(), 2u);

  const auto empty = run({"analyze", "--input", temp_file("lshape_empty.json", "[]")});
  EXPECT_EQ(empty.status, 0) << empty.err;
  EXPECT_TRUE(empty.out.empty());

  const auto typo = run({"analyze", "--input", temp_file("lshape_typo.csv", "name,L1,L2,B1,B2,Hgt,source\n")});
  EXPECT_EQ(typo.status, 2);
  EXPECT_TRUE(has(typo.err, "header")) << typo.err;

  const auto bad = run({"analyze", "--input",
                        temp_file("lshape_bad.json", R"([{"name":"x","L1":5,"L2":4,"B1":5,"B2":2,"H":3}])")});
  EXPECT_EQ(bad.status, 2);
  EXPECT_TRUE(has(bad.err, "degenerate wing 1")) << bad.err;

  EXPECT_EQ(run({"analyze", "--input", "/nonexistent/houses.json"}).status, 2);
}

TEST(Cli, SweepAndOutputFile) {
  const auto r = run({"sweep", "--figure", "fig3"});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has(r.out, "# minimum r=3 B=")) << r.out.substr(0, 200);
  EXPECT_TRUE(has(r.out, "\nr,B,value\n"));
  EXPECT_EQ(r.out, run({"sweep", "--figure", "fig3"}).out);

  EXPECT_EQ(run({"sweep", "--figure", "fig9"}).status, 2);
  EXPECT_EQ(run({"sweep", "--figure", "fig2", "--b-range", "5,2"}).status, 2);

  const auto path = (std::filesystem::temp_directory_path() / "lshape_fig6.json").string();
  const auto j = run({"--output", path, "sweep", "--figure", "fig6", "--format", "json", "--samples", "3"});
  EXPECT_EQ(j.status, 0) << j.err;
  EXPECT_TRUE(j.out.empty());
  std::ifstream in(path);
  const auto doc = nlohmann::json::parse(in);
  EXPECT_EQ(doc["values"].size(), 9u);
}

TEST(Cli, Check) {
  const auto r = run({"check", "--scenario", "asym-box", "--trials", "1"});
  EXPECT_EQ(r.status, 0) << r.out << r.err;
  EXPECT_TRUE(has(r.out, "asym-box")) << r.out;

  EXPECT_EQ(run({"check", "--scenario", "sym-fixed", "--trials", "100", "--seed", "7"}).status, 0);
  EXPECT_EQ(run({"check", "--scenario", "sym-fixed", "--trials", "3", "--seed", "7", "--perturb", "1e-3"}).status, 1);
  EXPECT_EQ(run({"check", "--scenario", "nope"}).status, 2);
  EXPECT_EQ(run({"check", "--trials", "0"}).status, 2);
}
