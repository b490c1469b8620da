#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "apc/estimators.hpp"
#include "apc/models.hpp"
#include "cli.hpp"

using namespace apc;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("apc_cli_test_" + name);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("angle expressions") {
  CHECK(cli::parse_angle("pi/2") == kPi / 2.0);
  CHECK(cli::parse_angle("3pi/2") == 3.0 * kPi / 2.0);
  CHECK(cli::parse_angle("-pi/2") == -kPi / 2.0);
  CHECK(cli::parse_angle("2*pi/3") == 2.0 * kPi / 3.0);
  CHECK(cli::parse_angle("pi") == kPi);
  CHECK(cli::parse_angle("0") == 0.0);
  CHECK(cli::parse_angle("1.25") == 1.25);
  CHECK(cli::parse_angle(" 2pi ") == 2.0 * kPi);
  CHECK_THROWS_AS(cli::parse_angle("pie"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_angle("x"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_angle(""), InvalidArgument);
}

TEST_CASE("simulate is deterministic") {
  const Result a = run({"simulate", "--model", "pma1:T=4", "--n", "720", "--seed", "1"});
  const Result b = run({"simulate", "--model", "pma1:T=4", "--n", "720", "--seed", "1"});
  CHECK(a.code == 0);
  CHECK(data_lines(a.out).size() == 720);
  CHECK(a.out == b.out);
  CHECK(a.out.find("# seed=1") != std::string::npos);
  CHECK(a.out.find("# model=pma1:T=4") != std::string::npos);
  CHECK(a.out.find("# start_index=0") != std::string::npos);
}

TEST_CASE("estimate round-trips a simulated file bit for bit") {
  const auto path = temp_file("series.txt");
  REQUIRE(run({"simulate", "--model", "pma1:T=4", "--n", "400", "--seed", "3", "--out", path.string()}).code == 0);
  const Result r = run({"estimate", "--input", path.string(), "--point", "pi,pi/2", "--point", "1.3,4.1",
                        "--Ln", "3"});
  REQUIRE(r.code == 0);
  const auto rows = data_lines(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "nu,omega,re,im,abs,coherence");

  const TimeSeries x = simulate(PeriodicMAModel::pma1(4), 400, 3);
  const Complex g = smoothed_bispectral(x, LagWindowSpec::truncated(), 3, {kPi, kPi / 2.0}).value;
  std::istringstream is(rows[1]);
  std::string nu, om, re, im;
  std::getline(is, nu, ',');
  std::getline(is, om, ',');
  std::getline(is, re, ',');
  std::getline(is, im, ',');
  CHECK(std::stod(re) == g.real());
  CHECK(std::stod(im) == g.imag());

  const cli::SeriesFile f = cli::read_series_file(path.string());
  CHECK(f.series.size() == 400);
  for (std::size_t i = 0; i < 400; ++i) CHECK(f.series[i] == x[i]);
  std::filesystem::remove(path);
}

TEST_CASE("series file start index header") {
  std::istringstream in("# start_index=17\n# seed=4\n1.5\n\n-2\n3e-1\n");
  const cli::SeriesFile f = cli::read_series(in);
  CHECK(f.series.start_index() == 17);
  CHECK(f.series.size() == 3);
  CHECK(f.series[2] == 0.3);
  CHECK(f.headers.at("seed") == "4");
}

TEST_CASE("scan produces g(g-1) rows with the documented schema") {
  const Result r = run({"scan", "--model", "ma2", "--n", "720", "--grid", "120", "--method", "subs-gamma", "--alpha",
                        "0.01", "--seed", "7", "--threads", "2"});
  REQUIRE(r.code == 0);
  const auto rows = data_lines(r.out);
  REQUIRE(rows.size() == 14281);
  CHECK(rows[0] == "s,t,nu,omega,statistic,critical,reject,status");
  CHECK(rows[1].rfind("1,2,", 0) == 0);
  CHECK(r.out.find("# seed=7") != std::string::npos);
  CHECK(r.out.find("# method=subs-gamma") != std::string::npos);
  CHECK(r.out.find("# b=80") != std::string::npos);
  CHECK(r.out.find("# centering=difference") != std::string::npos);
}

TEST_CASE("ci table over the nu sweep") {
  const Result r = run({"ci", "--model", "pma1:T=4", "--n", "500", "--lambda", "pi/2", "--conf", "0.95"});
  REQUIRE(r.code == 0);
  const auto rows = data_lines(r.out);
  REQUIRE(rows.size() == 121);
  CHECK(rows[0] == "k,nu,omega,truth,estimate,lo,hi,lo_clamped,hi_clamped");
  CHECK(r.out.find("# L_n=3") != std::string::npos);
  CHECK(r.out.find("# b=67") != std::string::npos);
}

TEST_CASE("json output") {
  const Result r = run({"ci", "--model", "pma1:T=4", "--n", "300", "--lambda", "pi", "--grid", "8", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["rows"].size() == 8);
  CHECK(j["config"]["seed"] == "1");
  const Result s = run({"simulate", "--model", "white", "--n", "10", "--format", "json"});
  CHECK(nlohmann::json::parse(s.out)["samples"].size() == 10);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"simulate", "--n", "10"}).code == 2);
  CHECK(run({"estimate", "--input", "/nonexistent/file.txt"}).code == 2);
  CHECK(run({"scan", "--model", "ma2", "--n", "720", "--method", "beta"}).code == 2);
  CHECK(run({"scan", "--model", "ma2", "--n", "720", "--centering", "mid"}).code == 2);
  CHECK(run({"scan", "--model", "ma2", "--n", "720", "--b", "800"}).code == 2);
  CHECK(run({"simulate", "--model", "ma2", "--n", "10", "--format", "xml"}).code == 2);
  CHECK(run({"--help"}).code == 0);

  const auto nan_path = temp_file("nan.txt");
  {
    std::ofstream f(nan_path);
    f << "1.0\nnan\n2.0\n";
  }
  CHECK(run({"estimate", "--input", nan_path.string(), "--Ln", "1"}).code == 2);

  const auto zero_path = temp_file("zero.txt");
  {
    std::ofstream f(zero_path);
    for (int i = 0; i < 100; ++i) f << "0\n";
  }
  const Result d = run({"ci", "--input", zero_path.string(), "--stat", "gamma", "--lambda", "pi/2"});
  CHECK(d.code == 3);
  CHECK(d.err.find("degenera") != std::string::npos);
  std::filesystem::remove(nan_path);
  std::filesystem::remove(zero_path);
}

}
