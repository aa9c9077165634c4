#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "fracrot/cli.hpp"
#include "fracrot/rotation.hpp"
#include "test_support.hpp"

using namespace fracrot;
using fracrot::testing::Gen;
using fracrot::testing::mat;
using fracrot::testing::max_abs_diff;
using nlohmann::json;

namespace {

constexpr double kPiD = std::numbers::pi;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Mat3d matrix_of(const json& envelope) {
  const auto& v = envelope.at("result").at("values");
  REQUIRE(v.size() == 9);
  Mat3d m;
  for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = v[i].get<double>();
  return m;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<double> csv_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

const Mat3d kQuarterZ = mat({0, -1, 0, 1, 0, 0, 0, 0, 1});

}  // namespace

TEST_CASE("matrix subcommand") {
  const auto r = run({"matrix", "--axis", "0,0,1", "--angle", "1.5707963267948966", "--method", "closed"});
  REQUIRE(r.code == 0);
  const json env = json::parse(r.out);
  CHECK(env.at("command") == "matrix");
  CHECK(max_abs_diff(matrix_of(env), kQuarterZ) < 1e-16);
  CHECK(env.at("inputs").at("axis") == json::array({0.0, 0.0, 1.0}));
  CHECK(r.out.find("\"angle\":1.5707963267948966") != std::string::npos);
  CHECK_FALSE(env.contains("error_estimate"));

  // stable key order
  CHECK(r.out.rfind("{\"command\":\"matrix\",\"inputs\":{", 0) == 0);
  CHECK(r.out.find("\"result\"") < r.out.find("},\"method\":\"closed\"}"));

  const auto zero = run({"matrix", "--axis", "0,0,1", "--angle", "0"});
  REQUIRE(zero.code == 0);
  CHECK(matrix_of(json::parse(zero.out)) == Mat3d::Identity());
}

TEST_CASE("matrix methods agree and re-parse as rotations") {
  Gen gen(200);
  for (int i = 0; i < 12; ++i) {
    const Vec3d v = gen.uniform(0.5, 3) * gen.unit();
    const double theta = gen.uniform(-7, 7);
    const std::string axis = cli::format_number(v(0)) + "," + cli::format_number(v(1)) + "," +
                             cli::format_number(v(2));
    std::vector<Mat3d> results;
    for (const char* method : {"closed", "fracpow", "quadrature", "exp-generator", "oracle"}) {
      const auto r = run({"matrix", "--axis=" + axis, "--angle=" + cli::format_number(theta),
                          "--method", method});
      REQUIRE(r.code == 0);
      const Mat3d m = matrix_of(json::parse(r.out));
      CHECK_NOTHROW(Rotation<double>::checked(m, 1e-11));
      results.push_back(m);
    }
    for (std::size_t a = 0; a < results.size(); ++a)
      for (std::size_t b = a + 1; b < results.size(); ++b)
        CHECK(max_abs_diff(results[a], results[b]) < 1e-8);
  }
}

TEST_CASE("matrix echoes the normalized axis and honors --degrees") {
  const auto r = run({"matrix", "--axis", "0,0,5", "--angle", "90", "--degrees"});
  REQUIRE(r.code == 0);
  const json env = json::parse(r.out);
  CHECK(env.at("inputs").at("axis") == json::array({0.0, 0.0, 1.0}));
  CHECK(max_abs_diff(matrix_of(env), kQuarterZ) < 1e-15);
}

TEST_CASE("power subcommand") {
  const double h = std::sqrt(2.0) / 2;
  const Mat3d half = mat({h, -h, 0, h, h, 0, 0, 0, 1});

  const auto closed = run({"power", "--axis", "0,0,1", "--alpha", "0.5", "--method", "closed"});
  REQUIRE(closed.code == 0);
  CHECK(max_abs_diff(matrix_of(json::parse(closed.out)), half) < 1e-15);

  const auto zero = run({"power", "--axis", "1,2,3", "--alpha", "0"});
  REQUIRE(zero.code == 0);
  CHECK(max_abs_diff(matrix_of(json::parse(zero.out)), Mat3d::Identity()) == 0.0);

  const auto quad = run({"power", "--axis", "0,0,1", "--alpha", "0.5", "--method", "quadrature",
                         "--level", "7"});
  REQUIRE(quad.code == 0);
  const json env = json::parse(quad.out);
  CHECK(max_abs_diff(matrix_of(env), half) < 1e-8);
  REQUIRE(env.contains("error_estimate"));
  CHECK(env.at("error_estimate").get<double>() < 1e-10);
  CHECK(env.at("inputs").at("level") == 7);

  const auto wide = run({"power", "--axis", "0,0,1", "--alpha", "2.5", "--method", "closed"});
  REQUIRE(wide.code == 0);
  CHECK(max_abs_diff(matrix_of(json::parse(wide.out)), rodrigues(UnitAxis<double>(0, 0, 1), 5 * kPiD / 4).matrix()) < 1e-15);

  const auto csv = run({"power", "--axis", "0,0,1", "--alpha", "1", "--output", "csv"});
  REQUIRE(csv.code == 0);
  const auto rows = lines(csv.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "r11,r12,r13,r21,r22,r23,r31,r32,r33");
}

TEST_CASE("rotate, log, generator and semigroup subcommands") {
  const auto rot = run({"rotate", "--axis", "0,0,1", "--angle", "1.5707963267948966", "--vector", "1,0,0"});
  REQUIRE(rot.code == 0);
  const auto v = json::parse(rot.out).at("result").at("values");
  CHECK(std::abs(v[0].get<double>()) < 1e-16);
  CHECK(v[1].get<double>() == 1.0);

  const auto lg = run({"log", "--axis", "0,0,1", "--angle", "1.5707963267948966"});
  REQUIRE(lg.code == 0);
  CHECK(max_abs_diff(matrix_of(json::parse(lg.out)),
                     Mat3d(kPiD / 2 * mat({0, -1, 0, 1, 0, 0, 0, 0, 0}))) == 0.0);

  const auto gen = run({"generator", "--axis=-1,0,0"});
  REQUIRE(gen.code == 0);
  CHECK(matrix_of(json::parse(gen.out)) == mat({0, 0, 0, 0, 0, 1, 0, -1, 0}));

  const auto sg = run({"semigroup", "--axis", "0,0,1", "--time", "1"});
  REQUIRE(sg.code == 0);
  const Mat3d t = matrix_of(json::parse(sg.out));
  CHECK(t(2, 2) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(t(0, 0) == doctest::Approx(std::cos(1.0)).epsilon(1e-15));
}

TEST_CASE("interp emits CSV rows") {
  const auto r = run({"interp", "--axis", "0,0,1", "--from", "0", "--to", "1.5707963267948966", "--steps", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find('\r') == std::string::npos);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "index,theta,r11,r12,r13,r21,r22,r23,r31,r32,r33");
  const auto mid = csv_row(rows[2]);
  REQUIRE(mid.size() == 11);
  CHECK(mid[0] == 1.0);
  CHECK(mid[1] == kPiD / 4);
  const double h = std::sqrt(2.0) / 2;
  CHECK(std::abs(mid[2] - h) < 1e-15);
  CHECK(std::abs(mid[3] + h) < 1e-15);
  CHECK(std::abs(mid[10] - 1) < 1e-16);

  const auto js = run({"interp", "--axis", "0,0,1", "--from", "0", "--to", "1", "--steps", "4", "--output", "json"});
  REQUIRE(js.code == 0);
  CHECK(json::parse(js.out).at("result").at("rows").size() == 5);
}

TEST_CASE("convergence emits a CSV table") {
  const auto r = run({"convergence", "--axis", "0,0,1", "--alpha", "0.5", "--levels", "3,4,5,6,7,8"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == "level,nodes,frobenius_error");
  CHECK(csv_row(rows.back())[2] < 1e-10);
  CHECK(csv_row(rows[1])[0] == 3.0);
}

TEST_CASE("exit codes") {
  CHECK(run({"matrix", "--axis", "0,0,0", "--angle", "1"}).code == cli::kUsageError);
  CHECK(run({"matrix", "--axis", "1,2", "--angle", "1"}).code == cli::kUsageError);
  CHECK(run({"matrix", "--axis", "a,b,c", "--angle", "1"}).code == cli::kUsageError);
  CHECK(run({"power", "--axis", "0,0,1"}).code == cli::kUsageError);
  CHECK(run({"frobnicate"}).code == cli::kUsageError);
  CHECK(run({}).code == cli::kUsageError);
  CHECK(run({"matrix", "--axis", "0,0,1", "--angle", "1", "--method", "magic"}).code == cli::kUsageError);
  CHECK(run({"interp", "--axis", "0,0,1", "--from", "0", "--to", "1", "--steps", "0"}).code == cli::kUsageError);
  CHECK(run({"verify", "--suite", "everything"}).code == cli::kUsageError);
  CHECK(run({"convergence", "--axis", "0,0,1", "--alpha", "0.5", "--levels", "5,4"}).code == cli::kUsageError);

  const auto log_pi = run({"log", "--axis", "0,0,1", "--angle", "3.2"});
  CHECK(log_pi.code == cli::kEngineError);
  const json err = json::parse(log_pi.out);
  CHECK(err.at("error").at("kind") == "OutOfPrincipalDomain");

  const auto coarse = run({"power", "--axis", "0,0,1", "--alpha", "0.5", "--method", "quadrature", "--level", "2"});
  CHECK(coarse.code == cli::kEngineError);
  CHECK(json::parse(coarse.out).at("error").at("kind") == "QuadratureNotConverged");

  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("matrix") != std::string::npos);
}

TEST_CASE("verify subcommand") {
  const auto r = run({"verify", "--suite", "all", "--tol", "1e-8"});
  CHECK(r.code == cli::kSuccess);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() > 10);
  CHECK(rows[0] == "suite,property,max_error,bound,status");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].find(",pass") != std::string::npos);

  CHECK(run({"verify", "--suite", "rotation", "--tol", "1e-30"}).code == cli::kVerificationFailed);

  const auto js = run({"verify", "--suite", "fracpow", "--output", "json"});
  CHECK(js.code == 0);
  CHECK(json::parse(js.out).at("result").at("labels").size() ==
        json::parse(js.out).at("result").at("rows").size());
}

TEST_CASE("installed binary exit status") {
  const std::string cmd = std::string(FRACROT_CLI_PATH) + " verify --suite all --tol 1e-8 > /dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);

  const std::string bad = std::string(FRACROT_CLI_PATH) + " log --axis 0,0,1 --angle 4 > /dev/null";
  const int bad_status = std::system(bad.c_str());
  REQUIRE(WIFEXITED(bad_status));
  CHECK(WEXITSTATUS(bad_status) == 3);
}
