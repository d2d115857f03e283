#include "doctest.h"

#include "qcs/cli.hpp"

#include <sstream>

using qcs::cli::run;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 64") {
  CHECK(call({}).code == 64);
  CHECK(call({"bogus"}).code == 64);
  CHECK(call({"theta", "--no-such-flag"}).code == 64);
}

TEST_CASE("help exits 0") {
  const Run r = call({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("theta") != std::string::npos);
}

TEST_CASE("range violations exit 2 naming the constraint") {
  Run r = call({"theta", "--theta", "1.5"});
  CHECK(r.code == 2);
  CHECK(r.err.find("theta") != std::string::npos);
  r = call({"quotient", "--p", "12", "--samples", "100"});
  CHECK(r.code == 2);
  CHECK(r.err.find("p") != std::string::npos);
  r = call({"quotient", "--bubble", "-0.1", "--samples", "100"});
  CHECK(r.code == 2);
  CHECK(r.err.find("lambda") != std::string::npos);
}

TEST_CASE("integrate emits a versioned record") {
  const Run r = call({"integrate", "--samples", "20000", "--seed", "3"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["command"] == "integrate");
  CHECK(j["seed"] == 3);
  CHECK(j["results"].contains("std_error"));
  CHECK(std::abs(j["results"]["z_score"].get<double>()) < 4.0);
}

TEST_CASE("theta degree one through the CLI") {
  const Run r = call({"theta", "--ell", "1", "--theta", "0.8", "--N", "8", "--support-max", "4",
                      "--seeds", "1"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j["results"]["value"].get<double>() - 1.148698354997035) < 1e-3);
}

TEST_CASE("check suite passes") {
  const Run r = call({"check"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["results"]["all_passed"] == true);
}

TEST_CASE("fixed seed gives identical results") {
  const std::vector<std::string> args{"quotient", "--bubble", "0.3", "--samples", "5000", "--seed", "9"};
  const auto a = nlohmann::json::parse(call(args).out);
  const auto b = nlohmann::json::parse(call(args).out);
  CHECK(a["results"].dump() == b["results"].dump());
}

}
