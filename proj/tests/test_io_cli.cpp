#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdl/cli.hpp"
#include "qdl/io.hpp"
#include "qdl/scan.hpp"
#include "test_helpers.hpp"

using namespace qdl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("qdl_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream ss(s);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

double field(const std::string& csv_line, int idx) {
  std::istringstream ss(csv_line);
  std::string tok;
  for (int i = 0; i <= idx; ++i) std::getline(ss, tok, ',');
  return std::stod(tok);
}

}  // namespace

TEST_CASE("format_double is shortest round-trip") {
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(1.0) == "1");
  const double v = 0.1234567890123456789;
  CHECK(std::stod(io::format_double(v)) == v);
}

TEST_CASE("density matrix JSON round trip is entrywise exact") {
  std::mt19937_64 rng(88);
  TempDir dir;
  for (int it = 0; it < 5; ++it) {
    const auto rho = it == 0 ? preset_state<double>("x2") : testing::random_density(rng);
    const auto path = dir.file("state.json");
    io::write_density_json(path, rho);
    const auto back = io::read_density_json(path);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        CHECK(back(r, c).real() == rho(r, c).real());
        CHECK(back(r, c).imag() == rho(r, c).imag());
      }
  }
}

TEST_CASE("density matrix JSON reader validates") {
  auto j = io::density_to_json(preset_state<double>("x1"));
  SUBCASE("trace") {
    j["re"][0][0] = 0.011111;
    CHECK_THROWS_AS(io::density_from_json(j), Error);
  }
  SUBCASE("basis string") {
    j["basis"] = "mm,mp,pm,pp";
    CHECK_THROWS_AS(io::density_from_json(j), Error);
  }
  SUBCASE("shape") {
    j["im"] = {1, 2, 3};
    CHECK_THROWS_AS(io::density_from_json(j), Error);
  }
}

TEST_CASE("evolve CSV layout") {
  const auto pair = QubitPair<double>::ad({1, 1, 0}, {1, 1, 0});
  const auto trace = evolve_trace(pair, preset_state<double>("x2"), {1.0, 3});
  std::ostringstream os;
  io::write_evolve_csv(os, io::evolve_rows(trace));
  const auto lines = split_lines(os.str());
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "t,concurrence,p_abs,p_re,p_im,rho11,rho22,rho33,rho44,rho14_abs,rho23_abs");
  CHECK(field(lines[1], 0) == 0.0);
  CHECK(field(lines[1], 2) == 1.0);  // p(0) = 1
  CHECK(field(lines[3], 0) == 1.0);
  CHECK(os.str().find('\r') == std::string::npos);
}

TEST_CASE("spectrum CSV reader") {
  TempDir dir;
  const auto path = dir.file("spec.csv");
  {
    std::ofstream f(path);
    f << "omega,J\n0.0,0.1\n1.0,0.2\n2.0,0.05\n";
  }
  const auto rows = io::read_spectrum_csv(path);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].second == 0.2);

  {
    std::ofstream f(path);
    f << "0.0,0.1\n";
  }
  CHECK_THROWS_AS(io::read_spectrum_csv(path), Error);
}

TEST_CASE("cli evolve") {
  SUBCASE("x1 starts at the preset concurrence") {
    std::string out;
    const int code = run_cli({"evolve", "--channel", "ad", "--lambda", "0.01", "--delta", "0.01",
                              "--state", "x1", "--t-max", "1", "--n-points", "5"},
                             &out);
    CHECK(code == 0);
    const auto lines = split_lines(out);
    REQUIRE(lines.size() == 6);
    CHECK(field(lines[1], 1) ==
          doctest::Approx((6.0 - 2.0 * std::sqrt(2.0)) / 9.0).epsilon(1e-9));
  }
  SUBCASE("broadband phase damping decays monotonically") {
    std::string out;
    const int code = run_cli({"evolve", "--channel", "pd", "--lambda", "10", "--omega-c", "1",
                              "--state", "x2", "--t-max", "10", "--n-points", "50"},
                             &out);
    CHECK(code == 0);
    const auto lines = split_lines(out);
    double prev = 1e9;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const double c = field(lines[i], 1);
      CHECK(c <= prev + 1e-12);
      prev = c;
    }
  }
  SUBCASE("json format holds the same columns") {
    std::string out;
    CHECK(run_cli({"evolve", "--channel", "ad", "--lambda", "1", "--state", "x2", "--t-max", "1",
                   "--n-points", "4", "--format", "json"},
                  &out) == 0);
    const auto j = nlohmann::json::parse(out);
    CHECK(j.at("t").size() == 4);
    CHECK(j.at("concurrence")[0].get<double>() ==
          doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-9));
  }
  SUBCASE("svg emission") {
    TempDir dir;
    const auto svg = dir.file("trace.svg");
    CHECK(run_cli({"evolve", "--channel", "ad", "--lambda", "1", "--state", "x2", "--t-max", "5",
                   "--n-points", "20", "--out", dir.file("t.csv"), "--svg", svg}) == 0);
    std::ifstream f(svg);
    std::stringstream buf;
    buf << f.rdbuf();
    CHECK(buf.str().rfind("<svg", 0) == 0);
    CHECK(buf.str().find("polyline") != std::string::npos);
  }
  SUBCASE("asymmetric qubits are accepted") {
    std::string out;
    CHECK(run_cli({"evolve", "--channel", "ad", "--lambda", "0.5", "--lambda-b", "2.0", "--state",
                   "x1", "--t-max", "2", "--n-points", "8"},
                  &out) == 0);
    CHECK(split_lines(out).size() == 9);
  }
}

TEST_CASE("cli config errors exit 2") {
  std::string err;
  CHECK(run_cli({"evolve", "--channel", "ad", "--lambda", "1"}, nullptr, &err) == 2);  // no state
  CHECK(run_cli({"evolve", "--channel", "xx", "--lambda", "1", "--state", "x1"}, nullptr, &err) == 2);
  CHECK(run_cli({"evolve", "--channel", "ad", "--lambda", "1", "--state", "nope"}, nullptr, &err) == 2);
  CHECK(run_cli({"evolve", "--channel", "ad", "--lambda", "1", "--state", "x1", "--format", "xml"},
                nullptr, &err) == 2);
  CHECK(run_cli({"scan", "--channel", "ad", "--state", "x1", "--axis", "lambda", "--axis-points",
                 "1"},
                nullptr, &err) == 2);
  CHECK(run_cli({"scan", "--channel", "ad", "--state", "x1", "--axis", "sigma"}, nullptr, &err) == 2);
  CHECK(run_cli({"scan", "--channel", "ad", "--state", "x1", "--axis", "lambda", "--lambda", "2"},
                nullptr, &err) == 2);
  CHECK(run_cli({"bogus"}, nullptr, &err) == 2);
}

TEST_CASE("cli scan writes the long and summary tables") {
  TempDir dir;
  const auto out_path = dir.file("sweep.csv");
  const int code = run_cli({"scan",        "--channel",     "ad",
                            "--state",     "x1",            "--axis",
                            "lambda",      "--axis-min",    "0.01",
                            "--axis-max",  "10",            "--axis-points",
                            "4",           "--delta",       "0.01",
                            "--t-max",     "40",            "--n-points",
                            "600",         "--out",         out_path});
  CHECK(code == 0);
  std::ifstream f(out_path);
  REQUIRE(f.good());
  std::string header;
  std::getline(f, header);
  CHECK(header == "lambda,t,concurrence");
  std::size_t rows = 0;
  for (std::string line; std::getline(f, line);) ++rows;
  CHECK(rows == 4 * 600);

  std::ifstream s(dir.file("sweep_summary.csv"));
  REQUIRE(s.good());
  std::getline(s, header);
  CHECK(header == "lambda,regime,first_death_time,n_revivals");
  std::vector<std::string> lines;
  for (std::string line; std::getline(s, line);) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines.back().find("monotonic_decay") != std::string::npos);
}

TEST_CASE("sweep summary leaves the death field empty for undying rows") {
  SweepSpec<double> spec{.channel = ChannelKind::pd,
                         .rho0 = preset_state<double>("x2"),
                         .state_label = "x2"};
  spec.lambda = 0.01;
  spec.axis = SweepAxis::omega_c;
  spec.axis_min = 5.0;
  spec.axis_max = 10.0;
  spec.axis_points = 2;
  spec.grid = {30.0, 400};
  const auto surface = run_sweep(spec);
  std::ostringstream os;
  io::write_sweep_summary_csv(os, "omega_c", surface);
  const auto lines = split_lines(os.str());
  REQUIRE(lines.size() == 3);
  for (std::size_t i = 1; i < lines.size(); ++i)
    CHECK(lines[i].find(",,") != std::string::npos);  // no first death time
}

TEST_CASE("cli rejects parameters of the other channel") {
  std::string err;
  CHECK(run_cli({"evolve", "--channel", "ad", "--lambda", "1", "--state", "x1", "--omega-c", "2"},
                nullptr, &err) == 2);
  CHECK(run_cli({"evolve", "--channel", "pd", "--lambda", "1", "--state", "x1", "--delta", "2"},
                nullptr, &err) == 2);
}

TEST_CASE("cli validate flags an oversized step") {
  std::string out, err;
  const int code = run_cli({"validate", "--dt", "0.5"}, &out, &err);
  CHECK(code == 4);
  CHECK(err.find("validation failed") != std::string::npos);
  CHECK(out.find("FAIL") != std::string::npos);
}

TEST_CASE("cli presets lists the built-in states") {
  std::string out;
  CHECK(run_cli({"presets"}, &out) == 0);
  CHECK(out.find("x1") != std::string::npos);
  CHECK(out.find("bell_phi_plus") != std::string::npos);
  CHECK(out.find("0.9428") != std::string::npos);
}

TEST_CASE("cli config file seeds defaults and flags override") {
  TempDir dir;
  const auto cfg = dir.file("run.json");
  {
    std::ofstream f(cfg);
    f << R"({"channel": "ad", "lambda": 1.0, "state": "x2", "t_max": 2.0, "n_points": 7})";
  }
  std::string out;
  SUBCASE("config values are used") {
    CHECK(run_cli({"evolve", "--config", cfg, "--channel", "ad", "--lambda", "1", "--state", "x2"},
                  &out) == 0);
    CHECK(split_lines(out).size() == 8);  // header + 7 rows from the config
  }
  SUBCASE("flags win over the config") {
    CHECK(run_cli({"evolve", "--config", cfg, "--channel", "ad", "--lambda", "1", "--state", "x2",
                   "--n-points", "3"},
                  &out) == 0);
    CHECK(split_lines(out).size() == 4);
  }
  SUBCASE("unknown keys are rejected") {
    std::ofstream f(cfg);
    f << R"({"chanel": "ad"})";
    f.close();
    CHECK(run_cli({"evolve", "--config", cfg, "--channel", "ad", "--lambda", "1", "--state", "x1"}) ==
          2);
  }
}
