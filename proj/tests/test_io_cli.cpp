#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fbent/cli.hpp"
#include "fbent/io.hpp"
#include "test_util.hpp"

using namespace fbent;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Value of a "key = value" line.
double field(const std::string& report, const std::string& key) {
  std::istringstream in(report);
  std::string line;
  const std::string prefix = key + " = ";
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return std::stod(line.substr(prefix.size()));
  FAIL("missing field " << key);
  return 0.0;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("fbent_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("matrix JSON round trip") {
  const Matrix m = testing::random_matrix(6, 6, 3);
  CHECK(io::parse_matrix_json(io::matrix_to_json(m)) == m);
  const fs::path dir = scratch_dir("json");
  io::write_matrix_json((dir / "m.json").string(), m);
  CHECK(io::read_matrix_json((dir / "m.json").string()) == m);
  CHECK_THROWS_AS(io::matrix_to_json(Matrix(3, 3)), ShapeError);
}

TEST_CASE("malformed matrix JSON") {
  try {
    io::parse_matrix_json("{\"n_modes\": 1, \"data\": [1, 0, 0");
    FAIL("expected a parse error");
  } catch (const io::FormatError& e) {
    CHECK(std::string(e.what()).find("at byte") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_matrix_json("[1, 2]"), io::FormatError);
  CHECK_THROWS_AS(io::parse_matrix_json("{\"data\": [1]}"), io::FormatError);
  CHECK_THROWS_AS(io::parse_matrix_json("{\"n_modes\": 1, \"data\": [1, 0, 0]}"), io::FormatError);
  CHECK_THROWS_AS(io::parse_matrix_json("{\"n_modes\": 1, \"ordering\": \"qqpp\", \"data\": [1, 0, 0, 1]}"),
                  io::FormatError);
  CHECK_THROWS_AS(io::parse_matrix_json("{\"n_modes\": 1, \"data\": [1, 0, \"x\", 1]}"), io::FormatError);
  CHECK_THROWS_AS(io::read_matrix_json("/nonexistent/sigma.json"), io::FormatError);
  CHECK(io::parse_matrix_json("{\"n_modes\": 1, \"data\": [1, 0, 0, 1]}") == Matrix::identity(2));
}

TEST_CASE("sweep CSV format") {
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(io::format_number(std::nan("")) == "nan");
  std::ostringstream os;
  SweepRow row;
  row.chi = 0.05;
  row.nu_free = 0.5;
  row.nu_local = 0.25;
  row.nu_bound = 0.125;
  row.mu1_star = 0.1;
  io::write_sweep_csv(os, {row});
  CHECK(os.str() == "chi,nu_free,nu_local,nu_bound,mu1_star,status\n0.05,0.5,0.25,0.125,0.1,ok\n");
  std::ostringstream combined;
  io::write_combined_sweep_csv(combined, {{"1:5", {row}}});
  CHECK(combined.str() ==
        "bipartition,chi,nu_free,nu_local,nu_bound,mu1_star,status\n1:5,0.05,0.5,0.25,0.125,0.1,ok\n");
}

TEST_CASE("cli bound") {
  const auto two = run_cli({"bound", "--modes", "2", "--chi", "0.45"});
  CHECK(two.code == cli::kOk);
  CHECK(field(two.out, "en_bound") == doctest::Approx(3.32).epsilon(0.005 / 3.32));
  CHECK(field(run_cli({"bound", "--modes", "2", "--chi", "0"}).out, "en_bound") == 0.0);
  CHECK(field(run_cli({"bound", "--modes", "6", "--chi", "0.08"}).out, "nu_sq_bound") == doctest::Approx(0.168));

  const auto unstable = run_cli({"bound", "--modes", "6", "--chi", "0.1"});
  CHECK(unstable.code == cli::kCheckFailed);
  CHECK(unstable.err.find("1/(2(N-1))") != std::string::npos);

  const auto json = run_cli({"bound", "--modes", "2", "--chi", "0.45", "--json"});
  CHECK(json.out.find("\"en_bound\"") != std::string::npos);
}

TEST_CASE("cli bound from a Hamiltonian file") {
  const fs::path dir = scratch_dir("hamiltonian");
  const auto h = (dir / "h.json").string();
  io::write_matrix_json(h, parametric_hamiltonian(2, 0.45).matrix());
  const auto r = run_cli({"bound", "--hamiltonian", h});
  CHECK(r.code == cli::kOk);
  CHECK(field(r.out, "en_bound") == doctest::Approx(parametric_bound(2, 0.45)));
  CHECK(run_cli({"bound", "--hamiltonian", h, "--drift", h}).code == cli::kInputError);
}

TEST_CASE("cli worked example") {
  const auto free = run_cli({"free", "--modes", "2", "--chi", "0.45"});
  CHECK(free.code == cli::kOk);
  CHECK(field(free.out, "log_negativity") == doctest::Approx(0.93).epsilon(0.005 / 0.93));
  CHECK(field(free.out, "closed_form") == doctest::Approx(std::log2(1.9)));

  const auto opt = run_cli({"optimal", "--modes", "2", "--chi", "0.45"});
  CHECK(opt.code == cli::kOk);
  CHECK(field(opt.out, "log_negativity") == doctest::Approx(3.32).epsilon(0.005 / 3.32));

  const auto local = run_cli({"local", "--modes", "2", "--chi", "0.45"});
  CHECK(local.code == cli::kOk);
  CHECK(field(local.out, "log_negativity") == doctest::Approx(2.12).epsilon(0.01 / 2.12));
  CHECK(field(local.out, "mu2_star") == field(local.out, "mu1_star"));
}

TEST_CASE("cli optimal output passes verify") {
  const fs::path dir = scratch_dir("verify");
  const auto prefix = (dir / "opt").string();
  REQUIRE(run_cli({"optimal", "--modes", "2", "--chi", "0.45", "--out", prefix}).code == cli::kOk);
  const auto u = io::read_matrix_json(prefix + ".unravelling.json");
  CHECK(min_eig_sym(SymMatrix(u)) > -1e-8);
  const auto v = run_cli({"verify", "--sigma", prefix + ".sigma.json", "--drift", prefix + ".drift.json"});
  CHECK(v.code == cli::kOk);
  CHECK(v.out.find("FAIL") == std::string::npos);
  CHECK(v.out.find("PASS feedback bound") != std::string::npos);

  const auto fprefix = (dir / "free").string();
  REQUIRE(run_cli({"free", "--modes", "3", "--chi", "0.2", "--bipartitions", "1:2", "--out", fprefix}).code ==
          cli::kOk);
  CHECK(run_cli({"verify", "--sigma", fprefix + ".sigma.json", "--drift", fprefix + ".drift.json"}).code ==
        cli::kOk);
}

TEST_CASE("cli verify failures") {
  const fs::path dir = scratch_dir("verify_bad");
  const auto sigma = (dir / "half.json").string();
  const auto drift = (dir / "drift.json").string();
  io::write_matrix_json(sigma, Matrix::identity(4) * 0.5);
  io::write_matrix_json(drift, reduced_drift(1, 1, 0.45).matrix());
  const auto bad = run_cli({"verify", "--sigma", sigma, "--drift", drift});
  CHECK(bad.code == cli::kCheckFailed);
  CHECK(bad.out.find("FAIL physical") != std::string::npos);

  const auto broken = (dir / "broken.json").string();
  std::ofstream(broken) << "{\"n_modes\": 2, \"data\": [1, 2,";
  const auto malformed = run_cli({"verify", "--sigma", broken, "--drift", drift});
  CHECK(malformed.code == cli::kInputError);
  CHECK(malformed.err.find("at byte") != std::string::npos);

  CHECK(run_cli({"verify", "--drift", drift}).code == cli::kInputError);
}

TEST_CASE("cli input errors") {
  CHECK(run_cli({}).code == cli::kInputError);
  CHECK(run_cli({"bogus"}).code == cli::kInputError);
  CHECK(run_cli({"bound", "--chi", "0.1"}).code == cli::kInputError);
  CHECK(run_cli({"bound", "--modes", "two", "--chi", "0.1"}).code == cli::kInputError);
  CHECK(run_cli({"free", "--modes", "4", "--chi", "0.1", "--bipartitions", "1:2"}).code == cli::kInputError);
  CHECK(run_cli({"sweep", "--chi-range", "0:0.1"}).code == cli::kInputError);
  CHECK(run_cli({"free", "--modes", "2", "--chi", "-1"}).code == cli::kInputError);
}

TEST_CASE("cli sweep") {
  const auto ones = run_cli({"sweep", "--modes", "6", "--bipartitions", "3:3", "--chi-range", "0:0:1"});
  CHECK(ones.code == cli::kOk);
  // mu1_star is only pinned to the optimizer tolerance.
  CHECK(ones.out.rfind("bipartition,chi,nu_free,nu_local,nu_bound,mu1_star,status\n3:3,0,1,1,1,", 0) == 0);
  CHECK(ones.out.substr(ones.out.size() - 4) == ",ok\n");

  const std::vector<std::string> args{"sweep", "--modes", "6", "--bipartitions", "1:5,2:4,3:3",
                                      "--chi-range", "0.001:0.099:12"};
  const auto first = run_cli(args);
  const auto second = run_cli(args);
  CHECK(first.code == cli::kOk);
  CHECK(first.out == second.out);

  const fs::path dir = scratch_dir("sweep");
  auto with_out = args;
  with_out.push_back("--out");
  with_out.push_back(dir.string());
  REQUIRE(run_cli(with_out).code == cli::kOk);
  CHECK(slurp(dir / "sweep_all.csv") == first.out);
  for (const char* name : {"sweep_1-5.csv", "sweep_2-4.csv", "sweep_3-3.csv"}) {
    const auto text = slurp(dir / name);
    CHECK(text.rfind("chi,nu_free,nu_local,nu_bound,mu1_star,status\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 13);
  }

  // Mostly beyond threshold: per-row status, nonzero exit.
  const auto unstable = run_cli({"sweep", "--modes", "6", "--chi-range", "0.05:0.2:10"});
  CHECK(unstable.code == cli::kCheckFailed);
  CHECK(unstable.out.find("unstable") != std::string::npos);
}
