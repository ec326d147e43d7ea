#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "chaoslab/constructions.hpp"
#include "chaoslab/forms.hpp"

using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(CHAOSLAB_CLI_PATH) + " " + args + " 2>/dev/null";
  std::array<char, 4096> buf{};
  CliResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    res.out.append(buf.data(), got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string temp_path(const std::string& name) {
  return "/tmp/chaoslab_test_" + name;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << content;
}

json result_of(const CliResult& r) {
  json j = json::parse(r.out);
  REQUIRE(j.contains("result"));
  REQUIRE(j.contains("manifest"));
  return j["result"];
}

}  // namespace

TEST_CASE("cli moment") {
  const std::string tensor = temp_path("r2.tensor");
  write_file(tensor, "2 2 2\n1 1\n1 -1\n");

  CliResult exact = run_cli("--json moment " + tensor + " --p 1");
  CHECK(exact.exit_code == 0);
  json res = result_of(exact);
  CHECK(res["value"].get<double>() == 2.0);
  CHECK(res["exact_power"].get<std::string>() == "32/16");
  CHECK(res["pattern_count"].get<int>() == 16);

  CliResult l2 = run_cli("--json moment " + tensor + " --p 2");
  CHECK(result_of(l2)["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-14));

  CliResult mc = run_cli("--json moment " + tensor + " --mode mc --samples 5000 --seed 3");
  json mres = result_of(mc);
  CHECK(mres["sample_count"].get<int>() == 5000);
  CHECK(mres.contains("stderr"));

  CliResult human = run_cli("moment " + tensor + " --p 1");
  CHECK(human.out.find("value=2") != std::string::npos);
  CHECK(human.out.find("exact=32/16") != std::string::npos);

  CHECK(run_cli("moment /nonexistent.tensor").exit_code == 2);

  const std::string bad = temp_path("bad.tensor");
  write_file(bad, "2 2 2\n1 1 1\n");
  CHECK(run_cli("moment " + bad).exit_code == 2);

  const std::string wide = temp_path("wide.tensor");
  std::string content = "1 30\n";
  for (int i = 0; i < 30; ++i) content += "1 ";
  write_file(wide, content);
  CHECK(run_cli("moment " + wide).exit_code == 3);

  // vec tensors go through the Euclidean path.
  const std::string vec = temp_path("basis.tensor");
  write_file(vec, "vec 1 2 2\n1 0\n0 1\n");
  CliResult vres = run_cli("--json moment " + vec + " --p 1");
  CHECK(result_of(vres)["value"].get<double>() ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
}

TEST_CASE("cli supnorm and rm") {
  const std::string form = temp_path("r2.form");
  write_file(form, "# R2\n1 1 1\n1 2 1\n2 1 1\n2 2 -1\n");
  CliResult sup = run_cli("--json supnorm " + form);
  CHECK(sup.exit_code == 0);
  CHECK(result_of(sup)["value"].get<double>() == 2.0);

  CliResult rm3 = run_cli("rm --m 3");
  CHECK(rm3.exit_code == 0);
  {
    std::istringstream in(rm3.out);
    chaoslab::SparseMultilinearForm f = chaoslab::parse_form(in);
    CHECK(f.monomials().size() == 16);
    CHECK(chaoslab::sup_norm(f).value == 4.0);
  }

  const std::string out4 = temp_path("r4.form");
  CliResult rm4 = run_cli("rm --m 4 --out " + out4);
  CHECK(rm4.exit_code == 0);
  chaoslab::SparseMultilinearForm f4 = chaoslab::parse_form_file(out4);
  CHECK(f4.monomials().size() == 64);
  CliResult sup4 = run_cli("--json supnorm " + out4);
  CHECK(result_of(sup4)["value"].get<double>() == 8.0);

  CHECK(run_cli("rm --m 9").exit_code == 2);
}

TEST_CASE("cli bound, slices, fit, search, ksz") {
  const std::string tensor = temp_path("r2b.tensor");
  write_file(tensor, "2 2 2\n1 1\n1 -1\n");
  CHECK(run_cli("bound --which prop --r 2 " + tensor).exit_code == 0);
  CHECK(run_cli("bound --which multik " + tensor).exit_code == 0);
  CHECK(run_cli("bound --which theorem1 --r 1 " + tensor).exit_code == 0);
  CHECK(run_cli("bound --which mixed --spec 1,1 " + tensor).exit_code == 0);
  CHECK(run_cli("bound --which prop --r 1 " + tensor).exit_code == 2);

  const std::string vec = temp_path("basisb.tensor");
  write_file(vec, "vec 1 2 2\n1 0\n0 1\n");
  CHECK(run_cli("bound --which contraction " + vec).exit_code == 0);
  CHECK(run_cli("bound --which kahane " + vec).exit_code == 0);
  CHECK(run_cli("bound --which hilbert --r 2 " + vec).exit_code == 0);

  const std::string r3 = temp_path("r3.form");
  run_cli("rm --m 3 --out " + r3);
  CliResult slices = run_cli("--json slices --form " + r3 + " --r 2");
  CHECK(slices.exit_code == 0);
  CHECK(result_of(slices)["bound"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));

  const std::string csv = temp_path("fit.csv");
  write_file(csv, "n,value\n2,1.4142135623730951\n4,2\n8,2.8284271247461903\n16,4\n");
  CliResult fit = run_cli("--json fit --csv " + csv);
  CHECK(fit.exit_code == 0);
  CHECK(result_of(fit)["slope"].get<double>() == doctest::Approx(0.5).epsilon(1e-9));

  CliResult search = run_cli(
      "--json search --m 2 --n 2 --strategy exhaustive-signs --r 1 --p 1");
  CHECK(search.exit_code == 0);
  CHECK(result_of(search)["best_ratio"].get<double>() ==
        doctest::Approx(4.0).epsilon(1e-12));

  CliResult sweep = run_cli(
      "--json sweep --m 1 --r 1 --p 1 --n 2,4,8,16,32,64 --strategy product-ones");
  CHECK(sweep.exit_code == 0);
  const double slope = result_of(sweep)["slope"].get<double>();
  CHECK(slope > 0.4);
  CHECK(slope < 0.6);

  CliResult ksz = run_cli("--json ksz --m 1 --n 5 --budget 10 --seed 1");
  CHECK(ksz.exit_code == 0);
  CHECK(result_of(ksz)["k_hat"].get<double>() == doctest::Approx(1.0).epsilon(1e-13));

  const std::string trace = temp_path("trace.csv");
  CliResult traced = run_cli("search --m 1 --n 4 --strategy sign-coordinate-ascent "
                             "--budget 30 --seed 2 --trace-csv " + trace);
  CHECK(traced.exit_code == 0);
  std::ifstream tf(trace);
  std::string header;
  while (std::getline(tf, header) && !header.empty() && header[0] == '#') {
  }
  CHECK(header == "n,value");
}

TEST_CASE("cli determinism across thread counts") {
  const std::string tensor = temp_path("det.tensor");
  write_file(tensor, "2 3 3\n1 -2 3\n0 1 -1\n2 2 -3\n");

  json a = result_of(run_cli("--threads 1 --json moment " + tensor + " --p 1"));
  json b = result_of(run_cli("--threads 2 --json moment " + tensor + " --p 1"));
  CHECK(a.dump() == b.dump());

  json ka = result_of(run_cli("--threads 1 --json ksz --m 2 --n 4 --budget 40 --seed 9"));
  json kb = result_of(run_cli("--threads 2 --json ksz --m 2 --n 4 --budget 40 --seed 9"));
  CHECK(ka.dump() == kb.dump());

  json sa = result_of(run_cli(
      "--threads 1 --json search --m 1 --n 5 --strategy annealing --budget 80 --seed 4 --restarts 2"));
  json sb = result_of(run_cli(
      "--threads 2 --json search --m 1 --n 5 --strategy annealing --budget 80 --seed 4 --restarts 2"));
  CHECK(sa.dump() == sb.dump());

  // Same command twice: identical up to the wall-time manifest field.
  auto strip = [](json j) {
    j["manifest"].erase("wall_ms");
    return j.dump();
  };
  json full1 = json::parse(run_cli("--json moment " + tensor + " --p 1").out);
  json full2 = json::parse(run_cli("--json moment " + tensor + " --p 1").out);
  CHECK(strip(full1) == strip(full2));
}
