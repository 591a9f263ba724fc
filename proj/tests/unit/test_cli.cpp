#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

using qgraph::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(QGRAPH_DATA_DIR) + "/" + name; }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("classify") {
  auto r = run({"classify", data("lasso.json")});
  CHECK(r.code == 0);
  CHECK(r.out == "class=non-weyl V=1.000000 branch=(1-k)/(1+k) zero_size=false\n");
  r = run({"classify", data("lasso_quarter_flux.json")});
  CHECK(r.out == "class=non-weyl V=1.000000 branch=(1-k)/(1+k) zero_size=true\n");
  r = run({"classify", data("loop_one_lead.json")});
  CHECK(r.out == "class=weyl V=1.000000 branch=none zero_size=false\n");
  r = run({"classify", data("two_edge.json")});
  CHECK(r.code == 0);
  CHECK(r.out.find("zero_size") == std::string::npos);
  CHECK(r.out.find("V=2.500000") != std::string::npos);
}

TEST_CASE("input errors exit with 2") {
  auto r = run({"classify", data("invalid_dimension.json")});
  CHECK(r.code == 2);
  CHECK(r.err.find("dimension mismatch") != std::string::npos);
  CHECK(run({"classify", data("missing.json")}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"resonances", data("lasso.json")}).code == 2);
  CHECK(run({"resonances", data("lasso.json"), "--rect", "1,0,0,1"}).code == 2);
  CHECK(run({"sweep-flux", data("lasso.json"), "--edge", "3"}).code == 2);
}

TEST_CASE("resonances") {
  auto r = run({"resonances", data("lasso.json"), "--radius", "10"});
  CHECK(r.code == 0);
  CHECK(r.out == "re,im,multiplicity\n-6.283185,0.000000,1\n6.283185,0.000000,1\n");

  r = run({"resonances", data("lasso_third_flux.json"), "--radius", "7"});
  CHECK(r.out == "re,im,multiplicity\n-6.283185,-0.693147,1\n0.000000,-0.693147,1\n6.283185,-0.693147,1\n");

  r = run({"resonances", data("lasso_quarter_flux.json"), "--radius", "50"});
  CHECK(r.out == "re,im,multiplicity\n");

  r = run({"resonances", data("lasso_third_flux.json"), "--rect", "-10,10,-2,-0.1"});
  CHECK(lines(r.out).size() == 4);
}

TEST_CASE("output is identical across thread counts and runs") {
  const auto a = run({"resonances", data("two_edge.json"), "--radius", "25"});
  const auto b = run({"resonances", data("two_edge.json"), "--radius", "25", "--threads", "6"});
  const auto c = run({"resonances", data("two_edge.json"), "--radius", "25"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  CHECK(lines(a.out).size() > 10);
}

TEST_CASE("asymptotics") {
  auto r = run({"asymptotics", data("lasso.json"), "--rmin", "50", "--rmax", "400", "--steps", "8"});
  CHECK(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 10);
  CHECK(ls[0] == "R,N");
  CHECK(ls[1] == "50.000000,14");
  CHECK(ls[9].rfind("# W=0.50", 0) == 0);
  CHECK(ls[9].find("class=non-weyl consistent=true") != std::string::npos);

  r = run({"asymptotics", data("lasso_quarter_flux.json")});
  CHECK(lines(r.out).back().rfind("# W=0.000000", 0) == 0);

  r = run({"asymptotics", data("loop_one_lead.json")});
  CHECK(lines(r.out).back().rfind("# W=1.00", 0) == 0);
  CHECK(r.out.find("consistent=true") != std::string::npos);
}

TEST_CASE("kill-flux") {
  CHECK(run({"kill-flux", data("lasso.json")}).out == "phi=1.570796\n");
  CHECK(run({"kill-flux", data("lasso_quarter_flux.json")}).out == "phi=0.000000\n");
  CHECK(run({"kill-flux", data("loop_one_lead.json")}).out == "not-applicable reason=weyl\n");
  CHECK(run({"kill-flux", data("two_edge.json")}).code == 4);
}

TEST_CASE("sweep-flux") {
  auto r = run({"sweep-flux", data("lasso.json"), "--edge", "0", "--from", "0", "--to", "3.141592653589793", "--steps",
                "9", "--radius", "40"});
  CHECK(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 10);
  CHECK(ls[0] == "phi,count");
  CHECK(ls[5] == "1.570796,0");
  for (int i : {1, 2, 3, 4, 6, 7, 8, 9}) {
    const int count = std::stoi(ls[static_cast<std::size_t>(i)].substr(ls[static_cast<std::size_t>(i)].find(',') + 1));
    CHECK(count >= 12);
    CHECK(count <= 13);
  }

  const auto full = lines(run({"sweep-flux", data("lasso.json"), "--from", "0", "--to", "6.283185307179586", "--steps", "5",
                               "--radius", "30"}).out);
  CHECK(full[1].substr(full[1].find(',')) == full[5].substr(full[5].find(',')));

  const auto pos = run({"sweep-flux", data("lasso.json"), "--from", "0.2", "--to", "1.4", "--steps", "4"}).out;
  const auto neg = run({"sweep-flux", data("lasso.json"), "--from", "-0.2", "--to", "-1.4", "--steps", "4"}).out;
  const auto lp = lines(pos), ln = lines(neg);
  for (std::size_t i = 1; i < lp.size(); ++i) CHECK(lp[i].substr(lp[i].find(',')) == ln[i].substr(ln[i].find(',')));
}

TEST_CASE("--out writes the file") {
  const auto path = std::filesystem::temp_directory_path() / "qgraph_cli_out.csv";
  auto r = run({"resonances", data("lasso.json"), "--radius", "10", "--out", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().rfind("re,im,multiplicity\n", 0) == 0);
  std::filesystem::remove(path);
}
