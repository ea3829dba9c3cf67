// CLI contract checks that need the built binary:
//   - identical requests produce byte-identical documents;
//   - CSV and JSON encode the same numerical content;
//   - error paths exit nonzero with a one-line JSON record on stderr.
//
// Usage: cfdist_cli_checks --cli <path-to-cli-binary>

#include <array>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  std::printf("%s %s\n", ok ? "ok:" : "FAILED:", what.c_str());
  if (!ok) ++failures;
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& cmd) {
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int rc = pclose(pipe);
  r.exit_code = WEXITSTATUS(rc);
  return r;
}

bool close_rel(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  if (cli.empty()) {
    std::fprintf(stderr, "missing --cli argument\n");
    return 1;
  }

  const std::string request = " qform --lambdas 2,1,0.5 --probs 0.25,0.5,0.95 --x 0:20:50";

  // determinism
  const RunResult j1 = run(cli + request);
  const RunResult j2 = run(cli + request);
  expect(j1.exit_code == 0 && j1.out == j2.out, "identical request, byte-identical JSON");

  const RunResult c1 = run(cli + request + " --format csv");
  const RunResult c2 = run(cli + request + " --format csv");
  expect(c1.exit_code == 0 && c1.out == c2.out, "identical request, byte-identical CSV");

  // same numerical content in both formats (CSV carries 10 significant digits)
  const auto doc = nlohmann::json::parse(j1.out);
  std::vector<std::array<double, 3>> rows;
  std::vector<std::pair<double, double>> quantiles;
  std::istringstream csv(c1.out);
  std::string line;
  std::getline(csv, line);
  expect(line == "x,pdf,cdf", "CSV header is x,pdf,cdf");
  while (std::getline(csv, line)) {
    if (line.rfind("# quantile,", 0) == 0) {
      double p = 0.0, q = 0.0;
      std::sscanf(line.c_str(), "# quantile,%lf,%lf", &p, &q);
      quantiles.emplace_back(p, q);
    } else if (!line.empty() && line[0] != '#') {
      std::array<double, 3> row{};
      std::sscanf(line.c_str(), "%lf,%lf,%lf", &row[0], &row[1], &row[2]);
      rows.push_back(row);
    }
  }
  bool same = rows.size() == doc["x"].size() && quantiles.size() == doc["quantiles"].size();
  for (std::size_t i = 0; same && i < rows.size(); ++i)
    same = close_rel(rows[i][0], doc["x"][i]) && close_rel(rows[i][1], doc["pdf"][i]) &&
           close_rel(rows[i][2], doc["cdf"][i]);
  for (std::size_t i = 0; same && i < quantiles.size(); ++i)
    same = close_rel(quantiles[i].first, doc["quantiles"][i]["p"]) &&
           close_rel(quantiles[i].second, doc["quantiles"][i]["q"]);
  expect(same, "CSV and JSON agree numerically");

  // error contract: nonzero exit, one machine-readable line on stderr
  struct ErrCase {
    std::string args;
    int want_exit;
    std::string want_kind;
  };
  const ErrCase cases[] = {
      {" bartlett --nu 5 2>&1 >/dev/null", 1, "DomainError"},
      {" wilks --p 10 --q 2 --n 8 2>&1 >/dev/null", 1, "DomainError"},
      {" qform --lambdas 0,0 2>&1 >/dev/null", 1, "DomainError"},
      {" bartlett 2>&1 >/dev/null", 2, "UsageError"},  // missing --nu
      {" cvm --validate 2>&1 >/dev/null", 2, "UsageError"},
      {" bartlett --k 3 --nu 1,1 2>&1 >/dev/null", 2, "UsageError"},
      {" qform --lambdas 1 --x nonsense 2>&1 >/dev/null", 2, "UsageError"},
  };
  for (const auto& c : cases) {
    const RunResult r = run(cli + c.args);
    bool ok = r.exit_code == c.want_exit;
    const auto newline = r.out.find('\n');
    ok = ok && newline != std::string::npos && newline == r.out.size() - 1;
    if (ok) {
      const auto err = nlohmann::json::parse(r.out, nullptr, false);
      ok = !err.is_discarded() && err["error"] == c.want_kind && err.contains("message");
    }
    expect(ok, "error record for `" + c.args + "` (exit " + std::to_string(r.exit_code) + ")");
  }

  if (failures > 0) {
    std::printf("%d CLI check(s) failed\n", failures);
    return 1;
  }
  std::printf("all CLI checks passed\n");
  return 0;
}
