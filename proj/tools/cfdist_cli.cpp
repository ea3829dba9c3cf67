// Command line front end: builds the characteristic function of a named test
// statistic, inverts it to PDF/CDF/quantiles, and emits the result as JSON or
// CSV. A validation mode cross-checks the inverted CDF against the Monte
// Carlo oracle with a Kolmogorov-Smirnov test.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfdist/cfdist.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

// 1% critical value of the one-sample KS statistic, asymptotic form.
constexpr double ks_critical_coef_1pct = 1.63;

struct CommonOpts {
  std::vector<double> probs;
  std::string x_spec;  // "min:max:count"
  std::optional<double> x_min, x_max;
  int n_nodes = 1000;
  double sigma_rule = 6.0;
  std::string format = "json";
  std::string output;
  bool validate = false;
  std::uint64_t seed = 1;
  std::size_t n_sim = 100000;
};

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& m) : std::runtime_error(m) {}
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--probs", o.probs, "quantile probabilities, comma separated")->delimiter(',');
  sub->add_option("--x", o.x_spec, "evaluation grid min:max:count (default: 100 points over the domain)");
  sub->add_option("--xmin", o.x_min, "override the lower end of the inversion domain");
  sub->add_option("--xmax", o.x_max, "override the upper end of the inversion domain");
  sub->add_option("--n-nodes", o.n_nodes, "quadrature nodes (default 1000)");
  sub->add_option("--sigma-rule", o.sigma_rule, "domain half width in standard deviations (default 6)");
  sub->add_option("--format", o.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--output", o.output, "output path (default: standard output)");
  sub->add_flag("--validate", o.validate, "run the Monte Carlo oracle and report the KS verdict");
  sub->add_option("--seed", o.seed, "oracle seed (default 1)");
  sub->add_option("--n-sim", o.n_sim, "oracle sample count (default 100000)");
}

std::vector<double> parse_x_spec(const std::string& spec) {
  double lo = 0.0, hi = 0.0;
  long count = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' || count < 2 ||
      !(hi > lo) || !in.eof())
    throw UsageError("--x expects min:max:count with max > min and count >= 2");
  std::vector<double> x(count);
  for (long i = 0; i < count; ++i)
    x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return x;
}

// Shortest round-trip decimal representation, capped at 10 significant digits.
std::string format_csv_double(double v) {
  char buf[64];
  auto shortest = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, shortest.ptr);
  int significant = 0;
  bool leading = true;
  for (char ch : s) {
    if (ch == 'e' || ch == 'E') break;
    if (ch < '0' || ch > '9') continue;
    if (leading && ch == '0') continue;
    leading = false;
    ++significant;
  }
  if (significant <= 10) return s;
  auto capped = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10);
  return std::string(buf, capped.ptr);
}

struct ValidationReport {
  std::size_t n_sim = 0;
  std::uint64_t seed = 0;
  double ks = 0.0;
  double critical = 0.0;
  bool pass = false;
};

ordered_json result_to_json(const ordered_json& spec_block, const cfdist::ResolvedGrid& grid,
                            const cfdist::DistributionResult& result,
                            const std::vector<std::pair<double, double>>& approx_quantiles,
                            const std::optional<ValidationReport>& validation) {
  ordered_json doc;
  doc["spec"] = spec_block;
  doc["grid"] = {{"domain", {grid.domain_lo, grid.domain_hi}},
                 {"delta_t", grid.delta_t},
                 {"t_max", grid.t_max},
                 {"n_nodes", static_cast<int>(grid.nodes.size()) - 1},
                 {"mean", grid.mean},
                 {"std", grid.std_dev}};
  doc["x"] = result.x;
  doc["pdf"] = result.pdf;
  doc["cdf"] = result.cdf;
  doc["quantiles"] = ordered_json::array();
  for (const auto& [p, q] : result.quantiles) doc["quantiles"].push_back({{"p", p}, {"q", q}});
  if (!approx_quantiles.empty()) {
    doc["quantiles_chi2_approx"] = ordered_json::array();
    for (const auto& [p, q] : approx_quantiles)
      doc["quantiles_chi2_approx"].push_back({{"p", p}, {"q", q}});
  }
  doc["diagnostics"] = {{"tail_cf_magnitude", result.diagnostics.tail_cf_magnitude},
                        {"raw_pdf_min", result.diagnostics.raw_pdf_min},
                        {"raw_cdf_min", result.diagnostics.raw_cdf_min},
                        {"raw_cdf_max", result.diagnostics.raw_cdf_max},
                        {"warnings", result.diagnostics.warnings}};
  if (validation.has_value()) {
    doc["validation"] = {{"n_sim", validation->n_sim},
                         {"seed", validation->seed},
                         {"ks_distance", validation->ks},
                         {"critical_value_1pct", validation->critical},
                         {"pass", validation->pass}};
  }
  return doc;
}

std::string result_to_csv(const cfdist::DistributionResult& result,
                          const std::vector<std::pair<double, double>>& approx_quantiles,
                          const std::optional<ValidationReport>& validation) {
  std::string out = "x,pdf,cdf\n";
  for (std::size_t i = 0; i < result.x.size(); ++i) {
    out += format_csv_double(result.x[i]);
    out += ',';
    out += format_csv_double(result.pdf[i]);
    out += ',';
    out += format_csv_double(result.cdf[i]);
    out += '\n';
  }
  for (const auto& [p, q] : result.quantiles)
    out += "# quantile," + format_csv_double(p) + ',' + format_csv_double(q) + '\n';
  for (const auto& [p, q] : approx_quantiles)
    out += "# quantile_chi2_approx," + format_csv_double(p) + ',' + format_csv_double(q) + '\n';
  if (validation.has_value()) {
    out += "# validation,ks_distance," + format_csv_double(validation->ks) + '\n';
    out += "# validation,critical_value_1pct," + format_csv_double(validation->critical) + '\n';
    out += std::string("# validation,pass,") + (validation->pass ? "true" : "false") + '\n';
  }
  return out;
}

void emit(const std::string& body, const CommonOpts& o) {
  if (o.output.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream f(o.output, std::ios::binary);
  if (!f) throw cfdist::Error("IoError", "cannot open output file: " + o.output);
  f << body;
}

void run_statistic(const cfdist::StatisticSpec& spec, ordered_json spec_block,
                   const CommonOpts& o,
                   const std::vector<std::pair<double, int>>& chi2_approx_df = {}) {
  const cfdist::CharacteristicFunction cf = cfdist::make_cf(spec);

  cfdist::InversionOptions opts;
  opts.n_nodes = o.n_nodes;
  opts.sigma_rule = o.sigma_rule;
  opts.x_min = o.x_min;
  opts.x_max = o.x_max;

  std::optional<std::vector<double>> x;
  if (!o.x_spec.empty()) x = parse_x_spec(o.x_spec);

  const cfdist::ResolvedGrid grid = cfdist::resolve_grid(cf, opts);
  const cfdist::DistributionResult result = cfdist::cf2dist(cf, x, o.probs, opts);

  // side-by-side chi-square approximate quantiles, where the statistic has one
  std::vector<std::pair<double, double>> approx;
  for (const auto& [p, df] : chi2_approx_df) approx.emplace_back(p, cfdist::chi2_quantile(p, df));
  if (const auto* w = std::get_if<cfdist::WilksSpec>(&spec); w && w->coef == -1.0)
    for (double p : o.probs)
      approx.emplace_back(p, cfdist::wilks_chi2_approx_quantile(p, w->p, w->n, w->q));

  std::optional<ValidationReport> validation;
  if (o.validate) {
    cfdist::SimulationConfig config;
    config.n_samples = o.n_sim;
    config.seed = o.seed;
    const cfdist::SampleSummary sim = cfdist::simulate(spec, config);
    ValidationReport report;
    report.n_sim = o.n_sim;
    report.seed = o.seed;
    report.ks = cfdist::ks_distance(sim.samples, [&grid](double v) {
      const double pt[1] = {v};
      return cfdist::invert_cdf(pt, grid)[0];
    });
    report.critical = ks_critical_coef_1pct / std::sqrt(static_cast<double>(o.n_sim));
    report.pass = report.ks < report.critical;
    validation = report;
  }

  std::string body;
  if (o.format == "json")
    body = result_to_json(spec_block, grid, result, approx, validation).dump(2) + "\n";
  else
    body = result_to_csv(result, approx, validation);
  emit(body, o);
}

void register_statistics(CLI::App* parent, bool force_validate);

void run_chi2_quantile(double df, const CommonOpts& o) {
  if (o.probs.empty()) throw UsageError("chi2-quantile requires --probs");
  std::vector<std::pair<double, double>> qs;
  for (double p : o.probs) qs.emplace_back(p, cfdist::chi2_quantile(p, df));

  if (o.format == "json") {
    ordered_json doc;
    doc["spec"] = {{"statistic", "chi2-quantile"}, {"df", df}};
    doc["quantiles"] = ordered_json::array();
    for (const auto& [p, q] : qs) doc["quantiles"].push_back({{"p", p}, {"q", q}});
    emit(doc.dump(2) + "\n", o);
  } else {
    std::string body = "p,quantile\n";
    for (const auto& [p, q] : qs)
      body += format_csv_double(p) + ',' + format_csv_double(q) + '\n';
    emit(body, o);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact distributions of multivariate test statistics via numerical CF inversion"};
  app.require_subcommand(1);
  try {
    register_statistics(&app, /*force_validate=*/false);

    CLI::App* validate = app.add_subcommand(
        "validate", "run a statistic and cross-check it against the Monte Carlo oracle");
    validate->require_subcommand(1);
    register_statistics(validate, /*force_validate=*/true);

    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << ordered_json{{"error", "UsageError"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << ordered_json{{"error", "UsageError"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  } catch (const cfdist::Error& e) {
    std::cerr << ordered_json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << ordered_json{{"error", "InternalError"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}

namespace {

void register_statistics(CLI::App* parent, bool force_validate) {
  // bartlett
  {
    auto o = std::make_shared<CommonOpts>();
    auto nu = std::make_shared<std::vector<double>>();
    auto k = std::make_shared<int>(0);
    CLI::App* sub = parent->add_subcommand("bartlett", "variance-homogeneity statistic");
    sub->add_option("--k", *k, "number of groups (cross-checked against --nu)");
    sub->add_option("--nu", *nu, "per-group degrees of freedom, comma separated")
        ->delimiter(',')
        ->required();
    add_common(sub, *o);
    sub->callback([o, nu, k, force_validate]() {
      if (force_validate) o->validate = true;
      if (*k != 0 && *k != static_cast<int>(nu->size()))
        throw UsageError("--k disagrees with the number of --nu entries");
      std::vector<std::pair<double, int>> approx;
      for (double p : o->probs) approx.emplace_back(p, static_cast<int>(nu->size()) - 1);
      ordered_json spec_block = {
          {"statistic", "bartlett"}, {"k", static_cast<int>(nu->size())}, {"nu", *nu}};
      run_statistic(cfdist::BartlettSpec{*nu}, spec_block, *o, approx);
    });
  }

  // wilks
  {
    auto o = std::make_shared<CommonOpts>();
    auto p = std::make_shared<int>(0);
    auto q = std::make_shared<int>(0);
    auto n = std::make_shared<int>(0);
    auto raw = std::make_shared<bool>(false);
    CLI::App* sub = parent->add_subcommand(
        "wilks", "-log determinant-ratio statistic (group-mean equality layout by default)");
    sub->add_option("--p", *p, "dimension")->required();
    sub->add_option("--q", *q, "number of groups (raw: hypothesis degrees of freedom)")->required();
    sub->add_option("--n", *n, "total sample count (raw: error degrees of freedom)")->required();
    sub->add_flag("--raw", *raw, "interpret (p, n, q) directly instead of mapping to (p, n-q, q-1)");
    add_common(sub, *o);
    sub->callback([o, p, q, n, raw, force_validate]() {
      if (force_validate) o->validate = true;
      const int n_eff = *raw ? *n : *n - *q;
      const int q_eff = *raw ? *q : *q - 1;
      ordered_json spec_block = {{"statistic", "wilks"}, {"p", *p},    {"q", *q},
                                 {"n", *n},              {"raw", *raw}, {"effective_n", n_eff},
                                 {"effective_q", q_eff}};
      run_statistic(cfdist::WilksSpec{*p, n_eff, q_eff, -1.0}, spec_block, *o);
    });
  }

  // wilks-cs
  {
    auto o = std::make_shared<CommonOpts>();
    auto p = std::make_shared<int>(0);
    auto q = std::make_shared<int>(0);
    auto n = std::make_shared<int>(0);
    CLI::App* sub = parent->add_subcommand(
        "wilks-cs", "-log statistic under a compound-symmetry covariance constraint");
    sub->add_option("--p", *p, "dimension")->required();
    sub->add_option("--q", *q, "number of groups")->required();
    sub->add_option("--n", *n, "total sample count")->required();
    add_common(sub, *o);
    sub->callback([o, p, q, n, force_validate]() {
      if (force_validate) o->validate = true;
      ordered_json spec_block = {{"statistic", "wilks-cs"}, {"p", *p}, {"q", *q}, {"n", *n}};
      run_statistic(cfdist::WilksCsSpec{*p, *n, *q}, spec_block, *o);
    });
  }

  // qform
  {
    auto o = std::make_shared<CommonOpts>();
    auto lambdas = std::make_shared<std::vector<double>>();
    CLI::App* sub = parent->add_subcommand("qform", "quadratic form in standard normals");
    sub->add_option("--lambdas", *lambdas, "eigenvalues, comma separated")
        ->delimiter(',')
        ->required();
    add_common(sub, *o);
    sub->callback([o, lambdas, force_validate]() {
      if (force_validate) o->validate = true;
      ordered_json spec_block = {{"statistic", "qform"}, {"lambdas", *lambdas}};
      run_statistic(cfdist::QuadFormSpec{*lambdas}, spec_block, *o);
    });
  }

  // cvm / ad
  for (const bool is_cvm : {true, false}) {
    auto o = std::make_shared<CommonOpts>();
    auto terms = std::make_shared<int>(0);
    CLI::App* sub =
        is_cvm ? parent->add_subcommand("cvm", "limiting Cramer-von Mises statistic")
               : parent->add_subcommand("ad", "limiting Anderson-Darling statistic");
    sub->add_option("--terms", *terms,
                    "evaluate the truncated weighted chi-square product with this many terms "
                    "instead of the closed form");
    add_common(sub, *o);
    sub->callback([o, terms, is_cvm, force_validate]() {
      if (force_validate) o->validate = true;
      if (o->validate)
        throw UsageError("no Monte Carlo oracle is shipped for this statistic");
      const std::string name = is_cvm ? "cvm" : "ad";
      ordered_json spec_block = {{"statistic", name}};
      if (*terms > 0) spec_block["terms"] = *terms;
      if (*terms > 0) {
        const int J = *terms;
        const cfdist::CharacteristicFunction base =
            is_cvm ? cfdist::make_cvm_cf() : cfdist::make_ad_cf();
        cfdist::CharacteristicFunction cf(
            [J, is_cvm](double t) {
              return is_cvm ? cfdist::cf_cvm_product(t, J) : cfdist::cf_ad_product(t, J);
            },
            base.support_min(), base.moment_hint());
        cfdist::InversionOptions opts;
        opts.n_nodes = o->n_nodes;
        opts.sigma_rule = o->sigma_rule;
        opts.x_min = o->x_min;
        opts.x_max = o->x_max;
        std::optional<std::vector<double>> x;
        if (!o->x_spec.empty()) x = parse_x_spec(o->x_spec);
        const cfdist::ResolvedGrid grid = cfdist::resolve_grid(cf, opts);
        const cfdist::DistributionResult result = cfdist::cf2dist(cf, x, o->probs, opts);
        std::string body;
        if (o->format == "json")
          body = result_to_json(spec_block, grid, result, {}, std::nullopt).dump(2) + "\n";
        else
          body = result_to_csv(result, {}, std::nullopt);
        emit(body, *o);
        return;
      }
      if (is_cvm)
        run_statistic(cfdist::CvmSpec{}, spec_block, *o);
      else
        run_statistic(cfdist::AdSpec{}, spec_block, *o);
    });
  }

  // log-beta
  {
    auto o = std::make_shared<CommonOpts>();
    auto alpha = std::make_shared<double>(0.0);
    auto beta = std::make_shared<double>(0.0);
    auto coef = std::make_shared<double>(1.0);
    CLI::App* sub = parent->add_subcommand("log-beta", "coef * log of a beta variable");
    sub->add_option("--alpha", *alpha, "first beta shape")->required();
    sub->add_option("--beta", *beta, "second beta shape")->required();
    sub->add_option("--coef", *coef, "coefficient on log(B) (default 1)");
    add_common(sub, *o);
    sub->callback([o, alpha, beta, coef, force_validate]() {
      if (force_validate) o->validate = true;
      if (o->validate) throw UsageError("no Monte Carlo oracle is shipped for this statistic");
      ordered_json spec_block = {
          {"statistic", "log-beta"}, {"alpha", *alpha}, {"beta", *beta}, {"coef", *coef}};
      run_statistic(cfdist::LogBetaSpec{*alpha, *beta, *coef}, spec_block, *o);
    });
  }

  // chi2-quantile
  {
    auto o = std::make_shared<CommonOpts>();
    auto df = std::make_shared<double>(0.0);
    CLI::App* sub = parent->add_subcommand(
        "chi2-quantile", "chi-square quantiles via the library's own inversion engine");
    sub->add_option("--df", *df, "degrees of freedom")->required();
    add_common(sub, *o);
    sub->callback([o, df, force_validate]() {
      if (force_validate) throw UsageError("chi2-quantile has no validation mode");
      run_chi2_quantile(*df, *o);
    });
  }

}

}  // namespace
