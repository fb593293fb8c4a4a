// kpzairy: run the verification grids and print plot-ready tables.
//
//   kpzairy verify-theorem2 --C 0.6,1,1.4 --k-max 4
//   kpzairy verify-theorem1 --u 0.1,1,10 --format json --out t1.json
//   kpzairy tw-limit --T 8,64,512 --a -2,-1,0,1
//   kpzairy mc-check --samples 2000 --matrix-size 400 --seed 7
//
// Exit status: 0 when every row passes, 1 when some row fails, 2 on bad input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kpz/report.hpp"
#include "kpz/verify.hpp"

namespace {

using kpz::verify::Command;
using kpz::verify::RunConfig;

// "a,b,c" -> {a, b, c}; the empty string is the empty list.
std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw kpz::ConfigurationError(flag + ": cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

struct ListFlags {
  std::string C, T, u, a;
};

void add_common(CLI::App* sub, RunConfig& cfg, ListFlags& lists) {
  sub->add_option("--C", lists.C, "comma-separated C values (T = 2 C^3)")->expected(0, 1);
  sub->add_option("--T", lists.T, "comma-separated T values (C = (T/2)^(1/3))")->expected(0, 1);
  sub->add_option("--nodes", cfg.nodes, "quadrature nodes (per axis, or per Fredholm grid)");
  sub->add_option("--tol", cfg.tol, "override the command's default tolerance");
  sub->add_option("--format", cfg.format, "csv or json")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, kpz::verify::Format>{{"csv", kpz::verify::Format::Csv},
                                                     {"json", kpz::verify::Format::Json}},
          CLI::ignore_case));
  sub->add_option("--out", cfg.output_path, "output file (default: standard output)");
  sub->add_option("--threads", cfg.threads, "worker threads (0: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of the Airy point process / KPZ moment and Laplace transform identities"};
  app.require_subcommand(1);

  RunConfig cfg;
  ListFlags lists;

  auto* t2 = app.add_subcommand("verify-theorem2", "Airy-side E[h_k] against KPZ moments");
  add_common(t2, cfg, lists);
  t2->add_option("--k-max", cfg.k_max, "largest k (1..4)");

  auto* t1 = app.add_subcommand("verify-theorem1", "multiplicative statistic against the KPZ Laplace transform");
  add_common(t1, cfg, lists);
  t1->add_option("--u", lists.u, "comma-separated u values")->expected(0, 1);

  auto* tw = app.add_subcommand("tw-limit", "multiplicative statistic against F2 as T grows");
  add_common(tw, cfg, lists);
  tw->add_option("--a", lists.a, "comma-separated a values in [-6, 4]")->expected(0, 1);

  auto* mc = app.add_subcommand("mc-check", "Monte Carlo estimates against the analytic Airy side");
  add_common(mc, cfg, lists);
  mc->add_option("--u", lists.u, "comma-separated u values")->expected(0, 1);
  mc->add_option("--k-max", cfg.k_max, "largest k for h_k rows (0..3)");
  mc->add_option("--samples", cfg.samples, "number of matrix samples");
  mc->add_option("--matrix-size", cfg.matrix_size, "matrix size N");
  mc->add_option("--keep-top", cfg.keep_top, "rescaled eigenvalues kept per sample");
  mc->add_option("--seed", cfg.seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (t2->parsed()) cfg.command = Command::Theorem2;
  if (t1->parsed()) cfg.command = Command::Theorem1;
  if (tw->parsed()) cfg.command = Command::TwLimit;
  if (mc->parsed()) cfg.command = Command::McCheck;
  auto* sub = app.get_subcommands().front();

  std::vector<kpz::verify::VerificationRow> rows;
  try {
    if (sub->count("--C")) cfg.C_list = parse_list(lists.C, "--C");
    if (sub->count("--T")) cfg.T_list = parse_list(lists.T, "--T");
    if (sub->get_option_no_throw("--u") && sub->count("--u")) cfg.u_list = parse_list(lists.u, "--u");
    if (sub->get_option_no_throw("--a") && sub->count("--a")) cfg.a_list = parse_list(lists.a, "--a");
    rows = kpz::verify::run(cfg);
  } catch (const kpz::ConfigurationError& e) {
    std::cerr << "kpzairy: " << e.what() << "\n";
    return 2;
  } catch (const kpz::DomainError& e) {
    std::cerr << "kpzairy: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "kpzairy: " << e.what() << "\n";
    return 1;
  }

  const std::string text = cfg.format == kpz::verify::Format::Json
                               ? kpz::report::to_json(cfg.command, rows)
                               : kpz::report::to_csv(cfg.command, rows);
  if (cfg.output_path.empty()) {
    std::cout << text << std::flush;
  } else {
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) {
      std::cerr << "kpzairy: cannot open " << cfg.output_path << " for writing\n";
      return 2;
    }
    out << text;
  }

  bool ok = true;
  for (const auto& r : rows) {
    if (!r.pass) {
      ok = false;
      std::cerr << kpz::report::describe_failure(cfg.command, r) << "\n";
    }
  }
  return ok ? 0 : 1;
}
