#include "sqfrob/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  sqfrob::RunConfig cfg;
  CLI::App app{"Squarefree values of f(a_p, p): local densities, constants and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sqfrob 0.1.0");

  const std::map<std::string, sqfrob::Format> formats{{"json", sqfrob::Format::json}, {"csv", sqfrob::Format::csv}};
  std::int64_t A = 0, B = 0;
  std::uint64_t x_max = 0, sample = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", cfg.output, "Report path (default: standard output)");
    sub->add_option("--format", cfg.format, "Report format")->transform(CLI::CheckedTransformer(formats));
    sub->add_flag("!--no-wall-clock", cfg.wall_clock, "Omit the wall_clock_seconds field");
  };
  auto poly = [&](CLI::App* sub) {
    sub->add_option("-f,--f", cfg.f, "Polynomial: sum of c*x^i*y^j terms, or koblitz / frobdisc")->required();
  };
  auto curve = [&](CLI::App* sub) {
    sub->add_option("--curve", cfg.curve, "Curve y^2 = x^3 + a x + b given as a,b (use --curve=-1,0 for a leading minus)")
        ->required()
        ->allow_extra_args(false);
  };
  auto ell = [&](CLI::App* sub) { sub->add_option("--ell-max", cfg.ell_max, "Truncation of the Euler product")->capture_default_str(); };
  auto xmax = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--x-max", x_max, "Largest prime examined (cap 10^6)");
    if (required) opt->required();
  };

  auto* cg = app.add_subcommand("constant-generic", "Truncated constant for f over all curves");
  poly(cg), ell(cg), common(cg);
  auto* cs = app.add_subcommand("constant-serre", "Truncated constant for f and one Serre curve");
  poly(cs), curve(cs), ell(cs), common(cs);
  auto* ap = app.add_subcommand("ap", "Traces of Frobenius for good primes 5 <= p <= x-max");
  curve(ap), xmax(ap, true), common(ap);
  auto* ps = app.add_subcommand("pi-sf", "Count primes with f(a_p, p) squarefree, with divisibility table");
  curve(ps), poly(ps), xmax(ps, true), ell(ps), common(ps);
  auto* fa = app.add_subcommand("family-average", "Average over curves with |a| <= A, |b| <= B");
  poly(fa), ell(fa), xmax(fa, false), common(fa);
  fa->add_option("--A", A, "Bound on |a|")->required();
  fa->add_option("--B", B, "Bound on |b|")->required();
  fa->add_option("--mode", cfg.mode, "constants or empirical")->check(CLI::IsMember({"constants", "empirical"}))->capture_default_str();
  fa->add_option("--sample", sample, "Evaluate a seeded random sample of this many curves");
  fa->add_option("--seed", cfg.seed, "Sampling seed")->capture_default_str();
  auto* vf = app.add_subcommand("verify", "Run the built-in oracle checks");
  common(vf);

  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  if (sub->get_option_no_throw("--x-max") && sub->count("--x-max")) cfg.x_max = x_max;
  if (sub == fa) {
    cfg.A = A;
    cfg.B = B;
    if (fa->count("--sample")) cfg.sample_size = sample;
  }
  return sqfrob::run(cfg, std::cout, std::cerr);
}
