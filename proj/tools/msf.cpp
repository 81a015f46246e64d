#include <iostream>

#include <CLI11.hpp>

#include "msf/cli.hpp"

int main(int argc, char** argv) {
  using namespace msf::cli;
  CLI::App app{"Forcing and generic models for sheaves of metric structures"};
  app.require_subcommand(1);
  bool json = false;
  bool timing = false;
  app.add_flag("--json", json, "print a JSON report");
  app.add_flag("--timing", timing, "append wall time to the report");

  std::string file;
  auto* validate = app.add_subcommand("validate", "check the sheaf axioms");
  validate->add_option("file", file)->required();

  ForceArgs fa;
  auto* force = app.add_subcommand("force", "decide a forcing query at a point or on an open set");
  force->add_option("file", fa.file)->required();
  auto* at = force->add_option("--at", fa.at, "point");
  auto* on = force->add_option("--on", fa.on, "open set: X, EMPTY or a+b");
  at->excludes(on);
  force->add_option("--cond", fa.cond, "condition, e.g. \"d(s,t) < 3/4\"")->required();
  force->add_option("--let", fa.lets, "VAR=SECTION binding")->allow_extra_args(false);

  std::string uf;
  auto* generic = app.add_subcommand("generic", "build the generic model of an ultrafilter");
  generic->add_option("file", file)->required();
  generic->add_option("--ultrafilter", uf, "at:POINT")->required();

  GmtArgs ga;
  auto* gmt = app.add_subcommand("gmt", "compare generic satisfaction with local forcing");
  gmt->add_option("file", ga.file)->required();
  auto* one = gmt->add_option("--ultrafilter", ga.ultrafilter, "at:POINT");
  auto* all = gmt->add_flag("--all", ga.all, "every regular-open ultrafilter");
  one->excludes(all);
  gmt->add_option("--depth", ga.depth, "formula weight bound");
  gmt->add_option("--quant", ga.quant, "quantifier bound");
  gmt->add_option("--eps", ga.eps, "comma-separated thresholds");

  auto* props = app.add_subcommand("props", "run every property suite");
  props->add_option("file", file)->required();

  for (auto* sub : {validate, force, generic, gmt, props}) {
    sub->add_flag("--json", json, "print a JSON report");
    sub->add_flag("--timing", timing, "append wall time to the report");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  Outcome o;
  if (*validate) o = timed([&] { return run_validate(file); }, timing);
  else if (*force) o = timed([&] { return run_force(fa); }, timing);
  else if (*generic) o = timed([&] { return run_generic(file, uf); }, timing);
  else if (*gmt) o = timed([&] { return run_gmt(ga); }, timing);
  else o = timed([&] { return run_props(file); }, timing);

  (o.exit_code == kInputError && !json ? std::cerr : std::cout) << render(o, json);
  return o.exit_code;
}
