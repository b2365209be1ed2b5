#include <doctest.h>

#include <cmath>

#include "tbo/common.hpp"
#include "tbo/config.hpp"
#include "tbo/experiments.hpp"

using namespace tbo;

TEST_CASE("parse and serialize round trip") {
  const std::string text =
      "# leading comment\n"
      "top = 1\n"
      "[objective]\n"
      "name = \"branin\"  # trailing\n"
      "noise_sd = 0.01\n"
      "[surrogate]\n"
      "lengthscales = [0.1, 0.2, 3]\n"
      "center = true\n"
      "[a.b]\n"
      "s = \"q\\\"uote\\n\"\n"
      "big = -9007199254740993\n"
      "x = inf\n"
      "e = 1e-3\n";
  const ConfigDoc doc = parse_config(text);
  REQUIRE(doc.find("objective", "name"));
  CHECK(doc.find("objective", "name")->s == "branin");
  CHECK(doc.find("", "top")->i == 1);
  CHECK(doc.find("surrogate", "lengthscales")->items.size() == 3);
  CHECK(doc.find("surrogate", "center")->b);
  CHECK(doc.find("a.b", "s")->s == "q\"uote\n");
  CHECK(doc.find("a.b", "big")->i == -9007199254740993LL);
  CHECK(std::isinf(doc.find("a.b", "x")->f));
  CHECK(doc.find("a.b", "e")->kind == ConfigValue::Kind::Float);
  CHECK(doc.find("objective", "missing") == nullptr);
  const ConfigDoc again = parse_config(serialize_config(doc));
  CHECK(again == doc);
  CHECK(serialize_config(again) == serialize_config(doc));

  ConfigDoc d;
  d.set("x", "v", ConfigValue::real(1.0));
  d.set("x", "w", ConfigValue::real(0.1));
  const ConfigDoc rd = parse_config(serialize_config(d));
  CHECK(rd.find("x", "v")->kind == ConfigValue::Kind::Float);
  CHECK(rd.find("x", "w")->f == 0.1);
}

TEST_CASE("parse errors name the line") {
  for (const std::string bad : {"[objective\nname = 1\n", "a = \n", "a = \"open\n", "a = [1, 2\n",
                                "= 3\n", "a = 1\na = 2\n", "a = 1 2\n"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_config(bad, "cfg.toml"), InputError);
  }
  try {
    parse_config("ok = 1\nbroken\n", "cfg.toml");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("cfg.toml:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_file("/nonexistent/x.toml"), InputError);
}

TEST_CASE("overrides") {
  ConfigDoc doc = parse_config("[run]\niterations = 3\n");
  apply_override(doc, "run.iterations=7");
  apply_override(doc, "acquisition.g=2.5");
  apply_override(doc, "objective.name=\"levy\"");
  apply_override(doc, "objective.table=data.csv");
  apply_override(doc, "a.b.c=[1, 2]");
  CHECK(doc.find("run", "iterations")->i == 7);
  CHECK(doc.find("acquisition", "g")->f == 2.5);
  CHECK(doc.find("objective", "name")->s == "levy");
  CHECK(doc.find("objective", "table")->s == "data.csv");
  CHECK(doc.find("a.b", "c")->items.size() == 2);
  CHECK_THROWS_AS(apply_override(doc, "noequals"), UsageError);
  CHECK_THROWS_AS(apply_override(doc, "=1"), UsageError);
}

TEST_CASE("typed reader") {
  const ConfigDoc doc = parse_config("[s]\ni = 3\nf = 0.5\nb = false\nstr = \"x\"\nextra = 1\n");
  ConfigReader r(doc);
  CHECK(r.get_double("s", "i", 0.0) == 3.0);
  CHECK(r.get_double("s", "f", 0.0) == 0.5);
  CHECK_FALSE(r.get_bool("s", "b", true));
  CHECK(r.get_string("s", "str", "") == "x");
  CHECK(r.get_int("s", "absent", 9) == 9);
  CHECK_THROWS_AS(r.get_int("s", "f", 0), UsageError);
  CHECK_THROWS_AS(r.reject_unknown(), UsageError);
  r.get_int("s", "extra", 0);
  CHECK_NOTHROW(r.reject_unknown());
}

TEST_CASE("run file") {
  const ConfigDoc doc = parse_config(
      "[objective]\nname = \"hartmann3\"\nnoise_sd = 0.02\n"
      "[acquisition]\ng = 2\n"
      "[schedule]\nmode = \"fixed\"\nalpha = 0.5\n"
      "[run]\nseed = 4\ndesign = \"uniform\"\n");
  const RunFile f = run_file_from_doc(doc);
  const BORunConfig c = resolve_run(f);
  CHECK(c.objective.name == "hartmann3");
  CHECK(c.objective.noise_sd == 0.02);
  CHECK(c.acquisition.g == 2.0);
  CHECK(c.schedule_mode == ScheduleMode::Fixed);
  CHECK(c.fixed_alpha == 0.5);
  CHECK(c.seed == 4);
  CHECK(c.design == DesignKind::Uniform);
  CHECK(c.init_size == default_init_size(3));
  CHECK(c.iterations == default_iterations(3));
  CHECK(c.hyperfit.mode == default_hyperfit(3).mode);
  CHECK_FALSE(c.record_timing);

  const RunFile back = run_file_from_doc(parse_config(serialize_config(run_file_to_doc(f))));
  CHECK(describe_config(resolve_run(back)) == describe_config(c));
  CHECK(resolve_run(back).seed == c.seed);

  CHECK_THROWS_AS(run_file_from_doc(parse_config("[run]\nseed = 1\n")), UsageError);
  CHECK_THROWS_AS(run_file_from_doc(parse_config("[objective]\nname = \"branin\"\nbogus = 1\n")), UsageError);
  CHECK_THROWS_AS(run_file_from_doc(parse_config("[objective]\nname = \"branin\"\n[schedule]\nmode = \"odd\"\n")),
                  UsageError);
  CHECK_THROWS_AS(resolve_run(run_file_from_doc(parse_config("[objective]\nname = \"branin\"\n[acquisition]\ng = -1\n"))),
                  UsageError);
  CHECK_THROWS_AS(resolve_run(run_file_from_doc(parse_config("[objective]\nname = \"nope\"\n"))), UsageError);
}

TEST_CASE("bench file") {
  const ConfigDoc doc = parse_config(
      "[bench]\nobjectives = [\"branin\", \"michalewicz:2\"]\ng = [1]\n"
      "modes = [\"adaptive\", \"fixed-0.5\"]\nseeds = 3\nbase_seed = 9\n");
  const BenchFile f = bench_file_from_doc(doc);
  REQUIRE(f.grid.objectives.size() == 2);
  CHECK(f.grid.objectives[1].name == "michalewicz");
  CHECK(f.grid.objectives[1].dim == 2);
  CHECK(f.grid.gs == std::vector<double>{1.0});
  CHECK(f.grid.modes[1].mode == ScheduleMode::Fixed);
  CHECK(f.grid.modes[1].fixed_alpha == 0.5);
  CHECK(f.grid.seeds == 3);
  CHECK(f.grid.base_seed == 9);
  CHECK_FALSE(f.grid.keep_hyperfit);
  const BenchFile back = bench_file_from_doc(parse_config(serialize_config(bench_file_to_doc(f))));
  CHECK(serialize_config(bench_file_to_doc(back)) == serialize_config(bench_file_to_doc(f)));

  CHECK(parse_sweep_mode("fixed-1").label == "fixed-1");
  CHECK(parse_sweep_mode("fixed-0.50").label == "fixed-0.5");
  CHECK(parse_sweep_mode("adaptive").mode == ScheduleMode::Adaptive);
  CHECK_THROWS_AS(parse_sweep_mode("fixed-2"), UsageError);
  CHECK_THROWS_AS(parse_sweep_mode("fixed-x"), UsageError);
  CHECK_THROWS_AS(parse_sweep_objective("sphere:zero"), UsageError);
  CHECK(parse_sweep_objective("sphere:3").dim == 3);
}
