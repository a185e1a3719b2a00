#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <regex>
#include <set>

#include <fmt/core.h>

#include "doctest.h"
#include "riemannopt/error.hpp"
#include "riemannopt/harness/config.hpp"
#include "riemannopt/harness/dataset.hpp"
#include "riemannopt/harness/experiment.hpp"
#include "riemannopt/harness/io.hpp"
#include "riemannopt/harness/plots.hpp"
#include "test_util.hpp"

using namespace riemannopt;
using namespace riemannopt::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("riemannopt_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small, fast experiment on 8x8 images.
ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c;
  c.dataset.height = 8;
  c.dataset.width = 8;
  c.dataset.count = 10;
  c.calibration_size = 4;
  c.probes = 9;
  c.sample_counts = {2, 4};
  c.gig_steps = 8;
  c.insertion_steps = 4;
  c.output = out.string();
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd =
      fmt::format("\"{}\" {} >/dev/null 2>&1", RIEMANNOPT_CLI_PATH, args);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Tag balance and prolog check; enough to catch malformed output.
bool well_formed_svg(const std::string& text) {
  if (text.rfind("<?xml", 0) != 0) return false;
  std::vector<std::string> stack;
  const std::regex tag(R"(<(/?)([a-zA-Z]+)[^>]*?(/?)>)");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), tag);
       it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[3] == "/") continue;
    if (m[1] == "/") {
      if (stack.empty() || stack.back() != m[2]) return false;
      stack.pop_back();
    } else {
      stack.push_back(m[2]);
    }
  }
  return stack.empty() && text.find("</svg>") != std::string::npos;
}

std::set<std::string> tick_positions(const std::string& svg, const std::string& color) {
  std::set<std::string> xs;
  const std::regex line("<line x1=\"([0-9.]+)\"[^>]*stroke=\"" + color +
                        "\" stroke-width=\"1.5\"/>");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), line);
       it != std::sregex_iterator(); ++it) {
    xs.insert((*it)[1]);
  }
  return xs;
}

}  // namespace

TEST_CASE("config: defaults, comments and overrides") {
  const ExperimentConfig d = parse_config("");
  CHECK(d.methods.size() == 3);
  CHECK(d.sample_counts == std::vector<std::size_t>{16, 32, 64});
  CHECK(d.calibration_size == 32);
  CHECK(d.probes == 64);
  CHECK(d.bound == BoundRule::kIntegral);

  const ExperimentConfig c = parse_config(
      "# experiment\n"
      "model = linear   # trailing comment\n"
      "methods = ig, blurig\n"
      "sample_counts = 4,8\n"
      "dataset.generator = checker\n"
      "dataset.height = 12\n"
      "bound = left-point\n"
      "powell.tol = 1e-9\n"
      "\n"
      "seed = 5\n");
  CHECK(c.model == ModelKind::kLinear);
  CHECK(c.methods == std::vector<Method>{Method::kIg, Method::kBlurIg});
  CHECK(c.sample_counts == std::vector<std::size_t>{4, 8});
  CHECK(c.dataset.generator == Generator::kChecker);
  CHECK(c.dataset.height == 12);
  CHECK(c.bound == BoundRule::kLeftPoint);
  CHECK(c.powell.tol == 1e-9);
  CHECK(c.seed == 5);
  CHECK(c.dataset.seed == 5);
}

TEST_CASE("config: seed overrides respect a pinned dataset seed") {
  ExperimentConfig a = parse_config("dataset.seed = 9\nseed = 3\n");
  CHECK(a.dataset.seed == 9);
  ExperimentConfig b = parse_config("seed = 3\ndataset.seed = 9\n");
  CHECK(b.dataset.seed == 9);
  apply_seed(b, 11);
  CHECK(b.seed == 11);
  CHECK(b.dataset.seed == 9);
  ExperimentConfig c = parse_config("");
  apply_seed(c, 11);
  CHECK(c.dataset.seed == 11);
}

TEST_CASE("config: errors") {
  CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("probes = 8\nprobes = 9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("probes 8\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("probes = eight\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("probes = 8x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("methods = ig, sg\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("sample_counts = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("calibration_size = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("gig.fraction = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("bound = midpoint\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("model = resnet\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("dataset.count = 32\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("model.hidden = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("output =\n"), ConfigError);
  try {
    parse_config("\n\nbogus = 1\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/riemannopt.cfg"), IoError);
}

TEST_CASE("format_real round-trips") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.uniform(-60, 60)));
    CHECK(std::stod(format_real(v)) == v);
  }
  CHECK(format_real(0.25) == "0.25");
  CHECK(format_real(1.0) == "1");
}

TEST_CASE("pgm: P2 read with comments") {
  const fs::path dir = scratch("pgm2");
  write_text(dir / "a.pgm", "P2\n# comment\n3 2\n# another\n4\n0 1 2\n3 4 0\n");
  const InputVector img = read_pgm(dir / "a.pgm");
  REQUIRE(img.shape());
  CHECK(img.shape()->height == 2);
  CHECK(img.shape()->width == 3);
  CHECK(img.vector() == std::vector<double>{0, 0.25, 0.5, 0.75, 1, 0});
}

TEST_CASE("pgm: P5 round trip at 8 and 16 bits") {
  const fs::path dir = scratch("pgm5");
  Rng rng(4);
  const auto img = riemannopt::testing::random_image(rng, 5, 7);
  for (int maxval : {255, 65535}) {
    write_pgm(dir / "b.pgm", img, maxval);
    const InputVector back = read_pgm(dir / "b.pgm");
    CHECK(back.shape() == img.shape());
    CHECK(riemannopt::testing::max_abs_diff(back.vector(), img.vector()) <=
          0.5 / maxval + 1e-15);
    write_pgm(dir / "c.pgm", back, maxval);
    CHECK(read_pgm(dir / "c.pgm") == back);
  }
}

TEST_CASE("pgm: malformed files") {
  const fs::path dir = scratch("pgmbad");
  write_text(dir / "magic.pgm", "P3\n1 1\n255\n0\n");
  write_text(dir / "short.pgm", "P2\n2 2\n255\n0 1 2\n");
  write_text(dir / "over.pgm", "P2\n1 1\n10\n11\n");
  write_text(dir / "trunc5.pgm", std::string("P5\n2 2\n255\n\x01\x02", 13));
  write_text(dir / "zero.pgm", "P2\n0 2\n255\n");
  for (const char* name : {"magic", "short", "over", "trunc5", "zero"}) {
    CAPTURE(name);
    CHECK_THROWS_AS(read_pgm(dir / (std::string(name) + ".pgm")), IoError);
  }
  CHECK_THROWS_AS(read_pgm(dir / "missing.pgm"), IoError);
  CHECK_THROWS_AS(write_pgm(dir / "x.pgm", InputVector({0.5})), InputShapeError);
}

TEST_CASE("schedule file format") {
  CHECK(format_schedule(AlphaSchedule::uniform(4)) ==
        "k=4 terminal=1.0\n0\n0.25\n0.5\n0.75\n");
  const AlphaSchedule s({0.0, 0.1, 0.30000000000000004, 0.9});
  CHECK(parse_schedule(format_schedule(s)) == s);
  CHECK_THROWS_AS(parse_schedule("k=3 terminal=1.0\n0\n0.5\n"), IoError);
  CHECK_THROWS_AS(parse_schedule("k=2 terminal=1.0\n0\n1.5\n"), IoError);
  CHECK_THROWS_AS(parse_schedule("k=2 terminal=1.0\n0.5\n0.1\n"), IoError);
  CHECK_THROWS_AS(parse_schedule("k=1 terminal=2.0\n0\n"), IoError);
  CHECK_THROWS_AS(parse_schedule("n=1 terminal=1.0\n0\n"), IoError);
  CHECK_THROWS_AS(parse_schedule(""), IoError);
}

TEST_CASE("profile file round trip") {
  const DerivativeProfile p({0.1, 0.5, 0.9}, {0.0, 2.5, 1.0 / 3.0});
  const DerivativeProfile q = parse_profile(format_profile(p));
  CHECK(std::vector<double>(q.knots().begin(), q.knots().end()) ==
        std::vector<double>(p.knots().begin(), p.knots().end()));
  CHECK(std::vector<double>(q.magnitudes().begin(), q.magnitudes().end()) ==
        std::vector<double>(p.magnitudes().begin(), p.magnitudes().end()));
  CHECK_THROWS_AS(parse_profile("knots=2\n0.1 1\n"), IoError);
  CHECK_THROWS_AS(parse_profile("knots=1\n0.1 -1\n"), IoError);
}

TEST_CASE("weight file round trip reproduces the model") {
  MlpInit init;
  init.input_dim = 5;
  init.hidden1 = 3;
  init.hidden2 = 2;
  const MlpParameters p = init_mlp(init);
  const std::string text = format_weights(p);
  CHECK(text.rfind("layers 5 3 2 1 sigmoid\n", 0) == 0);
  const MlpParameters q = parse_weights("# saved weights\n" + text);
  CHECK(q == p);
  Rng rng(1);
  const TinyMlp a(p), b(q);
  for (int i = 0; i < 10; ++i) {
    const auto x = riemannopt::testing::random_vector(rng, 5);
    CHECK(a.evaluate(x) == b.evaluate(x));
  }
  CHECK_THROWS_AS(parse_weights("layers 2 1 1 1 sigmoid\n1 2\n"), IoError);
  CHECK_THROWS_AS(parse_weights(text + "7\n"), IoError);
  CHECK_THROWS_AS(parse_weights("layers 1 1 1 1 relu\n1 1 1 1 1 1\n"), IoError);
  CHECK_THROWS_AS(parse_weights("layers 1 1 1 2 sigmoid\n"), IoError);
}

TEST_CASE("csv quoting round trip") {
  const CsvRow header{"name", "value"};
  const std::vector<CsvRow> rows{{"plain", "1"}, {"a,b", "say \"hi\""}, {"two\nlines", ""}};
  const std::string text = format_csv(header, rows);
  CHECK(text.rfind("name,value\r\nplain,1\r\n\"a,b\",\"say \"\"hi\"\"\"\r\n", 0) == 0);
  const auto back = parse_csv(text);
  REQUIRE(back.size() == 4);
  CHECK(back[0] == header);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i + 1] == rows[i]);
  CHECK_THROWS_AS(parse_csv("\"open"), IoError);
  CHECK_THROWS_AS(format_csv(header, {{"one"}}), DomainError);
}

TEST_CASE("dataset: determinism, range and shape") {
  DatasetSpec spec;
  spec.count = 0;
  CHECK(generate_dataset(spec).empty());
  spec.count = 6;
  for (Generator g : {Generator::kGaussianBlob, Generator::kBars, Generator::kChecker}) {
    spec.generator = g;
    const auto a = generate_dataset(spec);
    const auto b = generate_dataset(spec);
    CHECK(a == b);
    for (const auto& img : a) {
      REQUIRE(img.shape());
      CHECK(img.shape()->height == spec.height);
      CHECK(img.shape()->width == spec.width);
      for (double v : img.values()) CHECK((v >= 0.0 && v <= 1.0));
    }
    spec.seed += 1;
    CHECK(generate_dataset(spec) != a);
  }
  spec.height = 0;
  CHECK_THROWS_AS(generate_dataset(spec), DomainError);
}

TEST_CASE("dataset: noiseless blobs follow the Gaussian formula") {
  DatasetSpec spec;
  spec.noise = 0.0;
  spec.count = 5;
  spec.height = 9;
  spec.width = 13;
  for (const auto& s : generate_samples(spec)) {
    CHECK(s.sigma > 0.0);
    for (std::size_t r = 0; r < spec.height; r += 2) {
      for (std::size_t c = 0; c < spec.width; c += 3) {
        const double dy = static_cast<double>(r) - s.center_y;
        const double dx = static_cast<double>(c) - s.center_x;
        const double expected = std::exp(-(dy * dy + dx * dx) / (2 * s.sigma * s.sigma));
        CHECK(s.image[r * spec.width + c] == doctest::Approx(expected).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("dataset: export and load") {
  const fs::path dir = scratch("dataset");
  DatasetSpec spec;
  spec.count = 3;
  const auto images = generate_dataset(spec);
  export_dataset(dir, images);
  const auto back = load_dataset(dir);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(riemannopt::testing::max_abs_diff(back[i].vector(), images[i].vector()) <=
          0.5 / 65535 + 1e-15);
  }
  spec.dir = dir.string();
  CHECK(dataset_images(spec).size() == 3);
  CHECK_THROWS_AS(load_dataset(dir / "nope"), IoError);
}

TEST_CASE("calibration: linear model on the IG path gives uniform schedules") {
  const fs::path out = scratch("calib_linear");
  ExperimentConfig c = small_config(out);
  c.model = ModelKind::kLinear;
  c.methods = {Method::kIg};
  const CalibrationResult r = run_calibration(c);
  REQUIRE(r.methods.size() == 1);
  CHECK(r.methods[0].profile.max() <= 1e-12);
  for (const auto& s : r.methods[0].schedules) {
    CHECK(s.optimized.schedule == AlphaSchedule::uniform(s.k));
    CHECK(read_schedule(layout::schedule(out, Method::kIg, s.k)) ==
          AlphaSchedule::uniform(s.k));
  }

  // Linear model rows have zero completeness error for both schedule kinds.
  const auto rows = run_evaluation(c);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(row.error.mean <= 1e-10);
    CHECK(row.error.count == 6);
  }

  // A zero profile plots its optimized ticks on top of the uniform ones.
  emit_plots(c);
  const std::string svg = read_text(layout::plots_dir(out) / "profile_ig.svg");
  const auto uniform_ticks = tick_positions(svg, "#777");
  CHECK(uniform_ticks.size() == 2);
  CHECK(tick_positions(svg, "#d62728") == uniform_ticks);
}

TEST_CASE("calibration: cost accounting and determinism") {
  const fs::path out_a = scratch("calib_a");
  const fs::path out_b = scratch("calib_b");
  ExperimentConfig c = small_config(out_a);
  const CalibrationResult r = run_calibration(c);
  REQUIRE(r.methods.size() == 3);
  for (const auto& m : r.methods) {
    CHECK(m.gradient_evals == static_cast<long>(c.calibration_size * c.probes));
    CHECK(m.example_magnitudes.size() == c.calibration_size);
    if (m.method == Method::kGig) {
      CHECK(m.path_gradient_evals > 0);
      CHECK(m.path_gradient_evals <= static_cast<long>(c.calibration_size * c.gig_steps));
    } else {
      CHECK(m.path_gradient_evals == 0);
    }
    for (const auto& s : m.schedules) {
      CHECK(s.optimized.bound <= s.optimized.uniform_bound);
      CHECK(s.half_split_max_diff >= 0.0);
    }
  }
  c.output = out_b.string();
  run_calibration(c);
  for (Method m : c.methods) {
    for (std::size_t k : c.sample_counts) {
      CHECK(read_text(layout::schedule(out_a, m, k)) ==
            read_text(layout::schedule(out_b, m, k)));
    }
    CHECK(read_text(layout::profile(out_a, m)) == read_text(layout::profile(out_b, m)));
  }
  CHECK(read_text(layout::calibration(out_a)) == read_text(layout::calibration(out_b)));
  CHECK(read_text(layout::generalization(out_a)) ==
        read_text(layout::generalization(out_b)));
}

TEST_CASE("evaluation: rows, determinism and missing schedules") {
  const fs::path out = scratch("eval");
  ExperimentConfig c = small_config(out);
  CHECK_THROWS_AS(run_evaluation(c), ConfigError);
  run_calibration(c);
  const auto rows = run_evaluation(c);
  REQUIRE(rows.size() == 12);
  for (const auto& row : rows) {
    CHECK(row.error.count >= 1);
    CHECK(row.gradient_evals == static_cast<long>(row.k * row.error.count));
    CHECK(row.mean_curve.size() == c.insertion_steps + 1);
    if (row.method == Method::kGig) CHECK(row.path_gradient_evals > 0);
  }
  const std::string first = read_text(layout::results(out));
  run_evaluation(c);
  CHECK(read_text(layout::results(out)) == first);
  const auto table = parse_csv(first);
  CHECK(table.size() == 13);
  CHECK(table[0][0] == "method");

  // A schedule file with the wrong size is a configuration error.
  write_schedule(layout::schedule(out, Method::kIg, 2), AlphaSchedule::uniform(3));
  CHECK_THROWS_AS(run_evaluation(c), ConfigError);
}

TEST_CASE("evaluation: quadratic 1D uniform k=4 error is 0.25") {
  // A 1x1 image of value 1: IG integrates f(x) = x^2 from 0 to 1.
  const fs::path out = scratch("quadratic");
  const fs::path data = out / "data";
  for (int i = 0; i < 3; ++i) {
    write_pgm(data / fmt::format("p{}.pgm", i), InputVector({1.0}, ImageShape{1, 1, 1}));
  }
  ExperimentConfig c = small_config(out);
  c.model = ModelKind::kQuadratic;
  c.methods = {Method::kIg};
  c.sample_counts = {4};
  c.calibration_size = 1;
  c.dataset.dir = data.string();
  run_calibration(c);
  const auto rows = run_evaluation(c);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].schedule_kind == "uniform");
  CHECK(rows[0].error.mean == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(rows[0].error.count == 2);
}

TEST_CASE("plots: none without results, parseable SVG otherwise") {
  const fs::path out = scratch("plots");
  ExperimentConfig c = small_config(out);
  std::vector<std::string> messages;
  const Logger log = [&](std::string_view m) { messages.emplace_back(m); };
  CHECK(emit_plots(c, log).empty());
  CHECK(!fs::exists(layout::plots_dir(out)));
  REQUIRE(messages.size() == 1);
  CHECK(messages[0].rfind("warning", 0) == 0);

  write_text(layout::results(out), "method,schedule,k\r\n");
  CHECK(emit_plots(c).empty());

  run_calibration(c);
  run_evaluation(c);
  const auto files = emit_plots(c);
  CHECK(files.size() == 2 * c.methods.size() + 2);
  std::set<std::string> names;
  for (const auto& f : files) {
    names.insert(f.filename().string());
    CHECK(well_formed_svg(read_text(f)));
  }
  for (const char* name : {"profile_ig.svg", "profile_blurig.svg", "profile_gig.svg",
                           "examples_ig.svg", "error_vs_k.svg", "insertion_vs_k.svg"}) {
    CHECK(names.count(name) == 1);
  }
}

TEST_CASE("weights file drives the model") {
  const fs::path out = scratch("weights");
  MlpInit init;
  init.input_dim = 64;
  init.seed = 99;
  write_weights(out / "w.txt", init_mlp(init));
  ExperimentConfig c = small_config(out);
  c.weights_file = (out / "w.txt").string();
  const auto m = build_model(c, 64);
  const TinyMlp reference(init);
  const std::vector<double> x(64, 0.3);
  CHECK(m->evaluate(x) == reference.evaluate(x));
  CHECK_THROWS_AS(build_model(c, 65), ConfigError);
  c.model = ModelKind::kLinear;
  CHECK_THROWS_AS(build_model(c, 64), ConfigError);
}

TEST_CASE("cli: exit codes") {
  const fs::path dir = scratch("cli");
  const std::string small =
      "dataset.height = 8\ndataset.width = 8\ndataset.count = 6\n"
      "calibration_size = 2\nprobes = 5\nsample_counts = 2\ngig.steps = 4\n"
      "insertion_steps = 2\n";
  write_text(dir / "ok.cfg", small);
  write_text(dir / "bad.cfg", small + "frobnicate = 1\n");

  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 1);
  CHECK(run_cli("dance") == 1);
  CHECK(run_cli("all --config " + (dir / "missing.cfg").string()) == 1);
  CHECK(run_cli("all --config " + (dir / "bad.cfg").string()) == 1);
  CHECK(run_cli("all --seed notanumber") == 1);

  const std::string ok = "--config " + (dir / "ok.cfg").string();
  CHECK(run_cli("evaluate " + ok + " --out " + (dir / "fresh").string()) == 1);
  CHECK(run_cli("plot " + ok + " --out " + (dir / "fresh").string()) == 0);
  CHECK(!fs::exists(dir / "fresh" / "plots"));

  // Output below a regular file cannot be created.
  write_text(dir / "blocker", "x");
  CHECK(run_cli("calibrate " + ok + " --out " + (dir / "blocker" / "sub").string()) == 3);

  CHECK(run_cli("all " + ok + " --seed 3 --out " + (dir / "run").string()) == 0);
  CHECK(fs::exists(dir / "run" / "results.csv"));
  CHECK(fs::exists(dir / "run" / "plots" / "error_vs_k.svg"));
  CHECK(fs::exists(dir / "run" / "dataset" / "image_0000.pgm"));

  // Huge output weights overflow the gradient: a numerical error.
  MlpParameters p;
  p.input_dim = 64;
  p.hidden1 = 2;
  p.hidden2 = 4;
  p.w1.assign(2 * 64, 0.01);
  p.b1.assign(2, 0.0);
  p.w2.assign(4 * 2, 1.0);
  p.b2.assign(4, 0.0);
  p.w3.assign(4, 1e308);
  p.sigmoid_output = false;
  write_weights(dir / "huge.txt", p);
  write_text(dir / "huge.cfg", small + "methods = ig\nmodel.weights = " +
                                   (dir / "huge.txt").string() + "\n");
  CHECK(run_cli("calibrate --config " + (dir / "huge.cfg").string() + " --out " +
                (dir / "huge").string()) == 2);
}
