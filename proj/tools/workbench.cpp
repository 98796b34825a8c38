// workbench: build, inspect and check finite-stage runs of the tree
// constructions.
//
// Exit status: 0 success, 1 invariant violation, 2 usage or input error.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "pi01/harness.hpp"
#include "pi01/pi01.hpp"

namespace fs = std::filesystem;
using namespace pi01;
using harness::json;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_logger_st("workbench");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("WORKBENCH_LOG"))
    spdlog::set_level(spdlog::level::from_str(level));
}

json tree_argument(const fs::path& p) {
  std::string text = io::read_file(p);
  if (p.extension() == ".gz") text = io::gunzip(text);
  return io::parse_json(text, p.string());
}

int report(const Violations& v) {
  for (const auto& x : v) std::cout << "VIOLATION " << x.str() << "\n";
  if (v.empty()) {
    std::cout << "ok\n";
    return harness::kOk;
  }
  std::cout << v.size() << " violation(s)\n";
  return harness::kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Finite-stage workbench for Π⁰₁ tree constructions"};
  app.require_subcommand(1);

  harness::T2Options t2;
  auto* build_t2 = app.add_subcommand("build-t2", "run the special-family construction");
  build_t2->add_option("--trees", t2.trees, "number of trees")->default_val(4);
  build_t2->add_option("--stages", t2.stages, "stages to run")->default_val(50);
  build_t2->add_option("--registry", t2.registry, "functional registry (JSON list)")
      ->required()
      ->check(CLI::ExistingFile);
  build_t2->add_option("--tuples-per-stage", t2.budget.tuples_per_stage)->default_val(64);
  build_t2->add_option("--max-height", t2.budget.max_height, "leaves this long stop growing")
      ->default_val(12);
  build_t2->add_option("--evals-per-stage", t2.budget.evals_per_stage)->default_val(1 << 18);
  build_t2->add_option("--max-arity", t2.budget.max_arity, "0 = unbounded")->default_val(0);
  build_t2->add_option("--seed", t2.seed, "recorded in config.json")->default_val(0);
  build_t2->add_option("--out", t2.out)->required();

  harness::ChainOptions chain;
  auto* build_chain = app.add_subcommand("build-chain", "run the chain construction");
  build_chain->add_option("--enums", chain.enums, "enumerations (JSON list)")
      ->required()
      ->check(CLI::ExistingFile);
  build_chain->add_option("--stages", chain.stages)->default_val(40);
  build_chain->add_option("--embed-depth", chain.embed_depth)->default_val(10);
  build_chain->add_option("--out", chain.out)->required();

  fs::path tree_path, rows_path, out_dir;
  std::string index_text, x_bits;
  Natural budget = 1000;
  std::size_t depth = 8;
  auto* lower = app.add_subcommand("avoid-lower", "select a subtree avoiding a lower cone");
  lower->add_option("--tree", tree_path)->required()->check(CLI::ExistingFile);
  lower->add_option("--rows", rows_path, "JSON list of binary rows")->required()->check(CLI::ExistingFile);
  lower->add_option("--j", index_text, "program index")->required();
  lower->add_option("--budget", budget)->default_val(1000);
  lower->add_option("--depth", depth)->default_val(8);
  lower->add_option("--out", out_dir, "also save config.json and result.json here");

  auto* upper = app.add_subcommand("avoid-upper", "select a subtree avoiding an upper cone");
  upper->add_option("--tree", tree_path)->required()->check(CLI::ExistingFile);
  upper->add_option("--i", index_text, "program index")->required();
  upper->add_option("--x", x_bits, "finite truncation of X")->required();
  upper->add_option("--budget", budget)->default_val(1000);
  upper->add_option("--depth", depth)->default_val(8);
  upper->add_option("--out", out_dir, "also save config.json and result.json here");

  Stage base_stages = 12;
  auto* base = app.add_subcommand("base-class", "enumerate the 0*1* class");
  base->add_option("--stages", base_stages)->default_val(12);
  base->add_option("--out", out_dir)->required();

  fs::path check_dir;
  auto* check = app.add_subcommand("check", "run the invariant suites on an output directory");
  check->add_option("dir", check_dir)->required()->check(CLI::ExistingDirectory);

  fs::path asm_file;
  auto* assemble = app.add_subcommand("assemble", "print the index of an assembly program");
  assemble->add_option("file", asm_file)->required()->check(CLI::ExistingFile);

  auto* disassemble = app.add_subcommand("disassemble", "print the program with a given index");
  disassemble->add_option("index", index_text)->required();

  fs::path dot_source;
  auto* dot = app.add_subcommand("export-dot", "write DOT graphs for tree snapshots");
  dot->add_option("snapshot", dot_source, "snapshot file or output directory")->required();
  dot->add_option("--out", out_dir)->required();

  std::vector<std::string> join_parts;
  std::size_t arity = 0;
  auto* join = app.add_subcommand("join", "finite join of binary strings, or its inverse");
  join->add_option("strings", join_parts)->required();
  join->add_option("--decode", arity, "split one joined string into this many components");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? harness::kOk : harness::kUsage;
  }

  try {
    if (*build_t2) {
      const Registry registry = io::registry_from_json(harness::load_json_file(t2.registry));
      const auto st = harness::build_t2(t2, registry);
      harness::write_t2(t2.out, t2, st);
      std::cout << "stage " << st.stage() << ": " << st.trees().size() << " trees, |D| = "
                << st.diagonal_set().size() << ", " << st.log().size() << " actions\n";
    } else if (*build_chain) {
      const auto enums = io::enumerations_from_json(harness::load_json_file(chain.enums));
      if (enums.empty()) throw harness::usage_error("--enums lists no enumeration");
      const Chain c = iterate_chain(enums, chain.stages);
      harness::write_chain(chain.out, chain, enums, c);
      for (std::size_t j = 0; j < c.levels.size(); ++j)
        std::cout << "level " << j + 1 << ": " << c.levels[j].upsilon.size() << " nodes, "
                  << c.levels[j].markers.size() << " markers\n";
    } else if (*lower || *upper) {
      json config;
      config["command"] = *lower ? "avoid-lower" : "avoid-upper";
      config["tree"] = tree_argument(tree_path);
      if (*lower) {
        config["rows"] = harness::load_json_file(rows_path);
        config["j"] = json{{"index", index_text}};
      } else {
        config["i"] = json{{"index", index_text}};
        config["x"] = x_bits;
      }
      config["budget"] = budget;
      config["depth"] = depth;
      const json result = *lower ? harness::avoid_lower(config) : harness::avoid_upper(config);
      if (!out_dir.empty()) harness::write_avoid(out_dir, config, result);
      std::cout << result.dump(1) << "\n";
    } else if (*base) {
      harness::write_base_class(out_dir, base_stages);
      std::cout << "base class: " << base_stages << " stages\n";
    } else if (*check) {
      return report(harness::check_directory(check_dir));
    } else if (*assemble) {
      std::cout << to_string(Program::assemble(io::read_file(asm_file)).encode()) << "\n";
    } else if (*disassemble) {
      std::cout << Program::decode(parse_index(index_text)).disassemble();
    } else if (*dot) {
      for (const auto& p : harness::export_dot_files(dot_source, out_dir)) std::cout << p.string() << "\n";
    } else if (*join) {
      if (arity > 0) {
        if (join_parts.size() != 1) throw harness::usage_error("--decode takes one joined string");
        for (const auto& c : finite_join_decode(FinString::binary(join_parts[0]), arity))
          std::cout << c.str() << "\n";
      } else {
        std::vector<FinString> parts;
        for (const auto& p : join_parts) parts.push_back(FinString::binary(p));
        std::cout << finite_join(parts).str() << "\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return harness::kUsage;
  }
  return harness::kOk;
}
