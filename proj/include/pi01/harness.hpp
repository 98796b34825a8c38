#pragma once

// Command implementations behind the workbench CLI. Each command writes a
// self-describing output directory (config.json first) so that `check` can
// re-verify it and identical configs give identical bytes.

#include <filesystem>
#include <iostream>
#include <regex>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "pi01/checks.hpp"
#include "pi01/io.hpp"

namespace pi01::harness {

namespace fs = std::filesystem;
using io::json;

enum Exit : int { kOk = 0, kViolation = 1, kUsage = 2 };

class usage_error : public workbench_error {
 public:
  using workbench_error::workbench_error;
};

inline json load_json_file(const fs::path& p) {
  return io::parse_json(io::read_file(p), p.string());
}

inline void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io::io_error("cannot create " + dir.string() + ": " + ec.message());
}

inline void write_json(const fs::path& dir, const std::string& name, const json& j) {
  io::write_output(dir, name, j.dump(1) + "\n");
}

inline std::string tree_file(std::size_t i) { return "tree_" + std::to_string(i) + ".json"; }

// ---- build-t2 -------------------------------------------------------------

struct T2Options {
  std::size_t trees = 4;
  Stage stages = 50;
  fs::path registry;
  StageBudget budget;
  std::uint64_t seed = 0;
  fs::path out;
};

inline ConstructionState build_t2(const T2Options& o, const Registry& registry) {
  if (o.budget.max_height < 2 * registry.size() + 3)
    throw usage_error("--max-height must be at least 2*|registry|+3 = " +
                      std::to_string(2 * registry.size() + 3));
  ConstructionState st(o.trees, registry, o.budget);
  for (Stage s = 0; s < o.stages; ++s) {
    st.advance();
    spdlog::debug("stage {}: |D| = {}, followers = {}", st.stage(), st.diagonal_set().size(),
                  st.followers().entries().size());
  }
  return st;
}

inline void write_t2(const fs::path& dir, const T2Options& o, const ConstructionState& st) {
  prepare_dir(dir);
  json config;
  config["command"] = "build-t2";
  config["trees"] = o.trees;
  config["stages"] = o.stages;
  config["budget"] = io::budget_to_json(o.budget);
  config["seed"] = o.seed;
  config["registry"] = io::registry_to_json(st.registry());
  write_json(dir, "config.json", config);
  for (const auto& t : st.trees()) write_json(dir, tree_file(t.index()), io::tree_to_json(t, st.stage()));
  write_json(dir, "D.json", io::d_to_json(st.diagonal_set()));
  write_json(dir, "followers.json", io::followers_to_json(st.followers()));
  io::write_output(dir, "actions.jsonl", io::actions_to_jsonl(st.log()));
}

inline ConstructionState load_t2(const fs::path& dir, const json& config) {
  const Registry registry = io::registry_from_json(config.at("registry"));
  const StageBudget budget = io::budget_from_json(config.at("budget"));
  const std::size_t tree_count = config.at("trees").get<std::size_t>();
  const Stage stages = config.at("stages").get<Stage>();
  std::vector<StagedTree> trees;
  for (std::size_t i = 0; i < tree_count && io::has_output(dir, tree_file(i)); ++i)
    trees.push_back(io::tree_from_json(io::parse_json(io::read_output(dir, tree_file(i)), tree_file(i))));
  return ConstructionState::restore(
      registry, budget, tree_count, stages, std::move(trees),
      io::d_from_json(io::parse_json(io::read_output(dir, "D.json"), "D.json")),
      io::followers_from_json(io::parse_json(io::read_output(dir, "followers.json"), "followers.json")),
      io::actions_from_jsonl(io::read_output(dir, "actions.jsonl")));
}

// ---- build-chain ----------------------------------------------------------

struct ChainOptions {
  fs::path enums;
  Stage stages = 40;
  std::size_t embed_depth = 10;
  fs::path out;
};

inline std::string level_file(std::size_t j, const std::string& what) {
  return "level_" + std::to_string(j) + "_" + what + ".json";
}

inline void write_chain(const fs::path& dir, const ChainOptions& o,
                        const std::vector<ReEnumeration>& enums, const Chain& chain) {
  prepare_dir(dir);
  json config;
  config["command"] = "build-chain";
  config["stages"] = o.stages;
  config["embed_depth"] = o.embed_depth;
  json e = json::array();
  for (const auto& a : enums) e.push_back(io::enumeration_to_json(a));
  config["enums"] = std::move(e);
  write_json(dir, "config.json", config);

  for (std::size_t j = 0; j < chain.levels.size(); ++j) {
    const QState& q = chain.levels[j];
    const std::size_t level = j + 1;
    write_json(dir, level_file(level, "tree"), io::tree_to_json(q.upsilon, q.stage));
    json markers = json::array();
    for (const auto& [m, s] : q.markers) markers.push_back(json{{"string", m.text()}, {"stage", s}});
    write_json(dir, level_file(level, "markers"), markers);
    json grafts = json::array();
    for (const auto& [n, m] : q.graft_via) grafts.push_back(json::array({n.text(), m.text()}));
    write_json(dir, level_file(level, "grafts"), grafts);

    json decode;
    const FinString path = longest_pi_prefix(q);
    decode["pi_final"] = q.pi.empty() ? std::string() : q.pi.back().text();
    decode["longest_pi_prefix"] = path.text();
    decode["decoded"] = decode_blocks(path);
    decode["f"] = enum_fn_approx(q.enumeration, q.stage).values;
    json pis = json::array();
    for (const auto& p : q.pi) pis.push_back(p.text());
    decode["pi_by_stage"] = std::move(pis);
    write_json(dir, level_file(level, "decode"), decode);
  }
  write_json(dir, "union_tree.json", io::tree_to_json(chain.union_tree, chain.union_tree.last_stage()));
}

inline std::vector<QState> load_chain(const fs::path& dir, const json& config) {
  const Stage stages = config.at("stages").get<Stage>();
  const auto enums = io::enumerations_from_json(config.at("enums"));
  std::vector<QState> out;
  ClosureTree lambda = base_class_closure(stages);
  for (std::size_t j = 0; j < enums.size(); ++j) {
    const std::size_t level = j + 1;
    auto read = [&](const std::string& what) {
      const std::string name = level_file(level, what);
      return io::parse_json(io::read_output(dir, name), name);
    };
    QState q;
    q.upsilon = io::tree_from_json(read("tree"));
    for (const auto& m : read("markers"))
      q.markers.emplace(FinString::ternary(m.at("string").get<std::string>()), m.at("stage").get<Stage>());
    for (const auto& g : read("grafts"))
      q.graft_via.emplace(FinString::ternary(g.at(0).get<std::string>()),
                          FinString::ternary(g.at(1).get<std::string>()));
    const json decode = read("decode");
    for (const auto& p : decode.at("pi_by_stage"))
      q.pi.push_back(FinString::ternary(p.get<std::string>()));
    q.enumeration = enums[j];
    q.stage = stages;
    q.lambda = lambda;
    lambda = closure_of(q);
    out.push_back(std::move(q));
  }
  return out;
}

// ---- base-class -----------------------------------------------------------

inline void write_base_class(const fs::path& dir, Stage stages) {
  prepare_dir(dir);
  json config;
  config["command"] = "base-class";
  config["stages"] = stages;
  write_json(dir, "config.json", config);
  write_json(dir, tree_file(0), io::tree_to_json(base_computable_class(stages), stages));
}

// ---- avoid-lower / avoid-upper --------------------------------------------

// The config carries the tree snapshot and every parameter, so a saved run
// can be recomputed by `check`.

inline json avoid_lower(const json& config) {
  const StagedTree t = io::tree_from_json(config.at("tree"));
  const auto rows = io::rows_from_json(config.at("rows"));
  const Program j = io::program_from_json(config.at("j"));
  const auto r = lower_cone_subtree(t, rows, j, config.at("budget").get<Natural>(),
                                    config.at("depth").get<std::size_t>(), t.last_stage());
  return io::subtree_result_to_json(r);
}

inline json avoid_upper(const json& config) {
  const StagedTree t = io::tree_from_json(config.at("tree"));
  const Program i = io::program_from_json(config.at("i"));
  const auto r = upper_cone_subtree(t, i, FinString::binary(config.at("x").get<std::string>()),
                                    config.at("depth").get<std::size_t>(),
                                    config.at("budget").get<Natural>(), t.last_stage());
  return io::subtree_result_to_json(r);
}

inline void write_avoid(const fs::path& dir, const json& config, const json& result) {
  prepare_dir(dir);
  write_json(dir, "config.json", config);
  write_json(dir, "result.json", result);
}

// ---- check ----------------------------------------------------------------

inline Violations check_directory(const fs::path& dir) {
  const json config = io::parse_json(io::read_output(dir, "config.json"), "config.json");
  const std::string command = config.at("command").get<std::string>();
  Violations out;
  if (command == "build-t2") {
    const ConstructionState st = load_t2(dir, config);
    out = check_construction(st);
  } else if (command == "build-chain") {
    const auto levels = load_chain(dir, config);
    const std::size_t embed = config.value("embed_depth", std::size_t{10});
    for (std::size_t j = 0; j < levels.size(); ++j) {
      append(out, check_tree_structure(levels[j].upsilon));
      append(out, check_marker_soundness(levels[j]));
      append(out, check_graft_soundness(levels[j]));
      append(out, check_decode(levels[j], 0));
      // Level j copies the class of level j-1, which is its Λ.
      if (j > 0) append(out, check_embedding(levels[j], levels[j].lambda, embed));
    }
  } else if (command == "base-class") {
    const Stage stages = config.at("stages").get<Stage>();
    const StagedTree t =
        io::tree_from_json(io::parse_json(io::read_output(dir, tree_file(0)), tree_file(0)));
    append(out, check_tree_structure(t));
    append(out, check_base_class_shape(t, stages));
    append(out, check_closure_soundness(
                    ClosureTree(std::make_shared<const StagedTree>(t)), static_cast<std::size_t>(stages)));
  } else if (command == "avoid-lower" || command == "avoid-upper") {
    const json saved = io::parse_json(io::read_output(dir, "result.json"), "result.json");
    const json again = command == "avoid-lower" ? avoid_lower(config) : avoid_upper(config);
    if (saved != again)
      out.push_back({"cone_avoidance", "result-reproducible", 0, "result.json",
                     "recomputation gives " + again.dump()});
    append(out, check_tree_structure(io::tree_from_json(config.at("tree"))));
  } else {
    throw usage_error("check: unknown command '" + command + "' in config.json");
  }
  return out;
}

// ---- export-dot -----------------------------------------------------------

/// Writes one .dot per tree snapshot found at `source` (a snapshot file or an
/// output directory); returns the files written.
inline std::vector<fs::path> export_dot_files(const fs::path& source, const fs::path& out) {
  std::vector<fs::path> inputs;
  if (fs::is_directory(source)) {
    static const std::regex snapshot(R"((tree_\d+|level_\d+_tree|union_tree)\.json(\.gz)?)");
    for (const auto& entry : fs::directory_iterator(source))
      if (std::regex_match(entry.path().filename().string(), snapshot)) inputs.push_back(entry.path());
    std::sort(inputs.begin(), inputs.end());
  } else if (fs::exists(source)) {
    inputs.push_back(source);
  } else {
    throw io::io_error("no snapshot at " + source.string());
  }
  prepare_dir(out);
  std::vector<fs::path> written;
  for (const auto& in : inputs) {
    std::string text = io::read_file(in);
    std::string stem = in.filename().string();
    if (in.extension() == ".gz") {
      text = io::gunzip(text);
      stem = in.stem().string();
    }
    stem = fs::path(stem).stem().string();
    const json j = io::parse_json(text, in.string());
    const StagedTree t = io::tree_from_json(j);
    const fs::path target = out / (stem + ".dot");
    io::write_bytes(target, io::export_dot(t, j.at("stage").get<Stage>()));
    written.push_back(target);
  }
  return written;
}

}  // namespace pi01::harness
