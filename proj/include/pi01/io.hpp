#pragma once

// Snapshot JSON, JSON-lines action logs, registry and enumeration files,
// gzip for large outputs, and DOT export.

#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pi01/chain.hpp"
#include "pi01/cone_avoidance.hpp"
#include "pi01/special_family.hpp"
#include "pi01/tree.hpp"

namespace pi01::io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class io_error : public workbench_error {
 public:
  using workbench_error::workbench_error;
};

inline constexpr std::size_t kGzipThreshold = std::size_t{1} << 20;

// ---- bytes ----------------------------------------------------------------

inline std::string gzip(const std::string& data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw io_error("deflateInit2 failed");
  gz_header header{};  // mtime 0, no name: identical input gives identical bytes
  header.os = 3;
  deflateSetHeader(&zs, &header);
  std::string out(deflateBound(&zs, data.size()) + 32, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const auto written = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw io_error("deflate failed");
  out.resize(written);
  return out;
}

inline std::string gunzip(const std::string& data) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw io_error("inflateInit2 failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[1 << 16];
  int rc;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw io_error("corrupt gzip stream");
    }
    out.append(buf, sizeof buf - zs.avail_out);
  } while (rc != Z_STREAM_END);
  inflateEnd(&zs);
  return out;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_bytes(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw io_error("write failed for " + path.string());
}

/// Writes `name` in dir, or `name.gz` when the text exceeds 1 MiB.
inline fs::path write_output(const fs::path& dir, const std::string& name,
                             const std::string& text) {
  if (text.size() > kGzipThreshold) {
    const fs::path p = dir / (name + ".gz");
    write_bytes(p, gzip(text));
    return p;
  }
  const fs::path p = dir / name;
  write_bytes(p, text);
  return p;
}

/// Reads `name` or its gzipped form from dir.
inline std::string read_output(const fs::path& dir, const std::string& name) {
  if (fs::exists(dir / name)) return read_file(dir / name);
  if (fs::exists(dir / (name + ".gz"))) return gunzip(read_file(dir / (name + ".gz")));
  throw io_error("missing " + (dir / name).string());
}

inline bool has_output(const fs::path& dir, const std::string& name) {
  return fs::exists(dir / name) || fs::exists(dir / (name + ".gz"));
}

inline json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw io_error(where + ": " + e.what());
  }
}

// ---- trees ----------------------------------------------------------------

inline json tree_to_json(const StagedTree& t, Stage stage) {
  std::vector<FinString> order;
  for (const auto& [s, rec] : t.nodes())
    if (rec.present_at(stage)) order.push_back(s);
  std::sort(order.begin(), order.end(), LengthLexLess{});
  json nodes = json::array();
  for (const auto& s : order) {
    const NodeRecord& rec = *t.find(s);
    json n;
    n["string"] = s.text();
    n["enumerated_at"] = rec.enumerated_at;
    n["status"] = status_name(rec.status_at(stage));
    n["status_since"] = rec.status_since_at(stage);
    n["origin"] = rec.origin;
    if (rec.status_at(stage) == NodeStatus::Terminal) n["cause"] = rec.cause;
    nodes.push_back(std::move(n));
  }
  json out;
  out["index"] = t.index();
  out["birth_stage"] = t.birth_stage();
  out["stage"] = stage;
  out["alphabet"] = alphabet_name(t.alphabet());
  out["nodes"] = std::move(nodes);
  return out;
}

inline Alphabet parse_alphabet(const std::string& name) {
  if (name == "binary") return Alphabet::Binary;
  if (name == "ternary") return Alphabet::Ternary;
  throw io_error("unknown alphabet '" + name + "'");
}

inline StagedTree tree_from_json(const json& j) {
  try {
    const Alphabet a = parse_alphabet(j.value("alphabet", std::string("binary")));
    StagedTree t(j.at("index").get<std::size_t>(), j.at("birth_stage").get<Stage>(), a);
    for (const auto& n : j.at("nodes")) {
      NodeRecord rec;
      rec.enumerated_at = n.at("enumerated_at").get<Stage>();
      rec.origin = n.value("origin", std::string());
      const std::string status = n.at("status").get<std::string>();
      if (status == "terminal") {
        rec.terminal_since = n.at("status_since").get<Stage>();
        rec.cause = n.value("cause", std::string());
      } else if (status != "alive") {
        throw io_error("unknown node status '" + status + "'");
      }
      t.restore(FinString(n.at("string").get<std::string>(), a), std::move(rec));
    }
    t.touch(j.at("stage").get<Stage>());
    return t;
  } catch (const json::exception& e) {
    throw io_error(std::string("malformed tree snapshot: ") + e.what());
  } catch (const alphabet_error& e) {
    throw io_error(std::string("malformed tree snapshot: ") + e.what());
  }
}

// ---- programs and inputs --------------------------------------------------

inline json program_to_json(const std::string& name, const Program& p) {
  json out;
  out["name"] = name;
  out["program"] = p.disassemble();
  out["index"] = to_string(p.encode());
  return out;
}

inline Program program_from_json(const json& j) {
  if (j.contains("program")) return Program::assemble(j.at("program").get<std::string>());
  if (j.contains("index")) {
    const auto& v = j.at("index");
    return Program::decode(parse_index(v.is_string() ? v.get<std::string>() : v.dump()));
  }
  throw io_error("entry needs \"program\" or \"index\": " + j.dump());
}

inline Registry registry_from_json(const json& j) {
  if (!j.is_array()) throw io_error("registry must be a JSON list");
  Registry out;
  for (std::size_t k = 0; k < j.size(); ++k)
    out.push_back({j[k].value("name", "psi" + std::to_string(k)), program_from_json(j[k])});
  return out;
}

inline json registry_to_json(const Registry& r) {
  json out = json::array();
  for (const auto& f : r) out.push_back(program_to_json(f.name, f.program));
  return out;
}

inline ReEnumeration enumeration_from_json(const json& j) {
  if (j.contains("table")) {
    std::vector<std::pair<Stage, Natural>> table;
    for (const auto& row : j.at("table")) {
      if (!row.is_array() || row.size() != 2) throw io_error("table rows are [stage, element]");
      table.emplace_back(row[0].get<Stage>(), row[1].get<Natural>());
    }
    return ReEnumeration::from_table(table);
  }
  return ReEnumeration::from_program(program_from_json(j));
}

inline json enumeration_to_json(const ReEnumeration& a) {
  json out;
  if (a.program()) {
    out["program"] = a.program()->disassemble();
  } else {
    json rows = json::array();
    std::vector<std::pair<Stage, Natural>> table;
    for (const auto& [x, s] : a.table()) table.emplace_back(s, x);
    std::sort(table.begin(), table.end());
    for (const auto& [s, x] : table) rows.push_back(json::array({s, x}));
    out["table"] = std::move(rows);
  }
  return out;
}

inline std::vector<ReEnumeration> enumerations_from_json(const json& j) {
  if (!j.is_array()) throw io_error("enumeration file must be a JSON list");
  std::vector<ReEnumeration> out;
  for (const auto& e : j) out.push_back(enumeration_from_json(e));
  return out;
}

inline std::vector<FinString> rows_from_json(const json& j) {
  if (!j.is_array()) throw io_error("rows file must be a JSON list of binary strings");
  std::vector<FinString> out;
  for (const auto& r : j) out.push_back(FinString::binary(r.get<std::string>()));
  return out;
}

// ---- construction state ---------------------------------------------------

inline json tuple_to_json(const Tuple& t) {
  json out = json::array();
  for (const auto& item : t) out.push_back(json::array({item.tree, item.node.text()}));
  return out;
}

inline Tuple tuple_from_json(const json& j) {
  Tuple out;
  for (const auto& item : j)
    out.push_back({item.at(0).get<std::size_t>(), FinString::binary(item.at(1).get<std::string>())});
  return out;
}

inline json strings_to_json(const std::vector<FinString>& v) {
  json out = json::array();
  for (const auto& s : v) out.push_back(s.text());
  return out;
}

inline std::vector<FinString> strings_from_json(const json& j, Alphabet a = Alphabet::Binary) {
  std::vector<FinString> out;
  for (const auto& s : j) out.emplace_back(s.get<std::string>(), a);
  return out;
}

inline json action_to_json(const Action& a) {
  json out;
  out["stage"] = a.stage;
  out["kind"] = action_kind_name(a.kind());
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, action::OddPrune>) {
          out["e"] = b.e;
          out["tree"] = b.tree;
          out["tau"] = b.tau.text();
          out["tau0"] = b.tau0.text();
          out["tau1"] = b.tau1 ? json(b.tau1->text()) : json(nullptr);
          out["killed"] = b.killed;
        } else if constexpr (std::is_same_v<T, action::FollowerAssign>) {
          out["tuple"] = tuple_to_json(b.tuple);
          out["follower"] = b.follower;
          out["level"] = b.level;
        } else if constexpr (std::is_same_v<T, action::DiagonalizeD>) {
          out["e"] = b.e;
          out["tuple"] = tuple_to_json(b.tuple);
          out["extensions"] = strings_to_json(b.extensions);
          out["follower"] = b.follower;
          out["killed"] = b.killed;
        } else if constexpr (std::is_same_v<T, action::BudgetExhausted>) {
          out["phase"] = b.phase;
          out["detail"] = b.detail;
        } else {
          out["tree"] = b.tree;
          out["node"] = b.node.text();
        }
      },
      a.body);
  return out;
}

inline Action action_from_json(const json& j) {
  Action a;
  a.stage = j.at("stage").get<Stage>();
  const std::string kind = j.at("kind").get<std::string>();
  auto bin = [&](const char* key) { return FinString::binary(j.at(key).get<std::string>()); };
  if (kind == "OddPrune") {
    action::OddPrune b{j.at("e").get<std::size_t>(), j.at("tree").get<std::size_t>(), bin("tau"),
                       bin("tau0"), std::nullopt, j.at("killed").get<std::size_t>()};
    if (!j.at("tau1").is_null()) b.tau1 = bin("tau1");
    a.body = b;
  } else if (kind == "FollowerAssign") {
    a.body = action::FollowerAssign{tuple_from_json(j.at("tuple")), j.at("follower").get<Natural>(),
                                    j.at("level").get<std::size_t>()};
  } else if (kind == "DiagonalizeD") {
    a.body = action::DiagonalizeD{j.at("e").get<std::size_t>(), tuple_from_json(j.at("tuple")),
                                  strings_from_json(j.at("extensions")),
                                  j.at("follower").get<Natural>(), j.at("killed").get<std::size_t>()};
  } else if (kind == "BudgetExhausted") {
    a.body = action::BudgetExhausted{j.at("phase").get<std::string>(),
                                     j.at("detail").get<std::string>()};
  } else if (kind == "LeafExtend") {
    a.body = action::LeafExtend{j.at("tree").get<std::size_t>(), bin("node")};
  } else {
    throw io_error("unknown action kind '" + kind + "'");
  }
  return a;
}

inline std::string actions_to_jsonl(const std::vector<Action>& log) {
  std::string out;
  for (const auto& a : log) {
    out += action_to_json(a).dump();
    out += '\n';
  }
  return out;
}

inline std::vector<Action> actions_from_jsonl(const std::string& text) {
  std::vector<Action> out;
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.empty()) continue;
    out.push_back(action_from_json(parse_json(line, "actions.jsonl line " + std::to_string(lineno))));
  }
  return out;
}

inline json d_to_json(const std::map<Natural, Stage>& d) {
  json out = json::array();
  for (const auto& [x, s] : d) out.push_back(json{{"x", x}, {"stage", s}});
  return out;
}

inline std::map<Natural, Stage> d_from_json(const json& j) {
  std::map<Natural, Stage> out;
  for (const auto& e : j) out.emplace(e.at("x").get<Natural>(), e.at("stage").get<Stage>());
  return out;
}

inline json followers_to_json(const FollowerTable& f) {
  json entries = json::array();
  for (const auto& e : f.entries()) {
    json j;
    j["tuple"] = tuple_to_json(e.tuple);
    j["follower"] = e.follower;
    j["level"] = e.level;
    j["assigned_at"] = e.assigned_at;
    j["diagonalized_at"] = e.diagonalized_at ? json(*e.diagonalized_at) : json(nullptr);
    j["witness"] = strings_to_json(e.witness);
    entries.push_back(std::move(j));
  }
  json out;
  out["next_follower"] = f.next_follower();
  out["entries"] = std::move(entries);
  return out;
}

inline FollowerTable followers_from_json(const json& j) {
  FollowerTable out;
  const Natural next = j.at("next_follower").get<Natural>();
  for (const auto& e : j.at("entries")) {
    FollowerEntry entry;
    entry.tuple = tuple_from_json(e.at("tuple"));
    entry.follower = e.at("follower").get<Natural>();
    entry.level = e.at("level").get<std::size_t>();
    entry.assigned_at = e.at("assigned_at").get<Stage>();
    if (!e.at("diagonalized_at").is_null()) entry.diagonalized_at = e.at("diagonalized_at").get<Stage>();
    entry.witness = strings_from_json(e.at("witness"));
    out.restore(std::move(entry), next);
  }
  return out;
}

inline json budget_to_json(const StageBudget& b) {
  json out;
  out["tuples_per_stage"] = b.tuples_per_stage;
  out["max_height"] = b.max_height;
  out["max_arity"] = b.max_arity;
  out["evals_per_stage"] = b.evals_per_stage;
  return out;
}

inline StageBudget budget_from_json(const json& j) {
  StageBudget b;
  b.tuples_per_stage = j.at("tuples_per_stage").get<std::size_t>();
  b.max_height = j.at("max_height").get<std::size_t>();
  b.max_arity = j.at("max_arity").get<std::size_t>();
  b.evals_per_stage = j.at("evals_per_stage").get<std::uint64_t>();
  return b;
}

// ---- results --------------------------------------------------------------

inline json answer_to_json(const ConvergenceAnswer& a) {
  json out;
  if (a.converged()) {
    out["outcome"] = "converged";
    out["value"] = *a.value;
  } else {
    out["outcome"] = "unknown";
    out["budget_spent"] = a.budget;
  }
  return out;
}

inline json subtree_result_to_json(const SubtreeResult& r) {
  json out;
  out["selected"] = kind_name(r.kind);
  if (r.root) out["root"] = r.root->text();
  if (r.pair) {
    out["sigma"] = r.pair->sigma.text();
    out["tau"] = r.pair->tau.text();
  }
  if (r.n) out["n"] = *r.n;
  if (r.answer) out["answer"] = answer_to_json(*r.answer);
  if (r.kind == SubtreeResult::Kind::UnSet) {
    out["members"] = strings_to_json(r.members);
    out["running_members"] = r.running_members;
  }
  if (r.case_one) out["case1"] = json{{"n", r.case_one->n}, {"m", r.case_one->m}, {"k", r.case_one->k}};
  out["depth"] = r.depth;
  out["budget"] = r.budget;
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

// ---- DOT ------------------------------------------------------------------

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

/// One digraph; nodes in length-lex order, Terminal nodes dashed and
/// labelled with the stage and cause of their pruning.
inline std::string export_dot(const StagedTree& t, Stage stage) {
  std::vector<FinString> order;
  for (const auto& [s, rec] : t.nodes())
    if (rec.present_at(stage)) order.push_back(s);
  std::sort(order.begin(), order.end(), LengthLexLess{});

  std::ostringstream out;
  out << "digraph T" << t.index() << " {\n";
  out << "  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& s : order) {
    const NodeRecord& rec = *t.find(s);
    out << "  \"" << s.str() << "\" [label=\"" << s.str();
    if (rec.status_at(stage) == NodeStatus::Terminal) {
      out << "\\nterminal@" << *rec.terminal_since;
      if (!rec.cause.empty()) out << " " << dot_escape(rec.cause);
      out << "\", style=dashed];\n";
    } else {
      out << "\", style=solid];\n";
    }
  }
  for (const auto& s : order) {
    if (s.empty()) continue;
    for (std::size_t k = s.size(); k-- > 0;) {
      const FinString p = s.prefix(k);
      if (t.contains(p, stage)) {
        out << "  \"" << p.str() << "\" -> \"" << s.str() << "\";\n";
        break;
      }
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace pi01::io
