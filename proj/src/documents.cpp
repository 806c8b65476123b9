#include "mapind/documents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mapind/errors.hpp"

namespace mapind {

namespace {

void dump_into(const Json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line; CPT rows read better that way.
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        dump_into(e, indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double d = j.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

[[noreturn]] void structure_error(const std::string& what) { throw ParseError("network document: " + what); }

const Json& field(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) structure_error(where + " lacks \"" + key + "\"");
  return *it;
}

std::vector<std::string> string_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw ParseError(where + " must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Assignment assignment_from(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + " must be an object of variable -> state");
  Assignment a;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_string()) throw ParseError(where + "." + it.key() + " must be a state name");
    a[it.key()] = it.value().get<std::string>();
  }
  return a;
}

}  // namespace

std::string dump_json(const Json& doc, int indent) {
  std::string out;
  dump_into(doc, indent, 0, out);
  if (indent >= 0) out += '\n';
  return out;
}

Network network_from_json(const Json& doc) {
  if (!doc.is_object()) structure_error("top level must be an object");
  const Json& name = field(doc, "name", "document");
  if (!name.is_string()) structure_error("\"name\" must be a string");

  std::vector<Variable> variables;
  const Json& vars = field(doc, "variables", "document");
  if (!vars.is_array()) structure_error("\"variables\" must be an array");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string where = "variables[" + std::to_string(i) + "]";
    const Json& v = vars[i];
    if (!v.is_object()) structure_error(where + " must be an object");
    const Json& vname = field(v, "name", where);
    if (!vname.is_string()) structure_error(where + ".name must be a string");
    variables.push_back({vname.get<std::string>(), string_list(field(v, "states", where), where + ".states")});
  }

  std::vector<Cpt> cpts;
  const Json& tables = field(doc, "cpts", "document");
  if (!tables.is_array()) structure_error("\"cpts\" must be an array");
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const std::string where = "cpts[" + std::to_string(i) + "]";
    const Json& c = tables[i];
    if (!c.is_object()) structure_error(where + " must be an object");
    Cpt cpt;
    const Json& child = field(c, "variable", where);
    if (!child.is_string()) structure_error(where + ".variable must be a string");
    cpt.child = child.get<std::string>();
    if (auto p = c.find("parents"); p != c.end()) cpt.parents = string_list(*p, where + ".parents");
    const Json& rows = field(c, "table", where);
    if (!rows.is_array()) structure_error(where + ".table must be an array of rows");
    for (const auto& row : rows) {
      if (!row.is_array()) structure_error(where + ".table rows must be arrays");
      std::vector<double> r;
      for (const auto& e : row) {
        if (!e.is_number()) structure_error(where + ".table entries must be numbers");
        r.push_back(e.get<double>());
      }
      cpt.rows.push_back(std::move(r));
    }
    cpts.push_back(std::move(cpt));
  }
  return Network(name.get<std::string>(), std::move(variables), std::move(cpts));
}

Json network_to_json(const Network& net) {
  Json doc;
  doc["name"] = net.name();
  Json vars = Json::array();
  for (const auto& v : net.variables()) {
    Json jv;
    jv["name"] = v.name;
    jv["states"] = v.states;
    vars.push_back(std::move(jv));
  }
  doc["variables"] = std::move(vars);
  Json cpts = Json::array();
  for (const auto& c : net.cpts()) {
    Json jc;
    jc["variable"] = c.child;
    jc["parents"] = c.parents;
    Json rows = Json::array();
    for (const auto& row : c.rows) {
      Json r = Json::array();
      for (double p : row) r.push_back(p);
      rows.push_back(std::move(r));
    }
    jc["table"] = std::move(rows);
    cpts.push_back(std::move(jc));
  }
  doc["cpts"] = std::move(cpts);
  return doc;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ParseError("failed writing '" + path.string() + "'");
}

Network load_network(const std::filesystem::path& path) {
  Network net = network_from_json(read_json_file(path));
  net.require_valid();
  return net;
}

void save_network(const Network& net, const std::filesystem::path& path) {
  write_text_file(path, dump_json(network_to_json(net)));
}

const char* to_string(QueryMode mode) {
  switch (mode) {
    case QueryMode::kMap: return "map";
    case QueryMode::kStrong: return "strong";
    case QueryMode::kWeak: return "weak";
    case QueryMode::kMaximum: return "maximum";
    case QueryMode::kThreshold: return "threshold";
    case QueryMode::kQuantify: return "quantify";
    case QueryMode::kPartition: return "partition";
  }
  return "unknown";
}

QueryDocument query_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("query document must be an object");
  QueryDocument q;
  auto mode_it = doc.find("mode");
  if (mode_it == doc.end() || !mode_it->is_string()) throw ParseError("query lacks a \"mode\" string");
  const std::string mode = mode_it->get<std::string>();
  static const std::pair<const char*, QueryMode> kModes[] = {
      {"map", QueryMode::kMap},         {"strong", QueryMode::kStrong},
      {"weak", QueryMode::kWeak},       {"maximum", QueryMode::kMaximum},
      {"threshold", QueryMode::kThreshold}, {"quantify", QueryMode::kQuantify},
      {"partition", QueryMode::kPartition}};
  bool known = false;
  for (const auto& [n, m] : kModes) {
    if (mode == n) {
      q.mode = m;
      known = true;
    }
  }
  if (!known) throw ParseError("unknown query mode '" + mode + "'");

  if (auto it = doc.find("hypothesis"); it != doc.end()) q.hypothesis = string_list(*it, "hypothesis");
  if (auto it = doc.find("evidence"); it != doc.end()) q.evidence = assignment_from(*it, "evidence");
  if (auto it = doc.find("focus"); it != doc.end()) q.focus = string_list(*it, "focus");
  if (auto it = doc.find("candidates"); it != doc.end()) q.candidates = string_list(*it, "candidates");
  if (auto it = doc.find("h_star"); it != doc.end()) q.h_star = assignment_from(*it, "h_star");
  if (auto it = doc.find("k"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) throw ParseError("\"k\" must be a positive integer");
    q.k = it->get<std::size_t>();
  }
  if (auto it = doc.find("s"); it != doc.end()) {
    if (it->is_number()) {
      q.s_number = it->get<double>();
      q.s = Rational::from_double(*q.s_number);
    } else if (it->is_string()) {
      q.s = Rational::parse(it->get<std::string>());
    } else {
      throw ParseError("\"s\" must be a number or a fraction string");
    }
    if (q.s->value() < 0 || q.s->value() >= 1) throw ParseError("\"s\" must lie in [0, 1)");
  }

  auto require = [&](bool present, const char* what) {
    if (!present) throw ParseError(std::string("mode '") + mode + "' requires \"" + what + "\"");
  };
  switch (q.mode) {
    case QueryMode::kMap:
      require(!q.hypothesis.empty(), "hypothesis");
      break;
    case QueryMode::kStrong:
    case QueryMode::kWeak:
    case QueryMode::kQuantify:
      require(!q.hypothesis.empty(), "hypothesis");
      require(!q.focus.empty(), "focus");
      break;
    case QueryMode::kMaximum:
      require(!q.hypothesis.empty(), "hypothesis");
      require(!q.focus.empty(), "focus");
      require(q.k.has_value(), "k");
      break;
    case QueryMode::kThreshold:
      require(q.h_star.has_value(), "h_star");
      require(q.s.has_value(), "s");
      require(!q.focus.empty(), "focus");
      if (q.hypothesis.empty())
        for (const auto& [var, state] : *q.h_star) q.hypothesis.push_back(var);
      break;
    case QueryMode::kPartition:
      require(!q.hypothesis.empty(), "hypothesis");
      require(doc.contains("candidates"), "candidates");
      break;
  }
  return q;
}

Json query_to_json(const QueryDocument& q) {
  Json doc;
  doc["mode"] = to_string(q.mode);
  doc["hypothesis"] = q.hypothesis;
  Json ev = Json::object();
  for (const auto& [var, state] : q.evidence) ev[var] = state;
  doc["evidence"] = std::move(ev);
  if (q.mode == QueryMode::kPartition) {
    doc["candidates"] = q.candidates;
  } else if (q.mode != QueryMode::kMap) {
    doc["focus"] = q.focus;
  }
  if (q.k) doc["k"] = *q.k;
  if (q.h_star) {
    Json h = Json::object();
    for (const auto& [var, state] : *q.h_star) h[var] = state;
    doc["h_star"] = std::move(h);
  }
  if (q.s_number) {
    doc["s"] = *q.s_number;
  } else if (q.s) {
    doc["s"] = q.s->to_string();
  }
  return doc;
}

Json assignment_to_json(const Network& net, const Assignment& a) {
  Json out = Json::object();
  for (const auto& v : net.variables()) {
    if (auto it = a.find(v.name); it != a.end()) out[v.name] = it->second;
  }
  return out;
}

Json map_result_to_json(const Network& net, const MapResult& r) {
  Json out;
  out["assignment"] = assignment_to_json(net, r.assignment);
  out["joint_probability"] = r.joint_probability;
  out["posterior"] = r.posterior;
  out["tie"] = r.tie;
  out["runner_up_gap"] = r.runner_up_gap;
  out["log_space"] = r.log_space;
  return out;
}

Json independence_to_json(const Network& net, const IndependenceReport& r) {
  auto optional_assignment = [&](const std::optional<Assignment>& a) {
    return a ? assignment_to_json(net, *a) : Json(nullptr);
  };
  Json out;
  out["mode"] = to_string(r.mode);
  out["verdict"] = r.verdict;
  out["h_star"] = assignment_to_json(net, r.h_star);
  if (r.mode == IndependenceMode::kMaximum) {
    out["subset"] = r.subset;
    out["subsets_tested"] = r.subsets_tested;
    out["subsets_pruned"] = r.subsets_pruned;
  } else {
    out["counterexample"] = optional_assignment(r.counterexample);
  }
  if (r.mode != IndependenceMode::kThreshold && r.mode != IndependenceMode::kMaximum) {
    out["counterexample_map"] = optional_assignment(r.counterexample_map);
    out["map_computations"] = r.map_computations;
  }
  if (r.min_joint) out["min_joint"] = *r.min_joint;
  out["ties_encountered"] = r.ties_encountered;
  out["warnings"] = r.warnings;
  Json skipped = Json::array();
  for (const auto& a : r.skipped) skipped.push_back(assignment_to_json(net, a));
  out["skipped"] = std::move(skipped);
  if (r.metrics) {
    Json m;
    m["mass"] = r.metrics->mass;
    m["proportion"] = r.metrics->proportion;
    m["mean_hamming"] = r.metrics->mean_hamming;
    m["hamming_weighting"] = "uniform";
    out["metrics"] = std::move(m);
  }
  if (!r.per_assignment.empty()) {
    Json rows = Json::array();
    for (const auto& row : r.per_assignment) {
      Json jr;
      jr["r"] = assignment_to_json(net, row.focus);
      if (r.mode != IndependenceMode::kThreshold) {
        jr["map"] = optional_assignment(row.map);
        jr["skipped"] = row.skipped;
        jr["tie"] = row.tie;
      }
      jr["joint_h_star"] = row.joint_h_star;
      rows.push_back(std::move(jr));
    }
    out["per_assignment"] = std::move(rows);
    out["table_truncated"] = r.table_truncated;
  }
  return out;
}

Json relevance_to_json(const RelevancePartition& p) {
  Json out;
  out["relevant"] = p.relevant;
  out["irrelevant"] = p.irrelevant;
  Json just = Json::array();
  for (const auto& v : p.justification) {
    Json jv;
    jv["variable"] = v.variable;
    jv["relevant"] = v.relevant;
    if (v.counterexample) {
      Json ce = Json::object();
      for (const auto& [var, state] : *v.counterexample) ce[var] = state;
      jv["counterexample"] = std::move(ce);
    } else {
      jv["counterexample"] = nullptr;
    }
    jv["tie"] = v.tie;
    just.push_back(std::move(jv));
  }
  out["justification"] = std::move(just);
  return out;
}

Json make_report(const Network& net, const QueryDocument& query, Json result, double elapsed_ms) {
  Json out;
  out["tool"] = "mapind";
  out["version"] = kToolVersion;
  out["network"] = net.name();
  out["query"] = query_to_json(query);
  out["result"] = std::move(result);
  out["elapsed_ms"] = elapsed_ms;
  return out;
}

}  // namespace mapind
