#include "mapind/cli.hpp"

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "mapind/bench.hpp"
#include "mapind/compiler.hpp"
#include "mapind/documents.hpp"
#include "mapind/errors.hpp"
#include "mapind/independence.hpp"
#include "mapind/inference.hpp"

namespace mapind::cli {

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Assignment parse_pairs(const std::string& text) {
  Assignment a;
  for (const auto& pair : split_list(text)) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
      throw ParseError("expected VAR=STATE, got '" + pair + "'");
    }
    a[pair.substr(0, eq)] = pair.substr(eq + 1);
  }
  return a;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

struct QueryArgs {
  std::string network;
  std::string query;
  std::string output;
  unsigned parallel = 1;
  std::size_t table_limit = 0;
  bool strict_zeros = false;
};

int run_query(const QueryArgs& args) {
  const Network net = load_network(args.network);
  const QueryDocument q = query_from_json(read_json_file(args.query));

  IndependenceOptions options;
  options.workers = args.parallel;
  options.table_limit = args.table_limit;
  options.strict_zeros = args.strict_zeros;
  const QueryPartition partition{q.evidence, q.hypothesis, q.focus};

  const auto start = std::chrono::steady_clock::now();
  Json result;
  switch (q.mode) {
    case QueryMode::kMap:
      result = map_result_to_json(net, map_solve(net, q.hypothesis, q.evidence, {}, options.inference));
      break;
    case QueryMode::kStrong:
      result = independence_to_json(net, strong_map_independence(net, partition, options));
      break;
    case QueryMode::kWeak:
      result = independence_to_json(net, weak_map_independence(net, partition, options));
      break;
    case QueryMode::kMaximum:
      result = independence_to_json(net, maximum_map_independence(net, partition, *q.k, options));
      break;
    case QueryMode::kThreshold:
      result = independence_to_json(net, threshold_map_independence(net, *q.h_star, partition, *q.s, options));
      break;
    case QueryMode::kQuantify:
      result = independence_to_json(net, quantify(net, partition, options));
      break;
    case QueryMode::kPartition:
      result = relevance_to_json(
          relevance_partition(net, q.evidence, q.hypothesis, q.candidates, RelevanceMode::kWeak, options));
      break;
  }
  write_text_file(args.output, dump_json(make_report(net, q, std::move(result), elapsed_ms(start))));
  return kOk;
}

}  // namespace

int report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const QueryError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NetworkError& e) {
    err << "invalid network: " << e.what() << '\n';
    return kInvalidNetwork;
  } catch (const InfeasibleQueryError& e) {
    err << "infeasible query: " << e.what() << '\n';
    return kInfeasible;
  } catch (const CapacityError& e) {
    err << "capacity exceeded: " << e.what() << '\n';
    return kCapacity;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact inference and MAP-independence analysis for discrete Bayesian networks", "mapind"};
  app.require_subcommand(1);

  std::string network_path;
  auto* validate = app.add_subcommand("validate", "Check a network document against every invariant");
  validate->add_option("--network", network_path, "Network document")->required();

  std::string hypothesis;
  std::string evidence;
  std::string method = "ve";
  auto* map = app.add_subcommand("map", "Most probable explanation of the hypothesis variables");
  map->add_option("--network", network_path, "Network document")->required();
  map->add_option("--hypothesis", hypothesis, "Comma-separated hypothesis variables")->required();
  map->add_option("--evidence", evidence, "Comma-separated VAR=STATE pairs");
  map->add_option("--method", method, "Marginal computation")->check(CLI::IsMember({"ve", "brute"}));

  QueryArgs qargs;
  auto* query = app.add_subcommand("query", "Run a query document and write a report");
  query->add_option("--network", qargs.network, "Network document")->required();
  query->add_option("--query", qargs.query, "Query document")->required();
  query->add_option("--output", qargs.output, "Report path")->required();
  query->add_option("--parallel", qargs.parallel, "Worker threads for the Ω(R) sweep")->check(CLI::Range(1u, 256u));
  query->add_option("--table-limit", qargs.table_limit, "Rows of per-assignment detail to keep");
  query->add_flag("--strict-zeros", qargs.strict_zeros, "Fail on zero-probability focus assignments");

  std::string formula;
  std::string aset;
  std::string out_path;
  std::string emit_query;
  auto* compile = app.add_subcommand("compile", "Compile a propositional formula into a network");
  compile->add_option("--formula", formula, "Formula over ! & | and identifiers")->required();
  compile->add_option("--aset", aset, "Comma-separated A partition for the majority query");
  compile->add_option("--out", out_path, "Network output path (stdout if omitted)");
  compile->add_option("--emit-query", emit_query, "Write the threshold query document here");

  std::size_t rmax = 0;
  std::size_t trials = 5;
  std::string bench_output;
  auto* bench_cmd = app.add_subcommand("bench", "Time strong MAP-independence as |R| grows");
  bench_cmd->add_option("--network", network_path, "Network document")->required();
  bench_cmd->add_option("--hypothesis", hypothesis, "Comma-separated hypothesis variables")->required();
  bench_cmd->add_option("--evidence", evidence, "Comma-separated VAR=STATE pairs");
  bench_cmd->add_option("--rmax", rmax, "Largest |R|")->required()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--trials", trials, "Timed repetitions per row")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--output", bench_output, "Report path")->required();

  std::vector<const char*> argv{"mapind"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) {
      const Network net = network_from_json(read_json_file(network_path));
      const ValidationReport report = validate_network(net);
      if (report.empty()) {
        out << "valid: " << net.size() << " variables\n";
        return kOk;
      }
      for (const auto& v : report) {
        err << to_string(v.kind) << " at " << v.location << ": " << v.message << '\n';
      }
      return kInvalidNetwork;
    }
    if (*map) {
      const Network net = load_network(network_path);
      InferenceOptions options;
      options.method = method == "brute" ? Method::kBruteForce : Method::kVariableElimination;
      const MapResult r = map_solve(net, split_list(hypothesis), parse_pairs(evidence), {}, options);
      out << dump_json(map_result_to_json(net, r));
      return kOk;
    }
    if (*query) return run_query(qargs);
    if (*compile) {
      const Formula f = parse_formula(formula);
      const auto a = split_list(aset);
      if (!emit_query.empty() && a.empty()) throw ParseError("--emit-query requires --aset");
      const CompiledInstance inst = a.empty() ? compile_network(f) : build_amajsat_instance(f, a);
      const std::string doc = dump_json(network_to_json(inst.network));
      if (out_path.empty()) {
        out << doc;
      } else {
        write_text_file(out_path, doc);
      }
      if (!emit_query.empty()) {
        QueryDocument q;
        q.mode = QueryMode::kThreshold;
        q.hypothesis = {inst.phi_node};
        q.focus = inst.query->focus;
        q.h_star = inst.query->h_star;
        q.s = inst.query->s;
        write_text_file(emit_query, dump_json(query_to_json(q)));
      }
      return kOk;
    }
    if (*bench_cmd) {
      const Network net = load_network(network_path);
      const BenchReport report = bench(net, split_list(hypothesis), parse_pairs(evidence), rmax, trials);
      write_text_file(bench_output, dump_json(bench_to_json(report)));
      return kOk;
    }
  } catch (...) {
    return report_exception(err);
  }
  return kUsage;
}

}  // namespace mapind::cli
