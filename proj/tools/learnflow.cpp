// learnflow: command line front end for nets, models and the stepper service.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "learnflow/analysis.hpp"
#include "learnflow/corpus.hpp"
#include "learnflow/engine.hpp"
#include "learnflow/lang/diagnostic.hpp"
#include "learnflow/lang/parser.hpp"
#include "learnflow/net_io.hpp"
#include "learnflow/service.hpp"
#include "learnflow/simulator.hpp"

namespace fs = std::filesystem;
using namespace learnflow;
using nlohmann::json;

namespace {

// A model argument is a corpus id, a JSON structural net, or a model file.
struct Loaded {
  std::optional<ClassicalNet> classical;
  lang::ModelPtr model;  // null for JSON nets
};

Loaded load(const std::string& arg) {
  Loaded l;
  if (corpus::is_id(arg) && !fs::exists(arg)) {
    l.model = corpus::load(arg);
  } else if (fs::path(arg).extension() == ".json") {
    l.classical = net_from_json(json::parse(corpus::read_file(arg)));
    return l;
  } else {
    l.model = lang::load_model(corpus::read_file(arg));
  }
  if (l.model->is_classical()) l.classical = classical_from_model(*l.model);
  return l;
}

template <class Fn>
int with_engine(const Loaded& l, Fn&& fn) {
  if (l.classical) return fn(ClassicalEngine(*l.classical));
  if (l.model->is_colored_only()) return fn(ColoredEngine(l.model));
  return fn(ReferenceEngine(l.model));
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

WorkflowNet workflow(const Loaded& l, const std::string& source, const std::string& sink) {
  if (!l.classical) throw std::runtime_error("workflow checks need a classical net (Unit places, constant arcs)");
  WorkflowNet wf{l.classical->net, source.empty() ? l.classical->source.value_or("") : source,
                 sink.empty() ? l.classical->sink.value_or("") : sink};
  if (wf.source.empty() || wf.sink.empty())
    throw std::runtime_error("cannot infer source and sink places; pass --source and --sink");
  return wf;
}

std::string render_graph(const auto& g, const std::string& format) {
  if (format == "dot") return analysis::to_dot(g);
  if (format == "json") return analysis::to_json(g).dump(2) + "\n";
  std::ostringstream s;
  s << "states: " << g.size() << "\nedges: " << g.edges.size() << "\ndeadlocks: " << analysis::find_deadlocks(g).size()
    << "\ntruncated: " << (g.truncated ? "yes" : "no") << "\n";
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Petri nets, colored nets and nets with reference data for learnflow models"};
  app.require_subcommand(1);

  std::string model_arg, source, sink, out, format = "summary", invariant, trace_file, static_dir, host = "127.0.0.1";
  std::size_t max_states = 100000, max_depth = static_cast<std::size_t>(-1), max_steps = 100, traces = 1;
  std::uint64_t seed = 0;
  int port = 8080;
  std::vector<std::string> trace_files;

  auto* validate = app.add_subcommand("validate", "Parse and type check a model; check WF structure of classical nets");
  validate->add_option("model", model_arg, "Model file, JSON net or corpus id")->required();
  validate->add_option("--source", source, "Source place (inferred if unique)");
  validate->add_option("--sink", sink, "Sink place (inferred if unique)");

  auto* soundness = app.add_subcommand("soundness", "Check classical soundness of a workflow net");
  soundness->add_option("model", model_arg)->required();
  soundness->add_option("--source", source);
  soundness->add_option("--sink", sink);
  soundness->add_option("--max-states", max_states);

  auto* explore = app.add_subcommand("explore", "Explore the reachable state graph");
  explore->add_option("model", model_arg)->required();
  explore->add_option("--max-states", max_states);
  explore->add_option("--max-depth", max_depth);
  explore->add_option("--format", format)->check(CLI::IsMember({"summary", "dot", "json"}));
  explore->add_option("--out", out, "Output file (stdout by default)");

  auto* simulate = app.add_subcommand("simulate", "Seeded random runs written as a trace file");
  simulate->add_option("model", model_arg)->required();
  simulate->add_option("--seed", seed, "Seed of the first trace; trace i uses seed + i");
  simulate->add_option("--max-steps", max_steps);
  simulate->add_option("--traces", traces);
  simulate->add_option("--out", out);

  auto* replay = app.add_subcommand("replay", "Replay a trace file and compare every state hash");
  replay->add_option("model", model_arg)->required();
  replay->add_option("trace", trace_file)->required();

  auto* export_log = app.add_subcommand("export-log", "Export trace files as an event log");
  export_log->add_option("traces", trace_files)->required();
  export_log->add_option("--format", format)->check(CLI::IsMember({"csv"}));
  export_log->add_option("--out", out);

  auto* check = app.add_subcommand("check", "Check model invariants over the explored state graph");
  check->add_option("model", model_arg)->required();
  check->add_option("--invariant", invariant, "Only this invariant");
  check->add_option("--max-states", max_states);

  auto* deadlocks = app.add_subcommand("deadlocks", "List reachable states without enabled modes");
  deadlocks->add_option("model", model_arg)->required();
  deadlocks->add_option("--max-states", max_states);

  auto* print = app.add_subcommand("print", "Print a model in canonical form");
  print->add_option("model", model_arg)->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP stepper service");
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--static", static_dir, "Directory of UI assets served at /");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      service::SessionManager sessions;
      httplib::Server server;
      service::install_routes(server, sessions, static_dir);
      std::cerr << "listening on " << host << ":" << port << "\n";
      return server.listen(host, port) ? 0 : 1;
    }

    if (*export_log) {
      std::vector<sim::Trace> all;
      for (const auto& f : trace_files)
        for (auto& t : sim::parse_traces(corpus::read_file(f))) all.push_back(std::move(t));
      std::ostringstream csv;
      sim::write_csv(csv, all);
      write_out(out, csv.str());
      return 0;
    }

    Loaded l = load(model_arg);
    ExploreBounds bounds{max_states, max_depth};

    if (*validate) {
      if (l.model)
        std::cout << "model ok: " << l.model->places.size() << " places, " << l.model->transitions.size()
                  << " transitions\n";
      if (!l.classical) return 0;
      WorkflowNet wf = workflow(l, source, sink);
      auto report = wf_validate(wf.net, wf.source, wf.sink);
      for (const auto& v : report) std::cout << "violation: " << v.message << "\n";
      if (report.empty()) std::cout << "workflow net ok (source " << wf.source << ", sink " << wf.sink << ")\n";
      return report.empty() ? 0 : 1;
    }

    if (*soundness) {
      auto verdict = wf_soundness(workflow(l, source, sink), bounds);
      std::cout << to_string(verdict.status) << " (" << verdict.states << " states)\n";
      for (const auto& r : verdict.reasons) std::cout << "  " << r << "\n";
      return verdict.status == SoundnessVerdict::Status::Sound ? 0 : 1;
    }

    if (*explore) {
      if (l.classical) write_out(out, render_graph(learnflow::explore(l.classical->net, l.classical->initial, bounds), format));
      else {
        pnrd::PnrdNet net(l.model);
        write_out(out, render_graph(analysis::explore_hl(net, net.initial_state(), bounds), format));
      }
      return 0;
    }

    if (*deadlocks) {
      auto report = [&](const auto& g) {
        auto d = analysis::find_deadlocks(g);
        for (std::size_t n : d) std::cout << g.keys[n] << "\n";
        std::cout << d.size() << " deadlock(s) in " << g.size() << " states" << (g.truncated ? " (truncated)" : "")
                  << "\n";
        return 0;
      };
      if (l.classical) return report(learnflow::explore(l.classical->net, l.classical->initial, bounds));
      pnrd::PnrdNet net(l.model);
      return report(analysis::explore_hl(net, net.initial_state(), bounds));
    }

    if (*simulate) {
      return with_engine(l, [&](const auto& engine) {
        std::vector<sim::Trace> all;
        for (std::size_t i = 0; i < traces; ++i) all.push_back(sim::simulate(engine, engine.initial(), seed + i, max_steps));
        write_out(out, sim::dump_traces(all));
        return 0;
      });
    }

    if (*replay) {
      auto all = sim::parse_traces(corpus::read_file(trace_file));
      return with_engine(l, [&](const auto& engine) {
        int rc = 0;
        for (std::size_t i = 0; i < all.size(); ++i) {
          auto r = sim::replay(engine, engine.initial(), all[i]);
          std::cout << "trace " << i << ": " << (r.ok ? "ok" : "FAILED " + r.error) << " (" << r.steps << " steps)\n";
          if (!r.ok) rc = 1;
        }
        return rc;
      });
    }

    if (*print) {
      if (!l.model) std::cout << net_to_json(*l.classical).dump(2) << "\n";
      else std::cout << lang::print_model(l.model->ast);
      return 0;
    }

    if (*check) {
      if (!l.model) throw std::runtime_error("JSON nets have no invariants");
      pnrd::PnrdNet net(l.model);
      auto g = analysis::explore_hl(net, net.initial_state(), bounds);
      int rc = 0;
      bool any = false;
      for (const auto& inv : l.model->invariants) {
        if (!invariant.empty() && inv.name != invariant) continue;
        any = true;
        auto r = analysis::check_invariant(g, inv);
        if (r.holds) {
          std::cout << inv.name << ": holds" << (r.partial ? " on the explored prefix" : "") << " (" << g.size()
                    << " states)\n";
          continue;
        }
        rc = 1;
        std::cout << inv.name << ": violated by " << r.witness.to_string() << " after " << r.path.size() << " steps\n";
        for (const auto& label : analysis::path_labels(g, r.path)) std::cout << "  " << label << "\n";
        std::cout << "  state: " << g.keys[r.node] << "\n";
      }
      if (!any) throw std::runtime_error(invariant.empty() ? "model declares no invariants"
                                                           : "no invariant named '" + invariant + "'");
      return rc;
    }
  } catch (const lang::ModelError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << model_arg << ":" << d.to_string() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
