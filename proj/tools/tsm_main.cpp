// Command-line front end for the temporal state machine library.

#include <iostream>

#include "CLI11.hpp"
#include "tsm/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"temporal state machine simulator over the min-plus semiring"};
  app.require_subcommand(1);

  tsm::cli::DijkstraCommand dj;
  CLI::App* dijkstra =
      app.add_subcommand("dijkstra", "single-source shortest path tree");
  dijkstra->add_option("--graph", dj.graph_path, "edge list file")->required();
  dijkstra->add_option("--source", dj.source, "source node name")->required();
  dijkstra->add_option("--bits", dj.bits, "dynamic range bits (default 5)");
  dijkstra->add_option("--cost-model", dj.cost_model_path,
                       "cost table JSON file");
  dijkstra->add_flag("--paper-literal-f", dj.literal_f,
                     "unamended exploration mask; can corrupt the parent "
                     "matrix on graphs with edges into visited nodes");
  dijkstra->add_option("--out", dj.out_path, "write a JSON report here");

  tsm::cli::NwCommand nw;
  CLI::App* nw_cmd =
      app.add_subcommand("nw", "global alignment cost of two sequences");
  nw_cmd->add_option("--x", nw.x, "first sequence over G, A, T, C")->required();
  nw_cmd->add_option("--y", nw.y, "second sequence, same length")->required();
  nw_cmd->add_option("--indel", nw.indel, "insertion/deletion cost (default 1)");
  nw_cmd->add_option("--mismatch", nw.mismatch, "substitution cost (default 1)");
  nw_cmd->add_option("--cost-model", nw.cost_model_path,
                     "cost table JSON file");
  nw_cmd->add_option("--out", nw.out_path, "write a JSON report here");

  tsm::cli::ClosureCommand cl;
  CLI::App* closure =
      app.add_subcommand("closure", "k-hop min-plus closure from a source");
  closure->add_option("--graph", cl.graph_path, "edge list file")->required();
  closure->add_option("--source", cl.source, "source node name")->required();
  closure->add_option("--hops", cl.hops, "number of relaxation hops")
      ->required();
  closure->add_option("--bits", cl.bits,
                      "dynamic range bits (default: sized automatically)");
  closure->add_option("--cost-model", cl.cost_model_path,
                      "cost table JSON file");
  closure->add_option("--out", cl.out_path, "write a JSON report here");

  tsm::cli::EvalCommand ev;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "evaluate a wavefront expression");
  eval_cmd
      ->add_option("--expr", ev.expr,
                   "expression; operators + (min), ^ (max), * (delay), "
                   "-| (inhibit)")
      ->required();
  eval_cmd->add_option("--bind", ev.bind_path,
                       "JSON object of variable bindings");
  eval_cmd->add_option("--out", ev.out_path, "write a JSON report here");

  CLI11_PARSE(app, argc, argv);

  if (dijkstra->parsed()) {
    return tsm::cli::run_dijkstra(dj, std::cout, std::cerr);
  }
  if (nw_cmd->parsed()) return tsm::cli::run_nw(nw, std::cout, std::cerr);
  if (closure->parsed()) return tsm::cli::run_closure(cl, std::cout, std::cerr);
  if (eval_cmd->parsed()) return tsm::cli::run_eval(ev, std::cout, std::cerr);
  return 1;
}
