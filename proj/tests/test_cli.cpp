#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "tsm/cli.hpp"
#include "tsm/errors.hpp"

using namespace tsm;
using namespace tsm::cli;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

// Scratch directory removed at the end of each test case.
struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() /
           ("tsm-cli-" + std::to_string(rd() % 1000000000));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
  }
  std::string at(const std::string& name) const { return (path / name).string(); }
};

json read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return json::parse(in);
}

const char* kWorkedGraph =
    "# shortest paths example\n"
    "a b 2\n"
    "b c 2\n"
    "b d 4\n"
    "\n"
    "c a 1  # back edge\n"
    "c d 1\n";

const char* kCorruptionGraph =
    "a b 1\n"
    "a c 10\n"
    "c b 1\n";

}  // namespace

TEST_CASE("graph parsing") {
  SUBCASE("comments, blanks, and first-appearance order") {
    alg::Graph g = parse_graph_text(kWorkedGraph);
    CHECK(g.nodes == std::vector<std::string>{"a", "b", "c", "d"});
    REQUIRE(g.edges.size() == 5);
    CHECK(g.edges[0].src == 0);
    CHECK(g.edges[0].dst == 1);
    CHECK(g.edges[0].weight == 2);
  }
  SUBCASE("empty input is an empty graph") {
    alg::Graph g = parse_graph_text("# nothing here\n\n");
    CHECK(g.nodes.empty());
    CHECK(g.edges.empty());
  }
  SUBCASE("self loops are dropped but register the node") {
    alg::Graph g = parse_graph_text("a a 5\na b 1\n");
    CHECK(g.nodes == std::vector<std::string>{"a", "b"});
    CHECK(g.edges.size() == 1);
  }
  SUBCASE("token count errors carry the line number") {
    try {
      parse_graph_text("a b 1\nb c 2\nc d\n");
      FAIL("expected ParseError");
    } catch (const ParseError& ex) {
      CHECK(ex.line() == 3);
    }
    CHECK_THROWS_AS(parse_graph_text("a b 1 extra\n"), ParseError);
  }
  SUBCASE("weights must be nonnegative integers") {
    try {
      parse_graph_text("a b -3\n");
      FAIL("expected NegativeWeight");
    } catch (const NegativeWeight& ex) {
      CHECK(ex.line() == 1);
    }
    CHECK_THROWS_AS(parse_graph_text("a b 1x\n"), ParseError);
    CHECK_THROWS_AS(parse_graph_text("a b 99999999999999999999\n"), ParseError);
  }
  SUBCASE("duplicate edges are rejected") {
    try {
      parse_graph_text("a b 1\na b 2\n");
      FAIL("expected ParseError");
    } catch (const ParseError& ex) {
      CHECK(ex.line() == 2);
    }
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(parse_graph_file("/nonexistent/graph.txt"), Error);
  }
}

TEST_CASE("bindings parsing") {
  lang::Bindings b = parse_bindings_text(R"({"b": [4, 2], "c": [5, "inf"]})");
  REQUIRE(b.size() == 2);
  CHECK(b.at("b") == Wavefront({TimeValue(4), TimeValue(2)}));
  CHECK(b.at("c") == Wavefront({TimeValue(5), kInf}));

  CHECK_THROWS_AS(parse_bindings_text("[1, 2]"), Error);
  CHECK_THROWS_AS(parse_bindings_text("{"), Error);
  CHECK_THROWS_AS(parse_bindings_text(R"({"x": 3})"), Error);
  CHECK_THROWS_AS(parse_bindings_text(R"({"x": [-1]})"), Error);
  CHECK_THROWS_AS(parse_bindings_text(R"({"x": [1.5]})"), Error);
  CHECK_THROWS_AS(parse_bindings_text(R"({"x": ["soon"]})"), Error);
}

TEST_CASE("dijkstra command") {
  TempDir dir;
  const std::string graph = dir.file("g.txt", kWorkedGraph);

  SUBCASE("success with a JSON report") {
    DijkstraCommand cmd;
    cmd.graph_path = graph;
    cmd.source = "a";
    cmd.out_path = dir.at("report.json");
    std::ostringstream out, err;
    REQUIRE(run_dijkstra(cmd, out, err) == 0);
    CHECK(err.str().empty());
    CHECK(out.str().find("oracle match: yes") != std::string::npos);

    json report = read_report(cmd.out_path);
    CHECK(report["command"] == "dijkstra");
    CHECK(report["oracle_match"] == true);
    CHECK(report["warnings"].empty());
    CHECK(report["results"]["distances"]["a"] == 0);
    CHECK(report["results"]["distances"]["b"] == 2);
    CHECK(report["results"]["distances"]["c"] == 4);
    CHECK(report["results"]["distances"]["d"] == 5);
    CHECK(report["results"]["visit_order"] ==
          json::array({"a", "b", "c", "d"}));
    CHECK(report["results"]["tree_edges"].size() == 3);
    CHECK(report["machine"]["width"] == 4);
    CHECK(report["inputs"]["literal_f"] == false);

    // The report must survive a parse/dump round trip unchanged.
    CHECK(json::parse(report.dump()) == report);

    // Totals reconcile with the per-opcode rows.
    const json& totals = report["costs"]["totals"];
    double energy = 0.0, latency = 0.0;
    std::size_t transitions = 0;
    for (const auto& [name, row] : report["costs"]["per_opcode"].items()) {
      energy += row["energy_pJ"].get<double>();
      latency += row["latency_ns"].get<double>();
      transitions += row["transitions"].get<std::size_t>();
    }
    CHECK(totals["energy_pJ"].get<double>() == doctest::Approx(energy));
    CHECK(totals["latency_ns"].get<double>() == doctest::Approx(latency));
    CHECK(totals["transitions"].get<std::size_t>() == transitions);
    CHECK(totals["GETS"].get<double>() > 0.0);
    CHECK(totals["GETJ"].get<double>() > 0.0);
    CHECK(report["costs"]["per_opcode"]["VMM"]["count"] == 4);
  }

  SUBCASE("unknown source exits nonzero") {
    DijkstraCommand cmd;
    cmd.graph_path = graph;
    cmd.source = "zz";
    std::ostringstream out, err;
    CHECK(run_dijkstra(cmd, out, err) == 1);
    CHECK(err.str().find("error:") != std::string::npos);
  }

  SUBCASE("range violations name the failing iteration") {
    DijkstraCommand cmd;
    cmd.graph_path = dir.file("wide.txt", "a b 9\n");
    cmd.source = "a";
    cmd.bits = 3;
    std::ostringstream out, err;
    CHECK(run_dijkstra(cmd, out, err) == 1);
    CHECK(err.str().find("iteration 0") != std::string::npos);
  }

  SUBCASE("literal mask run fails the oracle and says why") {
    DijkstraCommand cmd;
    cmd.graph_path = dir.file("corrupt.txt", kCorruptionGraph);
    cmd.source = "a";
    cmd.literal_f = true;
    cmd.out_path = dir.at("corrupt.json");
    std::ostringstream out, err;
    CHECK(run_dijkstra(cmd, out, err) == 1);
    CHECK(out.str().find("oracle match: NO") != std::string::npos);
    json report = read_report(cmd.out_path);
    CHECK(report["oracle_match"] == false);
    bool mentions_tree = false;
    for (const auto& w : report["warnings"]) {
      if (w.get<std::string>().find("parent matrix") != std::string::npos) {
        mentions_tree = true;
      }
    }
    CHECK(mentions_tree);
  }

  SUBCASE("missing graph file") {
    DijkstraCommand cmd;
    cmd.graph_path = dir.at("absent.txt");
    cmd.source = "a";
    std::ostringstream out, err;
    CHECK(run_dijkstra(cmd, out, err) == 1);
    CHECK(err.str().find("cannot open") != std::string::npos);
  }
}

TEST_CASE("nw command") {
  TempDir dir;
  SUBCASE("success") {
    NwCommand cmd;
    cmd.x = "GATTACA";
    cmd.y = "GCATGCA";
    cmd.indel = 2;
    cmd.mismatch = 3;
    cmd.out_path = dir.at("nw.json");
    std::ostringstream out, err;
    REQUIRE(run_nw(cmd, out, err) == 0);
    json report = read_report(cmd.out_path);
    CHECK(report["command"] == "nw");
    CHECK(report["results"]["cost"] == 7);
    CHECK(report["oracle_match"] == true);
    CHECK(json::parse(report.dump()) == report);
  }
  SUBCASE("length mismatch exits nonzero") {
    NwCommand cmd;
    cmd.x = "GA";
    cmd.y = "G";
    std::ostringstream out, err;
    CHECK(run_nw(cmd, out, err) == 1);
    CHECK(err.str().find("error:") != std::string::npos);
  }
}

TEST_CASE("closure command") {
  TempDir dir;
  ClosureCommand cmd;
  cmd.graph_path = dir.file("g.txt", kWorkedGraph);
  cmd.source = "b";
  cmd.hops = 1;
  cmd.out_path = dir.at("closure.json");
  std::ostringstream out, err;
  REQUIRE(run_closure(cmd, out, err) == 0);
  json report = read_report(cmd.out_path);
  CHECK(report["results"]["wavefront"]["a"] == "inf");
  CHECK(report["results"]["wavefront"]["b"] == 0);
  CHECK(report["results"]["wavefront"]["c"] == 2);
  CHECK(report["results"]["wavefront"]["d"] == 4);
  CHECK(report["oracle_match"] == true);
}

TEST_CASE("eval command") {
  TempDir dir;
  SUBCASE("the documented program") {
    EvalCommand cmd;
    cmd.expr = "b + (c -| (d * e))";
    cmd.bind_path = dir.file(
        "binds.json",
        R"({"b": [4, 2], "c": [5, 0], "d": [1, 1], "e": [2, 0]})");
    cmd.out_path = dir.at("eval.json");
    std::ostringstream out, err;
    REQUIRE(run_eval(cmd, out, err) == 0);
    json report = read_report(cmd.out_path);
    CHECK(report["results"]["canonical"] == "(b + (c -| (d * e)))");
    CHECK(report["results"]["wavefront"] == json::array({3, 2}));
    CHECK(report["results"]["transitions"] == 4);
    CHECK(report["oracle_match"] == true);
  }
  SUBCASE("constant expression needs no bindings") {
    EvalCommand cmd;
    cmd.expr = "2 * 3";
    std::ostringstream out, err;
    CHECK(run_eval(cmd, out, err) == 0);
    CHECK(out.str().find("5") != std::string::npos);
  }
  SUBCASE("syntax errors exit nonzero") {
    EvalCommand cmd;
    cmd.expr = "a +";
    std::ostringstream out, err;
    CHECK(run_eval(cmd, out, err) == 1);
    CHECK(err.str().find("position") != std::string::npos);
  }
  SUBCASE("unbound variable exits nonzero") {
    EvalCommand cmd;
    cmd.expr = "q + 1";
    std::ostringstream out, err;
    CHECK(run_eval(cmd, out, err) == 1);
    CHECK(err.str().find("q") != std::string::npos);
  }
}

TEST_CASE("installed binary end to end") {
  TempDir dir;
  const std::string graph = dir.file("g.txt", kWorkedGraph);
  const std::string cli = TSM_CLI_PATH;

  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > " + dir.at("stdout.txt") +
                            " 2> " + dir.at("stderr.txt");
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
  };

  SUBCASE("dijkstra writes a parseable report and exits 0") {
    const int rc = run("dijkstra --graph " + graph + " --source a --out " +
                       dir.at("report.json"));
    CHECK(rc == 0);
    json report = read_report(dir.at("report.json"));
    CHECK(report["command"] == "dijkstra");
    CHECK(report["oracle_match"] == true);
  }
  SUBCASE("eval evaluates an expression") {
    const int rc = run("eval --expr \"2 * 3 + 9\"");
    CHECK(rc == 0);
  }
  SUBCASE("bad flags exit nonzero") {
    CHECK(run("dijkstra --no-such-flag") != 0);
  }
  SUBCASE("oracle mismatch exits 1") {
    const std::string corrupt = dir.file("corrupt.txt", kCorruptionGraph);
    const int rc = run("dijkstra --graph " + corrupt +
                       " --source a --paper-literal-f");
    CHECK(rc == 1);
  }
}
