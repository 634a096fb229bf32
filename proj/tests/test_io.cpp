#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "hddm/graph_json.hpp"
#include "hddm/metrics.hpp"
#include "hddm/smiles.hpp"

using namespace hddm;

namespace {

std::string data_path(const std::string& name) {
  return std::string(HDDM_DATA_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("graph state json round trip") {
  GraphState g = GraphState::empty(3, 0.8);
  g.nodes << 4, 0, 2;
  g.edges(0, 1) = g.edges(1, 0) = 1;
  g.edges(1, 2) = g.edges(2, 1) = 4;

  const std::string line = graph_state_to_json(g);
  const GraphState back = graph_state_from_json(line);
  CHECK(back.n == 3);
  CHECK(back.t == 0.8);
  CHECK(back.nodes == g.nodes);
  CHECK(back.edges == g.edges);

  CHECK_THROWS_AS(graph_state_from_json(R"({"n":2,"t":0,"nodes":[1],"edges":[]})"),
                  std::invalid_argument);
}

TEST_CASE("denoiser output json round trip") {
  DenoiserOutput out;
  out.n = 2;
  out.node_probs = Eigen::MatrixXd(2, 3);
  out.node_probs << 0.2, 0.3, 0.5, 1.0, 0.0, 0.0;
  out.edge_probs = Eigen::MatrixXd(1, 5);
  out.edge_probs << 0.1, 0.2, 0.3, 0.2, 0.2;

  const DenoiserOutput back =
      denoiser_output_from_json(denoiser_output_to_json(out));
  CHECK(back.n == 2);
  CHECK((back.node_probs - out.node_probs).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.edge_probs - out.edge_probs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shipped hierarchy configs match the built-in tables") {
  CHECK(slurp(data_path("moses.hierarchy.json")) ==
        hierarchy_config_to_json(DAEVocab::moses(), GroupingTable::moses()));
  CHECK(slurp(data_path("guacamol.hierarchy.json")) ==
        hierarchy_config_to_json(DAEVocab::guacamol(),
                                 GroupingTable::guacamol()));

  DAEVocab vocab;
  GroupingTable table;
  hierarchy_config_from_json(slurp(data_path("guacamol.hierarchy.json")),
                             vocab, table);
  CHECK(vocab.size() == 56);
  CHECK(table.group_count == 6);
}

TEST_CASE("bundled corpora are valid, lossless, and cover their vocabularies") {
  struct Corpus {
    const char* file;
    const DAEVocab* vocab;
  };
  for (const Corpus& corpus :
       {Corpus{"moses_200.smi", &DAEVocab::moses()},
        Corpus{"guacamol_200.smi", &DAEVocab::guacamol()}}) {
    const std::vector<std::string> lines =
        read_smiles_lines(data_path(corpus.file));
    REQUIRE(lines.size() == 200);

    std::set<int> seen_tokens;
    std::set<std::string> canon;
    for (const std::string& smi : lines) {
      CAPTURE(smi);
      const MolGraph g = parse(smi, *corpus.vocab);
      const SanitizeVerdict verdict = sanitize(g, *corpus.vocab);
      CAPTURE(verdict.reasons.empty() ? "" : verdict.reasons.front());
      REQUIRE(verdict.valid);

      // Token-exact round trip through decode-encode and through SMILES.
      CHECK(dae_encode(dae_decode(g, *corpus.vocab), *corpus.vocab) == g);
      const MolGraph reparsed = parse(write(g, *corpus.vocab), *corpus.vocab);
      CHECK(canonical_form(reparsed, *corpus.vocab) ==
            canonical_form(g, *corpus.vocab));

      for (int token : g.atoms) seen_tokens.insert(token);
      canon.insert(canonical_form(g, *corpus.vocab));
    }
    // Every vocabulary token appears somewhere, and molecules are distinct.
    CHECK(static_cast<int>(seen_tokens.size()) == corpus.vocab->size());
    CHECK(canon.size() == lines.size());
  }
}
