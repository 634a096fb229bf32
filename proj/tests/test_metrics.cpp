#include <doctest.h>

#include <numeric>

#include "hddm/metrics.hpp"
#include "hddm/rng.hpp"
#include "hddm/smiles.hpp"
#include "oracles.hpp"

using namespace hddm;

TEST_CASE("murcko scaffold pruning") {
  const DAEVocab& vocab = DAEVocab::moses();

  // Ethylbenzene prunes to benzene.
  const MolGraph benzene = parse("c1ccccc1", vocab);
  const MolGraph ethyl = parse("CCc1ccccc1", vocab);
  CHECK(canonical_form(murcko_scaffold(ethyl), vocab) ==
        canonical_form(benzene, vocab));

  // Acyclic molecules shrink to nothing.
  CHECK(murcko_scaffold(parse("CCO", vocab)).n() == 0);

  // A CH2 linker between two rings is retained.
  const MolGraph linked = parse("c1ccc(cc1)Cc1ccccc1", vocab);
  const MolGraph scaffold = murcko_scaffold(linked);
  CHECK(scaffold.n() == 13);
  CHECK(canonical_form(scaffold, vocab) == canonical_form(linked, vocab));

  // Substituents on the linker fall away.
  const MolGraph decorated = parse("c1ccc(cc1)C(CC)c1ccccc1", vocab);
  CHECK(canonical_form(murcko_scaffold(decorated), vocab) ==
        canonical_form(linked, vocab));
}

TEST_CASE("morgan fingerprints are deterministic and order-invariant") {
  const DAEVocab& vocab = DAEVocab::moses();
  const MolGraph mol = parse("CC(=O)Nc1ccccc1", vocab);
  const Fingerprint fp = morgan_fingerprint(mol, vocab);
  CHECK(fp.count() > 0);
  CHECK(tanimoto(fp, fp) == 1.0);

  // Identical molecules, identical bitsets.
  const Fingerprint fp2 = morgan_fingerprint(parse("CC(=O)Nc1ccccc1", vocab), vocab);
  CHECK(fp.words == fp2.words);

  // Permuted atom order, identical bitsets.
  RngStream rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> perm(static_cast<std::size_t>(mol.n()));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = mol.n() - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.next_uniform() * (i + 1));
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(j)]);
    }
    const Fingerprint fpp =
        morgan_fingerprint(hddm_test::permute(mol, perm), vocab);
    CHECK(fpp.words == fp.words);
  }

  // Methane and benzene share no environments.
  const Fingerprint methane = morgan_fingerprint(parse("C", vocab), vocab);
  const Fingerprint benzene = morgan_fingerprint(parse("c1ccccc1", vocab), vocab);
  CHECK(tanimoto(methane, benzene) == 0.0);
}

TEST_CASE("diversity formula keeps its self-pairs") {
  const DAEVocab& vocab = DAEVocab::moses();
  const Fingerprint a = morgan_fingerprint(parse("C", vocab), vocab);
  const Fingerprint b = morgan_fingerprint(parse("c1ccccc1", vocab), vocab);

  CHECK(diversity({}) == 0.0);
  CHECK(diversity({a}) == 0.0);
  // Two molecules with zero similarity: 1 - 2/4.
  CHECK(diversity({a, b}) == doctest::Approx(0.5));
  // Identical fingerprints: always 0.
  CHECK(diversity({a, a, a}) == doctest::Approx(0.0));
  // Upper bound 1 - 1/m.
  const double d3 = diversity({a, b, morgan_fingerprint(parse("CCO", vocab), vocab)});
  CHECK(d3 <= 1.0 - 1.0 / 3.0 + 1e-12);
}

TEST_CASE("scaffold set metrics on constructed fixtures") {
  // Unique generated scaffolds {a,b,c}, train has {b}, n_total = 4.
  CHECK(scaffold_novelty({"a", "b", "c", "c"}, {"b"}, 4) ==
        doctest::Approx(0.5));
  CHECK(scaffold_novelty({"b"}, {"b"}, 4) == 0.0);
  // Test scaffolds fully retrieved: |gen ∩ test| = 3 of n_total = 100.
  CHECK(scaffold_retrieval({"x", "y", "z"}, {"x", "y", "z"}, 100) ==
        doctest::Approx(0.03));
  CHECK(scaffold_retrieval({"x"}, {"y"}, 10) == 0.0);

  // Set identity: |S_gen| = |S_gen \ S_train| + |S_gen ∩ S_train|.
  const std::vector<std::string> gen = {"a", "b", "c", "d", "a"};
  const std::vector<std::string> train = {"b", "d", "e"};
  const double total = scaffold_novelty(gen, train, 1) +
                       scaffold_retrieval(gen, train, 1);
  CHECK(total == doctest::Approx(4.0));

  // Cosine similarity over the union of keys.
  CHECK(scaffold_frequency_cosine({"a"}, {"a"}) == doctest::Approx(1.0));
  CHECK(scaffold_frequency_cosine({"a"}, {"b"}) == doctest::Approx(0.0));
  CHECK(scaffold_frequency_cosine({"a", "a", "b"}, {"a", "b", "b"}) ==
        doctest::Approx(4.0 / 5.0));
}

TEST_CASE("hit at k") {
  CHECK(hit_at_k({{"a", "b"}, {"c", "d"}}, {"a", "d"}) == 1.0);
  CHECK(hit_at_k({{"a", "b"}, {"c", "d"}}, {"x", "y"}) == 0.0);
  CHECK(hit_at_k({{"a"}, {"b"}, {"c"}, {"x"}, {"x"}, {"x"}, {"x"}, {"x"},
                  {"x"}, {"x"}},
                 {"a", "b", "c", "q", "q", "q", "q", "q", "q", "q"}) ==
        doctest::Approx(0.3));
  CHECK_THROWS_AS(hit_at_k({{"a"}}, {"a", "b"}), std::invalid_argument);
}

TEST_CASE("combined report on a constructed generation set") {
  const DAEVocab& vocab = DAEVocab::moses();
  const std::vector<std::string> train = {"c1ccccc1", "CCO", "CCc1ccccc1"};
  const std::vector<std::string> test = {"c1ccncc1"};

  // 10 generations: one repeated molecule from train (x3), one novel valid
  // molecule (x5), and 2 invalid strings.
  std::vector<std::string> gen;
  for (int i = 0; i < 3; ++i) gen.push_back("c1ccccc1");
  for (int i = 0; i < 5; ++i) gen.push_back("CCN");
  gen.push_back("C(C)(C)(C)(C)C");  // pentavalent carbon: fails sanitize
  gen.push_back("notasmiles");      // parse error counts as invalid

  const MetricsReport report = compute_metrics(gen, train, test, vocab);
  CHECK(report.n_total == 10);
  CHECK(report.n_valid == 8);
  CHECK(report.validity == doctest::Approx(0.8));
  CHECK(report.n_unique == 2);
  CHECK(report.uniqueness == doctest::Approx(0.25));
  CHECK(report.novelty == doctest::Approx(0.5));  // CCN novel, benzene not
  // Scaffolds: benzene (in train via benzene itself) and "" from CCN; train
  // scaffolds are {benzene, ""}. Nothing novel.
  CHECK(report.scaf_novel == doctest::Approx(0.0));
  // Test scaffold is pyridine; no retrieval.
  CHECK(report.scaf_ret == doctest::Approx(0.0));
  CHECK(report.diversity > 0.0);

  // All metrics invariant under permutation of the generation order.
  std::vector<std::string> shuffled = gen;
  std::swap(shuffled[0], shuffled[9]);
  std::swap(shuffled[2], shuffled[5]);
  const MetricsReport again = compute_metrics(shuffled, train, test, vocab);
  CHECK(again.validity == report.validity);
  CHECK(again.uniqueness == report.uniqueness);
  CHECK(again.novelty == report.novelty);
  CHECK(again.scaf_novel == report.scaf_novel);
  CHECK(again.diversity == report.diversity);
}
