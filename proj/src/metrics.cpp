#include "hddm/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "hddm/rng.hpp"
#include "hddm/smiles.hpp"

namespace hddm {

Fingerprint Fingerprint::zeros(int nbits) {
  if (nbits <= 0 || nbits % 64 != 0) {
    throw std::invalid_argument("fingerprint width must be a multiple of 64");
  }
  Fingerprint fp;
  fp.nbits = nbits;
  fp.words.assign(static_cast<std::size_t>(nbits / 64), 0);
  return fp;
}

void Fingerprint::set(int bit) {
  words[static_cast<std::size_t>(bit / 64)] |= (1ULL << (bit % 64));
}

bool Fingerprint::test(int bit) const {
  return (words[static_cast<std::size_t>(bit / 64)] >> (bit % 64)) & 1ULL;
}

int Fingerprint::count() const {
  int total = 0;
  for (std::uint64_t w : words) total += std::popcount(w);
  return total;
}

namespace {

/// FNV-1a over a byte string, finished with the shared 64-bit mixer.
std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

}  // namespace

Fingerprint morgan_fingerprint(const MolGraph& g, const DAEVocab& vocab,
                               int radius, int nbits) {
  if (radius < 0) throw std::invalid_argument("radius must be >= 0");
  Fingerprint fp = Fingerprint::zeros(nbits);
  const int n = g.n();
  if (n == 0) return fp;

  std::vector<std::uint64_t> env(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::string key =
        "atom:" +
        vocab.tokens[static_cast<std::size_t>(g.atoms[static_cast<std::size_t>(i)])]
            .name();
    std::vector<int> bonds;
    for (int j = 0; j < n; ++j) {
      if (g.bonds(i, j) != 0) bonds.push_back(g.bonds(i, j));
    }
    std::sort(bonds.begin(), bonds.end());
    key += "|d:" + std::to_string(bonds.size()) + "|b:";
    for (int b : bonds) key += std::to_string(b);
    env[static_cast<std::size_t>(i)] = hash_string(key);
  }

  std::set<std::uint64_t> identifiers;
  for (int i = 0; i < n; ++i) identifiers.insert(env[static_cast<std::size_t>(i)]);

  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<std::uint64_t> parts;
      for (int j = 0; j < n; ++j) {
        if (g.bonds(i, j) != 0) {
          parts.push_back(
              mix64(static_cast<std::uint64_t>(g.bonds(i, j)) * 0x10001ULL ^
                    env[static_cast<std::size_t>(j)]));
        }
      }
      std::sort(parts.begin(), parts.end());
      std::uint64_t h = mix64(static_cast<std::uint64_t>(r) ^
                              env[static_cast<std::size_t>(i)]);
      for (std::uint64_t p : parts) h = mix64(h ^ p);
      next[static_cast<std::size_t>(i)] = h;
      identifiers.insert(h);
    }
    env = std::move(next);
  }

  for (std::uint64_t id : identifiers) {
    fp.set(static_cast<int>(id % static_cast<std::uint64_t>(nbits)));
  }
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.nbits != b.nbits) throw std::invalid_argument("fingerprint widths differ");
  int inter = 0;
  int uni = 0;
  for (std::size_t w = 0; w < a.words.size(); ++w) {
    inter += std::popcount(a.words[w] & b.words[w]);
    uni += std::popcount(a.words[w] | b.words[w]);
  }
  if (uni == 0) return 1.0;  // two empty sets are identical
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double diversity(const std::vector<Fingerprint>& unique_valid) {
  const std::size_t m = unique_valid.size();
  if (m == 0) return 0.0;
  double sim_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sim_sum += 1.0;  // self pair
    for (std::size_t j = i + 1; j < m; ++j) {
      sim_sum += 2.0 * tanimoto(unique_valid[i], unique_valid[j]);
    }
  }
  return 1.0 - sim_sum / (static_cast<double>(m) * static_cast<double>(m));
}

namespace {

std::vector<bool> ring_membership(const MolGraph& g) {
  // An atom is on a ring iff it touches a non-bridge bond. Same bridge
  // search as the aromatic-cycle rule, over all bonds.
  const int n = g.n();
  std::vector<bool> cyclic(static_cast<std::size_t>(n), false);
  std::vector<int> disc(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  int timer = 0;
  auto dfs = [&](auto&& self, int v, int parent) -> void {
    disc[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = timer++;
    bool skipped_parent = false;
    for (int u = 0; u < n; ++u) {
      if (g.bonds(v, u) == 0) continue;
      if (u == parent && !skipped_parent) {
        skipped_parent = true;
        continue;
      }
      if (disc[static_cast<std::size_t>(u)] == -1) {
        self(self, u, v);
        low[static_cast<std::size_t>(v)] = std::min(
            low[static_cast<std::size_t>(v)], low[static_cast<std::size_t>(u)]);
        if (low[static_cast<std::size_t>(u)] <= disc[static_cast<std::size_t>(v)]) {
          cyclic[static_cast<std::size_t>(v)] = true;
          cyclic[static_cast<std::size_t>(u)] = true;
        }
      } else {
        low[static_cast<std::size_t>(v)] = std::min(
            low[static_cast<std::size_t>(v)], disc[static_cast<std::size_t>(u)]);
        if (disc[static_cast<std::size_t>(u)] < disc[static_cast<std::size_t>(v)]) {
          cyclic[static_cast<std::size_t>(v)] = true;
          cyclic[static_cast<std::size_t>(u)] = true;
        }
      }
    }
  };
  for (int v = 0; v < n; ++v) {
    if (disc[static_cast<std::size_t>(v)] == -1) dfs(dfs, v, -1);
  }
  return cyclic;
}

}  // namespace

MolGraph murcko_scaffold(const MolGraph& g) {
  const int n = g.n();
  const std::vector<bool> ring = ring_membership(g);
  std::vector<bool> keep(static_cast<std::size_t>(n), true);

  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (!keep[static_cast<std::size_t>(i)] || ring[static_cast<std::size_t>(i)]) {
        continue;
      }
      int degree = 0;
      for (int j = 0; j < n; ++j) {
        if (keep[static_cast<std::size_t>(j)] && g.bonds(i, j) != 0) ++degree;
      }
      if (degree <= 1) {
        keep[static_cast<std::size_t>(i)] = false;
        changed = true;
      }
    }
  }

  std::vector<int> remap(static_cast<std::size_t>(n), -1);
  int kept = 0;
  for (int i = 0; i < n; ++i) {
    if (keep[static_cast<std::size_t>(i)]) remap[static_cast<std::size_t>(i)] = kept++;
  }
  MolGraph scaffold = MolGraph::empty(kept);
  for (int i = 0; i < n; ++i) {
    if (remap[static_cast<std::size_t>(i)] < 0) continue;
    scaffold.atoms[static_cast<std::size_t>(remap[static_cast<std::size_t>(i)])] =
        g.atoms[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      if (remap[static_cast<std::size_t>(j)] >= 0) {
        scaffold.bonds(remap[static_cast<std::size_t>(i)],
                       remap[static_cast<std::size_t>(j)]) = g.bonds(i, j);
      }
    }
  }
  return scaffold;
}

double scaffold_novelty(const std::vector<std::string>& gen_scaffolds,
                        const std::vector<std::string>& train_scaffolds,
                        long n_total) {
  if (n_total <= 0) return 0.0;
  const std::set<std::string> gen(gen_scaffolds.begin(), gen_scaffolds.end());
  const std::set<std::string> train(train_scaffolds.begin(),
                                    train_scaffolds.end());
  long novel = 0;
  for (const std::string& s : gen) {
    if (!train.count(s)) ++novel;
  }
  return static_cast<double>(novel) / static_cast<double>(n_total);
}

double scaffold_retrieval(const std::vector<std::string>& gen_scaffolds,
                          const std::vector<std::string>& test_scaffolds,
                          long n_total) {
  if (n_total <= 0) return 0.0;
  const std::set<std::string> gen(gen_scaffolds.begin(), gen_scaffolds.end());
  const std::set<std::string> test(test_scaffolds.begin(),
                                   test_scaffolds.end());
  long hit = 0;
  for (const std::string& s : gen) {
    if (test.count(s)) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(n_total);
}

double scaffold_frequency_cosine(const std::vector<std::string>& gen_scaffolds,
                                 const std::vector<std::string>& test_scaffolds) {
  std::map<std::string, double> gen_freq;
  std::map<std::string, double> test_freq;
  for (const std::string& s : gen_scaffolds) gen_freq[s] += 1.0;
  for (const std::string& s : test_scaffolds) test_freq[s] += 1.0;
  if (gen_freq.empty() || test_freq.empty()) return 0.0;
  double dot = 0.0;
  double gg = 0.0;
  double tt = 0.0;
  for (const auto& [key, f] : gen_freq) {
    gg += f * f;
    auto it = test_freq.find(key);
    if (it != test_freq.end()) dot += f * it->second;
  }
  for (const auto& [key, f] : test_freq) tt += f * f;
  return dot / (std::sqrt(gg) * std::sqrt(tt));
}

double hit_at_k(const std::vector<std::vector<std::string>>& samples_per_target,
                const std::vector<std::string>& truths) {
  if (samples_per_target.size() != truths.size()) {
    throw std::invalid_argument("one sample set per truth required");
  }
  if (truths.empty()) return 0.0;
  long hits = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const auto& samples = samples_per_target[i];
    if (std::find(samples.begin(), samples.end(), truths[i]) != samples.end()) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(truths.size());
}

MetricsReport compute_metrics(const std::vector<std::string>& gen,
                              const std::vector<std::string>& train,
                              const std::vector<std::string>& test,
                              const DAEVocab& vocab) {
  MetricsReport report;
  report.n_total = static_cast<long>(gen.size());

  std::vector<MolGraph> valid_graphs;
  for (const std::string& line : gen) {
    try {
      MolGraph g = parse(line, vocab);
      if (sanitize(g, vocab).valid) valid_graphs.push_back(std::move(g));
    } catch (const std::exception&) {
      // unparseable generation counts against validity
    }
  }
  report.n_valid = static_cast<long>(valid_graphs.size());
  report.validity = report.n_total > 0
                        ? static_cast<double>(report.n_valid) / report.n_total
                        : 0.0;

  std::set<std::string> unique;
  std::vector<MolGraph> unique_graphs;
  for (const MolGraph& g : valid_graphs) {
    if (unique.insert(canonical_form(g, vocab)).second) {
      unique_graphs.push_back(g);
    }
  }
  report.n_unique = static_cast<long>(unique.size());
  report.uniqueness =
      report.n_valid > 0
          ? static_cast<double>(report.n_unique) / report.n_valid
          : 0.0;

  std::set<std::string> train_canon;
  std::vector<std::string> train_scaffolds;
  for (const std::string& line : train) {
    const MolGraph g = parse(line, vocab);
    train_canon.insert(canonical_form(g, vocab));
    train_scaffolds.push_back(canonical_form(murcko_scaffold(g), vocab));
  }
  long novel = 0;
  for (const std::string& c : unique) {
    if (!train_canon.count(c)) ++novel;
  }
  report.novelty = report.n_unique > 0
                       ? static_cast<double>(novel) / report.n_unique
                       : 0.0;

  std::vector<std::string> gen_scaffolds;
  for (const MolGraph& g : unique_graphs) {
    gen_scaffolds.push_back(canonical_form(murcko_scaffold(g), vocab));
  }
  std::vector<std::string> test_scaffolds;
  for (const std::string& line : test) {
    test_scaffolds.push_back(
        canonical_form(murcko_scaffold(parse(line, vocab)), vocab));
  }
  report.scaf_novel = scaffold_novelty(gen_scaffolds, train_scaffolds,
                                       report.n_total);
  report.scaf_ret =
      scaffold_retrieval(gen_scaffolds, test_scaffolds, report.n_total);
  report.scaf_sim = scaffold_frequency_cosine(gen_scaffolds, test_scaffolds);

  std::vector<Fingerprint> fps;
  fps.reserve(unique_graphs.size());
  for (const MolGraph& g : unique_graphs) {
    fps.push_back(morgan_fingerprint(g, vocab));
  }
  report.diversity = diversity(fps);
  return report;
}

}  // namespace hddm
