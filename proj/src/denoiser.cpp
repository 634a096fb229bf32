#include "hddm/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "hddm/graph_json.hpp"

namespace hddm {

int DenoiserOutput::edge_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n || i == j) {
    throw std::out_of_range("edge index outside the upper triangle");
  }
  // Row-major upper triangle: pairs (0,1)..(0,n-1),(1,2)..
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

Eigen::VectorXd DenoiserOutput::edge_row(int i, int j) const {
  return edge_probs.row(edge_index(n, i, j)).transpose();
}

void validate_denoiser_output(const DenoiserOutput& out, int n, int k_clean,
                              int edge_dim, double tol) {
  if (out.n != n || out.node_probs.rows() != n ||
      out.node_probs.cols() != k_clean) {
    throw std::invalid_argument("denoiser node output shape mismatch");
  }
  const Eigen::Index pairs = static_cast<Eigen::Index>(n) * (n - 1) / 2;
  if (out.edge_probs.rows() != pairs ||
      (pairs > 0 && out.edge_probs.cols() != edge_dim)) {
    throw std::invalid_argument("denoiser edge output shape mismatch");
  }
  auto check_rows = [tol](const Eigen::MatrixXd& m, const char* what) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if ((m.row(r).array() < 0.0).any() ||
          std::abs(m.row(r).sum() - 1.0) > tol) {
        throw std::invalid_argument(std::string(what) +
                                    " row is not a probability vector");
      }
    }
  };
  check_rows(out.node_probs, "node_probs");
  check_rows(out.edge_probs, "edge_probs");
}

Denoiser exact_bayes_denoiser(std::vector<GraphState> corpus,
                              const DiffusionModel& model) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  if (corpus.size() > 10000) {
    throw std::invalid_argument("corpus too large for exact enumeration");
  }
  const int n = corpus.front().n;
  for (const GraphState& g : corpus) {
    if (g.n != n) {
      throw std::invalid_argument("corpus graphs must share one node count");
    }
    validate_graph_state(g, model.spec.dim(), model.edge_dim);
    for (int i = 0; i < g.n; ++i) {
      if (!model.spec.is_clean(g.nodes[i])) {
        throw std::invalid_argument("corpus graphs must be clean");
      }
    }
  }

  return [corpus = std::move(corpus), model, n](const GraphState& g_t,
                                                double t) -> DenoiserOutput {
    if (g_t.n != n) {
      throw std::invalid_argument("input size differs from corpus size");
    }
    const TransitionMatrix qe =
        edge_kernel(model.edge_dim, model.edge_alpha, 0.0, t);
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();

    // Node likelihoods by channel. The observation's tier fixes the channel,
    // so its schedule coefficient is shared by every corpus graph and drops
    // out of the posterior; keeping only the structural part extends the
    // posterior continuously to clamped states at the time endpoints.
    auto node_loglik = [&](int x0, int z) -> double {
      if (model.spec.is_clean(z)) return x0 == z ? 0.0 : kNegInf;
      if (model.spec.is_mask(z)) return 0.0;
      const double reach = model.phi.phi(x0, z - model.spec.clean_size);
      return reach > 0.0 ? std::log(reach) : kNegInf;
    };

    const std::size_t c = corpus.size();
    Eigen::VectorXd logw(c);
    for (std::size_t m = 0; m < c; ++m) {
      const GraphState& g0 = corpus[m];
      double lw = 0.0;
      for (int i = 0; i < n && std::isfinite(lw); ++i) {
        lw += node_loglik(g0.nodes[i], g_t.nodes[i]);
      }
      for (int i = 0; i < n && std::isfinite(lw); ++i) {
        for (int j = i + 1; j < n; ++j) {
          const double q = qe(g0.edges(i, j), g_t.edges(i, j));
          lw += q > 0.0 ? std::log(q) : kNegInf;
          if (!std::isfinite(lw)) break;
        }
      }
      logw[m] = lw;
    }
    const double top = logw.maxCoeff();
    if (!std::isfinite(top)) {
      throw std::domain_error(
          "zero posterior mass: state unreachable from every corpus graph");
    }
    Eigen::VectorXd w = (logw.array() - top).exp();
    w /= w.sum();

    DenoiserOutput out;
    out.n = n;
    out.node_probs = Eigen::MatrixXd::Zero(n, model.spec.clean_size);
    out.edge_probs =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * (n - 1) / 2,
                              model.edge_dim);
    for (std::size_t m = 0; m < c; ++m) {
      if (w[m] == 0.0) continue;
      const GraphState& g0 = corpus[m];
      for (int i = 0; i < n; ++i) out.node_probs(i, g0.nodes[i]) += w[m];
      int row = 0;
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++row) {
          out.edge_probs(row, g0.edges(i, j)) += w[m];
        }
      }
    }
    return out;
  };
}

Denoiser empirical_marginal_denoiser(const std::vector<GraphState>& corpus,
                                     const DiffusionModel& model) {
  if (corpus.empty()) throw std::invalid_argument("empty corpus");
  Eigen::VectorXd node_freq = Eigen::VectorXd::Zero(model.spec.clean_size);
  Eigen::VectorXd edge_freq = Eigen::VectorXd::Zero(model.edge_dim);
  for (const GraphState& g : corpus) {
    validate_graph_state(g, model.spec.dim(), model.edge_dim);
    for (int i = 0; i < g.n; ++i) {
      if (!model.spec.is_clean(g.nodes[i])) {
        throw std::invalid_argument("corpus graphs must be clean");
      }
      node_freq[g.nodes[i]] += 1.0;
      for (int j = i + 1; j < g.n; ++j) edge_freq[g.edges(i, j)] += 1.0;
    }
  }
  node_freq /= node_freq.sum();
  if (edge_freq.sum() > 0.0) {
    edge_freq /= edge_freq.sum();
  } else {
    edge_freq.setConstant(1.0 / model.edge_dim);  // corpus of 1-atom graphs
  }

  return [node_freq, edge_freq](const GraphState& g_t,
                                double /*t*/) -> DenoiserOutput {
    DenoiserOutput out;
    out.n = g_t.n;
    out.node_probs = node_freq.transpose().replicate(g_t.n, 1);
    out.edge_probs = edge_freq.transpose().replicate(
        static_cast<Eigen::Index>(g_t.n) * (g_t.n - 1) / 2, 1);
    return out;
  };
}

namespace {

Eigen::MatrixXd cfg_rows(const Eigen::MatrixXd& cond,
                         const Eigen::MatrixXd& uncond, double w) {
  if (cond.rows() != uncond.rows() || cond.cols() != uncond.cols()) {
    throw std::invalid_argument("guidance shape mismatch");
  }
  constexpr double kFloor = 1e-12;
  Eigen::MatrixXd out(cond.rows(), cond.cols());
  for (Eigen::Index r = 0; r < cond.rows(); ++r) {
    Eigen::ArrayXd lc = cond.row(r).array().max(kFloor).log();
    Eigen::ArrayXd lu = uncond.row(r).array().max(kFloor).log();
    Eigen::ArrayXd mixed = lu + w * (lc - lu);
    mixed -= mixed.maxCoeff();
    Eigen::ArrayXd p = mixed.exp();
    out.row(r) = (p / p.sum()).transpose();
  }
  return out;
}

}  // namespace

DenoiserOutput cfg_combine(const DenoiserOutput& cond,
                           const DenoiserOutput& uncond, double w) {
  if (cond.n != uncond.n) throw std::invalid_argument("guidance size mismatch");
  DenoiserOutput out;
  out.n = cond.n;
  out.node_probs = cfg_rows(cond.node_probs, uncond.node_probs, w);
  out.edge_probs = cfg_rows(cond.edge_probs, uncond.edge_probs, w);
  return out;
}

Denoiser guided_denoiser(Denoiser cond, Denoiser uncond, double w) {
  return [cond = std::move(cond), uncond = std::move(uncond), w](
             const GraphState& g, double t) {
    return cfg_combine(cond(g, t), uncond(g, t), w);
  };
}

namespace {

/// Line-oriented bidirectional pipe to a child process.
class SubprocessPipe {
 public:
  explicit SubprocessPipe(const std::string& command) {
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
      throw std::runtime_error("subprocess denoiser: pipe() failed");
    }
    pid_ = fork();
    if (pid_ < 0) throw std::runtime_error("subprocess denoiser: fork() failed");
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      close(to_child[0]);
      close(to_child[1]);
      close(from_child[0]);
      close(from_child[1]);
      execl("/bin/sh", "sh", "-c", command.c_str(), (char*)nullptr);
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_ = fdopen(from_child[0], "r");
    out_ = fdopen(to_child[1], "w");
    if (!in_ || !out_) {
      throw std::runtime_error("subprocess denoiser: fdopen() failed");
    }
  }

  ~SubprocessPipe() {
    if (out_) fclose(out_);
    if (in_) fclose(in_);
    if (pid_ > 0) waitpid(pid_, nullptr, 0);
  }

  SubprocessPipe(const SubprocessPipe&) = delete;
  SubprocessPipe& operator=(const SubprocessPipe&) = delete;

  std::string round_trip(const std::string& line) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (fputs(line.c_str(), out_) == EOF || fputc('\n', out_) == EOF ||
        fflush(out_) != 0) {
      throw std::runtime_error("subprocess denoiser: write failed");
    }
    std::string reply;
    int ch;
    while ((ch = fgetc(in_)) != EOF && ch != '\n') {
      reply.push_back(static_cast<char>(ch));
    }
    if (reply.empty() && ch == EOF) {
      throw std::runtime_error("subprocess denoiser: child closed stdout");
    }
    return reply;
  }

 private:
  pid_t pid_ = -1;
  FILE* in_ = nullptr;
  FILE* out_ = nullptr;
  std::mutex mutex_;
};

}  // namespace

Denoiser subprocess_denoiser(const std::string& command) {
  auto pipe = std::make_shared<SubprocessPipe>(command);
  return [pipe](const GraphState& g, double t) -> DenoiserOutput {
    GraphState tagged = g;
    tagged.t = t;
    DenoiserOutput out =
        denoiser_output_from_json(pipe->round_trip(graph_state_to_json(tagged)));
    if (out.n != g.n) {
      throw std::runtime_error("subprocess denoiser: reply size mismatch");
    }
    return out;
  };
}

}  // namespace hddm
