#include "nsgp/infer_hmc.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "nsgp/errors.hpp"
#include "nsgp/infer_map.hpp"
#include "nsgp/nuts.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace nsgp {
namespace {

constexpr double kInitScale = 0.1;

struct ChainOutput {
  std::vector<PosteriorSample> samples;
  ChainStats stats;
  std::string error;
};

ChainOutput run_chain(const LatentPosterior& posterior, const NutsConfig& cfg, int chain,
                      const std::optional<LatentState>& start) {
  ChainOutput out;
  out.stats.chain = chain;

  const LatentState shape = posterior.prior_mean(Frame::whitened);
  nuts::LogDensity target = [&](const Vector& theta, Vector& grad) {
    try {
      const Evaluation e = posterior.evaluate_whitened(shape.unpack(theta));
      grad = e.gradient.pack();
      return e.value.total;
    } catch (const std::exception&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  LatentState init = shape;
  if (chain == 0 && start) {
    init = whiten(*start, posterior.factors());
  } else {
    auto init_rng = detail::make_rng(cfg.seed, static_cast<std::uint64_t>(chain), detail::kChainInit);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Component c : kComponents) {
      for (Index i = 0; i < init[c].size(); ++i) init[c][i] += kInitScale * normal(init_rng);
    }
  }

  nuts::ChainState state = nuts::initial_state(target, init.pack());
  if (!std::isfinite(state.logp)) {
    out.error = "chain " + std::to_string(chain) + ": initial point has no finite density";
    return out;
  }

  auto rng = detail::make_rng(cfg.seed, static_cast<std::uint64_t>(chain), detail::kNutsChain);
  const int total = cfg.n_warmup + cfg.n_samples;
  double accept_sum = 0.0;
  double depth_sum = 0.0;
  out.samples.reserve(static_cast<std::size_t>(cfg.n_samples));
  for (int t = 0; t < total; ++t) {
    nuts::TransitionInfo info;
    state = nuts::transition(target, state, cfg.step_size, cfg.max_tree_depth, rng, info);
    ++out.stats.transitions;
    out.stats.divergent += info.divergent ? 1 : 0;
    out.stats.n_leapfrog += info.n_leapfrog;
    accept_sum += info.accept_stat;
    depth_sum += info.tree_depth;
    if (t >= cfg.n_warmup) {
      PosteriorSample s;
      s.state = unwhiten(shape.unpack(state.theta), posterior.factors());
      s.mll = state.logp;
      s.chain = chain;
      s.index = t - cfg.n_warmup;
      out.samples.push_back(std::move(s));
    }
  }
  out.stats.mean_accept_stat = accept_sum / total;
  out.stats.mean_tree_depth = depth_sum / total;
  return out;
}

}  // namespace

void NutsConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument("NutsConfig: step_size must be > 0");
  }
  if (max_tree_depth < 1) throw std::invalid_argument("NutsConfig: max_tree_depth must be >= 1");
  if (n_samples < 1 || n_chains < 1) {
    throw std::invalid_argument("NutsConfig: n_samples and n_chains must be >= 1");
  }
  if (n_warmup < 0) throw std::invalid_argument("NutsConfig: n_warmup must be >= 0");
}

SampleSet SampleSet::thinned(int stride) const {
  if (stride < 1) throw std::invalid_argument("SampleSet::thinned: stride must be >= 1");
  SampleSet out;
  out.chains = chains;
  for (const PosteriorSample& s : samples) {
    if (s.index % stride == 0) out.samples.push_back(s);
  }
  return out;
}

SampleSet sample_posterior(const LatentPosterior& posterior, const NutsConfig& cfg,
                           const std::optional<LatentState>& start) {
  cfg.validate();
  if (posterior.data_weight() > 0.0 && posterior.n() < 2) {
    throw DimensionError("sample_posterior: need at least two observations");
  }
  std::vector<ChainOutput> chains(static_cast<std::size_t>(cfg.n_chains));
  detail::parallel_for(cfg.n_chains, [&](int c) {
    try {
      chains[static_cast<std::size_t>(c)] = run_chain(posterior, cfg, c, start);
    } catch (const std::exception& e) {
      chains[static_cast<std::size_t>(c)].error = e.what();
    }
  });

  SampleSet out;
  std::vector<std::string> diagnostics;
  for (auto& ch : chains) {
    if (!ch.error.empty()) {
      diagnostics.push_back(ch.error);
      continue;
    }
    if (2 * ch.stats.divergent > ch.stats.transitions) {
      std::ostringstream msg;
      msg << "chain " << ch.stats.chain << ": " << ch.stats.divergent << " of "
          << ch.stats.transitions << " transitions diverged";
      diagnostics.push_back(msg.str());
    }
  }
  if (!diagnostics.empty()) {
    throw SamplingError("sample_posterior: sampling failed", std::move(diagnostics));
  }
  for (auto& ch : chains) {
    out.chains.push_back(ch.stats);
    for (auto& s : ch.samples) out.samples.push_back(std::move(s));
  }
  return out;
}

SampleSet sample_posterior(const Vector& y, const Vector& x, const Hyperparams& theta,
                           const VariantFlags& flags, const NutsConfig& cfg,
                           const std::optional<LatentState>& start) {
  return sample_posterior(LatentPosterior(x, y, theta, flags), cfg, start);
}

PredictiveMixture posterior_mixture(const SampleSet& samples, const Vector& y, const Vector& x,
                                    int thin) {
  const SampleSet kept = thin > 1 ? samples.thinned(thin) : samples;
  if (kept.samples.empty()) throw std::invalid_argument("posterior_mixture: empty sample set");
  PredictiveMixture mix;
  mix.components.resize(kept.samples.size());
  detail::parallel_for(static_cast<int>(kept.samples.size()), [&](int i) {
    const LatentState& s = kept.samples[static_cast<std::size_t>(i)].state;
    FunctionPosterior fp = map_function_posterior(s, y, x);
    GaussianComponent& comp = mix.components[static_cast<std::size_t>(i)];
    comp.mean = std::move(fp.mean);
    comp.cov = std::move(fp.cov);
    comp.log_ell = s.expanded(Component::ell);
    comp.log_sigma = s.expanded(Component::sigma);
    comp.log_omega = s.expanded(Component::omega);
    comp.noise_var = (2.0 * comp.log_omega.array()).exp();
  });
  return mix;
}

void write_sample_set(std::ostream& out, const SampleSet& samples) {
  out << "chain\tindex\tmll";
  if (!samples.samples.empty()) {
    const LatentState& s0 = samples.samples.front().state;
    for (Component c : kComponents) {
      for (Index i = 0; i < s0.size(c); ++i) out << '\t' << name_of(c) << '_' << i;
    }
  }
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const PosteriorSample& s : samples.samples) {
    out << s.chain << '\t' << s.index << '\t' << s.mll;
    for (Component c : kComponents) {
      for (Index i = 0; i < s.state[c].size(); ++i) out << '\t' << s.state[c][i];
    }
    out << '\n';
  }
  out.precision(old_precision);
}

SampleSet read_sample_set(std::istream& in, Index n, const VariantFlags& flags) {
  const LatentState shape = LatentState::zeros(n, flags, Frame::natural);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("sample file is empty");
  ++line_no;
  if (line.rfind("chain\tindex\tmll", 0) != 0) throw ParseError("bad sample file header", 1);

  SampleSet out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    PosteriorSample s;
    Vector packed(shape.packed_size());
    if (!(row >> s.chain >> s.index >> s.mll)) throw ParseError("bad sample row", line_no);
    for (Index i = 0; i < packed.size(); ++i) {
      if (!(row >> packed[i])) throw ParseError("too few latent entries", line_no);
    }
    std::string extra;
    if (row >> extra) throw ParseError("too many latent entries", line_no);
    s.state = shape.unpack(packed);
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace nsgp
