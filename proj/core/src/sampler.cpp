// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mixstock/error.hpp"
#include "mixstock/numeric.hpp"
#include "mixstock/simplex.hpp"

namespace mixstock {

std::string to_string(ProposalStyle style) {
  return style == ProposalStyle::RandomWalk ? "random-walk" : "independence";
}

ProposalStyle parse_proposal_style(const std::string& name) {
  if (name == "random-walk") return ProposalStyle::RandomWalk;
  if (name == "independence") return ProposalStyle::Independence;
  throw InputError("unknown proposal style '" + name + "'");
}

void ChainConfig::validate() const {
  if (iterations < 1) throw InputError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw InputError("burn-in must be in [0, iterations)");
  if (thin < 1) throw InputError("thinning interval must be at least 1");
  for (const BlockTuning* b : {&freqs, &proportions, &omega, &phi, &rho, &alpha, &psi, &tau})
    if (!(b->step > 0.0) || !std::isfinite(b->step)) throw InputError("proposal step sizes must be positive");
}

// ---------------------------------------------------------------------------
// Generic MH moves

namespace {

bool interior(std::span<const double> theta) {
  return std::all_of(theta.begin(), theta.end(), [](double t) { return t > 0.0 && std::isfinite(t); });
}

}  // namespace

std::vector<double> maximize_bfgs(const LogDensity& f, std::vector<double> x0, int max_iterations) {
  const std::size_t d = x0.size();
  if (d == 0) return x0;
  auto gradient = [&](const std::vector<double>& x) {
    std::vector<double> g(d);
    std::vector<double> y = x;
    for (std::size_t k = 0; k < d; ++k) {
      const double h = 1e-5 * (1.0 + std::abs(x[k]));
      y[k] = x[k] + h;
      const double up = f(y);
      y[k] = x[k] - h;
      const double down = f(y);
      y[k] = x[k];
      g[k] = (up - down) / (2.0 * h);
    }
    return g;
  };

  std::vector<double> x = std::move(x0);
  double fx = f(x);
  if (!std::isfinite(fx)) return x;
  std::vector<double> g = gradient(x);
  // inverse Hessian approximation of -f, row-major
  std::vector<double> h(d * d, 0.0);
  for (std::size_t k = 0; k < d; ++k) h[k * d + k] = 1.0;

  for (int iter = 0; iter < max_iterations; ++iter) {
    double gnorm = 0.0;
    for (double v : g) gnorm = std::max(gnorm, std::abs(v));
    if (gnorm < 1e-6) break;

    // ascent direction = H g
    std::vector<double> dir(d, 0.0);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) dir[a] += h[a * d + b] * g[b];
    double slope = 0.0;
    for (std::size_t k = 0; k < d; ++k) slope += dir[k] * g[k];
    if (!(slope > 0.0)) {
      dir = g;
      slope = 0.0;
      for (double v : g) slope += v * v;
      std::fill(h.begin(), h.end(), 0.0);
      for (std::size_t k = 0; k < d; ++k) h[k * d + k] = 1.0;
    }

    double step = 1.0;
    std::vector<double> xn(d);
    double fn = kNegInf;
    bool improved = false;
    for (int ls = 0; ls < 50; ++ls) {
      for (std::size_t k = 0; k < d; ++k) xn[k] = x[k] + step * dir[k];
      fn = f(xn);
      if (std::isfinite(fn) && fn >= fx + 1e-4 * step * slope) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;

    const std::vector<double> gn = gradient(xn);
    std::vector<double> s(d), y(d);
    for (std::size_t k = 0; k < d; ++k) {
      s[k] = xn[k] - x[k];
      y[k] = g[k] - gn[k];  // gradient of -f
    }
    const double sy = std::inner_product(s.begin(), s.end(), y.begin(), 0.0);
    if (sy > 1e-12) {
      std::vector<double> hy(d, 0.0);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) hy[a] += h[a * d + b] * y[b];
      const double yhy = std::inner_product(y.begin(), y.end(), hy.begin(), 0.0);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          h[a * d + b] += ((sy + yhy) * s[a] * s[b]) / (sy * sy) - (hy[a] * s[b] + s[a] * hy[b]) / sy;
    }
    const double change = std::abs(fn - fx);
    x = xn;
    fx = fn;
    g = gn;
    if (change < 1e-12 * (1.0 + std::abs(fx))) break;
  }
  return x;
}

BlockMove mh_update_simplex_block(std::span<const double> current, double current_log_target,
                                  const LogDensity& log_target, const BlockTuning& proposal, Rng& rng) {
  BlockMove keep{std::vector<double>(current.begin(), current.end()), current_log_target, false};
  if (current.size() < 2) return keep;
  if (proposal.step == 0.0 && proposal.style == ProposalStyle::RandomWalk) {
    keep.accepted = true;
    return keep;
  }

  const std::vector<double> xi = simplex_to_logit(current);
  const std::size_t d = xi.size();
  std::vector<double> candidate(d);
  double log_ratio = -(current_log_target + log_jacobian_det(xi));

  if (proposal.style == ProposalStyle::RandomWalk) {
    for (std::size_t k = 0; k < d; ++k) candidate[k] = xi[k] + proposal.step * sample_normal(rng);
  } else {
    const LogDensity transformed = [&](std::span<const double> x) {
      const auto theta = logit_to_simplex(x);
      if (!interior(theta)) return kNegInf;
      return log_target(theta) + log_jacobian_det(x);
    };
    const std::vector<double> centre = maximize_bfgs(transformed, std::vector<double>(d, 0.0));
    for (std::size_t k = 0; k < d; ++k) candidate[k] = centre[k] + proposal.step * sample_normal(rng);
    // log q(current) - log q(candidate); normalizers cancel
    const double inv_var = 1.0 / (proposal.step * proposal.step);
    for (std::size_t k = 0; k < d; ++k) {
      const double dc = xi[k] - centre[k];
      const double dn = candidate[k] - centre[k];
      log_ratio += 0.5 * inv_var * (dn * dn - dc * dc);
    }
  }

  const double u = sample_uniform(rng);
  std::vector<double> theta = logit_to_simplex(candidate);
  if (!interior(theta)) return keep;
  const double target = log_target(theta);
  if (!std::isfinite(target)) return keep;
  log_ratio += target + log_jacobian_det(candidate);
  if (std::log(u) < log_ratio) return {std::move(theta), target, true};
  return keep;
}

ScalarMove mh_update_unit_scalar(double current, double current_log_target, const ScalarLogDensity& log_target,
                                 double step, Rng& rng) {
  if (step == 0.0) return {current, current_log_target, true};
  const double x = logit(current) + step * sample_normal(rng);
  const double u = sample_uniform(rng);
  const double candidate = inv_logit(x);
  if (!(candidate > 0.0 && candidate < 1.0)) return {current, current_log_target, false};
  const double target = log_target(candidate);
  if (!std::isfinite(target)) return {current, current_log_target, false};
  const double log_ratio = target + std::log(candidate) + std::log1p(-candidate) - current_log_target -
                           std::log(current) - std::log1p(-current);
  if (std::log(u) < log_ratio) return {candidate, target, true};
  return {current, current_log_target, false};
}

BlockMove mh_update_real_block(std::span<const double> current, double current_log_target,
                               const LogDensity& log_target, double step, bool positive, Rng& rng) {
  BlockMove keep{std::vector<double>(current.begin(), current.end()), current_log_target, false};
  if (step == 0.0) {
    keep.accepted = true;
    return keep;
  }
  std::vector<double> candidate(current.size());
  double log_jacobian = 0.0;
  for (std::size_t k = 0; k < current.size(); ++k) {
    const double z = step * sample_normal(rng);
    if (positive) {
      candidate[k] = current[k] * std::exp(z);
      log_jacobian += z;
    } else {
      candidate[k] = current[k] + z;
    }
  }
  const double u = sample_uniform(rng);
  for (double v : candidate)
    if (!std::isfinite(v) || (positive && !(v > 0.0))) return keep;
  const double target = log_target(candidate);
  if (!std::isfinite(target)) return keep;
  if (std::log(u) < target - current_log_target + log_jacobian) return {std::move(candidate), target, true};
  return keep;
}

// ---------------------------------------------------------------------------
// Colony likelihood cache

namespace {

// Keeps, for every colony individual k, the per-locus pair factors
// f_l(i,j) = P(y_kl | parents i, j) and the scaled genotype probabilities
// q(i,j) = exp(sum_l log f_l(i,j) - shift_k), plus
//   diag = sum_i m_i q(i,i),  quad = sum_ij m_i m_j q(i,j),
//   loglik = shift + log(omega diag + (1 - omega) quad).
// A change to one (locus, source) frequency row touches row/column i of q
// only, so proposals cost O(K I^2) instead of O(K L I^2).
class ColonyCache {
 public:
  ColonyCache(const GenotypeTable& colony, std::size_t sources)
      : colony_(colony),
        sources_(sources),
        loci_(colony.layout.num_loci()),
        count_(colony.individuals.size()),
        factor_(count_ * loci_ * sources * sources, 1.0),
        q_(count_ * sources * sources, 0.0),
        shift_(count_, 0.0),
        diag_(count_, 0.0),
        quad_(count_, 0.0),
        loglik_(count_, 0.0),
        pend_factor_(count_ * sources, 0.0),
        pend_q_(count_ * sources, 0.0),
        pend_diag_(count_, 0.0),
        pend_quad_(count_, 0.0),
        pend_loglik_(count_, 0.0) {}

  double total() const { return total_; }

  void rebuild(const AlleleFrequencies& freqs, std::span<const double> m, double omega) {
    m_.assign(m.begin(), m.end());
    omega_ = omega;
    const std::size_t ii = sources_ * sources_;
    std::vector<double> logq(ii);
    total_ = 0.0;
    for (std::size_t k = 0; k < count_; ++k) {
      std::fill(logq.begin(), logq.end(), 0.0);
      const auto& y = colony_.individuals[k];
      for (std::size_t l = 0; l < loci_; ++l) {
        double* f = factor_.data() + (k * loci_ + l) * ii;
        if (!y.loci[l]) {
          std::fill(f, f + ii, 1.0);
          continue;
        }
        for (std::size_t i = 0; i < sources_; ++i) {
          for (std::size_t j = 0; j < sources_; ++j) {
            f[i * sources_ + j] = pair_probability(*y.loci[l], freqs.row(l, i), freqs.row(l, j), i == j);
            logq[i * sources_ + j] += std::log(f[i * sources_ + j]);
          }
        }
      }
      const double shift = *std::max_element(logq.begin(), logq.end());
      shift_[k] = std::isfinite(shift) ? shift : 0.0;
      double* q = q_.data() + k * ii;
      for (std::size_t x = 0; x < ii; ++x) q[x] = std::exp(logq[x] - shift_[k]);
      diag_[k] = diag_of(q, m_);
      quad_[k] = quad_of(q, m_);
      loglik_[k] = loglik_of(k, diag_[k], quad_[k], omega_);
      total_ += loglik_[k];
    }
  }

  double propose_row(std::size_t locus, std::size_t source, std::span<const double> row,
                     const AlleleFrequencies& freqs) {
    pending_row_.assign(row.begin(), row.end());
    pending_locus_ = locus;
    pending_source_ = source;
    const std::size_t ii = sources_ * sources_;
    std::vector<double> q_new(ii);
    double total = 0.0;
    for (std::size_t k = 0; k < count_; ++k) {
      const auto& call = colony_.individuals[k].loci[locus];
      if (!call) {
        pend_loglik_[k] = loglik_[k];
        total += loglik_[k];
        continue;
      }
      const double* f = factor_.data() + (k * loci_ + locus) * ii;
      const double* q = q_.data() + k * ii;
      std::copy(q, q + ii, q_new.begin());
      for (std::size_t j = 0; j < sources_; ++j) {
        const double fn = j == source ? pair_probability(*call, row, row, true)
                                      : pair_probability(*call, row, freqs.row(locus, j), false);
        const double qn = q[source * sources_ + j] * (fn / f[source * sources_ + j]);
        pend_factor_[k * sources_ + j] = fn;
        pend_q_[k * sources_ + j] = qn;
        q_new[source * sources_ + j] = qn;
        q_new[j * sources_ + source] = qn;
      }
      pend_diag_[k] = diag_of(q_new.data(), m_);
      pend_quad_[k] = quad_of(q_new.data(), m_);
      pend_loglik_[k] = loglik_of(k, pend_diag_[k], pend_quad_[k], omega_);
      total += pend_loglik_[k];
    }
    pending_total_ = total;
    return total;
  }

  void commit_row(std::size_t locus, std::size_t source, std::span<const double> row,
                  const AlleleFrequencies& freqs) {
    if (locus != pending_locus_ || source != pending_source_ ||
        !std::equal(row.begin(), row.end(), pending_row_.begin(), pending_row_.end()))
      propose_row(locus, source, row, freqs);
    const std::size_t ii = sources_ * sources_;
    for (std::size_t k = 0; k < count_; ++k) {
      if (!colony_.individuals[k].loci[locus]) continue;
      double* f = factor_.data() + (k * loci_ + locus) * ii;
      double* q = q_.data() + k * ii;
      for (std::size_t j = 0; j < sources_; ++j) {
        f[source * sources_ + j] = f[j * sources_ + source] = pend_factor_[k * sources_ + j];
        q[source * sources_ + j] = q[j * sources_ + source] = pend_q_[k * sources_ + j];
      }
      diag_[k] = pend_diag_[k];
      quad_[k] = pend_quad_[k];
      loglik_[k] = pend_loglik_[k];
    }
    total_ = pending_total_;
  }

  double propose_m(std::span<const double> m) {
    const std::size_t ii = sources_ * sources_;
    double total = 0.0;
    for (std::size_t k = 0; k < count_; ++k) {
      const double* q = q_.data() + k * ii;
      pend_diag_[k] = diag_of(q, m);
      pend_quad_[k] = quad_of(q, m);
      pend_loglik_[k] = loglik_of(k, pend_diag_[k], pend_quad_[k], omega_);
      total += pend_loglik_[k];
    }
    pending_total_ = total;
    return total;
  }

  void commit_m(std::span<const double> m) {
    propose_m(m);
    m_.assign(m.begin(), m.end());
    diag_ = pend_diag_;
    quad_ = pend_quad_;
    loglik_ = pend_loglik_;
    total_ = pending_total_;
  }

  double propose_omega(double omega) const {
    double total = 0.0;
    for (std::size_t k = 0; k < count_; ++k) total += loglik_of(k, diag_[k], quad_[k], omega);
    return total;
  }

  void commit_omega(double omega) {
    omega_ = omega;
    total_ = 0.0;
    for (std::size_t k = 0; k < count_; ++k) {
      loglik_[k] = loglik_of(k, diag_[k], quad_[k], omega_);
      total_ += loglik_[k];
    }
  }

 private:
  double diag_of(const double* q, std::span<const double> m) const {
    double s = 0.0;
    for (std::size_t i = 0; i < sources_; ++i) s += m[i] * q[i * sources_ + i];
    return s;
  }

  double quad_of(const double* q, std::span<const double> m) const {
    double s = 0.0;
    for (std::size_t i = 0; i < sources_; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < sources_; ++j) row += m[j] * q[i * sources_ + j];
      s += m[i] * row;
    }
    return s;
  }

  double loglik_of(std::size_t k, double diag, double quad, double omega) const {
    return shift_[k] + std::log(omega * diag + (1.0 - omega) * quad);
  }

  const GenotypeTable& colony_;
  std::size_t sources_;
  std::size_t loci_;
  std::size_t count_;
  std::vector<double> factor_;
  std::vector<double> q_;
  std::vector<double> shift_;
  std::vector<double> diag_;
  std::vector<double> quad_;
  std::vector<double> loglik_;
  std::vector<double> m_;
  double omega_ = 0.5;
  double total_ = 0.0;

  std::vector<double> pending_row_;
  std::size_t pending_locus_ = 0;
  std::size_t pending_source_ = 0;
  std::vector<double> pend_factor_;
  std::vector<double> pend_q_;
  std::vector<double> pend_diag_;
  std::vector<double> pend_quad_;
  std::vector<double> pend_loglik_;
  double pending_total_ = 0.0;
};

// Robbins-Monro step adaptation toward a 0.30 acceptance rate.
struct AdaptiveStep {
  double log_step = 0.0;
  long updates = 0;

  explicit AdaptiveStep(double step) : log_step(std::log(step)) {}
  double step() const { return std::exp(log_step); }
  void adapt(bool accepted) {
    ++updates;
    log_step += ((accepted ? 1.0 : 0.0) - 0.30) / std::pow(static_cast<double>(updates), 0.6);
    log_step = std::clamp(log_step, std::log(1e-4), std::log(50.0));
  }
};

struct AcceptanceTally {
  long tried = 0;
  long accepted = 0;
};

constexpr long kCacheRebuildInterval = 25;

class GibbsSampler {
 public:
  GibbsSampler(const DataSet& data, const PriorSpec& prior, const ChainConfig& config)
      : data_(data),
        prior_(prior),
        config_(config),
        state_(initial_state(data, prior)),
        cache_(data.colony, data.num_sources()),
        rng_(derive_seed(config.seed, 0)),
        m_step_(config.proportions.step),
        omega_step_(config.omega.step),
        phi_step_(config.phi.step),
        rho_step_(config.rho.step),
        alpha_step_(config.alpha.step),
        psi_step_(config.psi.step),
        tau_step_(config.tau.step) {
    freq_steps_.assign(state_.freqs.num_loci() * state_.freqs.num_sources(), AdaptiveStep(config.freqs.step));
    const double start = joint_log_posterior(state_, data_, prior_);
    if (!std::isfinite(start))
      throw RuntimeFailure("joint log posterior is not finite at the initial state (value " +
                           std::to_string(start) + "); check for colony alleles absent from every source");
  }

  ChainOutput run() {
    ChainOutput out;
    out.prior = prior_;
    out.config = config_;
    out.draws.reserve(static_cast<std::size_t>(config_.retained_draws()));
    const long adapt_until =
        config_.adapt_window < 0 ? config_.burn_in : std::min(config_.adapt_window, config_.burn_in);
    for (long t = 1; t <= config_.iterations; ++t) {
      if ((t - 1) % kCacheRebuildInterval == 0) cache_.rebuild(state_.freqs, state_.m, state_.omega);
      adapting_ = t <= adapt_until;
      counting_ = t > config_.burn_in;
      sweep();
      if (counting_ && (t - config_.burn_in) % config_.thin == 0) {
        out.iterations.push_back(t);
        out.draws.push_back(state_);
        out.loglik.push_back(cache_.total() + source_loglik(data_.sources, state_.freqs));
      }
    }
    for (const auto& [name, tally] : tallies_)
      out.acceptance[name] = tally.tried > 0 ? static_cast<double>(tally.accepted) / tally.tried : 0.0;
    return out;
  }

 private:
  void record(const char* block, AdaptiveStep& step, bool accepted) {
    if (adapting_) step.adapt(accepted);
    if (counting_) {
      auto& tally = tallies_[block];
      ++tally.tried;
      if (accepted) ++tally.accepted;
    }
  }

  void sweep() {
    for (std::size_t l = 0; l < state_.freqs.num_loci(); ++l)
      for (std::size_t i = 0; i < state_.freqs.num_sources(); ++i) update_freq_row(l, i);
    update_m();
    update_omega();
    if (std::holds_alternative<DirichletDirichletHyper>(state_.hyper)) update_dirichlet_dirichlet();
    if (std::holds_alternative<DirichletLognormalHyper>(state_.hyper)) update_dirichlet_lognormal();
  }

  void update_freq_row(std::size_t l, std::size_t i) {
    if (state_.freqs.num_alleles(l) < 2) return;
    const auto counts = data_.sources.row(l, i);
    const auto source_part = [counts](std::span<const double> theta) {
      double s = 0.0;
      for (std::size_t j = 0; j < theta.size(); ++j)
        if (counts[j] > 0) s += static_cast<double>(counts[j]) * std::log(theta[j]);
      return s;
    };
    const std::vector<double> current(state_.freqs.row(l, i).begin(), state_.freqs.row(l, i).end());
    const LogDensity target = [&](std::span<const double> theta) {
      return source_part(theta) + cache_.propose_row(l, i, theta, state_.freqs);
    };
    AdaptiveStep& step = freq_steps_[l * state_.freqs.num_sources() + i];
    const BlockMove move = mh_update_simplex_block(current, source_part(current) + cache_.total(), target,
                                                   {step.step(), config_.freqs.style}, rng_);
    if (move.accepted) {
      cache_.commit_row(l, i, move.value, state_.freqs);
      std::copy(move.value.begin(), move.value.end(), state_.freqs.row(l, i).begin());
    }
    record("P", step, move.accepted);
  }

  double log_prior_m(std::span<const double> m) const {
    if (const auto* dd = std::get_if<DirichletDirichletHyper>(&state_.hyper))
      return log_prior_m_dirdir(m, dd->rho, dd->phi);
    if (const auto* dl = std::get_if<DirichletLognormalHyper>(&state_.hyper))
      return log_prior_m_dirlognormal(m, dl->psi);
    return 0.0;
  }

  void update_m() {
    if (state_.m.size() < 2) return;
    const LogDensity target = [&](std::span<const double> m) { return cache_.propose_m(m) + log_prior_m(m); };
    const BlockMove move = mh_update_simplex_block(state_.m, cache_.total() + log_prior_m(state_.m), target,
                                                   {m_step_.step(), config_.proportions.style}, rng_);
    if (move.accepted) {
      cache_.commit_m(move.value);
      state_.m = move.value;
    }
    record("m", m_step_, move.accepted);
  }

  void update_omega() {
    const ScalarLogDensity target = [&](double w) { return cache_.propose_omega(w); };
    const ScalarMove move = mh_update_unit_scalar(state_.omega, cache_.total(), target, omega_step_.step(), rng_);
    if (move.accepted) {
      cache_.commit_omega(move.value);
      state_.omega = move.value;
    }
    record("omega", omega_step_, move.accepted);
  }

  double log_prior_alpha(std::span<const double> alpha) const {
    double s = 0.0;
    for (double a : alpha) s += log_normal_density(a, 0.0, prior_.alpha_variance);
    return s;
  }

  void update_dirichlet_dirichlet() {
    auto& h = std::get<DirichletDirichletHyper>(state_.hyper);
    const auto& m = state_.m;
    const std::vector<double> eta = eta_from_covariates(h.alpha, data_.covariates);

    if (h.phi.size() >= 2) {
      const LogDensity target = [&](std::span<const double> phi) {
        return log_prior_m_dirdir(m, h.rho, phi) + log_prior_phi(phi, eta);
      };
      const BlockMove move = mh_update_simplex_block(h.phi, target(h.phi), target,
                                                     {phi_step_.step(), config_.phi.style}, rng_);
      if (move.accepted) h.phi = move.value;
      record("phi", phi_step_, move.accepted);
    }

    {
      const ScalarLogDensity target = [&](double rho) { return log_prior_m_dirdir(m, rho, h.phi); };
      const ScalarMove move = mh_update_unit_scalar(h.rho, target(h.rho), target, rho_step_.step(), rng_);
      if (move.accepted) h.rho = move.value;
      record("rho", rho_step_, move.accepted);
    }

    {
      const LogDensity target = [&](std::span<const double> alpha) {
        std::vector<double> e;
        try {
          e = eta_from_covariates(alpha, data_.covariates);
        } catch (const std::overflow_error&) {
          return kNegInf;
        }
        return log_prior_phi(h.phi, e) + log_prior_alpha(alpha);
      };
      const BlockMove move = mh_update_real_block(h.alpha, target(h.alpha), target, alpha_step_.step(), false, rng_);
      if (move.accepted) h.alpha = move.value;
      record("alpha", alpha_step_, move.accepted);
    }
  }

  void update_dirichlet_lognormal() {
    auto& h = std::get<DirichletLognormalHyper>(state_.hyper);
    const auto& m = state_.m;
    const auto& g = data_.covariates;

    {
      const LogDensity target = [&](std::span<const double> psi) {
        return log_prior_m_dirlognormal(m, psi) + log_prior_psi(psi, h.alpha, h.tau, g);
      };
      const BlockMove move = mh_update_real_block(h.psi, target(h.psi), target, psi_step_.step(), true, rng_);
      if (move.accepted) h.psi = move.value;
      record("psi", psi_step_, move.accepted);
    }

    {
      const LogDensity target = [&](std::span<const double> tau) {
        return log_prior_psi(h.psi, h.alpha, tau[0], g) + log_gamma_density(tau[0], prior_.tau_shape, prior_.tau_rate);
      };
      const std::vector<double> tau{h.tau};
      const BlockMove move = mh_update_real_block(tau, target(tau), target, tau_step_.step(), true, rng_);
      if (move.accepted) h.tau = move.value[0];
      record("tau", tau_step_, move.accepted);
    }

    {
      const LogDensity target = [&](std::span<const double> alpha) {
        return log_prior_psi(h.psi, alpha, h.tau, g) + log_prior_alpha(alpha);
      };
      const BlockMove move = mh_update_real_block(h.alpha, target(h.alpha), target, alpha_step_.step(), false, rng_);
      if (move.accepted) h.alpha = move.value;
      record("alpha", alpha_step_, move.accepted);
    }
  }

  const DataSet& data_;
  const PriorSpec& prior_;
  const ChainConfig& config_;
  ModelState state_;
  ColonyCache cache_;
  Rng rng_;
  std::vector<AdaptiveStep> freq_steps_;
  AdaptiveStep m_step_;
  AdaptiveStep omega_step_;
  AdaptiveStep phi_step_;
  AdaptiveStep rho_step_;
  AdaptiveStep alpha_step_;
  AdaptiveStep psi_step_;
  AdaptiveStep tau_step_;
  std::map<std::string, AcceptanceTally> tallies_;
  bool adapting_ = false;
  bool counting_ = false;
};

}  // namespace

ChainOutput run_chain(const DataSet& data, const PriorSpec& prior, const ChainConfig& config) {
  config.validate();
  validate_dataset(data, prior);
  GibbsSampler sampler(data, prior, config);
  return sampler.run();
}

}  // namespace mixstock
