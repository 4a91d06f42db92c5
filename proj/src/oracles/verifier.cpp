#include "digits/oracles/verifier.hpp"

#include "digits/core/error.hpp"
#include "digits/core/parallel.hpp"

namespace digits {

void validate(const VerifierConfig& cfg) {
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) throw ConfigError("verifier confidence must lie in (0,1)");
  if (cfg.samples < 1) throw ConfigError("verifier needs at least one sample");
}

Verifier::Verifier(InputDistribution dist, Postcondition post, Program spec, VerifierConfig cfg)
    : dist_(std::move(dist)),
      post_(std::move(post)),
      spec_(std::move(spec)),
      cfg_(cfg),
      pool_(dist_.dimension(), cfg.seed) {
  validate(cfg_);
  if (spec_.input_dim() != dist_.dimension() || post_.input_dim() != dist_.dimension()) {
    throw ConfigError("specification, postcondition and distribution disagree on the input dimension");
  }
  pool_ = sample(dist_, cfg_.seed, cfg_.samples);
  spec_out_.resize(cfg_.samples);
  for (std::size_t i = 0; i < cfg_.samples; ++i) spec_out_[i] = static_cast<char>(spec_.evaluate(pool_[i]));
}

Verifier::Assessment Verifier::assess(const Program& p) const {
  if (p.input_dim() != dist_.dimension()) throw ContractViolation("program dimension differs from the distribution");
  if (p.family().event_count() != post_.event_count()) {
    throw ContractViolation("program's assert count differs from the postcondition's");
  }
  ++calls_;
  const std::size_t T = post_.term_count();
  const std::size_t n = cfg_.samples;
  // Columns 0..T-1: term events; column T: disagreement with the spec.
  const auto counts = count_columns(n, T + 1, cfg_.execution, [&](std::size_t i, std::vector<char>& row) {
    thread_local Observation obs;
    const auto x = pool_[i];
    p.observe(x, obs);
    post_.mark_terms(obs.output, x, obs.events, std::span<char>(row.data(), T));
    row[T] = static_cast<char>(obs.output != spec_out_[i]);
  });

  Assessment out;
  const double term_delta = (1.0 - cfg_.confidence) / static_cast<double>(std::max<std::size_t>(T, 1));
  std::vector<double> values(T);
  out.verdict.terms.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    auto& e = out.verdict.terms[t];
    e.hits = counts[t];
    e.samples = n;
    e.value = static_cast<double>(counts[t]) / static_cast<double>(n);
    e.half_width = hoeffding_half_width(n, term_delta);
    values[t] = e.value;
  }
  const auto outcome = post_.evaluate(values);
  out.verdict.accepted = outcome.holds;
  out.verdict.degenerate = outcome.degenerate;
  out.verdict.low_conditioning = outcome.min_denominator < 0.01;

  out.error.hits = counts[T];
  out.error.samples = n;
  out.error.value = static_cast<double>(counts[T]) / static_cast<double>(n);
  out.error.half_width = hoeffding_half_width(n, 1.0 - cfg_.confidence);
  return out;
}

Verdict verify(const Program& p, const InputDistribution& dist, const Postcondition& post, const VerifierConfig& cfg) {
  // The spec only feeds the error column, which is discarded here.
  const Verifier v(dist, post, make_constant(dist.dimension(), 0), cfg);
  return v.verify(p);
}

Estimate error(const Program& p, const Program& spec, const InputDistribution& dist, const VerifierConfig& cfg) {
  validate(cfg);
  return empirical_error(p, spec, dist, cfg.samples, cfg.seed, cfg.confidence, cfg.execution);
}

}  // namespace digits
