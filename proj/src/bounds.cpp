#include "interplab/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "interplab/rng.hpp"

namespace interplab {

namespace {

constexpr double kC1 = 66.0;   // main bound constant
constexpr double kC2 = 64.0;   // general norm bound constant
constexpr double kC3 = 140.0;  // isotropic l1 norm bound constant
constexpr double kRGateFactor = 64.0;  // surrogate for "R(Sigma_2) >~ log(1/delta)^2"

double log_inv(double delta) { return std::log(1.0 / delta); }

void require_delta(double delta, double cap, const char* what) {
  if (!(delta > 0.0) || delta > cap) {
    throw DeltaOutOfRange(std::string(what) + ": delta outside (0, " + std::to_string(cap) + "]");
  }
}

void flag(BoundReport& rep, bool ok, const std::string& note) {
  if (!ok) {
    rep.valid = false;
    rep.validity_notes.push_back(note);
  }
}

double wstar_norm(const ProblemSpec& spec, Norm norm) {
  return norm_value(norm, spec.w_star);
}

}  // namespace

const char* variant_name(BoundVariant v) {
  return v == BoundVariant::theorem ? "theorem" : "appendix_sharp";
}

double beta_value(BoundVariant variant, double delta, Index n, Index rank1) {
  const double nn = static_cast<double>(n);
  const double rk = static_cast<double>(rank1);
  if (variant == BoundVariant::theorem) {
    return kC1 * (std::sqrt(log_inv(delta) / nn) + std::sqrt(rk / nn));
  }
  return 33.0 * std::sqrt(std::log(32.0 / delta) / nn) + 18.0 * std::sqrt(rk / nn);
}

BoundReport ucb_main_from_width(const ProblemSpec& spec, const CovSplit& split, Norm norm,
                                double B, double delta, BoundVariant variant,
                                const WidthEstimate& unit_width) {
  require_delta(delta, 0.25, "ucb_main");
  if (!(B > 0.0)) throw BTooSmall("ucb_main requires B > 0");
  const CovView part2 = part2_view(spec.cov, split);
  const double nn = static_cast<double>(spec.n);

  const double beta = beta_value(variant, delta, spec.n, split.rank1());
  const double log_factor = std::sqrt(2.0 * std::log(32.0 / delta));
  const double width = B * unit_width.mean;
  const double width_err = B * unit_width.std_error;
  const double rad = radius(part2, norm, B);
  const double signal = part2.mahalanobis(spec.w_star);

  BoundReport rep;
  rep.delta = delta;
  rep.variant = variant;
  rep.terms["beta"] = beta;
  rep.terms["width_term"] = width;
  rep.terms["radius_term"] = rad * log_factor;
  rep.terms["signal_term"] = signal * log_factor;
  rep.terms["log_factor"] = log_factor;

  auto assemble = [&](double w) {
    const double s = w + rad * log_factor + signal * log_factor;
    return (1.0 + beta) / nn * s * s;
  };
  rep.value = assemble(width);
  rep.value_lo = assemble(std::max(0.0, width - 3.0 * width_err));
  rep.value_hi = assemble(width + 3.0 * width_err);
  flag(rep, beta <= 1.0, "beta > 1");
  return rep;
}

BoundReport ucb_main(const ProblemSpec& spec, const CovSplit& split, Norm norm, double B,
                     double delta, BoundVariant variant, const McSettings& mc) {
  const CovView part2 = part2_view(spec.cov, split);
  const WidthEstimate unit = gaussian_width_mc(part2, norm, 1.0, mc.samples, mc.seed);
  return ucb_main_from_width(spec, split, norm, B, delta, variant, unit);
}

BoundReport ucb_spec(const ProblemSpec& spec, double B, double delta, BoundVariant variant) {
  require_delta(delta, 0.25, "ucb_spec");
  if (B < spec.w_star.norm()) throw BTooSmall("ucb_spec requires B >= ||w*||_2");
  const double nn = static_cast<double>(spec.n);
  // The proof takes rank(Sigma_1) of order sqrt(n log(32/delta)), largest
  // eigenvalues first.
  Index k = static_cast<Index>(std::ceil(std::sqrt(nn * std::log(32.0 / delta))));
  k = std::clamp<Index>(k, 1, spec.dim());

  const double beta = beta_value(variant, delta, spec.n, k);
  const double lift = 1.0 + 6.0 * std::sqrt(log_inv(delta) / static_cast<double>(k));
  const double gamma = (1.0 + beta) * lift * lift - 1.0;
  const double psi_n = spec.cov.trace();

  BoundReport rep;
  rep.delta = delta;
  rep.variant = variant;
  rep.terms["beta"] = beta;
  rep.terms["gamma"] = gamma;
  rep.terms["rank1"] = static_cast<double>(k);
  rep.terms["psi_n"] = psi_n;
  rep.value = (1.0 + gamma) * B * B * psi_n / nn;
  rep.value_lo = rep.value_hi = rep.value;
  flag(rep, beta <= 1.0, "beta > 1");
  return rep;
}

namespace {

struct EuclidParams {
  double gamma = 0.0;
  double eps = 0.0;
  double r2 = 0.0, R2 = 0.0, tr2 = 0.0;
  bool gamma_ok = true, eps_ok = true, rgate_ok = true;
};

EuclidParams euclid_params(const ProblemSpec& spec, const CovSplit& split, double delta,
                           BoundVariant variant, double c2) {
  const CovView part2 = part2_view(spec.cov, split);
  EuclidParams p;
  p.tr2 = part2.trace();
  if (part2.is_zero()) throw ZeroCovariance("euclid bounds need a non-zero Sigma_2");
  std::tie(p.r2, p.R2) = effective_ranks_l2(part2);
  const double nn = static_cast<double>(spec.n);
  const double rk = static_cast<double>(split.rank1());
  const double ld = log_inv(delta);

  if (variant == BoundVariant::theorem) {
    p.gamma = kC1 * (std::sqrt(ld / p.r2) + std::sqrt(ld / nn) + std::sqrt(rk / nn));
  } else {
    const double beta = beta_value(variant, delta, spec.n, split.rank1());
    const double lift = 1.0 + 2.0 * std::sqrt(2.0 * std::log(32.0 / delta) / p.r2);
    p.gamma = (1.0 + beta) * lift * lift - 1.0;
  }
  p.eps = c2 * (std::sqrt(ld / p.r2) + std::sqrt(ld / nn) + nn * ld / p.R2);
  p.gamma_ok = p.gamma <= 1.0;
  p.eps_ok = p.eps <= 1.0;
  p.rgate_ok = p.R2 >= kRGateFactor * ld * ld;
  return p;
}

}  // namespace

EuclidSuite euclid_suite(const ProblemSpec& spec, const CovSplit& split, double B, double delta,
                         BoundVariant variant, double c2_surrogate) {
  require_delta(delta, 0.5, "euclid_suite");
  const EuclidParams p = euclid_params(spec, split, delta, variant, c2_surrogate);
  const double nn = static_cast<double>(spec.n);
  const double ws2 = spec.w_star.norm();
  const double sigma = spec.sigma;

  EuclidSuite out;

  out.gen.delta = delta;
  out.gen.variant = variant;
  out.gen.terms["gamma"] = p.gamma;
  out.gen.terms["trace_sigma2"] = p.tr2;
  out.gen.value = (1.0 + p.gamma) * B * B * p.tr2 / nn;
  out.gen.value_lo = out.gen.value_hi = out.gen.value;
  flag(out.gen, delta <= 0.25, "delta > 1/4");
  flag(out.gen, B >= ws2, "B < ||w*||_2");
  flag(out.gen, p.gamma_ok, "gamma > 1");

  out.norm.delta = delta;
  out.norm.variant = variant;
  out.norm.terms["epsilon"] = p.eps;
  out.norm.terms["trace_sigma2"] = p.tr2;
  out.norm.terms["signal_term"] = ws2;
  out.norm.terms["noise_term"] = std::sqrt(1.0 + p.eps) * sigma * std::sqrt(nn / p.tr2);
  out.norm.value = ws2 + out.norm.terms["noise_term"];
  out.norm.value_lo = out.norm.value_hi = out.norm.value;
  flag(out.norm, delta <= 0.25, "delta > 1/4");
  flag(out.norm, p.eps_ok, "epsilon > 1");
  flag(out.norm, p.rgate_ok, "R(Sigma_2) below the log(1/delta)^2 gate");

  out.risk.delta = delta;
  out.risk.variant = variant;
  out.risk.terms["gamma"] = p.gamma;
  out.risk.terms["epsilon"] = p.eps;
  out.risk.terms["signal_term"] = ws2 * std::sqrt(p.tr2 / nn);
  out.risk.value = (1.0 + p.gamma) * (1.0 + p.eps) *
                   std::pow(sigma + out.risk.terms["signal_term"], 2);
  out.risk.value_lo = out.risk.value_hi = out.risk.value;
  flag(out.risk, p.gamma_ok, "gamma > 1");
  flag(out.risk, p.eps_ok, "epsilon > 1");
  flag(out.risk, p.rgate_ok, "R(Sigma_2) below the log(1/delta)^2 gate");
  return out;
}

namespace {

struct GeneralInputs {
  WidthEstimate width;  // E||Sigma_2^{1/2} H||_* at B = 1
  VStarStats vstar;
  double rad1 = 0.0;  // sup_{||w||<=1} ||w||_{Sigma_2}
  double r_norm = 0.0, R_norm = 0.0;
};

GeneralInputs general_inputs(const ProblemSpec& spec, const CovSplit& split, Norm norm,
                             double delta, const McSettings& mc) {
  const CovView part2 = part2_view(spec.cov, split);
  if (part2.is_zero()) throw ZeroCovariance("general bounds need a non-zero Sigma_2");
  GeneralInputs in;
  in.width = gaussian_width_mc(part2, norm, 1.0, mc.samples, Rng::derive(mc.seed, {0x30}));
  in.vstar = vstar_stats(part2, norm, mc.samples, Rng::derive(mc.seed, {0x31}), 1.0 - delta / 4.0);
  in.rad1 = radius(part2, norm, 1.0);
  in.r_norm = std::pow(in.width.mean / in.rad1, 2);
  in.R_norm = std::pow(in.width.mean / in.vstar.mean, 2);
  return in;
}

bool part2_axis_aligned(const CovarianceModel& cov, const CovSplit& split) {
  if (cov.is_diagonal()) return true;
  const VectorXd eigs2 = split.eigs2(cov);
  for (Index j = 0; j < cov.dim(); ++j) {
    if (eigs2[j] <= 0.0) continue;
    const VectorXd col = cov.basis().col(j).cwiseAbs();
    if (col.maxCoeff() < 1.0 - 1e-12) return false;
  }
  return true;
}

}  // namespace

GeneralSuite general_norm_suite(const ProblemSpec& spec, const CovSplit& split, Norm norm,
                                double B, double delta, const McSettings& mc,
                                std::optional<double> eps1_in, std::optional<double> eps2_in) {
  if (norm != Norm::L1 && norm != Norm::L2)
    throw UnsupportedNorm("general_norm_suite supports l1 and l2");
  require_delta(delta, 0.5, "general_norm_suite");
  const CovView part2 = part2_view(spec.cov, split);
  const GeneralInputs in = general_inputs(spec, split, norm, delta, mc);
  const double nn = static_cast<double>(spec.n);
  const double rk = static_cast<double>(split.rank1());
  const double ld = log_inv(delta);
  const double ws = wstar_norm(spec, norm);
  const double sigma = spec.sigma;

  // eps1: concentration margin for ||v*||_{Sigma_2}. l2 uses the MC quantile
  // at level 1 - delta/4; diagonal l1 uses the max-diagonal upper bound,
  // which holds almost surely.
  double eps1;
  if (eps1_in) {
    eps1 = *eps1_in;
  } else if (norm == Norm::L1 && part2_axis_aligned(spec.cov, split)) {
    eps1 = std::max(0.0, std::sqrt(part2.diag_entries().maxCoeff()) / in.vstar.mean - 1.0);
  } else {
    eps1 = std::max(0.0, in.vstar.quantile / in.vstar.mean - 1.0);
  }
  // eps2: projection cost; zero for l2 and for axis-aligned l1 splits.
  double eps2;
  if (eps2_in) {
    eps2 = *eps2_in;
  } else if (norm == Norm::L2 || (norm == Norm::L1 && part2_axis_aligned(spec.cov, split))) {
    eps2 = 0.0;
  } else {
    eps2 = 0.0;  // v* lies in span(Sigma_2) by construction of the subgradient rule
  }

  GeneralSuite out;
  out.eps1 = eps1;
  out.eps2 = eps2;

  auto eval_all = [&](double w_mean, double v_mean, GeneralSuite& dst, bool record_terms) {
    const double r_norm = std::pow(w_mean / in.rad1, 2);
    const double R_norm = std::pow(w_mean / v_mean, 2);
    const double gamma = kC1 * (std::sqrt(ld / r_norm) + std::sqrt(ld / nn) + std::sqrt(rk / nn));
    const double eps = kC2 * (std::sqrt(ld / r_norm) + std::sqrt(ld / nn) +
                              (1.0 + eps1) * (1.0 + eps1) * nn / R_norm + eps2);
    const double gen = (1.0 + gamma) * std::pow(B * w_mean, 2) / nn;
    const double norm_b = ws + std::sqrt(1.0 + eps) * sigma * std::sqrt(nn) / w_mean;
    const double risk = (1.0 + gamma) * (1.0 + eps) * std::pow(sigma + ws * w_mean / std::sqrt(nn), 2);
    if (record_terms) {
      dst.gen.terms["gamma"] = gamma;
      dst.gen.terms["width"] = w_mean;
      dst.gen.terms["r_norm"] = r_norm;
      dst.norm_bound.terms["epsilon"] = eps;
      dst.norm_bound.terms["eps1"] = eps1;
      dst.norm_bound.terms["eps2"] = eps2;
      dst.norm_bound.terms["R_norm"] = R_norm;
      dst.norm_bound.terms["signal_term"] = ws;
      dst.norm_bound.terms["noise_term"] = norm_b - ws;
      dst.risk.terms["gamma"] = gamma;
      dst.risk.terms["epsilon"] = eps;
      dst.risk.terms["signal_term"] = ws * w_mean / std::sqrt(nn);
      dst.gen.value = gen;
      dst.norm_bound.value = norm_b;
      dst.risk.value = risk;
      flag(dst.gen, delta <= 0.25, "delta > 1/4");
      flag(dst.gen, B >= ws, "B < ||w*||");
      flag(dst.gen, gamma <= 1.0, "gamma > 1");
      flag(dst.norm_bound, delta <= 0.25, "delta > 1/4");
      flag(dst.norm_bound, eps <= 1.0, "epsilon > 1");
      flag(dst.risk, gamma <= 1.0, "gamma > 1");
      flag(dst.risk, eps <= 1.0, "epsilon > 1");
    }
    return std::array<double, 3>{gen, norm_b, risk};
  };

  eval_all(in.width.mean, in.vstar.mean, out, true);
  for (BoundReport* rep : {&out.gen, &out.norm_bound, &out.risk}) {
    rep->delta = delta;
    rep->value_lo = rep->value;
    rep->value_hi = rep->value;
  }
  // MC interval: evaluate at the +-3 SE corners of (width, E||v*||).
  GeneralSuite scratch;
  for (double dw : {-3.0, 3.0}) {
    for (double dv : {-3.0, 3.0}) {
      const double w_mean = std::max(1e-300, in.width.mean + dw * in.width.std_error);
      const double v_mean = std::max(1e-300, in.vstar.mean + dv * in.vstar.std_error);
      const auto vals = eval_all(w_mean, v_mean, scratch, false);
      out.gen.value_lo = std::min(out.gen.value_lo, vals[0]);
      out.gen.value_hi = std::max(out.gen.value_hi, vals[0]);
      out.norm_bound.value_lo = std::min(out.norm_bound.value_lo, vals[1]);
      out.norm_bound.value_hi = std::max(out.norm_bound.value_hi, vals[1]);
      out.risk.value_lo = std::min(out.risk.value_lo, vals[2]);
      out.risk.value_hi = std::max(out.risk.value_hi, vals[2]);
    }
  }
  return out;
}

BpSuite bp_suite(const ProblemSpec& spec, const CovSplit& split, double B, double delta,
                 const McSettings& mc) {
  require_delta(delta, 0.5, "bp_suite");
  if (!part2_axis_aligned(spec.cov, split))
    throw NotDiagonal("bp_suite requires a diagonal Sigma_2");
  const CovView part2 = part2_view(spec.cov, split);
  if (part2.is_zero()) throw ZeroCovariance("bp_suite needs a non-zero Sigma_2");

  const double nn = static_cast<double>(spec.n);
  const double rk = static_cast<double>(split.rank1());
  const double ld = log_inv(delta);
  const double ws1 = spec.w_star.lpNorm<1>();
  const double sigma = spec.sigma;

  const WidthEstimate width =
      gaussian_width_mc(part2, Norm::L1, 1.0, mc.samples, Rng::derive(mc.seed, {0x40}));
  const double maxdiag = part2.diag_entries().maxCoeff();
  const double r1 = width.mean * width.mean / maxdiag;

  BpSuite out;
  auto eval_core = [&](double w_mean) {
    const double r1_w = w_mean * w_mean / maxdiag;
    const double gamma = kC1 * (std::sqrt(ld / r1_w) + std::sqrt(ld / nn) + std::sqrt(rk / nn));
    const double eps = kC2 * (std::sqrt(ld / r1_w) + std::sqrt(ld / nn) + nn / r1_w);
    const double gen = (1.0 + gamma) * std::pow(B * w_mean, 2) / nn;
    const double norm_b = ws1 + std::sqrt(1.0 + eps) * sigma * std::sqrt(nn) / w_mean;
    const double risk =
        (1.0 + gamma) * (1.0 + eps) * std::pow(sigma + ws1 * w_mean / std::sqrt(nn), 2);
    return std::array<double, 5>{gen, norm_b, risk, gamma, eps};
  };

  const auto center = eval_core(width.mean);
  out.gen.terms["gamma"] = center[3];
  out.gen.terms["width"] = width.mean;
  out.gen.terms["r1"] = r1;
  out.gen.value = center[0];
  out.norm_bound.terms["epsilon"] = center[4];
  out.norm_bound.terms["r1"] = r1;
  out.norm_bound.terms["signal_term"] = ws1;
  out.norm_bound.terms["noise_term"] = center[1] - ws1;
  out.norm_bound.value = center[1];
  out.risk.terms["gamma"] = center[3];
  out.risk.terms["epsilon"] = center[4];
  out.risk.terms["signal_term"] = ws1 * width.mean / std::sqrt(nn);
  out.risk.value = center[2];
  for (BoundReport* rep : {&out.gen, &out.norm_bound, &out.risk}) {
    rep->delta = delta;
    rep->value_lo = rep->value;
    rep->value_hi = rep->value;
  }
  for (double dw : {-3.0, 3.0}) {
    const auto vals = eval_core(std::max(1e-300, width.mean + dw * width.std_error));
    out.gen.value_lo = std::min(out.gen.value_lo, vals[0]);
    out.gen.value_hi = std::max(out.gen.value_hi, vals[0]);
    out.norm_bound.value_lo = std::min(out.norm_bound.value_lo, vals[1]);
    out.norm_bound.value_hi = std::max(out.norm_bound.value_hi, vals[1]);
    out.risk.value_lo = std::min(out.risk.value_lo, vals[2]);
    out.risk.value_hi = std::max(out.risk.value_hi, vals[2]);
  }
  flag(out.gen, delta <= 0.25, "delta > 1/4");
  flag(out.gen, B >= ws1, "B < ||w*||_1");
  flag(out.gen, center[3] <= 1.0, "gamma > 1");
  flag(out.norm_bound, delta <= 0.25, "delta > 1/4");
  flag(out.norm_bound, center[4] <= 1.0, "epsilon > 1");
  flag(out.risk, center[3] <= 1.0, "gamma > 1");
  flag(out.risk, center[4] <= 1.0, "epsilon > 1");

  // Isotropic support-splitting norm bound; only defined for Sigma = I.
  const bool isotropic =
      spec.cov.is_diagonal() && (spec.cov.eigenvalues().array() == 1.0).all();
  if (isotropic) {
    const Index support = (spec.w_star.array() != 0.0).count();
    const Index rest = spec.dim() - support;
    if (rest >= 2) {
      const double logr = std::log(static_cast<double>(rest));
      const double eps4 =
          kC3 * (std::sqrt(ld / nn) + std::sqrt(ld / logr) + nn / logr);
      VectorXd ones = VectorXd::Ones(rest);
      const CovarianceModel rest_cov = CovarianceModel::diagonal(std::move(ones));
      const WidthEstimate wprime = gaussian_width_mc(rest_cov, Norm::L1, 1.0, mc.samples,
                                                     Rng::derive(mc.seed, {0x41}));
      const double scale = std::sqrt(sigma * sigma + spec.w_star.squaredNorm()) * std::sqrt(nn);
      out.iso_norm.delta = delta;
      out.iso_norm.terms["epsilon"] = eps4;
      out.iso_norm.terms["support"] = static_cast<double>(support);
      out.iso_norm.terms["width_rest"] = wprime.mean;
      out.iso_norm.value = std::sqrt(1.0 + eps4) * scale / wprime.mean;
      out.iso_norm.value_lo =
          std::sqrt(1.0 + eps4) * scale / (wprime.mean + 3.0 * wprime.std_error);
      out.iso_norm.value_hi = std::sqrt(1.0 + eps4) * scale /
                              std::max(1e-300, wprime.mean - 3.0 * wprime.std_error);
      flag(out.iso_norm, delta <= 0.25, "delta > 1/4");
      flag(out.iso_norm, eps4 <= 1.0, "epsilon > 1");
    } else {
      throw UnsupportedForE4("support leaves fewer than 2 free coordinates");
    }
  } else {
    out.iso_norm.valid = false;
    out.iso_norm.validity_notes.push_back("covariance is not the identity");
  }
  return out;
}

BoundReport bp_iso_risk(const ProblemSpec& spec, double delta, const McSettings& mc) {
  require_delta(delta, 0.5, "bp_iso_risk");
  const bool isotropic =
      spec.cov.is_diagonal() && (spec.cov.eigenvalues().array() == 1.0).all();
  if (!isotropic) throw UnsupportedForE4("bp_iso_risk requires Sigma = I");
  (void)mc;
  const Index support = (spec.w_star.array() != 0.0).count();
  const Index rest = spec.dim() - support;
  if (rest < 2) throw UnsupportedForE4("support leaves fewer than 2 free coordinates");
  const double nn = static_cast<double>(spec.n);
  const double ld = log_inv(delta);
  const double logr = std::log(static_cast<double>(rest));
  const double logs = std::log(static_cast<double>(std::max<Index>(support, 1)));
  const double eta =
      368.0 * (std::sqrt(ld / nn) + std::sqrt((ld + logs) / logr) + nn / logr);

  BoundReport rep;
  rep.delta = delta;
  rep.terms["eta"] = eta;
  rep.terms["null_risk"] = spec.sigma * spec.sigma + spec.w_star.squaredNorm();
  rep.value = (1.0 + eta) * rep.terms["null_risk"];
  rep.value_lo = rep.value_hi = rep.value;
  flag(rep, eta <= 1.0, "eta > 1");
  return rep;
}

ConsistencyTable consistency_diagnostics(const std::vector<std::pair<ProblemSpec, CovSplit>>& seq,
                                         Norm norm, const McSettings& mc) {
  if (seq.empty()) throw EmptySequence("consistency_diagnostics needs a non-empty sequence");
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i].first.n <= seq[i - 1].first.n)
      throw LabError("consistency sequence must have increasing n");
  }

  ConsistencyTable table;
  const std::array<double, 2> etas = {0.1, 0.01};
  for (std::size_t row_idx = 0; row_idx < seq.size(); ++row_idx) {
    const ProblemSpec& spec = seq[row_idx].first;
    const CovSplit& split = seq[row_idx].second;
    const CovView part2 = part2_view(spec.cov, split);
    const double nn = static_cast<double>(spec.n);
    ConsistencyRow row;
    row.n = spec.n;
    row.ratios["rank1_over_n"] = static_cast<double>(split.rank1()) / nn;

    if (norm == Norm::L2) {
      const auto [r2, R2] = effective_ranks_l2(part2);
      (void)r2;
      row.ratios["aliasing"] = spec.w_star.norm() * std::sqrt(part2.trace() / nn);
      row.ratios["n_over_R"] = nn / R2;
      // ||P v*||_2 = 1 exactly for the Euclidean norm; the contraction
      // probability is identically zero.
      for (double eta : etas) {
        row.ratios["contraction_" + std::to_string(eta).substr(0, 4)] = 0.0;
      }
    } else {
      const std::uint64_t seed = Rng::derive(mc.seed, {0x50, row_idx});
      const WidthEstimate width = gaussian_width_mc(part2, norm, 1.0, mc.samples, seed);
      const double rad1 = radius(part2, norm, 1.0);
      const double r_norm = std::pow(width.mean / rad1, 2);
      const VStarStats vst = vstar_stats(part2, norm, mc.samples, Rng::derive(seed, {1}), 0.99);
      const double R_norm = std::pow(width.mean / vst.mean, 2);
      row.ratios["aliasing"] = wstar_norm(seq[row_idx].first, norm) * width.mean / std::sqrt(nn);
      row.ratios["inv_r_norm"] = 1.0 / r_norm;
      row.ratios["n_over_R_norm"] = nn / R_norm;
      if (norm == Norm::L1) row.ratios["n_over_r1"] = nn / r_norm;
      // Contraction probability via MC over fresh subgradients.
      Rng rng(Rng::derive(seed, {2}));
      std::array<long, 2> hits = {0, 0};
      const long draws = std::max<long>(500, mc.samples / 10);
      for (long i = 0; i < draws; ++i) {
        const VectorXd h = rng.gauss_vector(spec.dim());
        const VectorXd u = part2.apply_sqrt(h);
        if (u.cwiseAbs().maxCoeff() == 0.0) continue;
        const VectorXd v = subgradient_dual(norm, u, part2);
        const double pnorm = norm_value(norm, part2.project_span(v));
        for (std::size_t e = 0; e < etas.size(); ++e) {
          if (pnorm * pnorm > 1.0 + etas[e]) ++hits[e];
        }
      }
      for (std::size_t e = 0; e < etas.size(); ++e) {
        row.ratios["contraction_" + std::to_string(etas[e]).substr(0, 4)] =
            static_cast<double>(hits[e]) / static_cast<double>(draws);
      }
    }
    table.rows.push_back(std::move(row));
  }

  for (const auto& [key, first_val] : table.rows.front().ratios) {
    (void)first_val;
    bool down = true;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
      const auto it_prev = table.rows[i - 1].ratios.find(key);
      const auto it_cur = table.rows[i].ratios.find(key);
      if (it_cur == table.rows[i].ratios.end() || it_prev == table.rows[i - 1].ratios.end())
        continue;
      if (it_cur->second > it_prev->second + 1e-15) down = false;
    }
    table.decreasing[key] = down;
  }
  return table;
}

}  // namespace interplab
