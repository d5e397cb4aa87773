#include "heraldsim/heralded_source.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "heraldsim/constants.hpp"

namespace heraldsim::source {

namespace {

constexpr double kColumnFloor = 1e-22;  // displacement-column decay cutoff
const double kHalfPi = 0.5 * constants::pi;

// Displacement column magnitudes/phases without a truncation guard; the
// m-sums below run until the column itself is negligible.
std::vector<fock::Complex> open_column(fock::Complex delta, int length) {
  std::vector<fock::Complex> col(static_cast<std::size_t>(length) + 1, fock::Complex(0.0, 0.0));
  const double mag = std::abs(delta);
  if (mag == 0.0) {
    col[0] = 1.0;
    return col;
  }
  const auto lf = fock::log_factorials(length);
  const double log_mag = std::log(mag);
  const double phase = std::arg(delta);
  for (int m = 0; m <= length; ++m)
    col[m] = std::polar(std::exp(-0.5 * mag * mag + m * log_mag - 0.5 * lf[m]), m * phase);
  return col;
}

// Smallest column length after which |d[m]| stays below kColumnFloor.
int column_reach(double alpha) {
  const double mag = 0.5 * alpha * std::sqrt(2.0);  // |beta|
  if (mag == 0.0) return 0;
  double ln = -0.5 * mag * mag;
  const double log_mag = std::log(mag);
  double lf = 0.0;
  for (int m = 1; m < 4096; ++m) {
    lf += std::log(static_cast<double>(m));
    ln = -0.5 * mag * mag + m * log_mag - 0.5 * lf;
    if (m > mag * mag && ln < std::log(kColumnFloor)) return m;
  }
  throw TruncationError("column_reach: displacement column does not decay below floor");
}

struct AmplitudeContext {
  int m_hi = 0;
  double lt = 0.0, lc = 0.0, phi = 0.0;
  bool squeezed = false;
  std::vector<fock::Complex> da, db;
  std::vector<double> lf;
};

AmplitudeContext make_context(double alpha, double r, double phi, int max_index) {
  AmplitudeContext ctx;
  ctx.m_hi = column_reach(alpha);
  ctx.phi = phi;
  const fock::Complex beta = 0.5 * alpha * fock::Complex(1.0, -1.0);
  const int col_len = std::max(max_index, ctx.m_hi);
  ctx.da = open_column(beta, col_len);
  ctx.db = open_column(-beta, col_len);
  ctx.lf = fock::log_factorials(std::max(max_index + ctx.m_hi, 1));
  if (r > 0.0) {
    ctx.squeezed = true;
    ctx.lt = std::log(std::tanh(r));
    ctx.lc = std::log(std::cosh(r));
  }
  return ctx;
}

// mu(n_a, n_b) for the circuit state, m-sum truncated only by the
// displacement-column decay.
fock::Complex amplitude(const AmplitudeContext& ctx, int na, int nb) {
  if (!ctx.squeezed) {
    if (na >= static_cast<int>(ctx.da.size()) || nb >= static_cast<int>(ctx.db.size()))
      return fock::Complex(0.0, 0.0);
    return ctx.da[na] * ctx.db[nb];
  }
  const auto& lf = ctx.lf;
  const double pref = 0.5 * (lf[na] + lf[nb]);
  fock::Complex acc(0.0, 0.0);
  for (int n = 0; n <= std::min(na, nb); ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    for (int m = 0;; ++m) {
      const int ma = na - n + m;
      const int mb = nb - n + m;
      if (ma > ctx.m_hi || mb > ctx.m_hi) break;
      const fock::Complex weight = ctx.da[ma] * ctx.db[mb];
      if (weight == fock::Complex(0.0, 0.0)) continue;
      const double ln_mag = (n + m) * ctx.lt - (ma + mb - 2 * m + 1) * ctx.lc + pref +
                            0.5 * (lf[ma] + lf[mb]) - lf[n] - lf[m] - lf[na - n] - lf[nb - n];
      acc += sign * std::polar(std::exp(ln_mag), (n - m) * ctx.phi) * weight;
    }
  }
  return acc;
}

double raw_g2(const CountDistribution& dist) {
  const HeraldMoments mom = moments(dist);
  if (mom.m1_raw <= 0.0)
    throw DegenerateError("g2: mean photon number of the conditional column is zero");
  return (mom.m2_raw - mom.m1_raw) / (mom.m1_raw * mom.m1_raw);
}

int resolve_threads(int threads, int jobs) {
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw > 0 ? static_cast<int>(hw) : 1;
  }
  return std::max(1, std::min(threads, jobs));
}

template <typename Fn>
void parallel_for(int jobs, int threads, Fn&& fn) {
  threads = resolve_threads(threads, jobs);
  if (threads == 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (int i = t; i < jobs; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void validate(const SourceParams& params) {
  if (params.alpha < 0.0) throw std::invalid_argument("SourceParams: alpha must be >= 0");
  if (params.r < 0.0) throw std::invalid_argument("SourceParams: r must be >= 0");
  if (params.eta < 0.0 || params.eta > 1.0)
    throw std::invalid_argument("SourceParams: eta must be in [0, 1]");
  if (params.k_max < 1) throw std::invalid_argument("SourceParams: k_max must be >= 1");
  if (params.cutoff.n_max != 0) fock::validate(params.cutoff);
  if (!(params.cutoff.tail_tol > 0.0))
    throw std::invalid_argument("SourceParams: tail_tol must be > 0");
}

int default_n_max(double r) { return r <= 1.0 ? 64 : 160; }

fock::FockCutoff resolved_cutoff(const SourceParams& params) {
  fock::FockCutoff cut = params.cutoff;
  if (cut.n_max == 0) cut.n_max = default_n_max(params.r);
  return cut;
}

double CountDistribution::sum() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

HeraldMoments moments(const CountDistribution& dist) {
  HeraldMoments mom;
  for (std::size_t n = 0; n < dist.p.size(); ++n) {
    mom.herald_prob += dist.p[n];
    mom.m1_raw += static_cast<double>(n) * dist.p[n];
    mom.m2_raw += static_cast<double>(n) * static_cast<double>(n) * dist.p[n];
  }
  if (mom.herald_prob > 0.0) {
    mom.m1_cond = mom.m1_raw / mom.herald_prob;
    mom.m2_cond = mom.m2_raw / mom.herald_prob;
  }
  return mom;
}

double joint_probability(int n_a, int n_b, const SourceParams& params) {
  validate(params);
  const fock::FockCutoff cut = resolved_cutoff(params);
  if (n_a < 0 || n_b < 0 || n_a > cut.n_max || n_b > cut.n_max)
    throw std::invalid_argument("joint_probability: index outside 0..n_max");
  const AmplitudeContext ctx = make_context(params.alpha, params.r, kHalfPi,
                                            std::max(n_a, n_b));
  return std::norm(amplitude(ctx, n_a, n_b));
}

CountDistribution herald_distribution(const SourceParams& params) {
  validate(params);
  const fock::FockCutoff cut = resolved_cutoff(params);
  const AmplitudeContext ctx = make_context(params.alpha, params.r, kHalfPi, cut.n_max);
  CountDistribution dist;
  dist.p.resize(static_cast<std::size_t>(cut.n_max) + 1);
  for (int n = 0; n <= cut.n_max; ++n) dist.p[n] = std::norm(amplitude(ctx, n, 1));
  dist.leakage = 1.0 - dist.sum();
  return dist;
}

CountDistribution click_distribution(const SourceParams& params) {
  validate(params);
  const fock::FockCutoff cut = resolved_cutoff(params);
  CountDistribution dist;
  dist.p.assign(static_cast<std::size_t>(cut.n_max) + 1, 0.0);
  if (params.eta == 0.0) {
    dist.leakage = 1.0;
    return dist;
  }
  if (params.eta == 1.0) return herald_distribution(params);

  const fock::TwoModeAmplitudes state =
      fock::prepare_final_state(params.alpha, fock::SqueezeSpec{params.r, kHalfPi}, cut);
  const int n_max = state.n_max();
  const int k_eff = std::min(params.k_max, n_max);

  dist.p.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  double counted = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double acc = 0.0;
    double w = params.eta;  // eta (1-eta)^{k-1}
    for (int k = 1; k <= k_eff; ++k) {
      acc += w * std::norm(state.at(n, k));
      w *= 1.0 - params.eta;
    }
    dist.p[n] = acc;
    for (int k = 0; k <= k_eff; ++k) counted += std::norm(state.at(n, k));
  }

  // Truncated-tail bound of the geometric POVM sum.
  const double residual = std::max(0.0, 1.0 - counted);
  const double bound = params.eta * std::pow(1.0 - params.eta, k_eff) * residual;
  if (bound >= 1e-10) {
    std::ostringstream msg;
    msg << "click_distribution: k-tail bound " << bound << " fails (k_eff = " << k_eff << ")";
    throw ConvergenceError(msg.str());
  }
  dist.leakage = 1.0 - dist.sum();
  return dist;
}

double g2_perfect(const SourceParams& params) {
  validate(params);
  if (params.r == 0.0) {
    if (params.alpha == 0.0)
      throw DegenerateError("g2_perfect: vacuum input has no herald events");
    return 1.0;  // conditioning an independent mode leaves a coherent state
  }
  return raw_g2(herald_distribution(params));
}

double g2_click(const SourceParams& params) {
  validate(params);
  if (params.eta == 0.0) throw DegenerateError("g2_click: eta = 0 never clicks");
  if (params.r == 0.0) {
    if (params.alpha == 0.0)
      throw DegenerateError("g2_click: vacuum input has no click events");
    return 1.0;
  }
  return raw_g2(click_distribution(params));
}

std::vector<double> axis_values(const GridAxis& axis) {
  if (axis.steps < 1) throw std::invalid_argument("GridAxis: steps must be >= 1");
  if (axis.stop < axis.start)
    throw std::invalid_argument("GridAxis: stop must be >= start");
  if (axis.steps == 1) return {axis.start};
  std::vector<double> vals(axis.steps);
  const double h = (axis.stop - axis.start) / (axis.steps - 1);
  for (int i = 0; i < axis.steps; ++i) vals[i] = axis.start + i * h;
  return vals;
}

namespace {

// One r row of a sweep; table-backed quantities build the joint state once
// per r and reuse it across the second axis.
void sweep_row(SweepQuantity quantity, double r, const std::vector<double>& second,
               const SourceParams& base, int click_n, std::vector<SweepCell>& row) {
  row.resize(second.size());
  for (std::size_t j = 0; j < second.size(); ++j) {
    row[j].r = r;
    row[j].second = second[j];
    row[j].value = std::numeric_limits<double>::quiet_NaN();
    row[j].leakage = std::numeric_limits<double>::quiet_NaN();
  }

  switch (quantity) {
    case SweepQuantity::p11: {
      for (std::size_t j = 0; j < second.size(); ++j) {
        try {
          SourceParams p = base;
          p.r = r;
          p.alpha = second[j];
          row[j].value = joint_probability(1, 1, p);
          row[j].leakage = 0.0;
        } catch (const std::exception& ex) {
          row[j].error = ex.what();
        }
      }
      break;
    }
    case SweepQuantity::g2_perfect: {
      for (std::size_t j = 0; j < second.size(); ++j) {
        try {
          SourceParams p = base;
          p.r = r;
          p.alpha = second[j];
          if (p.r == 0.0) {
            row[j].value = g2_perfect(p);  // analytic coherent-state path
            row[j].leakage = 0.0;
          } else {
            const CountDistribution dist = herald_distribution(p);
            row[j].value = raw_g2(dist);
            row[j].leakage = dist.leakage;
          }
        } catch (const std::exception& ex) {
          row[j].error = ex.what();
        }
      }
      break;
    }
    case SweepQuantity::pclick_n: {
      // P(click_n, k) row over k, weighted per eta.
      try {
        SourceParams p = base;
        p.r = r;
        const fock::FockCutoff cut = resolved_cutoff(p);
        const AmplitudeContext ctx = make_context(p.alpha, p.r, kHalfPi, cut.n_max);
        const int k_eff = std::min(p.k_max, cut.n_max);
        std::vector<double> prob_row(static_cast<std::size_t>(k_eff) + 1, 0.0);
        for (int k = 1; k <= k_eff; ++k)
          prob_row[k] = std::norm(amplitude(ctx, click_n, k));
        for (std::size_t j = 0; j < second.size(); ++j) {
          const double eta = second[j];
          double acc = 0.0;
          double w = eta;
          for (int k = 1; k <= k_eff; ++k) {
            acc += w * prob_row[k];
            w *= 1.0 - eta;
          }
          row[j].value = acc;
          row[j].leakage = 0.0;
        }
      } catch (const std::exception& ex) {
        for (auto& cell : row) cell.error = ex.what();
      }
      break;
    }
    case SweepQuantity::g2_click: {
      for (std::size_t j = 0; j < second.size(); ++j) {
        try {
          SourceParams p = base;
          p.r = r;
          p.eta = second[j];
          CountDistribution dist = click_distribution(p);
          if (p.r == 0.0 && p.alpha > 0.0 && p.eta > 0.0) {
            row[j].value = 1.0;
          } else {
            const HeraldMoments mom = moments(dist);
            if (mom.m1_raw <= 0.0) throw DegenerateError("g2_click: zero mean");
            row[j].value = (mom.m2_raw - mom.m1_raw) / (mom.m1_raw * mom.m1_raw);
          }
          row[j].leakage = dist.leakage;
        } catch (const std::exception& ex) {
          row[j].error = ex.what();
        }
      }
      break;
    }
  }
}

}  // namespace

std::vector<SweepCell> sweep_grid(SweepQuantity quantity, const GridAxis& r_axis,
                                  const GridAxis& second_axis, const SourceParams& base,
                                  int click_n, int threads) {
  validate(base);
  if (click_n < 0) throw std::invalid_argument("sweep_grid: click_n must be >= 0");
  const std::vector<double> rs = axis_values(r_axis);
  const std::vector<double> second = axis_values(second_axis);

  std::vector<std::vector<SweepCell>> rows(rs.size());
  parallel_for(static_cast<int>(rs.size()), threads, [&](int i) {
    sweep_row(quantity, rs[i], second, base, click_n, rows[i]);
  });

  std::vector<SweepCell> out;
  out.reserve(rs.size() * second.size());
  for (auto& row : rows)
    for (auto& cell : row) out.push_back(std::move(cell));
  return out;
}

}  // namespace heraldsim::source
