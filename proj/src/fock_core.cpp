#include "heraldsim/fock_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "heraldsim/constants.hpp"

namespace heraldsim::fock {

namespace {

constexpr int kHardCap = 1024;  // absolute n_max ceiling for adaptive doubling

double two_pi() { return 2.0 * constants::pi; }

}  // namespace

void validate(const FockCutoff& cutoff) {
  if (cutoff.n_max < 1) throw std::invalid_argument("FockCutoff: n_max must be >= 1");
  if (!(cutoff.tail_tol > 0.0)) throw std::invalid_argument("FockCutoff: tail_tol must be > 0");
}

SqueezeSpec make_squeeze_spec(double r, double phi) {
  if (r < 0.0) throw std::invalid_argument("SqueezeSpec: r must be >= 0");
  double p = std::fmod(phi, two_pi());
  if (p < 0.0) p += two_pi();
  return SqueezeSpec{r, p};
}

double SingleModeAmplitudes::norm_sq() const {
  double s = 0.0;
  for (const auto& a : amp) s += std::norm(a);
  return s;
}

double TwoModeAmplitudes::norm_sq() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return s;
}

std::vector<double> log_factorials(int n) {
  std::vector<double> lf(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 2; i <= n; ++i) lf[i] = lf[i - 1] + std::log(static_cast<double>(i));
  return lf;
}

SingleModeAmplitudes displacement_column(const DisplaceSpec& delta, const FockCutoff& cutoff) {
  validate(cutoff);
  const int n = cutoff.n_max;
  SingleModeAmplitudes out;
  out.amp.assign(static_cast<std::size_t>(n) + 1, Complex(0.0, 0.0));

  const double mag = std::abs(delta.delta);
  if (!std::isfinite(mag)) throw std::invalid_argument("displacement_column: non-finite delta");
  if (mag == 0.0) {
    out.amp[0] = 1.0;
    return out;
  }

  const auto lf = log_factorials(n);
  const double log_mag = std::log(mag);
  const double phase = std::arg(delta.delta);
  for (int m = 0; m <= n; ++m) {
    const double ln = -0.5 * mag * mag + m * log_mag - 0.5 * lf[m];
    out.amp[m] = std::polar(std::exp(ln), m * phase);
  }

  if (std::norm(out.amp[n]) > cutoff.tail_tol) {
    std::ostringstream msg;
    msg << "displacement_column: |amp[" << n << "]|^2 = " << std::norm(out.amp[n])
        << " exceeds tail_tol = " << cutoff.tail_tol;
    throw TruncationError(msg.str());
  }
  return out;
}

Complex two_mode_squeeze_element(int n_a, int n_b, int m_a, int m_b, const SqueezeSpec& sq) {
  if (n_a < 0 || n_b < 0 || m_a < 0 || m_b < 0)
    throw std::invalid_argument("two_mode_squeeze_element: negative photon index");
  if (sq.r < 0.0) throw std::invalid_argument("two_mode_squeeze_element: r must be >= 0");

  // The Kronecker deltas force n_a - n == m_a - m and n_b - n == m_b - m,
  // hence n_a - n_b == m_a - m_b for any surviving term.
  if (n_a - n_b != m_a - m_b) return Complex(0.0, 0.0);
  if (sq.r == 0.0) return (n_a == m_a && n_b == m_b) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);

  const double lt = std::log(std::tanh(sq.r));
  const double lc = std::log(std::cosh(sq.r));
  const auto lf = log_factorials(std::max({n_a, n_b, m_a, m_b}));
  const double pref = 0.5 * (lf[n_a] + lf[n_b] + lf[m_a] + lf[m_b]);

  Complex total(0.0, 0.0);
  for (int n = 0; n <= std::min(n_a, n_b); ++n) {
    const int m = m_a - n_a + n;
    if (m < 0 || m > std::min(m_a, m_b)) continue;
    const double ln_mag = (n + m) * lt - (m_a + m_b - 2 * m + 1) * lc + pref - lf[n] - lf[m] -
                          lf[n_a - n] - lf[n_b - n];
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    total += sign * std::polar(std::exp(ln_mag), (n - m) * sq.phi);
  }
  return total;
}

namespace {

// Assembly at a fixed cutoff; prepare_final_state retries with doubled
// n_max until the deficit passes.
TwoModeAmplitudes assemble_final_state(double alpha, const SqueezeSpec& sq, int n_max,
                                       double tail_tol) {
  const Complex beta = 0.5 * alpha * Complex(1.0, -1.0);
  const FockCutoff col_cut{n_max, std::max(tail_tol, 1e-12)};
  const SingleModeAmplitudes da = displacement_column(DisplaceSpec{beta}, col_cut);
  const SingleModeAmplitudes db = displacement_column(DisplaceSpec{-beta}, col_cut);

  TwoModeAmplitudes state(n_max);

  if (sq.r == 0.0) {
    for (int na = 0; na <= n_max; ++na)
      for (int nb = 0; nb <= n_max; ++nb) state.at(na, nb) = da.amp[na] * db.amp[nb];
    return state;
  }

  // |da[m]| == |db[m]|; find where the displacement columns die out.
  int m_hi = 0;
  for (int m = n_max; m >= 0; --m) {
    if (std::abs(da.amp[m]) > 1e-22) {
      m_hi = m;
      break;
    }
  }

  const double lt = std::log(std::tanh(sq.r));
  const double lc = std::log(std::cosh(sq.r));
  const auto lf = log_factorials(n_max);

  for (int na = 0; na <= n_max; ++na) {
    for (int nb = 0; nb <= n_max; ++nb) {
      const double pref = 0.5 * (lf[na] + lf[nb]);
      Complex acc(0.0, 0.0);
      for (int n = 0; n <= std::min(na, nb); ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        for (int m = 0;; ++m) {
          const int ma = na - n + m;
          const int mb = nb - n + m;
          if (ma > m_hi || mb > m_hi) break;
          const Complex weight = da.amp[ma] * db.amp[mb];
          if (weight == Complex(0.0, 0.0)) continue;
          const double ln_mag = (n + m) * lt - (ma + mb - 2 * m + 1) * lc + pref +
                                0.5 * (lf[ma] + lf[mb]) - lf[n] - lf[m] - lf[na - n] - lf[nb - n];
          acc += sign * std::polar(std::exp(ln_mag), (n - m) * sq.phi) * weight;
        }
      }
      state.at(na, nb) = acc;
    }
  }
  return state;
}

}  // namespace

TwoModeAmplitudes prepare_final_state(double alpha, const SqueezeSpec& sq,
                                      const FockCutoff& cutoff) {
  if (alpha < 0.0) throw std::invalid_argument("prepare_final_state: alpha must be >= 0");
  if (sq.r < 0.0) throw std::invalid_argument("prepare_final_state: r must be >= 0");
  validate(cutoff);

  int n_max = cutoff.n_max;
  while (true) {
    TwoModeAmplitudes state = assemble_final_state(alpha, sq, n_max, cutoff.tail_tol);
    const double norm = state.norm_sq();
    if (norm > 1.0 + 1e-9) {
      std::ostringstream msg;
      msg << "prepare_final_state: non-physical norm " << norm;
      throw ConvergenceError(msg.str());
    }
    if (1.0 - norm <= cutoff.tail_tol) return state;
    if (2 * n_max > kHardCap) {
      std::ostringstream msg;
      msg << "prepare_final_state: deficit " << 1.0 - norm << " above tail_tol "
          << cutoff.tail_tol << " at hard cap n_max = " << n_max;
      throw TruncationError(msg.str());
    }
    n_max *= 2;
  }
}

// ---------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------

TruncatedGenerator::TruncatedGenerator(Generator kind, Complex param, int n_max)
    : n_max_(n_max), dim_((n_max + 1) * (n_max + 1)) {
  if (n_max < 1) throw std::invalid_argument("TruncatedGenerator: n_max must be >= 1");

  struct Entry {
    int row, col;
    Complex val;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(dim_) * 2);

  const int stride = n_max_ + 1;
  auto push = [&](int row, int col, Complex v) {
    if (v != Complex(0.0, 0.0)) entries.push_back({row, col, v});
  };

  for (int na = 0; na <= n_max_; ++na) {
    for (int nb = 0; nb <= n_max_; ++nb) {
      const int col = na * stride + nb;
      switch (kind) {
        case Generator::displace_a:
          if (na + 1 <= n_max_) push((na + 1) * stride + nb, col, param * std::sqrt(na + 1.0));
          if (na - 1 >= 0) push((na - 1) * stride + nb, col, -std::conj(param) * std::sqrt(1.0 * na));
          break;
        case Generator::displace_b:
          if (nb + 1 <= n_max_) push(na * stride + nb + 1, col, param * std::sqrt(nb + 1.0));
          if (nb - 1 >= 0) push(na * stride + nb - 1, col, -std::conj(param) * std::sqrt(1.0 * nb));
          break;
        case Generator::squeeze_a:
          if (na + 2 <= n_max_)
            push((na + 2) * stride + nb, col,
                 -0.5 * param * std::sqrt((na + 1.0) * (na + 2.0)));
          if (na - 2 >= 0)
            push((na - 2) * stride + nb, col,
                 0.5 * std::conj(param) * std::sqrt(na * (na - 1.0)));
          break;
        case Generator::squeeze_b:
          if (nb + 2 <= n_max_)
            push(na * stride + nb + 2, col,
                 -0.5 * param * std::sqrt((nb + 1.0) * (nb + 2.0)));
          if (nb - 2 >= 0)
            push(na * stride + nb - 2, col,
                 0.5 * std::conj(param) * std::sqrt(nb * (nb - 1.0)));
          break;
        case Generator::squeeze_ab:
          if (na + 1 <= n_max_ && nb + 1 <= n_max_)
            push((na + 1) * stride + nb + 1, col,
                 -param * std::sqrt((na + 1.0) * (nb + 1.0)));
          if (na - 1 >= 0 && nb - 1 >= 0)
            push((na - 1) * stride + nb - 1, col,
                 std::conj(param) * std::sqrt(1.0 * na * nb));
          break;
        case Generator::beamsplitter: {
          // (pi/4)(e^{i d} a+ b - e^{-i d} a b+), d = Re(param)
          const double d = param.real();
          const Complex f = 0.25 * constants::pi * std::polar(1.0, d);
          if (na + 1 <= n_max_ && nb - 1 >= 0)
            push((na + 1) * stride + nb - 1, col, f * std::sqrt((na + 1.0) * nb));
          if (na - 1 >= 0 && nb + 1 <= n_max_)
            push((na - 1) * stride + nb + 1, col,
                 -std::conj(f) * std::sqrt(na * (nb + 1.0)));
          break;
        }
      }
    }
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  row_ptr_.assign(dim_ + 1, 0);
  col_.resize(entries.size());
  val_.resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    ++row_ptr_[entries[i].row + 1];
    col_[i] = entries[i].col;
    val_[i] = entries[i].val;
  }
  for (int r = 0; r < dim_; ++r) row_ptr_[r + 1] += row_ptr_[r];

  std::vector<double> col_sums(dim_, 0.0);
  for (std::size_t i = 0; i < entries.size(); ++i) col_sums[entries[i].col] += std::abs(entries[i].val);
  one_norm_ = col_sums.empty() ? 0.0 : *std::max_element(col_sums.begin(), col_sums.end());
}

void TruncatedGenerator::apply(const Complex* in, Complex* out) const {
  for (int r = 0; r < dim_; ++r) {
    Complex acc(0.0, 0.0);
    for (int i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i) acc += val_[i] * in[col_[i]];
    out[r] = acc;
  }
}

Eigen::VectorXcd TruncatedGenerator::expm_apply(const Eigen::VectorXcd& v) const {
  if (v.size() != dim_) throw std::invalid_argument("expm_apply: dimension mismatch");
  if (one_norm_ == 0.0) return v;

  int s = 0;
  if (one_norm_ > 1.0) s = static_cast<int>(std::ceil(std::log2(one_norm_)));
  const double inv_scale = std::ldexp(1.0, -s);
  const long steps = 1L << s;
  constexpr int kMaxTerms = 80;

  Eigen::VectorXcd cur = v, term(dim_), next(dim_), acc(dim_);
  for (long step = 0; step < steps; ++step) {
    term = cur;
    acc = cur;
    for (int j = 1; j <= kMaxTerms; ++j) {
      apply(term.data(), next.data());
      term = next * (inv_scale / j);
      acc += term;
      if (term.norm() <= 1e-18 * acc.norm()) break;
    }
    cur = acc;
  }
  return cur;
}

Eigen::VectorXcd two_mode_oracle_column(Generator kind, Complex param, int n_max, int m_a,
                                        int m_b) {
  if (m_a < 0 || m_b < 0 || m_a > n_max || m_b > n_max)
    throw std::invalid_argument("two_mode_oracle_column: index out of range");
  TruncatedGenerator gen(kind, param, n_max);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(gen.dim());
  e[basis_index(m_a, m_b, n_max)] = 1.0;
  return gen.expm_apply(e);
}

Eigen::VectorXcd two_mode_oracle_apply(Generator kind, Complex param, int n_max,
                                       const Eigen::VectorXcd& state) {
  TruncatedGenerator gen(kind, param, n_max);
  return gen.expm_apply(state);
}

Eigen::MatrixXcd two_mode_oracle(Generator kind, Complex param, const FockCutoff& cutoff,
                                 int interior) {
  validate(cutoff);
  const int n_max = cutoff.n_max;
  if (interior < 0) interior = n_max / 2;
  if (interior > n_max) throw std::invalid_argument("two_mode_oracle: interior > n_max");

  TruncatedGenerator gen(kind, param, n_max);
  const int dim = gen.dim();
  Eigen::MatrixXcd result(dim, dim);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
  for (int j = 0; j < dim; ++j) {
    e.setZero();
    e[j] = 1.0;
    result.col(j) = gen.expm_apply(e);
  }

  // Refinement at doubled cutoff over the requested interior block.
  const int big = 2 * n_max;
  TruncatedGenerator gen2(kind, param, big);
  Eigen::VectorXcd e2 = Eigen::VectorXcd::Zero(gen2.dim());
  double worst = 0.0;
  for (int ma = 0; ma <= interior; ++ma) {
    for (int mb = 0; mb <= interior; ++mb) {
      e2.setZero();
      e2[basis_index(ma, mb, big)] = 1.0;
      const Eigen::VectorXcd col2 = gen2.expm_apply(e2);
      const int j = basis_index(ma, mb, n_max);
      for (int na = 0; na <= interior; ++na)
        for (int nb = 0; nb <= interior; ++nb)
          worst = std::max(worst, std::abs(result(basis_index(na, nb, n_max), j) -
                                           col2[basis_index(na, nb, big)]));
    }
  }
  if (worst > 1e-8) {
    std::ostringstream msg;
    msg << "two_mode_oracle: interior elements moved by " << worst
        << " under cutoff doubling (n_max = " << n_max << ")";
    throw ConvergenceError(msg.str());
  }
  return result;
}

}  // namespace heraldsim::fock
