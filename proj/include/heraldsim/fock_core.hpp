#ifndef HERALDSIM_FOCK_CORE_HPP
#define HERALDSIM_FOCK_CORE_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "heraldsim/errors.hpp"

namespace heraldsim::fock {

using Complex = std::complex<double>;

// Photon-number cap and the probability tolerance allowed to leak past it.
struct FockCutoff {
  int n_max = 64;
  double tail_tol = 1e-8;
};

void validate(const FockCutoff& cutoff);

// Squeezing parameter zeta = r * exp(i phi).
struct SqueezeSpec {
  double r = 0.0;
  double phi = 0.0;
};

SqueezeSpec make_squeeze_spec(double r, double phi);  // normalizes phi into [0, 2pi)

struct DisplaceSpec {
  Complex delta;
};

// 50-50 beam splitter; only the phase is free, the mixing angle is pi/4.
struct BeamSplitterSpec {
  double delta_bs = 0.0;
};

struct SingleModeAmplitudes {
  std::vector<Complex> amp;  // indexed by photon number
  double norm_sq() const;
};

// Dense amplitude table over the truncated two-mode basis |n_a, n_b>,
// each index running 0..n_max.  Row-major in n_a.
class TwoModeAmplitudes {
 public:
  explicit TwoModeAmplitudes(int n_max)
      : n_max_(n_max), amp_(static_cast<std::size_t>(n_max + 1) * (n_max + 1)) {}

  int n_max() const { return n_max_; }
  Complex& at(int n_a, int n_b) { return amp_[index(n_a, n_b)]; }
  const Complex& at(int n_a, int n_b) const { return amp_[index(n_a, n_b)]; }

  double norm_sq() const;
  double deficit() const { return 1.0 - norm_sq(); }

 private:
  std::size_t index(int n_a, int n_b) const {
    return static_cast<std::size_t>(n_a) * (n_max_ + 1) + n_b;
  }

  int n_max_;
  std::vector<Complex> amp_;
};

// ln(n!) for n = 0..n (inclusive), by cumulative summation.
std::vector<double> log_factorials(int n);

// Column <m|D(delta)|0> = exp(-|delta|^2/2) delta^m / sqrt(m!) for
// m = 0..n_max.  Throws TruncationError if the last entry still carries
// more than tail_tol probability.
SingleModeAmplitudes displacement_column(const DisplaceSpec& delta, const FockCutoff& cutoff);

// Closed-form matrix element <n_a, n_b| S_ab(zeta) |m_a, m_b> of the
// two-mode squeezer S_ab(zeta) = exp(-zeta a+b+ + zeta* ab).  Exactly zero
// unless n_a - n_b == m_a - m_b.  Magnitudes are accumulated in log space.
Complex two_mode_squeeze_element(int n_a, int n_b, int m_a, int m_b, const SqueezeSpec& sq);

// Amplitudes of S_ab(zeta) D_a(beta) D_b(-beta) |0,0> with
// beta = (alpha/2)(1 - i), the state leaving the two-crystal circuit.
// Doubles n_max internally until the truncation deficit is below
// tail_tol; throws TruncationError if that fails below a hard cap.
TwoModeAmplitudes prepare_final_state(double alpha, const SqueezeSpec& sq,
                                      const FockCutoff& cutoff);

// ---------------------------------------------------------------------
// Brute-force oracle: truncated generators and their exponentials.
// Everything below is independent of the closed forms above; it is the
// reference the closed forms are tested against.
// ---------------------------------------------------------------------

enum class Generator {
  displace_a,   // param = delta:  delta a+ - delta* a
  displace_b,   // param = delta:  delta b+ - delta* b
  squeeze_a,    // param = zeta:  -(zeta/2) a+^2 + (zeta*/2) a^2
  squeeze_b,    // param = zeta:  -(zeta/2) b+^2 + (zeta*/2) b^2
  squeeze_ab,   // param = zeta:  -zeta a+b+ + zeta* ab
  beamsplitter  // param = delta (real phase): (pi/4)(e^{i delta} a+b - e^{-i delta} a b+)
};

// Sparse anti-Hermitian generator on the (n_max+1)^2 two-mode basis.
class TruncatedGenerator {
 public:
  TruncatedGenerator(Generator kind, Complex param, int n_max);

  int n_max() const { return n_max_; }
  int dim() const { return dim_; }
  double one_norm() const { return one_norm_; }

  void apply(const Complex* in, Complex* out) const;

  // e^G v by scaling and squaring of the Taylor series applied to v.
  Eigen::VectorXcd expm_apply(const Eigen::VectorXcd& v) const;

 private:
  int n_max_ = 0;
  int dim_ = 0;
  double one_norm_ = 0.0;
  std::vector<int> row_ptr_, col_;
  std::vector<Complex> val_;
};

// Basis index of |n_a, n_b> in the flattened two-mode space.
inline int basis_index(int n_a, int n_b, int n_max) { return n_a * (n_max + 1) + n_b; }

// Single column e^G |m_a, m_b> at the given cutoff (no convergence check).
Eigen::VectorXcd two_mode_oracle_column(Generator kind, Complex param, int n_max,
                                        int m_a, int m_b);

// e^G applied to an arbitrary truncated state.
Eigen::VectorXcd two_mode_oracle_apply(Generator kind, Complex param, int n_max,
                                       const Eigen::VectorXcd& state);

// Dense truncated unitary, column by column.  Interior elements (all
// indices <= interior, default n_max/2) are recomputed at doubled cutoff;
// ConvergenceError if any of them moved by more than 1e-8.
Eigen::MatrixXcd two_mode_oracle(Generator kind, Complex param, const FockCutoff& cutoff,
                                 int interior = -1);

}  // namespace heraldsim::fock

#endif
