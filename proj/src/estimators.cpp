#include "apc/estimators.hpp"

#include <algorithm>
#include <sstream>

#include "apc/kernels.hpp"

namespace apc {

namespace {

// e^{-i lambda u} for the absolute indices u of x, split into re/im arrays.
void phase_table(const TimeSeries& x, double lambda, std::vector<double>& re, std::vector<double>& im) {
  const std::size_t n = x.size();
  re.resize(n);
  im.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = lambda * static_cast<double>(x.absolute_index(i));
    re[i] = std::cos(angle);
    im[i] = -std::sin(angle);
  }
}

// Weight of the lag-k product sum in the folded lag sum. Lags +k and -k share
// one product sum S_k; the -k copy picks up e^{-i lambda k}, which together with
// e^{i nu k} collapses to e^{i omega k}.
std::vector<Complex> folded_coefficients(const LagWindowSpec& w, int L, BifrequencyPoint p) {
  const std::vector<double> h = w.half_weights(L);
  std::vector<Complex> coef(h.size());
  coef[0] = h[0];
  const double nu = p.nu.value();
  const double omega = p.omega.value();
  for (int k = 1; k <= L; ++k) {
    const auto kd = static_cast<double>(k);
    coef[static_cast<std::size_t>(k)] = std::polar(h[static_cast<std::size_t>(k)], -nu * kd) +
                                        std::polar(h[static_cast<std::size_t>(k)], omega * kd);
  }
  return coef;
}

void check_bandwidth(std::size_t d, int L) {
  if (L < 1) throw InvalidArgument("bandwidth L must be >= 1");
  if (static_cast<std::size_t>(L) >= d) throw InvalidArgument("bandwidth L must be smaller than the sample length");
}

}  // namespace

MeanSpec::MeanSpec(std::vector<Frequency> gamma_set) : gamma_(std::move(gamma_set)) {
  for (std::size_t i = 0; i < gamma_.size(); ++i) {
    for (std::size_t j = i + 1; j < gamma_.size(); ++j) {
      if (gamma_[i] == gamma_[j]) throw InvalidArgument("mean frequencies must be distinct");
    }
  }
}

bool MeanSpec::closed_under_negation() const {
  constexpr double tol = 1e-12;
  for (Frequency g : gamma_) {
    const double target = g.reflect().value();
    const bool found = std::any_of(gamma_.begin(), gamma_.end(), [&](Frequency h) {
      const double diff = std::abs(h.value() - target);
      return diff <= tol || std::abs(diff - kTwoPi) <= tol;
    });
    if (!found) return false;
  }
  return true;
}

SpectralEstimate raw_bispectral(const TimeSeries& x, BifrequencyPoint p) {
  // The double sum factorizes into (sum_s X_s e^{-i nu s}) (sum_t X_t e^{i omega t}).
  Complex a{0.0, 0.0};
  Complex b{0.0, 0.0};
  const double nu = p.nu.value();
  const double omega = p.omega.value();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto u = static_cast<double>(x.absolute_index(i));
    a += x[i] * std::polar(1.0, -nu * u);
    b += x[i] * std::polar(1.0, omega * u);
  }
  const double d = static_cast<double>(x.size());
  Complex value = a * b / (kTwoPi * d);
  if (p.is_diagonal()) value = {value.real(), 0.0};
  return SpectralEstimate{p, value, x.size(), static_cast<int>(x.size()), LagWindowSpec::truncated(), {}};
}

SpectralEstimate smoothed_bispectral(const TimeSeries& x, const LagWindowSpec& w, int L,
                                     BifrequencyPoint p) {
  check_bandwidth(x.size(), L);
  std::vector<double> ph_re;
  std::vector<double> ph_im;
  phase_table(x, p.nu.value() - p.omega.value(), ph_re, ph_im);
  std::vector<Complex> sums(static_cast<std::size_t>(L) + 1);
  kernels::lag_phase_sums(x.samples(), ph_re, ph_im, sums);
  const std::vector<Complex> coef = folded_coefficients(w, L, p);
  Complex total{0.0, 0.0};
  for (std::size_t k = 0; k < sums.size(); ++k) total += coef[k] * sums[k];
  total /= kTwoPi * static_cast<double>(x.size());
  return SpectralEstimate{p, total, x.size(), L, w, {}};
}

double coherence_from(Complex g, double g_nu_nu, double g_omega_omega, bool diagonal) {
  const double denom = diagonal ? std::abs(g_nu_nu) : std::sqrt(std::abs(g_nu_nu * g_omega_omega));
  if (denom == 0.0 || g_nu_nu * g_omega_omega == 0.0) throw DegenerateDenominator(g_nu_nu, g_omega_omega);
  return std::abs(g) / denom;
}

double coherence_stat(const TimeSeries& x, const LagWindowSpec& w, int L, BifrequencyPoint p) {
  const Complex g = smoothed_bispectral(x, w, L, p).value;
  const double g_nu = smoothed_bispectral(x, w, L, {p.nu, p.nu}).value.real();
  const double g_omega = p.is_diagonal() ? g_nu : smoothed_bispectral(x, w, L, {p.omega, p.omega}).value.real();
  return coherence_from(g, g_nu, g_omega, p.is_diagonal());
}

TimeSeries remove_fourier_mean(const TimeSeries& x, const MeanSpec& mean, double* max_discarded_imag) {
  const std::size_t n = x.size();
  std::vector<Complex> fitted(n, Complex{0.0, 0.0});
  for (Frequency g : mean.gamma_set()) {
    const double gamma = g.value();
    Complex coeff{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      coeff += x[i] * std::polar(1.0, -gamma * static_cast<double>(x.absolute_index(i)));
    }
    coeff /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      fitted[i] += coeff * std::polar(1.0, gamma * static_cast<double>(x.absolute_index(i)));
    }
  }
  std::vector<double> residual(n);
  double max_imag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    residual[i] = x[i] - fitted[i].real();
    max_imag = std::max(max_imag, std::abs(fitted[i].imag()));
  }
  if (max_discarded_imag != nullptr) *max_discarded_imag = max_imag;
  return TimeSeries(x.start_index(), std::move(residual));
}

SpectralEstimate demeaned_smoothed_bispectral(const TimeSeries& x, const MeanSpec& mean,
                                              const LagWindowSpec& w, int L, BifrequencyPoint p) {
  check_bandwidth(x.size(), L);
  if (mean.empty()) return smoothed_bispectral(x, w, L, p);
  double discarded = 0.0;
  const TimeSeries residual = remove_fourier_mean(x, mean, &discarded);
  SpectralEstimate est = smoothed_bispectral(residual, w, L, p);
  if (!mean.closed_under_negation()) {
    std::ostringstream os;
    os << "mean frequency set is not closed under negation; discarded imaginary part of fitted mean (max "
       << discarded << ")";
    est.warnings.push_back(os.str());
  }
  return est;
}

BlockEstimates block_smoothed_bispectral(const TimeSeries& x, const LagWindowSpec& w,
                                         std::size_t b, int L, BifrequencyPoint p) {
  const std::size_t n = x.size();
  if (b > n || b == 0) throw InvalidArgument("block length must lie in [1, n]");
  check_bandwidth(b, L);

  std::vector<double> ph_re;
  std::vector<double> ph_im;
  phase_table(x, p.nu.value() - p.omega.value(), ph_re, ph_im);

  // prefix_k[j] = sum_{i<j} x[i+k] x[i] e^{-i lambda u_i}, one re/im pair per lag.
  const auto lags = static_cast<std::size_t>(L) + 1;
  std::vector<std::vector<double>> pre_re(lags);
  std::vector<std::vector<double>> pre_im(lags);
  for (std::size_t k = 0; k < lags; ++k) {
    const std::size_t len = n - k;
    auto& r = pre_re[k];
    auto& m = pre_im[k];
    r.resize(len + 1);
    m.resize(len + 1);
    r[0] = 0.0;
    m[0] = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double prod = x[i + k] * x[i];
      r[i + 1] = r[i] + prod * ph_re[i];
      m[i + 1] = m[i] + prod * ph_im[i];
    }
  }

  const std::vector<Complex> coef = folded_coefficients(w, L, p);
  const double scale = 1.0 / (kTwoPi * static_cast<double>(b));
  std::vector<kernels::PrefixLane> lanes;
  lanes.reserve(lags);
  for (std::size_t k = 0; k < lags; ++k) {
    lanes.push_back({pre_re[k], pre_im[k], b - k, coef[k] * scale});
  }

  BlockEstimates out;
  const std::size_t blocks = n - b + 1;
  out.re.resize(blocks);
  out.im.resize(blocks);
  kernels::combine_block_sums(lanes, out.re, out.im);
  if (p.is_diagonal()) std::fill(out.im.begin(), out.im.end(), 0.0);
  return out;
}

}  // namespace apc
