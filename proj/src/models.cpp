#include "apc/models.hpp"

#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>

#include "apc/random.hpp"

namespace apc {

namespace {

constexpr double kSupportTolerance = 1e-9;

std::int64_t mod(std::int64_t a, std::int64_t m) {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidArgument("bad " + std::string(what) + " value '" + std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidArgument("bad " + std::string(what) + " value '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

PeriodicMAModel::PeriodicMAModel(int period, std::map<int, std::vector<double>> coeffs, double innovation_sd)
    : period_(period), coeffs_(std::move(coeffs)), sd_(innovation_sd) {
  if (period_ < 1) throw InvalidArgument("model period must be >= 1");
  if (!(sd_ >= 0.0) || !std::isfinite(sd_)) throw InvalidArgument("innovation sd must be finite and >= 0");
  for (const auto& [q, values] : coeffs_) {
    if (q < 1) throw InvalidArgument("MA lags must be >= 1");
    if (values.size() != static_cast<std::size_t>(period_)) {
      throw InvalidArgument("each lag needs exactly T coefficients");
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw InvalidArgument("MA coefficients must be finite");
    }
    max_lag_ = std::max(max_lag_, q);
  }
  std::ostringstream os;
  os.precision(17);
  os << "pma:T=" << period_ << ";q=" << max_lag_ << ";coeffs=";
  bool first = true;
  for (int q = 1; q <= max_lag_; ++q) {
    for (int t = 0; t < period_; ++t) {
      os << (first ? "" : ",") << theta(q, t);
      first = false;
    }
  }
  if (sd_ != 1.0) os << ";sd=" << sd_;
  description_ = os.str();
}

PeriodicMAModel PeriodicMAModel::pma1(int period) {
  if (period < 1) throw InvalidArgument("model period must be >= 1");
  std::vector<double> theta(static_cast<std::size_t>(period));
  for (int t = 0; t < period; ++t) {
    const double s = 2.0 + std::sin(kTwoPi * t / period);
    theta[static_cast<std::size_t>(t)] = s * s;
  }
  PeriodicMAModel m(period, {{1, std::move(theta)}});
  m.description_ = "pma1:T=" + std::to_string(period);
  return m;
}

PeriodicMAModel PeriodicMAModel::ma2() {
  PeriodicMAModel m(1, {{1, {1.0}}, {2, {2.0}}});
  m.description_ = "ma2";
  return m;
}

PeriodicMAModel PeriodicMAModel::white_noise(double sd) {
  PeriodicMAModel m(1, {}, sd);
  m.description_ = sd == 1.0 ? "white" : "white;sd=" + std::to_string(sd);
  return m;
}

PeriodicMAModel PeriodicMAModel::parse(std::string_view text) {
  std::vector<std::string_view> parts = split(text, ';');
  double sd = 1.0;
  bool sd_given = false;
  if (parts.size() > 1 && parts.back().substr(0, 3) == "sd=") {
    sd = parse_double(parts.back().substr(3), "sd");
    sd_given = true;
    parts.pop_back();
  }
  auto with_sd = [&](const PeriodicMAModel& base) {
    if (!sd_given) return base;
    PeriodicMAModel m(base.period(), base.coeffs(), sd);
    return m;
  };

  const std::string_view head = parts.front();
  if (head == "ma2" && parts.size() == 1) return with_sd(ma2());
  if (head == "white" && parts.size() == 1) return white_noise(sd);
  if (head.substr(0, 5) == "pma1:" && parts.size() == 1) {
    const std::string_view arg = head.substr(5);
    if (arg.substr(0, 2) != "T=") throw InvalidArgument("expected pma1:T=<period>");
    PeriodicMAModel m = with_sd(pma1(parse_int(arg.substr(2), "T")));
    return m;
  }
  if (head.substr(0, 4) == "pma:") {
    parts.front() = head.substr(4);
    int period = 0;
    int q = -1;
    std::vector<double> values;
    for (std::string_view kv : parts) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string_view::npos) throw InvalidArgument("expected key=value in model spec");
      const std::string_view key = kv.substr(0, eq);
      const std::string_view val = kv.substr(eq + 1);
      if (key == "T") {
        period = parse_int(val, "T");
      } else if (key == "q") {
        q = parse_int(val, "q");
      } else if (key == "coeffs") {
        if (!val.empty()) {
          for (std::string_view c : split(val, ',')) values.push_back(parse_double(c, "coefficient"));
        }
      } else {
        throw InvalidArgument("unknown model key '" + std::string(key) + "'");
      }
    }
    if (period < 1 || q < 0) throw InvalidArgument("pma model needs T>=1 and q>=0");
    if (values.size() != static_cast<std::size_t>(q) * static_cast<std::size_t>(period)) {
      throw InvalidArgument("pma model needs q*T coefficients");
    }
    std::map<int, std::vector<double>> coeffs;
    for (int lag = 1; lag <= q; ++lag) {
      const auto first = values.begin() + static_cast<std::ptrdiff_t>((lag - 1) * period);
      coeffs[lag] = std::vector<double>(first, first + period);
    }
    return PeriodicMAModel(period, std::move(coeffs), sd);
  }
  throw InvalidArgument("unknown model '" + std::string(text) + "'");
}

std::string PeriodicMAModel::description() const { return description_; }

double PeriodicMAModel::theta(int q, std::int64_t t) const {
  const auto it = coeffs_.find(q);
  if (it == coeffs_.end()) return 0.0;
  return it->second[static_cast<std::size_t>(mod(t, period_))];
}

double PeriodicMAModel::psi(int j, std::int64_t t) const {
  if (j == 0) return 1.0;
  return theta(j, t - j);
}

TimeSeries simulate(const PeriodicMAModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("simulation length must be >= 1");
  const int q = model.max_lag();
  Rng rng(seed);
  // eps[i] is the innovation at absolute time i + 1 - q.
  std::vector<double> eps(n + static_cast<std::size_t>(q));
  for (double& e : eps) e = model.innovation_sd() * rng.normal();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = static_cast<std::int64_t>(i) + 1;
    const std::size_t base = i + static_cast<std::size_t>(q);
    double v = eps[base];
    for (int j = 1; j <= q; ++j) v += model.theta(j, t - j) * eps[base - static_cast<std::size_t>(j)];
    x[i] = v;
  }
  return TimeSeries(0, std::move(x));
}

double autocovariance(const PeriodicMAModel& model, std::int64_t t, std::int64_t tau) {
  if (tau < 0) return autocovariance(model, t + tau, -tau);
  const int q = model.max_lag();
  if (tau > q) return 0.0;
  // X_t = sum_j psi_j(t) eps_{t-j}; eps_{t-j} = eps_{t+tau-(j+tau)}.
  double sum = 0.0;
  for (int j = 0; j + tau <= q; ++j) {
    sum += model.psi(j, t) * model.psi(j + static_cast<int>(tau), t + tau);
  }
  return model.innovation_sd() * model.innovation_sd() * sum;
}

Complex fourier_coefficient(const PeriodicMAModel& model, int k, std::int64_t tau) {
  const int T = model.period();
  Complex sum{0.0, 0.0};
  for (int t = 0; t < T; ++t) {
    sum += autocovariance(model, t, tau) * std::polar(1.0, -kTwoPi * static_cast<double>(mod(k, T)) * t / T);
  }
  return sum / static_cast<double>(T);
}

SpectralTruth spectral_truth(const PeriodicMAModel& model) {
  const int T = model.period();
  const int q = model.max_lag();
  // table[k][tau + q] = a(2 pi k / T, tau)
  auto table = std::make_shared<std::vector<std::vector<Complex>>>(static_cast<std::size_t>(T));
  for (int k = 0; k < T; ++k) {
    auto& row = (*table)[static_cast<std::size_t>(k)];
    row.resize(2 * static_cast<std::size_t>(q) + 1);
    for (int tau = -q; tau <= q; ++tau) row[static_cast<std::size_t>(tau + q)] = fourier_coefficient(model, k, tau);
  }
  return SpectralTruth{[table, T, q](BifrequencyPoint p) -> Complex {
    const double nu = p.nu.value();
    const double lambda = nu - p.omega.value();
    const double steps = lambda * T / kTwoPi;
    const double k_near = std::round(steps);
    if (std::abs(steps - k_near) * kTwoPi / T > kSupportTolerance) return {0.0, 0.0};
    const auto k = static_cast<std::size_t>(mod(static_cast<std::int64_t>(k_near), T));
    const auto& row = (*table)[k];
    Complex sum{0.0, 0.0};
    for (int tau = -q; tau <= q; ++tau) sum += row[static_cast<std::size_t>(tau + q)] * std::polar(1.0, -nu * tau);
    Complex value = sum / kTwoPi;
    if (p.is_diagonal()) value = {value.real(), 0.0};
    return value;
  }};
}

}  // namespace apc
