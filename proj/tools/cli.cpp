#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "apc/detect.hpp"
#include "apc/estimators.hpp"
#include "apc/models.hpp"
#include "apc/parallel.hpp"
#include "apc/subsampling.hpp"

namespace apc::cli {

namespace {

using json = nlohmann::json;
using Header = std::vector<std::pair<std::string, std::string>>;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw InvalidArgument("bad number '" + std::string(s) + "'");
  }
  return v;
}

struct Options {
  std::string model;
  std::string input;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string window = "truncated";
  int Ln = 0;
  std::size_t b = 0;
  int Lb = 0;
  int grid = 120;
  std::string method = "subs-p";
  std::string centering = "difference";
  double alpha = 0.01;
  double conf = 0.95;
  std::string lambda = "0";
  std::string out = "-";
  std::string format = "csv";
  unsigned threads = 0;
  std::vector<std::string> points;
  std::string stat = "p";

  CLI::App* sub = nullptr;
  bool given(const std::string& name) const { return sub->count(name) > 0; }
};

struct Source {
  TimeSeries series;
  std::optional<PeriodicMAModel> model;
  Header header;
};

Source load_source(const Options& o) {
  const bool has_input = o.given("--input");
  const bool has_model = o.given("--model");
  if (has_input == has_model) throw InvalidArgument("give exactly one of --input or --model");
  if (has_input) {
    SeriesFile f = read_series_file(o.input);
    Header h{{"input", o.input}, {"n", std::to_string(f.series.size())},
             {"start_index", std::to_string(f.series.start_index())}};
    return {std::move(f.series), std::nullopt, std::move(h)};
  }
  if (!o.given("--n") || o.n < 1) throw InvalidArgument("--model needs --n >= 1");
  PeriodicMAModel model = PeriodicMAModel::parse(o.model);
  TimeSeries x = simulate(model, o.n, o.seed);
  Header h{{"model", model.description()}, {"n", std::to_string(o.n)}, {"seed", std::to_string(o.seed)}};
  return {std::move(x), std::move(model), std::move(h)};
}

SubsamplingParams resolve_params(const Options& o, std::size_t n) {
  SubsamplingParams p;
  if (n >= 16) p = default_params(n);
  if (o.given("--Ln")) p.L_n = o.Ln;
  if (o.given("--b")) p.b = o.b;
  if (o.given("--Lb")) p.L_b = o.Lb;
  if (o.given("--alpha")) p.alpha = o.alpha;
  p.validate_for_subsampling(n);
  return p;
}

void add_params(Header& h, const SubsamplingParams& p) {
  h.emplace_back("L_n", std::to_string(p.L_n));
  h.emplace_back("b", std::to_string(p.b));
  h.emplace_back("L_b", std::to_string(p.L_b));
  h.emplace_back("alpha", fmt(p.alpha));
}

json header_json(const Header& h) {
  json j = json::object();
  for (const auto& [k, v] : h) j[k] = v;
  return j;
}

void write_header(std::ostream& os, const std::string& command, const Header& h) {
  os << "# apc-spectra " << command << "\n";
  for (const auto& [k, v] : h) os << "# " << k << "=" << v << "\n";
}

// Writes to --out or to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path == "-" || path.empty()) {
      os_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw IoError("cannot open output file '" + path + "'");
    os_ = file_.get();
  }
  std::ostream& stream() { return *os_; }
  void finish() {
    os_->flush();
    if (!*os_) throw IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

void check_format(const Options& o) {
  if (o.format != "csv" && o.format != "json") throw InvalidArgument("--format must be csv or json");
}

int cmd_simulate(const Options& o, std::ostream& out) {
  if (!o.given("--model")) throw InvalidArgument("simulate needs --model");
  if (o.given("--input")) throw InvalidArgument("simulate does not read --input");
  check_format(o);
  const Source src = load_source(o);
  Header h = src.header;
  h.emplace_back("start_index", std::to_string(src.series.start_index()));
  Sink sink(o.out, out);
  if (o.format == "json") {
    json j;
    j["command"] = "simulate";
    j["config"] = header_json(h);
    j["start_index"] = src.series.start_index();
    j["samples"] = std::vector<double>(src.series.samples().begin(), src.series.samples().end());
    sink.stream() << j.dump(1) << "\n";
  } else {
    write_series(sink.stream(), src.series, h);
  }
  sink.finish();
  return kOk;
}

std::vector<BifrequencyPoint> estimate_points(const Options& o) {
  std::vector<BifrequencyPoint> pts;
  for (const std::string& text : o.points) {
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos) throw InvalidArgument("--point expects nu,omega");
    pts.emplace_back(parse_angle(std::string_view(text).substr(0, comma)),
                     parse_angle(std::string_view(text).substr(comma + 1)));
  }
  if (pts.empty()) {
    if (o.grid < 1) throw InvalidArgument("--grid must be >= 1");
    const double lambda = parse_angle(o.lambda);
    for (int k = 1; k <= o.grid; ++k) {
      const Frequency nu = grid_frequency(k, o.grid);
      pts.emplace_back(nu, Frequency(nu.value() - lambda));
    }
  }
  return pts;
}

int cmd_estimate(const Options& o, std::ostream& out) {
  check_format(o);
  const Source src = load_source(o);
  const std::size_t n = src.series.size();
  const LagWindowSpec w = LagWindowSpec::parse(o.window);
  const int L = o.given("--Ln") ? o.Ln : static_cast<int>(std::max(1L, round_half_away(std::pow(double(n), 0.2))));
  const std::vector<BifrequencyPoint> pts = estimate_points(o);

  Header h = src.header;
  h.emplace_back("window", w.name());
  h.emplace_back("L", std::to_string(L));

  struct Row {
    BifrequencyPoint p;
    Complex g;
    double coherence;
  };
  std::vector<Row> rows;
  for (const BifrequencyPoint& p : pts) {
    const Complex g = smoothed_bispectral(src.series, w, L, p).value;
    const double a = smoothed_bispectral(src.series, w, L, {p.nu, p.nu}).value.real();
    const double b = p.is_diagonal() ? a : smoothed_bispectral(src.series, w, L, {p.omega, p.omega}).value.real();
    double coh = std::nan("");
    try {
      coh = coherence_from(g, a, b, p.is_diagonal());
    } catch (const DegenerateDenominator&) {
    }
    rows.push_back({p, g, coh});
  }

  Sink sink(o.out, out);
  std::ostream& os = sink.stream();
  if (o.format == "json") {
    json j;
    j["command"] = "estimate";
    j["config"] = header_json(h);
    j["rows"] = json::array();
    for (const Row& r : rows) {
      j["rows"].push_back({{"nu", r.p.nu.value()},
                           {"omega", r.p.omega.value()},
                           {"re", r.g.real()},
                           {"im", r.g.imag()},
                           {"abs", std::abs(r.g)},
                           {"coherence", r.coherence}});
    }
    os << j.dump(1) << "\n";
  } else {
    write_header(os, "estimate", h);
    os << "nu,omega,re,im,abs,coherence\n";
    for (const Row& r : rows) {
      os << fmt(r.p.nu.value()) << ',' << fmt(r.p.omega.value()) << ',' << fmt(r.g.real()) << ','
         << fmt(r.g.imag()) << ',' << fmt(std::abs(r.g)) << ',' << fmt(r.coherence) << "\n";
    }
  }
  sink.finish();
  return kOk;
}

int cmd_ci(const Options& o, std::ostream& out) {
  check_format(o);
  if (o.stat != "p" && o.stat != "gamma") throw InvalidArgument("--stat must be p or gamma");
  if (!(o.conf > 0.0 && o.conf < 1.0)) throw InvalidArgument("--conf must lie in (0, 1)");
  if (o.grid < 1) throw InvalidArgument("--grid must be >= 1");
  const Source src = load_source(o);
  const LagWindowSpec w = LagWindowSpec::parse(o.window);
  const SubsamplingParams params = resolve_params(o, src.series.size());
  const double lambda = parse_angle(o.lambda);

  Header h = src.header;
  h.emplace_back("window", w.name());
  add_params(h, params);
  h.emplace_back("stat", o.stat);
  h.emplace_back("lambda", fmt(lambda));
  h.emplace_back("conf", fmt(o.conf));
  h.emplace_back("grid", std::to_string(o.grid));

  std::optional<SpectralTruth> truth;
  if (src.model) truth = spectral_truth(*src.model);

  struct Row {
    int k;
    BifrequencyPoint p;
    double truth;
    Interval iv;
  };
  std::vector<Row> rows;
  for (int k = 1; k <= o.grid; ++k) {
    const Frequency nu = grid_frequency(k, o.grid);
    const BifrequencyPoint p(nu, Frequency(nu.value() - lambda));
    double t = std::nan("");
    Interval iv;
    if (o.stat == "p") {
      if (truth) t = std::abs((*truth)(p));
      iv = ci_magnitude_P(src.series, w, params, p, o.conf);
    } else {
      if (p.is_diagonal()) throw InvalidArgument("coherence intervals need lambda != 0");
      if (truth) t = std::abs((*truth)(p)) / std::sqrt(truth->g0(p.nu) * truth->g0(p.omega));
      iv = ci_coherence(src.series, w, params, p, o.conf);
    }
    rows.push_back({k, p, t, iv});
  }

  Sink sink(o.out, out);
  std::ostream& os = sink.stream();
  if (o.format == "json") {
    json j;
    j["command"] = "ci";
    j["config"] = header_json(h);
    j["rows"] = json::array();
    for (const Row& r : rows) {
      j["rows"].push_back({{"k", r.k},
                           {"nu", r.p.nu.value()},
                           {"omega", r.p.omega.value()},
                           {"truth", r.truth},
                           {"estimate", r.iv.estimate},
                           {"lo", r.iv.lo},
                           {"hi", r.iv.hi},
                           {"lo_clamped", r.iv.lo_clamped},
                           {"hi_clamped", r.iv.hi_clamped}});
    }
    os << j.dump(1) << "\n";
  } else {
    write_header(os, "ci", h);
    os << "k,nu,omega,truth,estimate,lo,hi,lo_clamped,hi_clamped\n";
    for (const Row& r : rows) {
      os << r.k << ',' << fmt(r.p.nu.value()) << ',' << fmt(r.p.omega.value()) << ',' << fmt(r.truth) << ','
         << fmt(r.iv.estimate) << ',' << fmt(r.iv.lo) << ',' << fmt(r.iv.hi) << ',' << int(r.iv.lo_clamped) << ','
         << int(r.iv.hi_clamped) << "\n";
    }
  }
  sink.finish();
  return kOk;
}

int cmd_scan(const Options& o, std::ostream& out, std::ostream& err) {
  check_format(o);
  const Source src = load_source(o);
  const LagWindowSpec w = LagWindowSpec::parse(o.window);
  const SubsamplingParams params = resolve_params(o, src.series.size());
  const TestMethod method = parse_test_method(o.method);
  const Centering centering = parse_centering(o.centering);
  if (o.grid < 2) throw InvalidArgument("--grid must be >= 2");
  const unsigned threads =
      o.given("--threads") ? resolve_thread_count(std::max(1u, o.threads)) : resolve_thread_count();

  Header h = src.header;
  h.emplace_back("window", w.name());
  add_params(h, params);
  h.emplace_back("grid", std::to_string(o.grid));
  h.emplace_back("method", to_string(method));
  if (method != TestMethod::Chi2P) h.emplace_back("centering", to_string(centering));

  const ScanResult result = scan(src.series, w, params, o.grid, method, threads, centering);
  std::size_t rejected = 0;
  std::size_t undetermined = 0;
  for (const ScanCell& c : result.outcomes) {
    rejected += c.outcome.reject;
    undetermined += c.outcome.status == TestStatus::Undetermined;
  }

  Sink sink(o.out, out);
  std::ostream& os = sink.stream();
  if (o.format == "json") {
    json j;
    j["command"] = "scan";
    j["config"] = header_json(h);
    j["cells"] = json::array();
    for (const ScanCell& c : result.outcomes) {
      j["cells"].push_back({{"s", c.s},
                            {"t", c.t},
                            {"nu", c.outcome.point.nu.value()},
                            {"omega", c.outcome.point.omega.value()},
                            {"statistic", c.outcome.statistic},
                            {"critical", c.outcome.critical},
                            {"reject", c.outcome.reject},
                            {"status", to_string(c.outcome.status)}});
    }
    os << j.dump(1) << "\n";
  } else {
    write_header(os, "scan", h);
    os << "s,t,nu,omega,statistic,critical,reject,status\n";
    for (const ScanCell& c : result.outcomes) {
      os << c.s << ',' << c.t << ',' << fmt(c.outcome.point.nu.value()) << ',' << fmt(c.outcome.point.omega.value())
         << ',' << fmt(c.outcome.statistic) << ',' << fmt(c.outcome.critical) << ',' << int(c.outcome.reject) << ','
         << to_string(c.outcome.status) << "\n";
    }
  }
  sink.finish();
  err << "scan: " << rejected << " of " << result.outcomes.size() << " points rejected, " << undetermined
      << " undetermined\n";
  return kOk;
}

void add_source_options(CLI::App* app, Options& o) {
  app->add_option("--model", o.model, "model spec: pma1:T=<T>, ma2, white, pma:T=<T>;q=<q>;coeffs=<csv>");
  app->add_option("--input", o.input, "series file (one sample per line)");
  app->add_option("--n", o.n, "sample length when simulating");
  app->add_option("--seed", o.seed, "simulation seed");
  app->add_option("--window", o.window, "truncated | trapezoid:<theta>");
  app->add_option("--out", o.out, "output path (default stdout)");
  app->add_option("--format", o.format, "csv | json");
}

void add_subsampling_options(CLI::App* app, Options& o) {
  app->add_option("--Ln", o.Ln, "full-sample bandwidth");
  app->add_option("--b", o.b, "block length");
  app->add_option("--Lb", o.Lb, "block bandwidth");
  app->add_option("--alpha", o.alpha, "significance level");
}

}  // namespace

double parse_angle(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw InvalidArgument("empty angle");
  double sign = 1.0;
  if (s.front() == '-' || s.front() == '+') {
    sign = s.front() == '-' ? -1.0 : 1.0;
    s.remove_prefix(1);
  }
  const std::size_t pos = s.find("pi");
  if (pos == std::string_view::npos) {
    const std::size_t slash = s.find('/');
    if (slash == std::string_view::npos) return sign * parse_number(s);
    return sign * parse_number(s.substr(0, slash)) / parse_number(s.substr(slash + 1));
  }
  std::string_view coef = trim(s.substr(0, pos));
  if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
  std::string_view rest = trim(s.substr(pos + 2));
  double value = coef.empty() ? kPi : parse_number(coef) * kPi;
  if (!rest.empty()) {
    if (rest.front() != '/') throw InvalidArgument("bad angle '" + std::string(text) + "'");
    value /= parse_number(rest.substr(1));
  }
  if (!std::isfinite(value)) throw InvalidArgument("bad angle '" + std::string(text) + "'");
  return sign * value;
}

SeriesFile read_series(std::istream& in) {
  std::map<std::string, std::string> headers;
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      s = trim(s.substr(1));
      const std::size_t eq = s.find('=');
      if (eq != std::string_view::npos) headers[std::string(trim(s.substr(0, eq)))] = std::string(trim(s.substr(eq + 1)));
      continue;
    }
    double v = 0.0;
    try {
      v = parse_number(s);
    } catch (const InvalidArgument&) {
      throw InvalidArgument("line " + std::to_string(lineno) + ": not a number: '" + std::string(s) + "'");
    }
    if (!std::isfinite(v)) throw InvalidArgument("line " + std::to_string(lineno) + ": non-finite sample");
    values.push_back(v);
  }
  if (values.empty()) throw InvalidArgument("series file contains no samples");
  std::int64_t start = 0;
  if (const auto it = headers.find("start_index"); it != headers.end()) {
    const std::string& t = it->second;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), start);
    if (ec != std::errc{} || ptr != t.data() + t.size()) throw InvalidArgument("bad start_index header");
  }
  return {TimeSeries(start, std::move(values)), std::move(headers)};
}

SeriesFile read_series_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read input file '" + path + "'");
  return read_series(in);
}

void write_series(std::ostream& out, const TimeSeries& x, const Header& headers) {
  for (const auto& [k, v] : headers) out << "# " << k << "=" << v << "\n";
  for (double v : x.samples()) out << fmt(v) << "\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bifrequency spectral estimation and periodicity tests for APC time series", "apc-spectra"};
  app.require_subcommand(1);
  Options o;

  CLI::App* sim = app.add_subcommand("simulate", "simulate a periodic moving-average series");
  add_source_options(sim, o);

  CLI::App* est = app.add_subcommand("estimate", "smoothed bifrequency estimates");
  add_source_options(est, o);
  est->add_option("--Ln", o.Ln, "bandwidth (default round(n^(1/5)))");
  est->add_option("--point", o.points, "nu,omega (repeatable)");
  est->add_option("--lambda", o.lambda, "sweep omega = nu - lambda over the grid when no --point is given");
  est->add_option("--grid", o.grid, "sweep size");

  CLI::App* ci = app.add_subcommand("ci", "subsampling confidence intervals along omega = nu - lambda");
  add_source_options(ci, o);
  add_subsampling_options(ci, o);
  ci->add_option("--lambda", o.lambda, "line offset (pi-expressions allowed)");
  ci->add_option("--conf", o.conf, "confidence level");
  ci->add_option("--grid", o.grid, "number of nu values 2 pi k / grid");
  ci->add_option("--stat", o.stat, "p | gamma");

  CLI::App* sc = app.add_subcommand("scan", "periodicity test at every off-diagonal grid point");
  add_source_options(sc, o);
  add_subsampling_options(sc, o);
  sc->add_option("--grid", o.grid, "grid size g");
  sc->add_option("--method", o.method, "subs-p | subs-gamma | chi2");
  sc->add_option("--centering", o.centering, "difference | magnitude | none (subsampling block statistics)");
  sc->add_option("--threads", o.threads, "worker cap (default APC_SPECTRA_THREADS or hardware)");

  CLI::App* verify = app.add_subcommand("verify", "");
  verify->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (sim->parsed()) {
      o.sub = sim;
      return cmd_simulate(o, out);
    }
    if (est->parsed()) {
      o.sub = est;
      return cmd_estimate(o, out);
    }
    if (ci->parsed()) {
      o.sub = ci;
      return cmd_ci(o, out);
    }
    if (sc->parsed()) {
      o.sub = sc;
      return cmd_scan(o, out, err);
    }
    if (verify->parsed()) return run_verify(out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericDegeneracy& e) {
    err << "numeric degeneracy: " << e.what() << "\n";
    return kDegenerate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kConfigError;
}

#if !defined(APC_WITH_VERIFY)
int run_verify(std::ostream& out) {
  out << "verify is only available in builds with tests enabled\n";
  return kFailure;
}
#endif

}  // namespace apc::cli
