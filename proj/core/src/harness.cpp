#include "kdict/harness.hpp"

#include "kdict/csv.hpp"
#include "kdict/dictionary_io.hpp"
#include "kdict/error.hpp"
#include "kdict/random.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace kdict {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(s);
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

std::vector<Sample> synthesize(const std::string& name, std::uint64_t seed,
                               std::size_t length,
                               std::optional<double> noise) {
  if (noise && (!(*noise >= 0.0) || !std::isfinite(*noise))) {
    throw InvalidArgument("synthesize: noise must be finite and >= 0");
  }
  Rng rng(seed);
  std::vector<Sample> out;
  out.reserve(length);
  if (name == "sinc1d") {
    const double sd = noise.value_or(kSincNoiseStd);
    for (std::size_t t = 0; t < length; ++t) {
      const double x = rng.uniform(-3.0, 3.0);
      const double e = rng.normal();
      out.push_back({Vector::Constant(1, x), sinc(x) + sd * e});
    }
    return out;
  }
  if (name == "narma2") {
    const double sd = noise.value_or(0.0);
    double s1 = 0.0;  // s_{t-1}
    double s2 = 0.0;  // s_{t-2}
    for (std::size_t t = 0; t < length; ++t) {
      const double u = rng.uniform(0.0, 0.5);
      const double e = rng.normal();
      const double s = 0.4 * s1 + 0.4 * s1 * s2 + 0.6 * u * u * u + 0.1;
      Vector x(3);
      x << s1, s2, u;
      out.push_back({std::move(x), s + sd * e});
      s2 = s1;
      s1 = s;
    }
    return out;
  }
  throw InvalidArgument("unknown generator '" + name +
                        "' (valid: sinc1d, narma2)");
}

std::vector<Sample> read_samples_csv(std::istream& is) {
  std::vector<Sample> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line, ',');
    std::vector<double> values;
    values.reserve(fields.size());
    try {
      for (const auto& f : fields) values.push_back(parse_double(f));
    } catch (const ParseError&) {
      if (out.empty() && width == 0) {
        width = fields.size();  // header row
        continue;
      }
      throw ParseError("data line " + std::to_string(line_no) +
                       ": non-numeric field");
    }
    if (values.size() < 2) {
      throw ParseError("data line " + std::to_string(line_no) +
                       ": need at least one input column and a target");
    }
    if (width == 0) width = values.size();
    if (values.size() != width) {
      throw ParseError("data line " + std::to_string(line_no) + ": expected " +
                       std::to_string(width) + " fields, found " +
                       std::to_string(values.size()));
    }
    for (double v : values) {
      if (!std::isfinite(v)) {
        throw ParseError("data line " + std::to_string(line_no) +
                         ": non-finite value");
      }
    }
    const auto d = static_cast<Eigen::Index>(values.size() - 1);
    out.push_back({Eigen::Map<const Vector>(values.data(), d), values.back()});
  }
  return out;
}

void write_samples_csv(std::ostream& os, const std::vector<Sample>& samples) {
  const auto d = samples.empty() ? Eigen::Index{1} : samples.front().x.size();
  for (Eigen::Index i = 0; i < d; ++i) os << 'x' << (i + 1) << ',';
  os << "y\n";
  for (const auto& s : samples) {
    for (Eigen::Index i = 0; i < s.x.size(); ++i) {
      os << format_double(s.x(i)) << ',';
    }
    os << format_double(s.y) << '\n';
  }
}

void ExperimentConfig::validate() const {
  if (!data_path && length < 1) {
    throw InvalidArgument("config: length must be >= 1");
  }
  if (trials < 1) throw InvalidArgument("config: trials must be >= 1");
  criterion.validate();
  learner.validate();
}

Settings read_settings(std::istream& is) {
  Settings out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": empty key");
    }
    out.emplace(key, trim(line.substr(eq + 1)));
  }
  return out;
}

namespace {

std::uint64_t to_count(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    if (!value.empty() && value[0] == '-') throw std::invalid_argument(value);
    const auto v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError("config field '" + key +
                     "': expected a non-negative integer, got '" + value + "'");
  }
}

double to_real(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const ParseError&) {
    throw ParseError("config field '" + key + "': expected a number, got '" +
                     value + "'");
  }
}

}  // namespace

ExperimentConfig make_config(const Settings& settings) {
  ExperimentConfig cfg;
  std::string kernel_name = "gaussian";
  double sigma = 0.5;
  int degree = 2;
  double offset = 1.0;

  for (const auto& [key, value] : settings) {
    try {
      if (key == "data") {
        cfg.data_path = value;
      } else if (key == "generator") {
        cfg.generator = value;
      } else if (key == "seed") {
        cfg.seed = to_count(key, value);
      } else if (key == "length") {
        cfg.length = to_count(key, value);
      } else if (key == "noise") {
        cfg.noise = to_real(key, value);
      } else if (key == "kernel") {
        parse_kernel_family(value);
        kernel_name = value;
      } else if (key == "sigma") {
        sigma = to_real(key, value);
      } else if (key == "degree") {
        degree = static_cast<int>(to_count(key, value));
      } else if (key == "offset") {
        offset = to_real(key, value);
      } else if (key == "criterion") {
        cfg.criterion.kind = parse_criterion(value);
      } else if (key == "threshold") {
        cfg.criterion.threshold = to_real(key, value);
      } else if (key == "max_atoms") {
        cfg.criterion.max_atoms = to_count(key, value);
      } else if (key == "algo") {
        cfg.learner.algorithm = parse_algorithm(value);
      } else if (key == "eta") {
        cfg.learner.eta = to_real(key, value);
      } else if (key == "eps") {
        cfg.learner.eps = to_real(key, value);
      } else if (key == "trials") {
        cfg.trials = to_count(key, value);
      } else if (key == "out") {
        cfg.output_dir = value;
      } else if (key == "probe") {
        const auto parts = split(value, ',');
        Vector p(static_cast<Eigen::Index>(parts.size()));
        for (std::size_t i = 0; i < parts.size(); ++i) {
          p(static_cast<Eigen::Index>(i)) = to_real(key, parts[i]);
        }
        cfg.probe_grid.push_back(std::move(p));
      } else {
        throw ParseError("unknown config key '" + key + "'");
      }
    } catch (const InvalidArgument& e) {
      throw ParseError("config field '" + key + "': " + e.what());
    }
  }

  try {
    switch (parse_kernel_family(kernel_name)) {
      case KernelFamily::linear:
        cfg.kernel = KernelSpec::linear();
        break;
      case KernelFamily::polynomial:
        cfg.kernel = KernelSpec::polynomial(degree, offset);
        break;
      case KernelFamily::gaussian:
        cfg.kernel = KernelSpec::gaussian(sigma);
        break;
    }
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("config field 'kernel': ") + e.what());
  }
  return cfg;
}

RunRecord simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Sample> samples;
  if (cfg.data_path) {
    std::ifstream is(*cfg.data_path);
    if (!is) throw ParseError("cannot open data file " + cfg.data_path->string());
    samples = read_samples_csv(is);
    if (samples.empty()) {
      throw ParseError("data file " + cfg.data_path->string() + " has no rows");
    }
  } else {
    samples = synthesize(cfg.generator, cfg.seed, cfg.length, cfg.noise);
  }

  Dictionary dict(cfg.kernel, cfg.criterion);
  ModelState state;
  std::vector<RunRow> rows;
  rows.reserve(samples.size());
  for (std::size_t t = 0; t < samples.size(); ++t) {
    const auto outcome = step(state, dict, samples[t].x, samples[t].y,
                              cfg.learner);
    rows.push_back(RunRow{t + 1, outcome.prediction, outcome.error,
                          outcome.admitted, outcome.new_m,
                          state.alpha.squaredNorm(),
                          state.alpha.dot(dict.gram() * state.alpha)});
  }

  std::vector<Vector> inputs;
  inputs.reserve(samples.size());
  for (const auto& s : samples) inputs.push_back(s.x);
  const NormRange range = norm_range(cfg.kernel, inputs);

  std::vector<double> probes;
  probes.reserve(cfg.probe_grid.size());
  for (const auto& p : cfg.probe_grid) probes.push_back(state.predict(dict, p));

  auto report = spectral_report(dict.gram(), range, cfg.trials, cfg.seed);
  return RunRecord{std::move(rows), std::move(state), std::move(dict), range,
                   std::move(report), std::move(probes)};
}

void write_run_csv(std::ostream& os, const std::vector<RunRow>& rows) {
  os << "t,prediction,error,admitted,m,alpha_sq_norm,psi_sq_norm\n";
  for (const auto& r : rows) {
    os << r.t << ',' << format_double(r.prediction) << ','
       << format_double(r.error) << ',' << (r.admitted ? 1 : 0) << ',' << r.m
       << ',' << format_double(r.alpha_sq_norm) << ','
       << format_double(r.psi_sq_norm) << '\n';
  }
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ParseError("cannot write " + path.string());
  return os;
}

}  // namespace

RunRecord run_online(const ExperimentConfig& cfg) {
  auto record = simulate(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  {
    auto os = open_output(cfg.output_dir / "run.csv");
    write_run_csv(os, record.rows);
  }
  {
    auto os = open_output(cfg.output_dir / "spectral.csv");
    write_report_csv(os, record.report);
  }
  {
    auto os = open_output(cfg.output_dir / "dictionary.txt");
    write_dictionary(os, record.dictionary);
  }
  if (!cfg.probe_grid.empty()) {
    auto os = open_output(cfg.output_dir / "probes.csv");
    const auto d = cfg.probe_grid.front().size();
    for (Eigen::Index i = 0; i < d; ++i) os << 'x' << (i + 1) << ',';
    os << "psi\n";
    for (std::size_t i = 0; i < cfg.probe_grid.size(); ++i) {
      for (Eigen::Index j = 0; j < cfg.probe_grid[i].size(); ++j) {
        os << format_double(cfg.probe_grid[i](j)) << ',';
      }
      os << format_double(record.probe_values[i]) << '\n';
    }
  }
  return record;
}

VerifyOutcome verify(const Dictionary& dict, std::size_t trials,
                     std::uint64_t seed, std::optional<NormRange> range) {
  if (dict.empty()) throw InvalidArgument("verify: dictionary is empty");
  const NormRange nr = range ? *range : norm_range(dict.kernel(), dict.atoms());
  VerifyOutcome out{spectral_report(dict.gram(), nr, trials, seed), nr,
                    ExitCode::ok, {}};
  const std::string approx = std::string(to_string(CriterionKind::approximation)) + ".";
  for (const auto& v : out.report.violations) {
    if (v.bound.rfind(approx, 0) == 0) continue;
    out.gating.push_back(v);
  }
  if (!out.gating.empty()) out.status = ExitCode::bound_violation;
  return out;
}

}  // namespace kdict
