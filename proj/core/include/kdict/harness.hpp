#pragma once

#include "kdict/dictionary.hpp"
#include "kdict/learners.hpp"
#include "kdict/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kdict {

struct Sample {
  Vector x;
  double y;
};

/// Noise standard deviation sinc1d uses unless overridden.
inline constexpr double kSincNoiseStd = 0.01;

/// Deterministic synthetic streams.
///
///   sinc1d  x ~ U[-3, 3], y = sin(pi x) / (pi x) + N(0, noise^2)
///   narma2  u_t ~ U[0, 0.5],
///           s_t = 0.4 s_{t-1} + 0.4 s_{t-1} s_{t-2} + 0.6 u_t^3 + 0.1,
///           x_t = (s_{t-1}, s_{t-2}, u_t), y_t = s_t + N(0, noise^2)
///
/// `noise` defaults to 0.01 for sinc1d and 0 for narma2. Throws
/// InvalidArgument for an unknown name, listing the valid ones.
std::vector<Sample> synthesize(const std::string& name, std::uint64_t seed,
                               std::size_t length,
                               std::optional<double> noise = {});

/// Reads "x1,...,xd,y" rows; a non-numeric first line is a header.
std::vector<Sample> read_samples_csv(std::istream& is);
void write_samples_csv(std::ostream& os, const std::vector<Sample>& samples);

struct ExperimentConfig {
  std::optional<std::filesystem::path> data_path;
  std::string generator = "sinc1d";
  std::uint64_t seed = 1;
  std::size_t length = 1000;
  std::optional<double> noise;

  KernelSpec kernel = KernelSpec::gaussian(0.5);
  CriterionConfig criterion;
  LearnerConfig learner;

  std::vector<Vector> probe_grid;
  std::size_t trials = kDefaultIsometryTrials;
  std::filesystem::path output_dir = "out";

  void validate() const;
};

/// Flat key=value settings. Recognized keys: data, generator, seed, length,
/// noise, kernel, sigma, degree, offset, criterion, threshold, max_atoms,
/// algo, eta, eps, trials, out, probe (repeatable, comma-separated point).
/// Later assignments override earlier ones.
using Settings = std::multimap<std::string, std::string>;

/// Parses "key = value" lines; '#' starts a comment. ParseError carries the
/// line number.
Settings read_settings(std::istream& is);

/// Builds a config from defaults overridden by `settings`. ParseError names
/// the offending key.
ExperimentConfig make_config(const Settings& settings);

struct RunRow {
  std::size_t t;
  double prediction;
  double error;
  bool admitted;
  std::size_t m;
  double alpha_sq_norm;
  double psi_sq_norm;
};

struct RunRecord {
  std::vector<RunRow> rows;
  ModelState state;
  Dictionary dictionary;
  NormRange norm_range;
  SpectralReport report;
  /// psi evaluated on the probe grid with the final state.
  std::vector<double> probe_values;
};

/// Runs the learner over the stream without touching the filesystem.
RunRecord simulate(const ExperimentConfig& cfg);

/// simulate() and write run.csv, spectral.csv, dictionary.txt (and
/// probes.csv when a probe grid is set) into cfg.output_dir.
RunRecord run_online(const ExperimentConfig& cfg);

void write_run_csv(std::ostream& os, const std::vector<RunRow>& rows);

/// Exit codes shared by the CLI.
enum class ExitCode : int {
  ok = 0,
  usage = 1,
  numerical = 2,
  bound_violation = 3,
};

struct VerifyOutcome {
  SpectralReport report;
  NormRange norm_range;
  ExitCode status;
  /// Violations that decide the exit status.
  std::vector<Violation> gating;
};

/// Recomputes the spectral report for a dictionary. The status is
/// bound_violation iff a gating containment fails: Gersgorin, and the
/// distance, coherence and Babel rows. Approximation rows are reported but
/// never gate; that bound does not hold for correlated atoms.
VerifyOutcome verify(const Dictionary& dict, std::size_t trials,
                     std::uint64_t seed,
                     std::optional<NormRange> range = {});

}  // namespace kdict
