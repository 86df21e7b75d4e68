#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rwrs {

// Declarative Monte Carlo job. Fields not set explicitly are filled from the
// experiment's defaults and the chosen preset (quick / standard / deep).
struct ExperimentSpec {
  std::string experiment;        // fdd | llt-lattice | llt-nonlattice | tech1 |
                                 // range | omega | nontight | oracle-check |
                                 // stable-selftest
  std::string walk;
  std::string scenery;
  std::vector<std::int64_t> n_grid;
  std::int64_t trials = 0;
  std::vector<double> checkpoint_times;
  std::vector<double> thetas;
  double gamma = 2.0;
  double x = 0.0;
  double a = -1.0;
  double b = 1.0;
  double gamma_omega = 0.5;
  std::uint64_t seed = 1;
  int workers = 0;               // 0: hardware concurrency; scheduling only,
                                 // never part of the statistical config
  std::string preset;            // "", "quick", "standard", "deep"
};

struct ReportRow {
  std::int64_t n = 0;
  std::int64_t trials = 0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double target = 0.0;
  std::string target_source;
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string config_digest;
  double wall_seconds = 0.0;
  std::vector<ReportRow> rows;
  std::vector<std::string> flags;  // statistical failures (report content)
};

// Fill defaults and preset-derived fields; validates and throws
// std::invalid_argument on config errors.
void apply_preset(ExperimentSpec& spec);

// Canonical JSON of the statistical config (workers excluded) and its FNV-1a
// digest. The digest changes iff a statistical field changes.
std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const std::string& text);
std::string config_digest(const ExperimentSpec& spec);

// Runs the experiment. Deterministic: same (spec, seed) gives an identical
// report, independent of the worker count.
ExperimentReport run(const ExperimentSpec& spec);

// CSV columns exactly: experiment,n,trials,estimate,stderr,target,
// target_source,seed. The CSV body is deterministic (the config digest rides
// in a leading comment; wall time appears only in JSON).
void emit(const ExperimentReport& report, const std::string& format, std::ostream& os);
void emit_file(const ExperimentReport& report, const std::string& format,
               const std::string& path);

std::string report_csv(const ExperimentReport& report);

}  // namespace rwrs
