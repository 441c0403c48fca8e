#pragma once
// Experiment commands behind the laboratory CLI.  Each run_* function
// consumes a flat key=value Config, performs one deterministic experiment,
// and returns the artifact files it produced (path + full contents) together
// with a one-paragraph summary and the process exit code:
//     0 = success,  2 = tolerance violation,  3 = blow-up.
// The caller (CLI main or a test) decides whether to write the files; every
// emitted file starts with the '#' preamble carrying the config hash and the
// constants/tolerances the run used, followed by a mandatory CSV header row
// (JSON for the audit).
//
// Config keys shared by most commands: equation, sign, n_max, dt, T, samples,
// seed, data (random | zero | constant | cosine), sigma (random-data decay
// exponent), decay_exp (extra e^{-decay_exp·|n|} data taper), hs_s/hs_norm
// (Sobolev normalization of random data), output (file-name prefix),
// warn_stiff.  Command-specific keys are documented at each definition in
// lab_runs.cpp.

#include <string>
#include <vector>

#include "kdvlab/config.hpp"

namespace kdvlab {

struct RunFile {
  std::string path;
  std::string contents;
};

struct RunResult {
  int exit_code = 0;
  std::string summary;
  std::vector<RunFile> files;
};

RunResult run_simulate(const Config& config);
RunResult run_apriori_sweep(const Config& config);
RunResult run_decoherence(const Config& config);
RunResult run_audit(const Config& config);
RunResult run_miura(const Config& config);
RunResult run_probe_strichartz(const Config& config);
RunResult run_envelope(const Config& config);

// Dispatch by CLI command name: simulate, apriori-sweep, decoherence, audit,
// miura, probe-strichartz, envelope.  Throws std::invalid_argument for an
// unknown command.
RunResult run_command(const std::string& command, const Config& config);

// Writes each RunFile to its path verbatim; throws std::runtime_error on the
// first file that cannot be written.
void write_run_files(const RunResult& result);

}  // namespace kdvlab
