#pragma once

// Task execution: turns a validated ExperimentConfig into a result table on
// disk plus a manifest sidecar (<result>.manifest.json) that echoes the
// configuration, the tool version, and the wall time.  Row order and cell
// values depend only on (configuration, seed), never on the thread count, so
// repeated runs produce byte-identical result files.

#include <functional>
#include <string>

#include "cmv/config.hpp"
#include "cmv/io.hpp"

namespace cmv::run {

inline constexpr const char* kVersion = "0.1.0";

struct TaskOutcome {
  std::string resultPath;
  std::string manifestPath;
  i64 rows = 0;
  double wallSeconds = 0.0;
};

// Runs `fn(i)` for i in [0, n) on up to `threads` workers.  Callers write
// into pre-sized slots indexed by i, which keeps results deterministic.
void parallel_for(i64 n, int threads, const std::function<void(i64)>& fn);

// Computes the result table for the task without touching the filesystem.
// When `extras` is non-null, task-level scalars that have no column (medians,
// residuals, traces) are collected there for the manifest.
io::Table run_table(const cfg::ExperimentConfig& c, int threads,
                    cfg::json* extras = nullptr);

// run_table + serialization.  outDir, when non-empty, is prefixed to relative
// output paths.
TaskOutcome run_task(const cfg::ExperimentConfig& c, const std::string& outDir,
                     int threads);

}  // namespace cmv::run
