#pragma once

// Parameter sweeps: every grid point is evaluated independently on a worker
// pool and the rows are emitted in grid order.

#include <ostream>
#include <string>
#include <vector>

#include "dipolar/config.hpp"

namespace dipolar::cli {

enum class RowKind {
  Ok,
  Flagged,  // no mode / overdamped: a physical outcome, not a failure
  Failed    // numerical failure; the diagnostic says why
};

struct SweepRow {
  std::vector<double> values;  // NaN where a failed point has no value
  std::string status;
  RowKind kind = RowKind::Ok;
  std::string diagnostic;
};

struct SweepResult {
  std::vector<std::string> columns;  // numeric columns; "status" is appended on output
  std::vector<SweepRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;  // derived results echoed in the header
  std::size_t count(RowKind k) const;
  int exit_code() const;  // 0 unless a row failed, then 1
};

// Worker count from DIPOLAR_WORKERS, else the hardware concurrency.
int worker_count();

SweepResult run_sweep(const SweepSpec& spec, int workers = worker_count());

// 17 significant digits, '#' header with the resolved configuration.
void write_csv(std::ostream& out, const std::string& command, const SweepSpec& spec, const SweepResult& r);

// One line: rows, ok, flagged, failed.
std::string summary(const SweepResult& r);

}  // namespace dipolar::cli
