#pragma once

#include "confzero/scenario.hpp"

#include <string>
#include <vector>

namespace confzero {

inline constexpr const char* kVersion = "0.1.0";

// One executed task. `machine` is a single-line JSON record; `human` an
// indented plain-text block with the same content. A task that threw has
// ok = false and the message in `error`; pass never holds without ok.
// Only verify-theorem tasks gate the run's exit status.
struct TaskRecord {
  std::string kind;
  bool ok = true;
  bool pass = true;
  bool gating = false;
  std::string error;
  std::string machine;
  std::string human;
};

struct RunReport {
  std::string scenario_echo;  // resolved scenario stamp, one JSON line
  std::vector<TaskRecord> tasks;

  // 0 when every verify-theorem task passed (vacuously with none), else 1.
  int exit_code() const;

  // Line-delimited records: the scenario stamp, one record per task, one
  // summary record. Identical bytes for identical inputs; no timestamps.
  std::string machine_text() const;

  // The same records rendered for reading.
  std::string human_text() const;
};

// Executes the scenario's tasks in order. Task errors are recorded in the
// report, never thrown.
RunReport run(const Scenario& s);

}  // namespace confzero
