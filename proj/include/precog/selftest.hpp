#pragma once

#include <optional>
#include <string>
#include <vector>

#include "precog/ingestion.hpp"

namespace precog {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Vocabulary text bundled into the binary for the self-test.
const std::string& bundled_vocabulary_text();

/// The bundled 50-example synthetic dataset (two tasks: "single" and "pair").
std::vector<Example> bundled_examples();

/// Runs every self-test check against the mock backend. A replacement
/// vocabulary is used by the later checks when it loads; when it does not,
/// the vocabulary check fails and the rest fall back to the bundled one.
std::vector<CheckResult> run_selftest(const std::optional<std::string>& vocabulary_text = std::nullopt);

std::string format_selftest_summary(const std::vector<CheckResult>& results);

}  // namespace precog
