#pragma once

// The acceptance suite: one check per criterion, each returning measured
// values alongside the verdict, plus the deterministic data files.

#include <string>
#include <vector>

#include <json.hpp>

namespace dropforge {

struct VerifyOptions {
  std::vector<int> n_list{2, 3};
  bool force_failure = false;  // perturbs theta_1 before the residual check
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  nlohmann::ordered_json measured;
  double runtime_s = 0.0;
};

struct DataFile {
  std::string name;
  std::string content;
};

struct SuiteReport {
  std::vector<CriterionResult> criteria;
  bool all_passed() const;
};

CriterionResult check_conservation(const VerifyOptions& opts);
CriterionResult check_equilibrium(const VerifyOptions& opts);
CriterionResult check_formal_solution(const VerifyOptions& opts);
CriterionResult check_first_order(const VerifyOptions& opts);
CriterionResult check_matching(const VerifyOptions& opts);
CriterionResult check_divergence(const VerifyOptions& opts);
CriterionResult check_solver_agreement(const VerifyOptions& opts);
CriterionResult check_singular_limits(const VerifyOptions& opts);
CriterionResult check_finite_drop(const VerifyOptions& opts);
/// Builds the data files twice in-process and compares the bytes.
CriterionResult check_determinism(const VerifyOptions& opts);

/// Criteria 1..10 in order.
SuiteReport run_suite(const VerifyOptions& opts);

/// Expansion JSON, singular profile, divergence pair, finite drop and phase
/// portrait for n = 2. Contents depend only on the build, never on time.
std::vector<DataFile> suite_data_files();

/// {"passed", "criteria": [{"id", "name", "passed", "measured"[, "runtime_s"]}]}.
nlohmann::ordered_json report_json(const SuiteReport& report, bool with_runtime);

}  // namespace dropforge
