#pragma once

#include <functional>
#include <istream>
#include <ostream>
#include <string>

#include "qoi/assessor.hpp"

namespace qoi {

// Every field is optional in the document; omitted fields keep the defaults
// (classifier lda/ridge 1e-6, relevance targeted 5 / trojan 3 / ddos 1 with
// paper_exact + correct_only, utility 5/2/1 keyword table, QoI weights
// 0.4/0.3/0.2/0.1, free-rider thresholds 50/25, one assessor).
AssessorConfig load_config(std::istream& in);
void save_config(std::ostream& out, const AssessorConfig& config);

// Scalar overrides from QOI_* environment variables (QOI_MODE, QOI_RIDGE,
// QOI_ASSESSORS, QOI_RELEVANCE_MODE, QOI_RELEVANCE_GATING,
// QOI_WEIGHT_{CORRECTNESS,RELEVANCE,UTILITY,UNIQUENESS},
// QOI_FLAG_{VOLUME,QOI}_PCT). The getter is injectable for tests and
// defaults to std::getenv.
using EnvGetter = std::function<const char*(const char*)>;
void apply_env_overrides(AssessorConfig& config);
void apply_env_overrides(AssessorConfig& config, const EnvGetter& getenv_fn);

}  // namespace qoi
