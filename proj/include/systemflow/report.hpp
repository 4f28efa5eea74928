#pragma once

#include <string>
#include <vector>

#include "systemflow/config.hpp"
#include "systemflow/energy.hpp"
#include "systemflow/metrics.hpp"
#include "systemflow/propagate.hpp"
#include "systemflow/scenario.hpp"
#include "systemflow/units.hpp"

namespace systemflow {

/// Column names of a sweep table, without the optional leading `label`.
const std::vector<std::string>& sweep_columns();

/// One row per point. With `labels` (same length as rows) a `label` column
/// comes first. Failed points leave the numeric cells empty and fill `error`.
std::string rows_to_csv(const std::vector<SweepRow>& rows,
                        const std::vector<std::string>* labels = nullptr);
std::string rows_to_json(const std::vector<SweepRow>& rows,
                         const std::vector<std::string>* labels = nullptr);

/// Per-edge flows, per-node power and confusion, and the system score.
std::string evaluation_to_json(const Evaluation& ev);
std::string costs_to_json(const ErrorCosts& costs);

/// Evaluates every `report` row of the model's config, in order.
std::vector<SweepRow> run_report(const Model& model, unsigned jobs = 1);

}  // namespace systemflow
