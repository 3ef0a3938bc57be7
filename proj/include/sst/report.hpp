// Copyright 2026 The sstlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Experiment CSV. Per-run block, one row per checkpoint:
//
//   run,checkpoint,train_batch,accuracy,entropy_bits
//   1,1,1,0.734100,1.021337
//   1,2,7,0.741800,0.998012
//
// then a blank line and the aggregate block:
//
//   checkpoint,mean,std,ci95_half_width,runs
//   1,0.734100,0.000000,0.000000,10
//
// train_batch is the batch trained last before the checkpoint (1 for the
// pre-training checkpoint). ci95_half_width is empty for a single run. All
// reals are printed with six decimals; there are no timestamps, so equal
// inputs give byte-identical files.

#include <string>
#include <string_view>

#include "sst/experiment.hpp"

namespace sst {

std::string format_csv(const ExperimentResult& result);
/// Throws ParseError.
ExperimentResult parse_csv(std::string_view text);

/// Aligned plain-text table of the aggregate curve with a small bar chart.
std::string format_table(const AggregateResult& agg);

}  // namespace sst
