#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "extqv/estimators.hpp"
#include "extqv/montecarlo.hpp"
#include "extqv/numfmt.hpp"
#include "extqv/sdecore.hpp"

namespace extqv {

/// Fixed-order results table, one row per (cell, estimator):
/// model,sigma,epsilon,n,M,estimator,alpha,stride,mean,mse,stderr,sigma2_target,seed,wall_ms
std::string results_csv(const ExperimentResult& result);
/// Same rows as newline-delimited JSON objects.
std::string results_ndjson(const ExperimentResult& result);

/// Header "t,x" or "t,x,y".
void write_path_csv(std::ostream& out, const SamplePath& path);
/// Header "index,t,x,extremal"; extremal is 1 on the extremal partition.
void write_extremal_path_csv(std::ostream& out, const SamplePath& path);

/// Reads a path written by write_path_csv (columns located by header name;
/// "x" required, "t" and "y" optional). The grid is n = rows - 1 and T the
/// last t, or 1 when there is no t column.
SamplePath read_path_csv(std::istream& in);

}  // namespace extqv
