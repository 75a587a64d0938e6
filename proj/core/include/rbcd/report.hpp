#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbcd/experiment.hpp"
#include "rbcd/pair_sampler.hpp"
#include "rbcd/solver.hpp"
#include "rbcd/theory.hpp"

namespace rbcd {

// All numbers are written with 17 significant digits, which round-trips
// IEEE doubles exactly. Absent values are written as empty cells. Block
// indices in CSV output are one-based.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

// i,j,p_ij
void write_distribution_csv(std::ostream& out, const PairDistribution& dist);

// k,i,j,f,gap,r_sq,residual
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
std::vector<StepRecord> read_trajectory_csv(std::istream& in);

// k,ours_sublinear,ours_linear,nng_sublinear,nng_linear
void write_bound_csv(std::ostream& out, const BoundSet& bounds);

// key=value lines.
void write_complexity(std::ostream& out, const ComplexityReport& report);

// k,mean_gap,stderr_gap,mean_lyapunov,bound_ours_sublinear,
// bound_ours_linear,bound_nng_sublinear,bound_nng_linear
void write_summary_csv(std::ostream& out, const ExperimentSummary& summary);

// Experiment inputs and the success fraction as key=value lines.
void write_summary_info(std::ostream& out, const ExperimentSummary& summary);

}  // namespace rbcd
