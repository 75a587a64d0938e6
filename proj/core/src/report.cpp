#include "rbcd/report.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "rbcd/errors.hpp"

namespace rbcd {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

void write_distribution_csv(std::ostream& out, const PairDistribution& dist) {
  out << "i,j,p_ij\n";
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const auto p = dist.pairs()[k];
    out << p.i + 1 << ',' << p.j + 1 << ',' << format_number(dist.probs()[k])
        << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "k,i,j,f,gap,r_sq,residual\n";
  for (const auto& r : traj.records) {
    out << r.k << ',';
    if (r.pair) {
      out << r.pair->i + 1 << ',' << r.pair->j + 1;
    } else {
      out << ',';
    }
    out << ',' << format_number(r.f_value) << ',' << format_optional(r.gap)
        << ',' << format_optional(r.r_sq) << ',' << format_number(r.residual)
        << '\n';
  }
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <class T>
T parse_cell(const std::string& cell) {
  T v{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw InvalidInput("malformed CSV cell '" + cell + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return parse_cell<double>(cell);
}

}  // namespace

std::vector<StepRecord> read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "k,i,j,f,gap,r_sq,residual") {
    throw InvalidInput("not a trajectory CSV (bad header)");
  }
  std::vector<StepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_cells(line);
    if (cells.size() != 7) throw InvalidInput("trajectory row needs 7 cells");
    StepRecord r;
    r.k = parse_cell<std::size_t>(cells[0]);
    if (!cells[1].empty()) {
      r.pair = IndexPair{parse_cell<std::size_t>(cells[1]) - 1,
                         parse_cell<std::size_t>(cells[2]) - 1};
    }
    r.f_value = parse_cell<double>(cells[3]);
    r.gap = parse_optional(cells[4]);
    r.r_sq = parse_optional(cells[5]);
    r.residual = parse_cell<double>(cells[6]);
    records.push_back(r);
  }
  return records;
}

void write_bound_csv(std::ostream& out, const BoundSet& bounds) {
  out << "k,ours_sublinear,ours_linear,nng_sublinear,nng_linear\n";
  for (std::size_t c = 0; c < bounds.k.size(); ++c) {
    out << bounds.k[c] << ',' << format_number(bounds.ours_sublinear[c]) << ','
        << format_optional(bounds.ours_linear[c]) << ','
        << format_optional(bounds.nng_sublinear[c]) << ','
        << format_optional(bounds.nng_linear[c]) << '\n';
  }
}

void write_complexity(std::ostream& out, const ComplexityReport& r) {
  const auto& in = r.inputs;
  out << "N=" << in.blocks << '\n'
      << "R_sq=" << format_number(in.R_sq) << '\n'
      << "tilde_R_sq=" << format_number(in.tilde_R_sq) << '\n'
      << "mu_f=" << format_optional(in.mu_f) << '\n'
      << "eps=" << format_number(in.eps) << '\n'
      << "rho=" << format_number(in.rho) << '\n'
      << "gap0=" << format_number(in.gap0) << '\n'
      << "K=" << format_number(r.K) << '\n'
      << "K_ceil=" << ComplexityReport::display(r.K) << '\n'
      << "K_bar=" << format_number(r.K_bar) << '\n'
      << "K_bar_ceil=" << ComplexityReport::display(r.K_bar) << '\n';
  out << "K_tilde=" << format_optional(r.K_tilde) << '\n' << "K_tilde_ceil=";
  if (r.K_tilde) out << ComplexityReport::display(*r.K_tilde);
  out << '\n' << "K_hat=" << format_optional(r.K_hat) << '\n' << "K_hat_ceil=";
  if (r.K_hat) out << ComplexityReport::display(*r.K_hat);
  out << '\n';
}

void write_summary_csv(std::ostream& out, const ExperimentSummary& s) {
  out << "k,mean_gap,stderr_gap,mean_lyapunov,bound_ours_sublinear,"
         "bound_ours_linear,bound_nng_sublinear,bound_nng_linear\n";
  for (const auto& row : s.rows) {
    out << row.k << ',' << format_number(row.mean_gap) << ','
        << format_number(row.stderr_gap) << ','
        << format_optional(row.mean_lyapunov) << ','
        << format_number(row.bound_ours_sublinear) << ','
        << format_optional(row.bound_ours_linear) << ','
        << format_optional(row.bound_nng_sublinear) << ','
        << format_optional(row.bound_nng_linear) << '\n';
  }
}

void write_summary_info(std::ostream& out, const ExperimentSummary& s) {
  out << "family=" << s.family << '\n'
      << "N=" << s.blocks << '\n'
      << "n=" << s.dim << '\n'
      << "replicas=" << s.replicas << '\n'
      << "iterations=" << s.iterations << '\n'
      << "seed=" << s.seed << '\n'
      << "f_star=" << format_number(s.f_star) << '\n'
      << "gap0=" << format_number(s.gap0) << '\n'
      << "gap_resolution=" << format_number(s.gap_resolution) << '\n'
      << "tilde_R_sq=" << format_number(s.tilde_R_sq) << '\n'
      << "R_sq=" << format_optional(s.R_sq) << '\n'
      << "mu_f=" << format_optional(s.mu_f) << '\n'
      << "eps=" << format_optional(s.eps) << '\n'
      << "rho=" << format_optional(s.rho) << '\n'
      << "success_fraction=" << format_optional(s.success_fraction) << '\n';
}

}  // namespace rbcd
