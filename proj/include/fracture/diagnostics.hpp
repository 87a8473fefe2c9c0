#pragma once

#include <string>
#include <vector>

#include "fracture/evolution.hpp"

namespace fracture {

struct RunConfig;

struct CrackLength {
  double raw = 0.0;     // boundary edges not on the mesh boundary
  double halved = 0.0;  // one lip
};

CrackLength crack_length(const Triangulation& mesh, const TriangleSet& a_mod);

struct BalanceRow {
  int k = 0;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;       // trapezoid in time
  double rhs_left = 0.0;  // field frozen at the start of each step
  double slack = 0.0;
  double slack_left = 0.0;
};

struct BalanceReport {
  std::vector<BalanceRow> rows;
  double max_energy = 0.0;
  double tol_abs = 0.0;
  double beta_fit = 0.0;
  double beta_left = 0.0;
  bool pass = true;
};

// Integral over the uncracked part of Ω of C e(u) : e(G), G the interpolated load shape.
double load_power(const Triangulation& mesh, const DisplacementField& u, const TriangleSet& cracked,
                  const MaterialModel& m, const LoadProgram& load);

BalanceReport check_energy_balance(const EvolutionTrace& trace, const LoadProgram& load);

struct MinimalityReport {
  int trials = 0;
  int failures = 0;
  double worst_gap = 0.0;  // max of E(u) - E(v) over competitors
};

// Random competitors sharing the collar values of each step.
MinimalityReport check_unilateral_minimality(const EvolutionTrace& trace, int competitors, std::uint64_t seed,
                                             double tol_rel = 1e-8);

struct StudyRow {
  double eps = 0.0;
  double delta = 0.0;
  double crack_length = 0.0;    // final, one lip
  double crack_energy = 0.0;    // kappa sin(theta0) times the one-lip length
  double crack_part = 0.0;      // final crack term of the history energy
  double elastic_energy = 0.0;  // final
  double max_total = 0.0;
  double beta_fit = 0.0;
  bool balance_pass = true;
  bool aborted = false;
};

struct ConvergenceStudy {
  std::vector<StudyRow> rows;
  double last_pair_change = 0.0;  // relative change of crack energy over the last two rows
  bool cauchy_pass = true;        // last_pair_change < 0.2
  bool energy_bound_pass = true;  // max total within 2x of the coarsest run
};

// Halves eps and delta `refinements` times starting from the base configuration.
ConvergenceStudy run_convergence_study(const RunConfig& base, int refinements);

}  // namespace fracture
