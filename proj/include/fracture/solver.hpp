#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracture/energy.hpp"
#include "fracture/mesh.hpp"

namespace fracture {

struct SolveOptions {
  double cg_rel_tol = 1e-10;
  int max_outer = 200;
  int max_cg = 0;  // 0: 10 * number of nodes
  std::uint64_t seed = 1;
  int multistarts = 3;
  // Single-triangle flips tried around the best start (0 disables).
  int local_search = 8;
  int threads = 0;  // 0: thread_count()

  void validate() const;
  bool operator==(const SolveOptions&) const = default;
};

struct SolveResult {
  DisplacementField u;
  EnergyReport energy;
  TriangleSet cracked_now;
  int outer_iters = 0;
  bool converged = false;
  bool cycled = false;  // no fixed point; lowest iterate returned
  std::vector<double> outer_energies;
};

struct ElasticSolution {
  DisplacementField u;
  int cg_iterations = 0;
  double residual = 0.0;   // |K x - b|
  double load_norm = 0.0;  // |b|
};

// Nodes of collar triangles.
std::vector<std::uint8_t> collar_nodes(const Triangulation& mesh);

// Minimizes sum over active T of |T ∩ Ω| |e(v)_T|_C^2 with pinned nodes set to
// bc. Inactive triangles are those in `inactive`. Free nodes not attached to an
// active triangle keep their warm-start value; components without a pinned
// node are set to zero.
ElasticSolution solve_elastic_detailed(const Triangulation& mesh, const TriangleSet& inactive,
                                       const DisplacementField& bc, const MaterialModel& m, const SolveOptions& opts,
                                       const DisplacementField* warm = nullptr,
                                       const std::vector<std::uint8_t>* pinned = nullptr);
DisplacementField solve_elastic(const Triangulation& mesh, const TriangleSet& inactive, const DisplacementField& bc,
                                const MaterialModel& m, const SolveOptions& opts,
                                const DisplacementField* warm = nullptr,
                                const std::vector<std::uint8_t>* pinned = nullptr);

// Alternate minimization of the history energy with multi-starts.
SolveResult minimize_step(const Triangulation& mesh, const TriangleSet& history, const DisplacementField& bc,
                          const MaterialModel& m, const SolveOptions& opts, const DisplacementField* warm = nullptr,
                          const std::vector<std::uint8_t>* pinned = nullptr);
SolveResult minimize_step(const Triangulation& mesh, const CrackHistory& history, const DisplacementField& bc,
                          const MaterialModel& m, const SolveOptions& opts, const DisplacementField* warm = nullptr);

// Free-free stiffness block in MatrixMarket coordinate format.
void write_matrix_market(const Triangulation& mesh, const TriangleSet& inactive, const MaterialModel& m,
                         const std::string& path, const std::vector<std::uint8_t>* pinned = nullptr);

}  // namespace fracture
