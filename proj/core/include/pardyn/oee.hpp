#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <cassert>
#include <cstddef>
#include <string>
#include <vector>

#include "pardyn/trace.hpp"
#include "pardyn/types.hpp"

// Odd-even elimination for symmetric block tri-diagonal systems.
//
// Each round eliminates every coupling at the current block distance h
// simultaneously, producing a system whose couplings sit at distance 2h.
// After ceil_log2(n) rounds the system is block diagonal and every unknown
// falls out of an independent small solve. Within a round all row updates
// read the previous round's state and write their own slot, so rows can be
// processed in parallel and the result does not depend on the worker count.

namespace pardyn {

// diag[i] is symmetric; upper[i] couples row i to row i+1. The sub-diagonal
// blocks are implicitly upper[i]^T and are never stored: the elimination
// preserves this symmetry round to round.
template <int B>
struct SymBlockTriDiagSystem {
  std::vector<Eigen::Matrix<double, B, B>> diag;   // n blocks
  std::vector<Eigen::Matrix<double, B, B>> upper;  // n - 1 blocks
};

// Factor-and-solve for one pivot block: returns x with pivot * x = rhs.
// The pivot blocks of intermediate rounds are symmetric but not guaranteed
// positive definite, so this uses a rank-revealing LU rather than Cholesky;
// the pivot is never inverted explicitly. Throws SingularBlockError naming
// the elimination round and block index when the pivot is rank deficient
// within machine tolerance.
template <int B, class Rhs>
auto coefficient_solve(const Eigen::Matrix<double, B, B>& pivot,
                       const Rhs& rhs, int round, int index) {
  Eigen::FullPivLU<Eigen::Matrix<double, B, B>> lu(pivot);
  if (!lu.isInvertible()) {
    throw SingularBlockError(
        round, index,
        "odd-even elimination: singular pivot block (round " +
            std::to_string(round) + ", block " + std::to_string(index) + ")");
  }
  return lu.solve(rhs).eval();
}

// Elimination state after `round` rounds: couplings live at block distance
// `distance`, i.e. coupling[i] links row i to row i + distance (the matching
// lower block is coupling[i]^T). M is the number of right-hand-side columns
// carried through the elimination.
template <int B, int M = 1>
struct OeeState {
  using PivotBlock = Eigen::Matrix<double, B, B>;
  using RhsBlock = Eigen::Matrix<double, B, M>;

  std::vector<PivotBlock> diag;
  std::vector<PivotBlock> coupling;
  std::vector<RhsBlock> rhs;
  int distance = 1;
  int round = 0;
};

// Advances the state by one round. Row i subtracts the multiple of row i+h
// that cancels its upper coupling and the multiple of row i-h that cancels
// its lower coupling; rows within h of either end simply drop the absent
// term. New couplings appear only at distance 2h, for rows i <= n-1-2h.
template <int B, int M>
void oee_eliminate_round(OeeState<B, M>& state) {
  using PivotBlock = typename OeeState<B, M>::PivotBlock;
  using RhsBlock = typename OeeState<B, M>::RhsBlock;

  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(state.diag.size());
  const std::ptrdiff_t h = state.distance;
  const int round = state.round + 1;
  assert(static_cast<std::ptrdiff_t>(state.coupling.size()) ==
         std::max<std::ptrdiff_t>(n - h, 0));

  std::vector<PivotBlock> next_diag(n);
  std::vector<RhsBlock> next_rhs(n);
  std::vector<PivotBlock> next_coupling(std::max<std::ptrdiff_t>(n - 2 * h, 0));

  // First singular pivot found, by row; n means "none". Exceptions must not
  // escape the parallel region, so rows record and bail instead of throwing.
  std::ptrdiff_t bad_row = n;
  int bad_pivot = 0;

#pragma omp parallel for schedule(static) if (n >= 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      PivotBlock d = state.diag[i];
      RhsBlock r = state.rhs[i];

      if (i < n - h) {
        // elim_up = E_i^T where E_i = U_i * inv(D_{i+h}); D symmetric.
        const PivotBlock elim_up = coefficient_solve<B>(
            state.diag[i + h], state.coupling[i].transpose().eval(), round,
            static_cast<int>(i + h));
        d.noalias() -= elim_up.transpose() * state.coupling[i].transpose();
        r.noalias() -= elim_up.transpose() * state.rhs[i + h];
        if (i < n - 2 * h) {
          next_coupling[i].noalias() = -(elim_up.transpose() * state.coupling[i + h]);
        }
      }
      if (i >= h) {
        // elim_down = K_i^T where K_i = U_{i-h}^T * inv(D_{i-h}).
        const PivotBlock elim_down = coefficient_solve<B>(
            state.diag[i - h], state.coupling[i - h], round,
            static_cast<int>(i - h));
        d.noalias() -= elim_down.transpose() * state.coupling[i - h];
        r.noalias() -= elim_down.transpose() * state.rhs[i - h];
      }

      next_diag[i] = d;
      next_rhs[i] = r;
    } catch (const SingularBlockError& e) {
#pragma omp critical(pardyn_oee_error)
      {
        if (i < bad_row) {
          bad_row = i;
          bad_pivot = e.index();
        }
      }
    }
  }

  if (bad_row < n) {
    throw SingularBlockError(
        round, bad_pivot,
        "odd-even elimination: singular pivot block (round " +
            std::to_string(round) + ", block " + std::to_string(bad_pivot) +
            ")");
  }

  state.diag.swap(next_diag);
  state.rhs.swap(next_rhs);
  state.coupling.swap(next_coupling);
  state.distance = static_cast<int>(2 * h);
  state.round = round;
}

// Full solve: exactly ceil_log2(n) elimination rounds, then one independent
// block solve per row. Accepts any number of right-hand-side columns M.
template <int B, int M = 1>
std::vector<Eigen::Matrix<double, B, M>> oee_solve(
    const SymBlockTriDiagSystem<B>& sys,
    const std::vector<Eigen::Matrix<double, B, M>>& rhs,
    OeeTrace* trace = nullptr) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(sys.diag.size());
  assert(static_cast<std::ptrdiff_t>(sys.upper.size()) ==
         std::max<std::ptrdiff_t>(n - 1, 0));
  assert(static_cast<std::ptrdiff_t>(rhs.size()) == n);
  if (trace) trace->rounds = 0;
  if (n == 0) return {};

  OeeState<B, M> state{sys.diag, sys.upper, rhs, 1, 0};
  const int rounds = ceil_log2(static_cast<std::size_t>(n));
  for (int j = 0; j < rounds; ++j) {
    oee_eliminate_round(state);
  }
  if (trace) trace->rounds = state.round;

  std::vector<Eigen::Matrix<double, B, M>> x(n);
  std::ptrdiff_t bad_row = n;
#pragma omp parallel for schedule(static) if (n >= 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      x[i] = coefficient_solve<B>(state.diag[i], state.rhs[i], state.round,
                                  static_cast<int>(i));
    } catch (const SingularBlockError&) {
#pragma omp critical(pardyn_oee_final_error)
      {
        if (i < bad_row) bad_row = i;
      }
    }
  }
  if (bad_row < n) {
    throw SingularBlockError(
        state.round, static_cast<int>(bad_row),
        "odd-even elimination: singular diagonal block after elimination "
        "(block " + std::to_string(bad_row) + ")");
  }
  return x;
}

// Sequential block Thomas solve for the same systems. Deliberately
// independent of the elimination above: classic forward sweep that folds
// each row into the next, then back substitution.
template <int B, int M = 1>
std::vector<Eigen::Matrix<double, B, M>> block_thomas_solve(
    const SymBlockTriDiagSystem<B>& sys,
    const std::vector<Eigen::Matrix<double, B, M>>& rhs) {
  using PivotBlock = Eigen::Matrix<double, B, B>;
  using RhsBlock = Eigen::Matrix<double, B, M>;

  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(sys.diag.size());
  assert(static_cast<std::ptrdiff_t>(rhs.size()) == n);
  if (n == 0) return {};

  std::vector<PivotBlock> d = sys.diag;
  std::vector<RhsBlock> r = rhs;

  for (std::ptrdiff_t i = 1; i < n; ++i) {
    Eigen::FullPivLU<PivotBlock> lu(d[i - 1]);
    if (!lu.isInvertible()) {
      throw DynamicsError("block Thomas: singular pivot at row " +
                          std::to_string(i - 1));
    }
    // factor = inv(D_{i-1}) * U_{i-1}; the eliminated lower block is
    // U_{i-1}^T, so row i loses U_{i-1}^T * inv(D_{i-1}) * (U_{i-1} | r).
    const PivotBlock factor = lu.solve(sys.upper[i - 1]);
    d[i].noalias() -= sys.upper[i - 1].transpose() * factor;
    r[i].noalias() -= factor.transpose() * r[i - 1];
  }

  std::vector<RhsBlock> x(n);
  for (std::ptrdiff_t i = n - 1; i >= 0; --i) {
    RhsBlock b = r[i];
    if (i < n - 1) b.noalias() -= sys.upper[i] * x[i + 1];
    Eigen::FullPivLU<PivotBlock> lu(d[i]);
    if (!lu.isInvertible()) {
      throw DynamicsError("block Thomas: singular pivot at row " +
                          std::to_string(i));
    }
    x[i] = lu.solve(b);
  }
  return x;
}

}  // namespace pardyn
