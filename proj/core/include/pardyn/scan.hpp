#pragma once

#include <Eigen/Core>

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "pardyn/trace.hpp"
#include "pardyn/types.hpp"

// Logarithmic-depth prefix combination and the block bi-diagonal solvers
// built on top of it. These are the primitives that turn the chain
// recursions of rigid-body dynamics into parallel round-based computations.

namespace pardyn {

// Inclusive prefix combine over an associative operator:
//
//   out[i] = combine(combine(...combine(items[0], items[1])...), items[i])
//
// combine(first, second) composes an element covering an earlier index range
// with the element covering the range immediately after it; `identity` must
// be neutral on both sides.
//
// The implementation pads the input with identity elements up to the next
// power of two and runs a fixed doubling-distance combination tree, so the
// number of combine rounds is exactly ceil_log2(n). The tree shape depends
// only on n — never on the worker count — which makes the result
// bit-identical for any number of threads.
template <class T, class Combine>
std::vector<T> scan_inclusive(std::span<const T> items, const T& identity,
                              Combine combine, ScanTrace* trace = nullptr) {
  const std::size_t n = items.size();
  if (trace) trace->rounds = 0;
  if (n == 0) return {};

  std::size_t m = 1;
  while (m < n) m <<= 1;

  std::vector<T> cur(m, identity);
  std::copy(items.begin(), items.end(), cur.begin());
  std::vector<T> next(m, identity);

  for (std::size_t dist = 1; dist < m; dist <<= 1) {
    if (trace) ++trace->rounds;
    const std::ptrdiff_t mm = static_cast<std::ptrdiff_t>(m);
    const std::ptrdiff_t d = static_cast<std::ptrdiff_t>(dist);
    // Every slot reads only the previous round's buffer and writes its own
    // slot; iterations are independent.
#pragma omp parallel for schedule(static) if (mm >= 256)
    for (std::ptrdiff_t i = 0; i < mm; ++i) {
      if (i >= d) {
        next[i] = combine(cur[i - d], cur[i]);
      } else {
        next[i] = cur[i];
      }
    }
    cur.swap(next);
  }

  cur.resize(n);
  return cur;
}

template <class T, class Combine>
std::vector<T> scan_inclusive(const std::vector<T>& items, const T& identity,
                              Combine combine, ScanTrace* trace = nullptr) {
  return scan_inclusive(std::span<const T>(items), identity, combine, trace);
}

// One step of the block recursion x[k] = coeff * x[k-1] + offset, encoded so
// that composing steps under scan_inclusive yields the step for the
// concatenated index range. The prefix over steps 0..k therefore carries
// x[k] in its offset (step 0 uses coeff = identity and offset = x[0]).
//
// Composition order matters: the later step's coefficient multiplies from
// the left. compose(first, second) = { second.coeff * first.coeff,
// second.coeff * first.offset + second.offset }. Swapping the operands
// silently yields wrong prefixes for non-commuting coefficients.
template <int D>
struct AffineElement {
  Eigen::Matrix<double, D, D> coeff = Eigen::Matrix<double, D, D>::Identity();
  Eigen::Matrix<double, D, 1> offset = Eigen::Matrix<double, D, 1>::Zero();

  static AffineElement identity() { return {}; }

  static AffineElement compose(const AffineElement& first,
                               const AffineElement& second) {
    AffineElement out;
    out.coeff.noalias() = second.coeff * first.coeff;
    out.offset.noalias() = second.coeff * first.offset;
    out.offset += second.offset;
    return out;
  }
};

enum class BiDiagOrientation { lower, upper };

// Block bi-diagonal system with implicit identity diagonal blocks.
// `coupling` holds the recursion coefficients, not the matrix entries (the
// assembled matrix carries -coupling[k] next to the diagonal):
//
//   lower:  x[0] = rhs[0],    x[k] = coupling[k-1] * x[k-1] + rhs[k]
//   upper:  x[n-1] = rhs[n-1], x[k] = coupling[k] * x[k+1] + rhs[k]
template <int D>
struct BlockBiDiagSystem {
  BiDiagOrientation orientation = BiDiagOrientation::lower;
  std::vector<Eigen::Matrix<double, D, D>> coupling;  // n - 1 blocks
  std::vector<Eigen::Matrix<double, D, 1>> rhs;       // n blocks
};

// Solves the forward recursion by scanning its affine steps.
template <int D>
std::vector<Eigen::Matrix<double, D, 1>> solve_lower_bidiag(
    const BlockBiDiagSystem<D>& sys, ScanTrace* trace = nullptr) {
  assert(sys.orientation == BiDiagOrientation::lower);
  const std::size_t n = sys.rhs.size();
  assert(sys.coupling.size() + 1 == n || (n == 0 && sys.coupling.empty()));
  if (n == 0) {
    if (trace) trace->rounds = 0;
    return {};
  }

  std::vector<AffineElement<D>> steps(n);
  steps[0].offset = sys.rhs[0];
  for (std::size_t k = 1; k < n; ++k) {
    steps[k].coeff = sys.coupling[k - 1];
    steps[k].offset = sys.rhs[k];
  }

  auto prefixes = scan_inclusive(std::span<const AffineElement<D>>(steps),
                                 AffineElement<D>::identity(),
                                 &AffineElement<D>::compose, trace);

  std::vector<Eigen::Matrix<double, D, 1>> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = prefixes[k].offset;
  return x;
}

// Solves the backward recursion by reversing the index order and scanning.
template <int D>
std::vector<Eigen::Matrix<double, D, 1>> solve_upper_bidiag(
    const BlockBiDiagSystem<D>& sys, ScanTrace* trace = nullptr) {
  assert(sys.orientation == BiDiagOrientation::upper);
  const std::size_t n = sys.rhs.size();
  assert(sys.coupling.size() + 1 == n || (n == 0 && sys.coupling.empty()));
  if (n == 0) {
    if (trace) trace->rounds = 0;
    return {};
  }

  std::vector<AffineElement<D>> steps(n);
  steps[0].offset = sys.rhs[n - 1];
  for (std::size_t k = 1; k < n; ++k) {
    steps[k].coeff = sys.coupling[n - 1 - k];
    steps[k].offset = sys.rhs[n - 1 - k];
  }

  auto prefixes = scan_inclusive(std::span<const AffineElement<D>>(steps),
                                 AffineElement<D>::identity(),
                                 &AffineElement<D>::compose, trace);

  std::vector<Eigen::Matrix<double, D, 1>> x(n);
  for (std::size_t k = 0; k < n; ++k) x[n - 1 - k] = prefixes[k].offset;
  return x;
}

}  // namespace pardyn
