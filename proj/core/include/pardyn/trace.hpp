#pragma once

#include <algorithm>

namespace pardyn {

// Counters filled in by the solvers when a caller wants to inspect the
// parallel structure of a run. All hooks are cheap and optional; passing
// nullptr disables them.

// One prefix-combine invocation: number of combine rounds executed.
struct ScanTrace {
  int rounds = 0;
};

// One odd-even elimination solve: number of elimination rounds executed.
struct OeeTrace {
  int rounds = 0;
};

// Dependency profile of a whole dynamics computation. Distinguishes
// per-link stages whose iterations are independent (parallelizable maps)
// from stages that walk the chain carrying a link-to-link dependency.
struct ExecTrace {
  int parallel_link_stages = 0;          // independent per-link loops
  int longest_sequential_link_chain = 0; // longest dependent link walk
  int scan_rounds_max = 0;               // deepest prefix combine seen
  int oee_rounds = 0;                    // rounds of the tri-diagonal solve

  void note_parallel_stage() { ++parallel_link_stages; }
  void note_sequential_chain(int length) {
    longest_sequential_link_chain =
        std::max(longest_sequential_link_chain, length);
  }
  void note_scan(const ScanTrace& t) {
    scan_rounds_max = std::max(scan_rounds_max, t.rounds);
  }
  void note_oee(const OeeTrace& t) { oee_rounds = t.rounds; }
};

}  // namespace pardyn
