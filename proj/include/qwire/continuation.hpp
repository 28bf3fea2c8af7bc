#ifndef QWIRE_CONTINUATION_HPP
#define QWIRE_CONTINUATION_HPP

#include <vector>

#include "qwire/branch.hpp"

namespace qwire {

struct ContinuationOptions {
    SolveOptions solve;
    int battery_stride = 8;  // fresh seed battery every k-th grid point
    int bisect_depth = 3;    // refinement when a branch's phase jumps
    int threads = 1;
};

// Branches along one wire coordinate, marched in x from the wire edge.
struct ColumnResult {
    double y = 0.0;
    std::vector<BranchSet> sets;  // aligned with the x grid
    struct Event {
        int ix;
        int id_a, id_b;
    };
    std::vector<Event> births;   // branch pairs appearing during the march
    std::vector<Event> deaths;   // branches lost by the battery + warm start
    int ambiguities = 0;         // unresolved phase jumps after bisection
    int sign_fixes = 0;          // transport-amplitude sign continuations
    int in_pair[2] = {-1, -1};   // ids of the evanescent pair from the wire edge
};

struct FieldBranches {
    std::vector<double> xs, ys;
    std::vector<ColumnResult> columns;  // one per y, same order
};

ColumnResult continue_column(const Flow& flow, const std::vector<double>& xs, double y,
                             const ContinuationOptions& opt);

// Independent columns, deterministic merge; results do not depend on the
// worker count.
FieldBranches continue_field(const Flow& flow, const std::vector<double>& xs,
                             const std::vector<double>& ys, const ContinuationOptions& opt);

}  // namespace qwire

#endif
