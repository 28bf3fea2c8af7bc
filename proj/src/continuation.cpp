#include "qwire/continuation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace qwire {

namespace {

double wrap_pi(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a < -M_PI) a += 2.0 * M_PI;
    return a;
}

// continue branch b from a previous instance: fix the transport-amplitude
// sign when the straight-segment phase definition jumped by a turn
bool phase_continuous(const Branch& prev, const Branch& cur) {
    return std::abs(wrap_pi(std::arg(cur.vanvleck / prev.vanvleck))) < 0.5 * M_PI;
}

struct Carrier {
    Branch br;
    bool alive = true;
};

}  // namespace

ColumnResult continue_column(const Flow& flow, const std::vector<double>& xs, double y,
                             const ContinuationOptions& opt) {
    const BranchScales sc = BranchScales::of(flow);
    ColumnResult col;
    col.y = y;
    col.sets.reserve(xs.size());

    int next_id = 0;
    std::vector<Carrier> carriers;

    auto solve_at = [&](double x, const std::vector<std::pair<Cx, Cx>>& extra) {
        return solve_point(flow, x, y, opt.solve, extra);
    };

    // march; at each x: warm-start carried branches, then (periodically or
    // on losses) run the full battery and reconcile
    for (size_t ix = 0; ix < xs.size(); ++ix) {
        const double x = xs[ix];
        const SeedBox box = SeedBox::for_point(flow, x, y, opt.solve.box_scale);
        std::vector<Branch> found;

        std::vector<int> lost;
        for (size_t c = 0; c < carriers.size(); ++c) {
            if (!carriers[c].alive) continue;
            Cx y0 = carriers[c].br.y0, t = carriers[c].br.t;
            double res, cond;
            bool ok = newton_polish(flow, x, y, y0, t, opt.solve, box, res, cond);
            if (ok) {
                // two carriers collapsing onto one root near a fold: keep
                // the senior id, mark the other lost for rebirth matching
                bool taken = false;
                for (const Branch& fb : found)
                    if (same_root(sc, y0, t, fb.y0, fb.t, opt.solve.dedup_tol * 100)) {
                        taken = true;
                        break;
                    }
                if (taken) {
                    lost.push_back(int(c));
                    continue;
                }
                Branch nb = make_branch(flow, x, y, y0, t, opt.solve);
                nb.id = carriers[c].br.id;
                // phase continuity along the column, bisecting in x on jumps
                if (ix > 0 && !phase_continuous(carriers[c].br, nb)) {
                    Branch ref = carriers[c].br;
                    double x0 = xs[ix - 1], x1 = x;
                    Cx ry0 = ref.y0, rt = ref.t;
                    bool resolved = false;
                    for (int d = 0; d < opt.bisect_depth && !resolved; ++d) {
                        const double xm = 0.5 * (x0 + x1);
                        Cx my0 = ry0, mt = rt;
                        double mres, mcond;
                        if (!newton_polish(flow, xm, y, my0, mt, opt.solve, box, mres, mcond))
                            break;
                        Branch mb = make_branch(flow, xm, y, my0, mt, opt.solve);
                        mb.id = nb.id;
                        if (phase_continuous(ref, mb)) {
                            ref = mb;
                            ry0 = my0;
                            rt = mt;
                            x0 = xm;
                        } else {
                            x1 = xm;
                        }
                        if (phase_continuous(ref, nb)) resolved = true;
                    }
                    if (!resolved) {
                        // smooth |det J| with an abrupt turn: treat as the
                        // segment-definition artifact and continue the sign
                        if (phase_continuous(ref, nb)) {
                            resolved = true;
                        } else {
                            nb.vanvleck = -nb.vanvleck;
                            ++col.sign_fixes;
                            if (!phase_continuous(ref, nb)) ++col.ambiguities;
                        }
                    }
                }
                carriers[c].br = nb;
                found.push_back(nb);
            } else {
                lost.push_back(int(c));
            }
        }

        const bool battery = (ix == 0) || (int(ix) % opt.battery_stride == 0) || !lost.empty();
        std::vector<Branch> newbies;
        if (battery) {
            BranchSet fresh = solve_at(x, closed_form_seeds(flow, x, y));
            for (Branch& nb : fresh.branches) {
                bool known = false;
                for (const Branch& fb : found)
                    if (same_root(sc, nb.y0, nb.t, fb.y0, fb.t, opt.solve.dedup_tol * 100)) {
                        known = true;
                        break;
                    }
                if (!known) newbies.push_back(nb);
            }
        }

        // a carrier lost at a fold crossing continues as the nearby fresh
        // root; identity survives the crossing
        for (int c : lost) {
            int best = -1;
            double bd = 1.5;
            for (size_t k = 0; k < newbies.size(); ++k) {
                const double d = std::abs((newbies[k].y0 - carriers[c].br.y0) / sc.y0) +
                                 std::abs((newbies[k].t - carriers[c].br.t) / sc.t);
                if (d < bd) {
                    bd = d;
                    best = int(k);
                }
            }
            if (best >= 0) {
                Branch nb = newbies[best];
                nb.id = carriers[c].br.id;
                carriers[c].br = nb;
                found.push_back(nb);
                newbies.erase(newbies.begin() + best);
            } else {
                carriers[c].alive = false;
                col.deaths.push_back({int(ix), carriers[c].br.id, -1});
            }
        }
        for (Branch& nb : newbies) {
            nb.id = next_id++;
            carriers.push_back({nb, true});
            found.push_back(nb);
        }

        // pair up new ids born together at this step
        if (ix > 0) {
            std::vector<int> born;
            for (const Branch& fb : found) {
                bool existed = false;
                for (const Branch& pb : col.sets[ix - 1].branches)
                    if (pb.id == fb.id) {
                        existed = true;
                        break;
                    }
                if (!existed) born.push_back(fb.id);
            }
            for (size_t a = 0; a + 1 < born.size(); a += 2)
                col.births.push_back({int(ix), born[a], born[a + 1]});
        }

        BranchSet bs;
        bs.x = x;
        bs.y = y;
        bs.branches = std::move(found);
        sort_branchset(bs);
        for (const Branch& b : bs.branches) bs.worst_cond = std::max(bs.worst_cond, b.cond);
        col.sets.push_back(std::move(bs));

        if (ix == 0) {
            // the evanescent pair continued from the wire edge: the two
            // smallest Im(action) branches at the first point
            if (col.sets[0].branches.size() >= 2) {
                col.in_pair[0] = col.sets[0].branches[0].id;
                col.in_pair[1] = col.sets[0].branches[1].id;
            } else if (col.sets[0].branches.size() == 1) {
                col.in_pair[0] = col.sets[0].branches[0].id;
            }
        }
    }
    return col;
}

FieldBranches continue_field(const Flow& flow, const std::vector<double>& xs,
                             const std::vector<double>& ys, const ContinuationOptions& opt) {
    FieldBranches fb;
    fb.xs = xs;
    fb.ys = ys;
    fb.columns.resize(ys.size());

    const int nthreads = std::max(1, opt.threads);
    std::atomic<size_t> cursor{0};
    auto work = [&]() {
        for (;;) {
            const size_t j = cursor.fetch_add(1);
            if (j >= ys.size()) return;
            fb.columns[j] = continue_column(flow, xs, ys[j], opt);
        }
    };
    if (nthreads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return fb;
}

}  // namespace qwire
