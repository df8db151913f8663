#pragma once

// Brute-force reference implementations used as test oracles. They share no
// code with the library beyond the box type and IoU.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "pitchtrack/box.hpp"

namespace oracle {

/// Minimum total cost over every injective map of the smaller side into the
/// larger side.
inline double min_assignment_cost(const std::vector<std::vector<double>>& cost) {
    const std::size_t rows = cost.size();
    const std::size_t cols = rows == 0 ? 0 : cost[0].size();
    if (rows == 0 || cols == 0) return 0.0;
    const bool transpose = rows > cols;
    const std::size_t small = transpose ? cols : rows;
    const std::size_t large = transpose ? rows : cols;
    std::vector<std::size_t> perm(large);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < small; ++i) total += transpose ? cost[perm[i]][i] : cost[i][perm[i]];
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

struct Matching {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    double cost = 0.0;
};

/// Largest matching among allowed pairs, cheapest among the largest, by
/// exhaustive recursion over rows.
inline Matching best_partial_matching(const std::vector<std::vector<double>>& cost,
                                      const std::vector<std::vector<bool>>& allowed) {
    const std::size_t rows = cost.size();
    const std::size_t cols = rows == 0 ? 0 : cost[0].size();
    Matching best;
    std::size_t best_count = 0;
    best.cost = std::numeric_limits<double>::infinity();
    std::vector<bool> used(cols, false);
    std::vector<std::pair<std::size_t, std::size_t>> current;

    auto recurse = [&](auto&& self, std::size_t r, double acc) -> void {
        if (r == rows) {
            if (current.size() > best_count || (current.size() == best_count && acc < best.cost)) {
                best_count = current.size();
                best.pairs = current;
                best.cost = acc;
            }
            return;
        }
        self(self, r + 1, acc);
        for (std::size_t c = 0; c < cols; ++c) {
            if (used[c] || !allowed[r][c]) continue;
            used[c] = true;
            current.emplace_back(r, c);
            self(self, r + 1, acc + cost[r][c]);
            current.pop_back();
            used[c] = false;
        }
    };
    recurse(recurse, 0, 0.0);
    if (best_count == 0) best.cost = 0.0;
    return best;
}

struct Clear {
    long fp = 0;
    long fn = 0;
    long idsw = 0;
    long gt_total = 0;
    long matches = 0;
    double dist = 0.0;
    double mota = 0.0;
    double motp = 0.0;
};

/// CLEAR-MOT with previous-frame carry-over and exhaustive matching.
inline Clear clear_mot(const pitchtrack::TrackFrames& gt, const pitchtrack::TrackFrames& hyp, double gate) {
    using pitchtrack::iou;
    Clear out;
    std::map<int, int> previous;  // gt id -> hyp id in the previous frame
    std::map<int, int> last;      // gt id -> most recent hyp id
    const std::size_t frames = std::max(gt.size(), hyp.size());
    for (std::size_t f = 0; f < frames; ++f) {
        const std::vector<pitchtrack::TrackedBox> none;
        const auto& g = f < gt.size() ? gt[f] : none;
        const auto& h = f < hyp.size() ? hyp[f] : none;
        out.gt_total += static_cast<long>(g.size());
        std::vector<bool> gu(g.size(), false), hu(h.size(), false);
        std::map<int, int> now;

        for (std::size_t i = 0; i < g.size(); ++i) {
            auto it = previous.find(g[i].id);
            if (it == previous.end()) continue;
            for (std::size_t j = 0; j < h.size(); ++j) {
                if (h[j].id != it->second || hu[j]) continue;
                const double v = iou(g[i].box, h[j].box);
                if (v >= gate) {
                    gu[i] = hu[j] = true;
                    now[g[i].id] = h[j].id;
                    last[g[i].id] = h[j].id;
                    out.dist += 1.0 - v;
                    ++out.matches;
                }
            }
        }

        std::vector<std::size_t> gi, hj;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!gu[i]) gi.push_back(i);
        }
        for (std::size_t j = 0; j < h.size(); ++j) {
            if (!hu[j]) hj.push_back(j);
        }
        std::vector<std::vector<double>> cost(gi.size(), std::vector<double>(hj.size(), 0.0));
        std::vector<std::vector<bool>> allowed(gi.size(), std::vector<bool>(hj.size(), false));
        for (std::size_t a = 0; a < gi.size(); ++a) {
            for (std::size_t b = 0; b < hj.size(); ++b) {
                const double v = iou(g[gi[a]].box, h[hj[b]].box);
                cost[a][b] = 1.0 - v;
                allowed[a][b] = v >= gate;
            }
        }
        for (const auto& [a, b] : best_partial_matching(cost, allowed).pairs) {
            const int gid = g[gi[a]].id;
            const int hid = h[hj[b]].id;
            gu[gi[a]] = hu[hj[b]] = true;
            auto it = last.find(gid);
            if (it != last.end() && it->second != hid) ++out.idsw;
            now[gid] = hid;
            last[gid] = hid;
            out.dist += cost[a][b];
            ++out.matches;
        }
        out.fn += static_cast<long>(std::count(gu.begin(), gu.end(), false));
        out.fp += static_cast<long>(std::count(hu.begin(), hu.end(), false));
        previous = now;
    }
    out.mota = 1.0 - static_cast<double>(out.fp + out.fn + out.idsw) / static_cast<double>(out.gt_total);
    out.motp = out.matches > 0 ? out.dist / static_cast<double>(out.matches) : 0.0;
    return out;
}

}  // namespace oracle
