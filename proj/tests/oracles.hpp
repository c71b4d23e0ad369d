#pragma once

// Slow reference implementations shared by the unit and acceptance tests.

#include "fracmorph/geometry.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fracmorph::testing {

inline double oracle_iou(const PixelBox& a, const PixelBox& b) {
    const double ix = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
    const double iy = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
    const double inter = ix * iy;
    const double uni = (a.x1 - a.x0) * (a.y1 - a.y0) + (b.x1 - b.x0) * (b.y1 - b.y0) - inter;
    return uni > 0 ? inter / uni : 0.0;
}

/// Enumerates every injective partial assignment of predictions to GT boxes
/// with IoU >= threshold and returns the lexicographically best one, where
/// predictions are ranked by (confidence desc, best IoU desc, index) and each
/// prediction's key is (matched, IoU, -gt index).
inline std::vector<std::optional<std::size_t>> brute_force_match(std::span<const PixelBox> gt,
                                                                  std::span<const PixelBox> preds,
                                                                  std::span<const double> conf, double threshold) {
    const std::size_t n = preds.size();
    std::vector<double> best(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        for (const auto& g : gt) best[p] = std::max(best[p], oracle_iou(preds[p], g));
    }
    std::vector<std::size_t> rank;
    for (std::size_t p = 0; p < n; ++p) rank.push_back(p);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto a = rank[i], b = rank[j];
            const bool b_first = conf[b] > conf[a] || (conf[b] == conf[a] && best[b] > best[a]) ||
                                 (conf[b] == conf[a] && best[b] == best[a] && b < a);
            if (b_first) std::swap(rank[i], rank[j]);
        }
    }

    struct Key {
        bool matched;
        double overlap;
        long neg_gt;
        auto operator<=>(const Key&) const = default;
    };
    const auto key = [&](std::size_t p, std::optional<std::size_t> g) {
        if (!g) return Key{false, 0.0, 0};
        return Key{true, oracle_iou(preds[p], gt[*g]), -static_cast<long>(*g)};
    };

    std::vector<std::optional<std::size_t>> current(n), winner(n);
    std::vector<Key> best_keys;
    std::vector<bool> used(gt.size(), false);
    std::function<void(std::size_t)> visit = [&](std::size_t depth) {
        if (depth == n) {
            std::vector<Key> keys;
            for (const auto p : rank) keys.push_back(key(p, current[p]));
            if (best_keys.empty() || keys > best_keys) {
                best_keys = keys;
                winner = current;
            }
            return;
        }
        const auto p = rank[depth];
        current[p].reset();
        visit(depth + 1);
        for (std::size_t g = 0; g < gt.size(); ++g) {
            if (used[g] || oracle_iou(preds[p], gt[g]) < threshold) continue;
            used[g] = true;
            current[p] = g;
            visit(depth + 1);
            current[p].reset();
            used[g] = false;
        }
    };
    visit(0);
    return winner;
}

}  // namespace fracmorph::testing
