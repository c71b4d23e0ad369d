#include "fracmorph/split.hpp"

#include "fracmorph/errors.hpp"
#include "fracmorph/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <set>

namespace fracmorph {

std::array<std::size_t, 3> split_sizes(std::size_t total, const SplitRatios& ratios) {
    const double sum = ratios[0] + ratios[1] + ratios[2];
    if (!(ratios[0] > 0 && ratios[1] > 0 && ratios[2] > 0)) {
        throw Error("split ratios must be positive");
    }
    std::array<std::size_t, 3> sizes{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < 3; ++s) {
        const double exact = static_cast<double>(total) * ratios[s] / sum;
        sizes[s] = static_cast<std::size_t>(std::floor(exact));
        remainder[s] = exact - std::floor(exact);
        assigned += sizes[s];
    }
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < total; ++k, ++assigned) {
        ++sizes[order[k % 3]];
    }
    return sizes;
}

namespace {

constexpr std::array<Split, 3> kSplits{Split::Train, Split::Val, Split::Test};

// Fisher-Yates on the raw engine output so the permutation does not depend
// on the standard library's distribution implementation.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng() % i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

// Moves images out of splits that ended above their target size into splits
// below it. A move is allowed only if every label of the image stays within
// one image of its quota in both splits; among allowed moves the one that
// reduces the squared quota error most is taken (seeded order breaks ties).
void rebalance_sizes(const std::vector<std::vector<std::size_t>>& item_labels, const std::vector<std::size_t>& totals,
                     const SplitRatios& ratios, const std::array<std::size_t, 3>& sizes,
                     const std::vector<std::size_t>& order, std::vector<std::size_t>& where) {
    const double ratio_sum = ratios[0] + ratios[1] + ratios[2];
    const std::size_t n_labels = totals.size();
    std::array<std::vector<double>, 3> quota, count;
    std::array<std::size_t, 3> size{};
    for (std::size_t s = 0; s < 3; ++s) {
        quota[s].resize(n_labels);
        count[s].assign(n_labels, 0.0);
        for (std::size_t l = 0; l < n_labels; ++l) quota[s][l] = static_cast<double>(totals[l]) * ratios[s] / ratio_sum;
    }
    for (std::size_t i = 0; i < where.size(); ++i) {
        ++size[where[i]];
        for (auto l : item_labels[i]) count[where[i]][l] += 1.0;
    }

    constexpr double kSlack = 1.0 + 1e-9;
    const auto best_move = [&](std::size_t s, std::size_t t) {
        std::optional<std::size_t> pick;
        double pick_gain = 0.0;
        for (const auto i : order) {
            if (where[i] != s) continue;
            bool ok = true;
            double gain = 0.0;
            for (auto l : item_labels[i]) {
                const double ds = count[s][l] - 1.0 - quota[s][l];
                const double dt = count[t][l] + 1.0 - quota[t][l];
                if (std::abs(ds) > kSlack || std::abs(dt) > kSlack) {
                    ok = false;
                    break;
                }
                const double es = count[s][l] - quota[s][l], et = count[t][l] - quota[t][l];
                gain += es * es + et * et - ds * ds - dt * dt;
            }
            if (ok && (!pick || gain > pick_gain)) {
                pick = i;
                pick_gain = gain;
            }
        }
        return pick;
    };
    const auto move = [&](std::size_t i, std::size_t t) {
        const auto s = where[i];
        where[i] = t;
        --size[s];
        ++size[t];
        for (auto l : item_labels[i]) {
            count[s][l] -= 1.0;
            count[t][l] += 1.0;
        }
    };

    for (;;) {
        std::optional<std::size_t> from, to;
        for (std::size_t s = 0; s < 3; ++s) {
            if (size[s] > sizes[s] && !from) from = s;
            if (size[s] < sizes[s] && !to) to = s;
        }
        if (!from || !to) return;
        const auto s = *from, t = *to;

        if (const auto i = best_move(s, t)) {
            move(*i, t);
            continue;
        }
        // Two-step move through the third split.
        const auto u = 3 - s - t;
        const auto first = best_move(s, u);
        if (!first) return;
        move(*first, u);
        const auto second = best_move(u, t);
        if (!second) {
            move(*first, s);
            return;
        }
        move(*second, t);
    }
}

}  // namespace

std::map<std::string, Split> stratified_split(const std::vector<StratifyItem>& items, const SplitRatios& ratios,
                                              std::uint64_t seed) {
    const auto sizes = split_sizes(items.size(), ratios);
    const double ratio_sum = ratios[0] + ratios[1] + ratios[2];

    // Label index 0 is the stratum of label-free images.
    std::map<std::string, std::size_t> label_ids;
    std::vector<std::vector<std::size_t>> item_labels(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::set<std::string> unique(items[i].labels.begin(), items[i].labels.end());
        for (const auto& l : unique) label_ids.emplace(l, 0);
    }
    std::size_t next = 1;
    for (auto& [name, id] : label_ids) id = next++;
    const std::size_t n_labels = next;

    std::vector<std::size_t> remaining(n_labels, 0);
    for (std::size_t i = 0; i < items.size(); ++i) {
        std::set<std::size_t> ids;
        for (const auto& l : items[i].labels) ids.insert(label_ids.at(l));
        if (ids.empty()) ids.insert(0);
        item_labels[i].assign(ids.begin(), ids.end());
        for (auto id : ids) ++remaining[id];
    }

    std::array<std::vector<double>, 3> demand;
    std::array<double, 3> size_demand{};
    for (std::size_t s = 0; s < 3; ++s) {
        demand[s].resize(n_labels);
        for (std::size_t l = 0; l < n_labels; ++l) {
            demand[s][l] = static_cast<double>(remaining[l]) * ratios[s] / ratio_sum;
        }
        size_demand[s] = static_cast<double>(sizes[s]);
    }

    const auto order = seeded_permutation(items.size(), seed);
    std::vector<bool> assigned(items.size(), false);
    std::vector<std::size_t> where(items.size(), 0);
    const auto totals = remaining;
    std::size_t left = items.size();

    while (left > 0) {
        std::size_t label = n_labels;
        for (std::size_t l = 0; l < n_labels; ++l) {
            if (remaining[l] > 0 && (label == n_labels || remaining[l] < remaining[label])) label = l;
        }
        if (label == n_labels) {
            throw InvariantViolation("stratified_split: unassigned items without labels");
        }

        for (const auto i : order) {
            if (assigned[i]) continue;
            const auto& labels = item_labels[i];
            if (!std::binary_search(labels.begin(), labels.end(), label)) continue;

            std::size_t best = 0;
            for (std::size_t s = 1; s < 3; ++s) {
                if (demand[s][label] > demand[best][label] ||
                    (demand[s][label] == demand[best][label] && size_demand[s] > size_demand[best])) {
                    best = s;
                }
            }
            assigned[i] = true;
            size_demand[best] -= 1.0;
            --left;
            for (auto l : labels) {
                demand[best][l] -= 1.0;
                --remaining[l];
            }
            where[i] = best;
        }
    }

    rebalance_sizes(item_labels, totals, ratios, sizes, order, where);

    std::map<std::string, Split> result;
    for (std::size_t i = 0; i < items.size(); ++i) result[items[i].image_id] = kSplits[where[i]];
    return result;
}

void apply_split(std::vector<ImageRecord>& records, const std::map<std::string, Split>& assignment) {
    for (auto& r : records) {
        if (const auto it = assignment.find(r.image_id); it != assignment.end()) r.split = it->second;
    }
}

std::string render_split_manifest(const std::vector<std::string>& ids, const std::map<std::string, Split>& assignment) {
    std::string out;
    for (const auto& id : ids) {
        const auto it = assignment.find(id);
        out += id;
        out += '\t';
        out += to_string(it == assignment.end() ? Split::Unassigned : it->second);
        out += '\n';
    }
    return out;
}

std::map<std::string, Split> parse_split_manifest(std::string_view content, const std::string& source) {
    std::map<std::string, Split> out;
    std::size_t line_no = 0;
    for (const auto& line : split(content, '\n')) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line, '\t');
        const auto where = source + ":" + std::to_string(line_no);
        if (fields.size() != 2) throw SchemaError(where + ": expected image_id<TAB>split");
        const auto s = parse_split(trim(fields[1]));
        if (!s) throw SchemaError(where + ": unknown split '" + fields[1] + "'");
        if (!out.emplace(trim(fields[0]), *s).second) throw SchemaError(where + ": duplicate image id");
    }
    return out;
}

std::map<std::string, Split> load_split_manifest(const std::filesystem::path& path) {
    return parse_split_manifest(read_file(path), path.string());
}

ClassWeights inverse_frequency_weights(const std::map<std::string, std::size_t>& counts) {
    if (counts.empty()) throw Error("inverse_frequency_weights: no classes");
    double inv_sum = 0.0;
    for (const auto& [name, n] : counts) {
        if (n == 0) throw ZeroCount("class '" + name + "' has zero samples");
        inv_sum += 1.0 / static_cast<double>(n);
    }
    const double k = static_cast<double>(counts.size()) / inv_sum;

    ClassWeights w;
    for (const auto& [name, n] : counts) {
        w.loss[name] = k / static_cast<double>(n);
        // Every class carries the same total mass K, so the normaliser is C*K.
        w.sample[name] = 1.0 / (static_cast<double>(counts.size()) * static_cast<double>(n));
    }
    return w;
}

}  // namespace fracmorph
