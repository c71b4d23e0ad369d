#pragma once

#include "fracmorph/dataset.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace fracmorph {

using SplitRatios = std::array<double, 3>;  // train, val, test

/// Largest-remainder apportionment of `total` items to the three splits.
/// Remainder ties go to the earlier split.
std::array<std::size_t, 3> split_sizes(std::size_t total, const SplitRatios& ratios);

/// Input to the stratifier: one entry per image with the multiset of its
/// morphology labels (duplicates allowed, empty for fracture-free images).
struct StratifyItem {
    std::string image_id;
    std::vector<std::string> labels;
};

/// Iterative stratification. Label-free images form their own stratum.
///
/// Repeatedly takes the label with the fewest unassigned images and places
/// each of its images, in seeded-shuffle order, into the split with the
/// largest remaining demand for that label (ties: larger remaining size
/// demand, then train < val < test). Afterwards images are moved between
/// splits towards the sizes of split_sizes(), as long as each move keeps
/// every label of the moved image within one image of its quota; with
/// multi-label images a size may stay off by one. The result is a pure
/// function of (items, ratios, seed).
std::map<std::string, Split> stratified_split(const std::vector<StratifyItem>& items, const SplitRatios& ratios,
                                              std::uint64_t seed);

/// Writes assignments onto records in place; unknown ids are left untouched.
void apply_split(std::vector<ImageRecord>& records, const std::map<std::string, Split>& assignment);

/// One `image_id<TAB>split` line per entry, in the given id order.
std::string render_split_manifest(const std::vector<std::string>& ids, const std::map<std::string, Split>& assignment);
std::map<std::string, Split> parse_split_manifest(std::string_view content, const std::string& source = "<memory>");
std::map<std::string, Split> load_split_manifest(const std::filesystem::path& path);

struct ClassWeights {
    std::map<std::string, double> loss;    // mean over classes is 1
    std::map<std::string, double> sample;  // per-sample weight of a sample of that class
};

/// loss_c = K / n_c with K such that the loss weights average to 1.
/// sample_c = loss_c / sum_k n_k loss_k, so the weights of all samples sum to 1.
/// Throws ZeroCount if any count is zero, Error if `counts` is empty.
ClassWeights inverse_frequency_weights(const std::map<std::string, std::size_t>& counts);

}  // namespace fracmorph
