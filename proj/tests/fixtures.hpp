#pragma once

#include "fracmorph/cli.hpp"
#include "fracmorph/mapping_table.hpp"

#include <cstdint>
#include <filesystem>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace fracmorph::testing {

/// Unique directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Contents of data/mapping_illustrative.csv (18 codes, 5 classes).
std::string illustrative_mapping_csv();
MappingTable illustrative_mapping();

/// Synthetic wrist layout used by every fixture image (80x60 px):
/// columns [0,40) radius, [40,80) ulna, rows [0,10) the respective
/// epiphysis, rows [50,60) background.
inline constexpr int kImageWidth = 80;
inline constexpr int kImageHeight = 60;

struct FixtureFracture {
    std::string code;  // as written to the metadata
    int slot = 0;      // 0,1 radius; 2,3 ulna
};

struct FixtureImage {
    std::string id;
    std::vector<int> box_slots;      // label-file order
    std::vector<std::string> codes;  // metadata order
};

/// Pixel rectangle of a box slot.
PixelRect slot_rect(int slot);

/// Writes dataset.csv, labels/, masks/, images/ under `root`.
void write_dataset(const std::filesystem::path& root, const std::vector<FixtureImage>& images);

/// Seeded random dataset: each image gets 0-3 fractures with bone-specific
/// codes from the illustrative table; roughly one in eight images carries a
/// dual-bone "22-D/4.1" or "22-D/2.1" code with one radius and one ulna box.
/// Every box has exactly one matching code, so every box yields a patch.
std::vector<FixtureImage> random_images(std::size_t count, std::uint64_t seed);

/// Writes mapping.csv and config.json under `dir` (dataset at dir/dataset,
/// outputs at dir/out). Returns the config path.
std::filesystem::path write_config(const std::filesystem::path& dir, const std::string& extra_json = "");

/// Runs the CLI in-process.
struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};
CliResult run_cli(const std::vector<std::string>& args);

}  // namespace fracmorph::testing
