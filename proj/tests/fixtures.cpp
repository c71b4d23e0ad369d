#include "fixtures.hpp"

#include "fracmorph/raster.hpp"
#include "fracmorph/text.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>

namespace fracmorph::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = fs::temp_directory_path() /
            ("fracmorph_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string illustrative_mapping_csv() { return read_file(fs::path(FRACMORPH_SOURCE_DIR) / "data/mapping_illustrative.csv"); }

MappingTable illustrative_mapping() { return MappingTable::parse(illustrative_mapping_csv(), "mapping_illustrative.csv"); }

PixelRect slot_rect(int slot) {
    static constexpr int kX[4] = {4, 22, 44, 62};
    return {kX[slot], 20, kX[slot] + 12, 32};
}

namespace {

LabelImage fixture_mask() {
    LabelImage mask(kImageWidth, kImageHeight, 0);
    for (int y = 0; y < 50; ++y) {
        for (int x = 0; x < kImageWidth; ++x) {
            const bool radius = x < 40;
            const bool epiphysis = y < 10;
            mask.at(x, y) = static_cast<std::uint8_t>(radius ? (epiphysis ? 3 : 1) : (epiphysis ? 4 : 2));
        }
    }
    return mask;
}

GrayImage fixture_image() {
    GrayImage img(kImageWidth, kImageHeight);
    for (int y = 0; y < kImageHeight; ++y) {
        for (int x = 0; x < kImageWidth; ++x) img.at(x, y) = static_cast<float>((x * 3 + y * 2) % 256);
    }
    return img;
}

std::string label_line(int cls, const PixelRect& r) {
    const double W = kImageWidth, H = kImageHeight;
    std::ostringstream ss;
    ss << cls << ' ' << format_double((r.x0 + r.x1) / 2.0 / W) << ' ' << format_double((r.y0 + r.y1) / 2.0 / H) << ' '
       << format_double(r.width() / W) << ' ' << format_double(r.height() / H) << '\n';
    return ss.str();
}

const std::vector<std::string> kRadiusCodes = {"23r-M/3.1", "22r-D/4.1", "23r-E/7",   "23r-M/2.1", "22r-D/2.1",
                                               "23r-E/1",   "23r-E/2.1", "22r-D/5.1", "23r-M/3.2"};
const std::vector<std::string> kUlnaCodes = {"23u-M/3.1", "22u-D/4.1", "23u-E/7",   "23u-M/2.1", "22u-D/2.1",
                                             "23u-E/1",   "23u-E/2.1", "22u-D/5.1", "23u-M/3.2"};

}  // namespace

void write_dataset(const fs::path& root, const std::vector<FixtureImage>& images) {
    fs::create_directories(root / "labels");
    fs::create_directories(root / "masks");
    fs::create_directories(root / "images");
    const auto mask = fixture_mask();
    const auto image = fixture_image();

    std::string meta = "filestem,ao_classification\n";
    for (const auto& img : images) {
        std::string codes;
        for (const auto& c : img.codes) {
            if (!codes.empty()) codes += ';';
            codes += c;
        }
        meta += img.id + "," + codes + "\n";

        std::string labels;
        for (int slot : img.box_slots) labels += label_line(3, slot_rect(slot));
        // A non-fracture annotation that the loader must skip.
        labels += label_line(8, {0, 52, 10, 58});
        write_file_atomic(root / "labels" / (img.id + ".txt"), labels);
        write_label_png(root / "masks" / (img.id + ".png"), mask);
        write_gray_png(root / "images" / (img.id + ".png"), image);
    }
    write_file_atomic(root / "dataset.csv", meta);
}

std::vector<FixtureImage> random_images(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<FixtureImage> out;
    for (std::size_t i = 0; i < count; ++i) {
        FixtureImage img;
        char id[32];
        std::snprintf(id, sizeof id, "img_%04zu", i);
        img.id = id;
        if (rng() % 8 == 0) {
            img.box_slots = {static_cast<int>(rng() % 2), 2 + static_cast<int>(rng() % 2)};
            img.codes = {rng() % 2 ? "22-D/4.1" : "22-D/2.1"};
        } else {
            const auto n = rng() % 4;
            std::vector<int> slots{0, 1, 2, 3};
            for (std::size_t k = 0; k < n; ++k) {
                const auto pick = k + rng() % (slots.size() - k);
                std::swap(slots[k], slots[pick]);
                const int slot = slots[k];
                img.box_slots.push_back(slot);
                const auto& pool = slot < 2 ? kRadiusCodes : kUlnaCodes;
                img.codes.push_back(pool[rng() % pool.size()]);
            }
        }
        out.push_back(std::move(img));
    }
    return out;
}

fs::path write_config(const fs::path& dir, const std::string& extra_json) {
    write_file_atomic(dir / "mapping.csv", illustrative_mapping_csv());
    std::string json = R"({
  "dataset": {"root": "dataset"},
  "mapping_table": "mapping.csv",
  "split": {"ratios": [8, 1, 1], "seed": 7},
  "output_dir": "out")";
    if (!extra_json.empty()) json += ",\n  " + extra_json;
    json += "\n}\n";
    write_file_atomic(dir / "config.json", json);
    return dir / "config.json";
}

CliResult run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"fracmorph"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace fracmorph::testing
