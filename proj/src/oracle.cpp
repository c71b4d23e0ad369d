#include "fracmorph/oracle.hpp"

#include "fracmorph/errors.hpp"

#include <algorithm>
#include <random>

namespace fracmorph {

std::optional<OracleMode> parse_oracle_mode(std::string_view name) {
    if (name == "perfect") return OracleMode::Perfect;
    if (name == "drop-k") return OracleMode::DropK;
    if (name == "jitter") return OracleMode::Jitter;
    if (name == "spurious" || name == "spurious-n") return OracleMode::Spurious;
    return std::nullopt;
}

namespace {

Prediction perfect(const PatchLabel& p) { return {p.image_id, p.box_rect.as_box(), 1.0, p.morphology}; }

bool overlaps(const PixelBox& a, const PixelBox& b) {
    return std::min(a.x1, b.x1) > std::max(a.x0, b.x0) && std::min(a.y1, b.y1) > std::max(a.y0, b.y0);
}

// Scans a grid of square cells row by row and keeps the first n cells that
// overlap nothing already occupied. Cell size shrinks until n fit.
std::vector<PixelBox> place_spurious(const ImageSize& size, std::vector<PixelBox> occupied, std::size_t n) {
    std::vector<PixelBox> placed;
    if (n == 0) return placed;
    for (int cell = std::max(1, std::min(size.width, size.height) / 8); cell >= 1; cell /= 2) {
        placed.clear();
        auto taken = occupied;
        for (int y = 0; y + cell <= size.height && placed.size() < n; y += cell) {
            for (int x = 0; x + cell <= size.width && placed.size() < n; x += cell) {
                const PixelBox candidate{double(x), double(y), double(x + cell), double(y + cell)};
                if (std::none_of(taken.begin(), taken.end(), [&](const PixelBox& b) { return overlaps(b, candidate); })) {
                    placed.push_back(candidate);
                    taken.push_back(candidate);
                }
            }
        }
        if (placed.size() == n) return placed;
        if (cell == 1) break;
    }
    throw Error("cannot place " + std::to_string(n) + " non-overlapping spurious boxes");
}

}  // namespace

std::vector<Prediction> make_oracle_predictions(const std::vector<PatchLabel>& patches,
                                                const std::map<std::string, ImageSize>& image_sizes,
                                                const OracleOptions& options) {
    std::vector<Prediction> out;
    switch (options.mode) {
        case OracleMode::Perfect:
            for (const auto& p : patches) out.push_back(perfect(p));
            break;

        case OracleMode::DropK: {
            std::size_t dropped = 0;
            for (const auto& p : patches) {
                const bool eligible = !options.drop_class || p.morphology == *options.drop_class;
                if (eligible && (!options.k || dropped < *options.k)) {
                    ++dropped;
                    continue;
                }
                out.push_back(perfect(p));
            }
            break;
        }

        case OracleMode::Jitter: {
            std::mt19937_64 rng(options.seed);
            std::normal_distribution<double> noise(0.0, options.sigma > 0 ? options.sigma : 1.0);
            std::uniform_real_distribution<double> conf(0.0, 1.0);
            for (const auto& p : patches) {
                auto pred = perfect(p);
                if (options.sigma > 0) {
                    pred.box.x0 += noise(rng);
                    pred.box.y0 += noise(rng);
                    pred.box.x1 += noise(rng);
                    pred.box.y1 += noise(rng);
                    if (pred.box.x1 < pred.box.x0) std::swap(pred.box.x0, pred.box.x1);
                    if (pred.box.y1 < pred.box.y0) std::swap(pred.box.y0, pred.box.y1);
                }
                pred.confidence = conf(rng);
                out.push_back(std::move(pred));
            }
            break;
        }

        case OracleMode::Spurious: {
            if (options.spurious_class.empty()) throw Error("spurious mode needs a class for spurious boxes");
            if (!(options.spurious_confidence >= 0.0 && options.spurious_confidence <= 1.0)) {
                throw Error("spurious confidence must lie in [0,1]");
            }
            std::map<std::string, std::vector<PixelBox>> gt;
            for (const auto& p : patches) {
                out.push_back(perfect(p));
                gt[p.image_id].push_back(p.box_rect.as_box());
            }
            for (const auto& [id, size] : image_sizes) {
                const auto it = gt.find(id);
                for (const auto& box :
                     place_spurious(size, it == gt.end() ? std::vector<PixelBox>{} : it->second, options.n)) {
                    out.push_back({id, box, options.spurious_confidence, options.spurious_class});
                }
            }
            break;
        }
    }
    return out;
}

std::vector<MultilabelTarget> make_oracle_multilabel(const std::vector<MultilabelTarget>& targets,
                                                     const OracleOptions& options) {
    std::vector<MultilabelTarget> out = targets;
    if (options.mode == OracleMode::DropK) {
        std::size_t dropped = 0;
        for (auto& t : out) {
            if (t.present.empty()) continue;
            if (options.k && dropped >= *options.k) break;
            t.present.clear();
            ++dropped;
        }
    } else if (options.mode != OracleMode::Perfect) {
        throw Error("multilabel oracle supports only perfect and drop-k");
    }
    return out;
}

}  // namespace fracmorph
