#include "binaq/dataset.hpp"

#include <algorithm>
#include <map>

#include "binaq/errors.hpp"
#include "binaq/image_io.hpp"

namespace binaq {

namespace {

bool decodable(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == ".png" || ext == ".bmp" || ext == ".tif" || ext == ".tiff";
}

std::string strip_gt_suffix(std::string stem) {
    if (stem.size() > 3) {
        std::string tail = stem.substr(stem.size() - 3);
        for (auto& c : tail) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (tail == "_gt") {
            stem.erase(stem.size() - 3);
        }
    }
    return stem;
}

std::map<std::string, std::filesystem::path> index_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw IoError("not a directory: " + dir.string());
    }
    std::map<std::string, std::filesystem::path> byid;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file() || !decodable(entry.path())) continue;
        const std::string id = strip_gt_suffix(entry.path().stem().string());
        auto [it, inserted] = byid.emplace(id, entry.path());
        if (!inserted) {
            throw DataError("ambiguous id '" + id + "' in " + dir.string() + ": " +
                            it->second.filename().string() + " and " +
                            entry.path().filename().string());
        }
    }
    return byid;
}

} // namespace

std::vector<DatasetEntry> discover_dataset(const std::filesystem::path& images_dir,
                                           const std::filesystem::path& gt_dir) {
    const auto images = index_directory(images_dir);
    const auto gts = index_directory(gt_dir);

    std::string orphan_report;
    for (const auto& [id, path] : images) {
        if (!gts.count(id)) {
            orphan_report += "\n  image without ground truth: " + path.filename().string();
        }
    }
    for (const auto& [id, path] : gts) {
        if (!images.count(id)) {
            orphan_report += "\n  ground truth without image: " + path.filename().string();
        }
    }
    if (!orphan_report.empty()) {
        throw DataError("dataset matching failed between " + images_dir.string() + " and " +
                        gt_dir.string() + orphan_report);
    }
    if (images.empty()) {
        throw DataError("no decodable images found in " + images_dir.string());
    }

    std::vector<DatasetEntry> entries;
    entries.reserve(images.size());
    for (const auto& [id, path] : images) {
        const RasterImage img = load_image(path);
        const RasterImage gt = load_image(gts.at(id));
        if (img.width() != gt.width() || img.height() != gt.height()) {
            throw ShapeError("entry '" + id + "': image is " + std::to_string(img.width()) + "x" +
                             std::to_string(img.height()) + " but ground truth is " +
                             std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
        }
        entries.push_back({id, path, gts.at(id)});
    }
    // std::map iteration already sorted by id.
    return entries;
}

} // namespace binaq
