#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace binaq {

// One evaluation unit: a scoreable image matched with its ground truth.
struct DatasetEntry {
    std::string id; // shared file stem, "_GT" suffix stripped
    std::filesystem::path image_path;
    std::filesystem::path gt_path;
};

// Pairs files from the two directories by stem, tolerating a _GT/_gt suffix
// and differing extensions, and dimension-checks each pair. Entries come
// back sorted by id.
// Throws DataError listing every orphan when matching fails, IoError when a
// directory is missing, ShapeError naming the entry on dimension mismatch.
std::vector<DatasetEntry> discover_dataset(const std::filesystem::path& images_dir,
                                           const std::filesystem::path& gt_dir);

} // namespace binaq
