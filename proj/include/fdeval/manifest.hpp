#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fdeval/datamodel.hpp"

namespace fdeval {

/// One evaluation case as listed in the manifest CSV. Paths are resolved
/// against the manifest's directory at load time.
struct ManifestRow {
    std::string case_id;
    int fold = 0;
    std::string domain;
    bool is_ood = false;
    std::filesystem::path gt_path;
    std::filesystem::path pred_path;
    std::optional<std::filesystem::path> conf_path;
    std::vector<std::filesystem::path> sample_paths;
    std::optional<std::filesystem::path> feature_path;
    std::vector<double> spacing;
    LabelMode label_mode = LabelMode::Exclusive;
    std::vector<std::int32_t> class_ids;
};

struct Manifest {
    std::vector<ManifestRow> rows;
    std::filesystem::path base_dir;
};

/// Parses a manifest CSV (RFC-4180; comma separator). Required columns:
/// case_id, fold, domain, is_ood, gt_path, pred_path, spacing, label_mode,
/// class_ids. Optional: conf_path, sample_paths, feature_path. List-valued
/// cells (spacing, class_ids, sample_paths) separate entries with ';'.
/// Unknown columns are ignored. Every referenced path must exist.
Manifest read_manifest(const std::filesystem::path& path);

/// RFC-4180 record parser shared with other CSV inputs.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace fdeval
