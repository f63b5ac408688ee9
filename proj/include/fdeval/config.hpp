#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdeval/datamodel.hpp"

namespace fdeval {

enum class MethodKind {
    Mean,
    NonBoundary,
    MeanForeground,
    PatchMin,
    PairwiseDsc,
    RfSimple,
    Mahalanobis,
    Oracle,
};

MethodKind parse_method_kind(const std::string& name);
const char* method_kind_name(MethodKind kind);

struct RiskConfig {
    std::string name;
    RiskSpec spec;
};

struct MethodConfig {
    std::string name;
    MethodKind kind = MethodKind::Mean;
    int width = 4;        // non_boundary, mean_foreground, rf_simple
    int patch_size = 10;  // patch_min
    std::optional<std::filesystem::path> model_path;      // rf_simple, mahalanobis
    std::optional<std::filesystem::path> train_manifest;  // fit fresh instead
    bool report_mae = false;  // on for methods whose scores estimate the metric
};

struct BootstrapConfig {
    bool enabled = false;
    int n_bootstrap = 500;
};

/// Evaluation configuration. Parsed strictly: unknown keys anywhere in the
/// document are rejected.
struct EvalConfig {
    std::vector<RiskConfig> risks;
    std::vector<MethodConfig> methods;
    BootstrapConfig bootstrap;
    double f_auroc_threshold = 0.5;
    bool per_class_risks = false;
    std::uint64_t seed = 0;
    bool strict = false;
    int threads = 0;  // 0 = hardware concurrency

    nlohmann::ordered_json echo;  // original document, embedded in reports

    static EvalConfig from_json(const nlohmann::ordered_json& doc,
                                const std::filesystem::path& base_dir);
    static EvalConfig from_file(const std::filesystem::path& path);
};

}  // namespace fdeval
