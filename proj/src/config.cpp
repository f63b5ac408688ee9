#include "fdeval/config.hpp"

#include <fstream>
#include <set>

namespace fdeval {

using json = nlohmann::ordered_json;

MethodKind parse_method_kind(const std::string& name) {
    if (name == "mean") return MethodKind::Mean;
    if (name == "non_boundary") return MethodKind::NonBoundary;
    if (name == "mean_foreground") return MethodKind::MeanForeground;
    if (name == "patch_min") return MethodKind::PatchMin;
    if (name == "pairwise_dsc") return MethodKind::PairwiseDsc;
    if (name == "rf_simple") return MethodKind::RfSimple;
    if (name == "mahalanobis") return MethodKind::Mahalanobis;
    if (name == "oracle") return MethodKind::Oracle;
    throw EvalError(ErrorCode::BadConfig, "unknown method kind '" + name + "'");
}

const char* method_kind_name(MethodKind kind) {
    switch (kind) {
        case MethodKind::Mean: return "mean";
        case MethodKind::NonBoundary: return "non_boundary";
        case MethodKind::MeanForeground: return "mean_foreground";
        case MethodKind::PatchMin: return "patch_min";
        case MethodKind::PairwiseDsc: return "pairwise_dsc";
        case MethodKind::RfSimple: return "rf_simple";
        case MethodKind::Mahalanobis: return "mahalanobis";
        case MethodKind::Oracle: return "oracle";
    }
    return "unknown";
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (allowed.find(key) == allowed.end()) {
            throw EvalError(ErrorCode::BadConfig, "unknown key '" + key + "' in " + where);
        }
    }
}

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

RiskConfig parse_risk(const json& doc) {
    reject_unknown_keys(doc, {"metric", "name", "tolerance", "class_tolerance", "class_subset"},
                        "risks[]");
    RiskConfig risk;
    risk.spec.metric = parse_risk_metric(doc.at("metric").get<std::string>());
    risk.name = doc.value("name", std::string(risk_metric_name(risk.spec.metric)));
    if (!valid_name(risk.name)) {
        throw EvalError(ErrorCode::BadConfig,
                        "risk name '" + risk.name + "' must match [A-Za-z0-9_-]+");
    }
    if (doc.contains("tolerance")) {
        risk.spec.nsd_tolerance = doc.at("tolerance").get<double>();
    }
    if (doc.contains("class_tolerance")) {
        for (const auto& [key, value] : doc.at("class_tolerance").items()) {
            risk.spec.nsd_class_tolerance[static_cast<std::int32_t>(std::stol(key))] =
                value.get<double>();
        }
    }
    if (doc.contains("class_subset")) {
        risk.spec.class_subset = doc.at("class_subset").get<std::vector<std::int32_t>>();
    }
    risk.spec.validate();
    return risk;
}

MethodConfig parse_method(const std::string& name, const json& doc,
                          const std::filesystem::path& base_dir) {
    if (!valid_name(name)) {
        throw EvalError(ErrorCode::BadConfig,
                        "method name '" + name + "' must match [A-Za-z0-9_-]+");
    }
    reject_unknown_keys(
        doc, {"kind", "width", "patch_size", "model", "train_manifest", "report_mae"},
        "methods." + name);
    MethodConfig method;
    method.name = name;
    method.kind = parse_method_kind(doc.value("kind", name));
    method.width = doc.value("width", 4);
    method.patch_size = doc.value("patch_size", 10);
    // scores of these two live on the metric scale, so MAE is meaningful
    method.report_mae =
        method.kind == MethodKind::PairwiseDsc || method.kind == MethodKind::RfSimple;
    if (doc.contains("report_mae")) method.report_mae = doc.at("report_mae").get<bool>();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() ? base_dir / path : path;
    };
    if (doc.contains("model")) {
        method.model_path = resolve(doc.at("model").get<std::string>());
    }
    if (doc.contains("train_manifest")) {
        method.train_manifest = resolve(doc.at("train_manifest").get<std::string>());
    }
    bool trained = method.kind == MethodKind::RfSimple || method.kind == MethodKind::Mahalanobis;
    if (trained && !method.model_path && !method.train_manifest) {
        throw EvalError(ErrorCode::BadConfig,
                        "method '" + name + "' needs either 'model' or 'train_manifest'");
    }
    if (!trained && (method.model_path || method.train_manifest)) {
        throw EvalError(ErrorCode::BadConfig,
                        "method '" + name + "' does not take a model");
    }
    return method;
}

}  // namespace

EvalConfig EvalConfig::from_json(const json& doc, const std::filesystem::path& base_dir) {
    reject_unknown_keys(doc,
                        {"risks", "methods", "bootstrap", "f_auroc_threshold",
                         "per_class_risks", "seed", "strict", "threads"},
                        "config");
    EvalConfig config;
    config.echo = doc;

    if (!doc.contains("risks") || !doc.at("risks").is_array() || doc.at("risks").empty()) {
        throw EvalError(ErrorCode::BadConfig, "config needs a non-empty 'risks' array");
    }
    std::set<std::string> risk_names;
    for (const auto& jrisk : doc.at("risks")) {
        auto risk = parse_risk(jrisk);
        if (!risk_names.insert(risk.name).second) {
            throw EvalError(ErrorCode::BadConfig, "duplicate risk name '" + risk.name + "'");
        }
        config.risks.push_back(std::move(risk));
    }

    if (!doc.contains("methods") || !doc.at("methods").is_object() ||
        doc.at("methods").empty()) {
        throw EvalError(ErrorCode::BadConfig, "config needs a non-empty 'methods' object");
    }
    for (const auto& [name, jmethod] : doc.at("methods").items()) {
        config.methods.push_back(parse_method(name, jmethod, base_dir));
    }

    if (doc.contains("bootstrap")) {
        const auto& jb = doc.at("bootstrap");
        reject_unknown_keys(jb, {"enabled", "n"}, "bootstrap");
        config.bootstrap.enabled = jb.value("enabled", true);
        config.bootstrap.n_bootstrap = jb.value("n", 500);
        if (config.bootstrap.n_bootstrap < 1) {
            throw EvalError(ErrorCode::BadConfig, "bootstrap.n must be >= 1");
        }
    }

    config.f_auroc_threshold = doc.value("f_auroc_threshold", 0.5);
    config.per_class_risks = doc.value("per_class_risks", false);
    config.seed = doc.value("seed", std::uint64_t{0});
    config.strict = doc.value("strict", false);
    config.threads = doc.value("threads", 0);
    return config;
}

EvalConfig EvalConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw EvalError(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw EvalError(ErrorCode::BadConfig,
                        "config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return from_json(doc, path.parent_path());
}

}  // namespace fdeval
