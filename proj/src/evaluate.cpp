#include "fdeval/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "fdeval/aggregation.hpp"
#include "fdeval/pairwise.hpp"
#include "fdeval/segmetrics.hpp"
#include "fdeval/volumeio.hpp"

namespace fdeval {

const char* const kToolVersion = "0.1.0";

using json = nlohmann::ordered_json;

std::string format_double(double value) { return json(value).dump(); }

namespace {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw EvalError(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw EvalError(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

struct PreparedMethod {
    MethodConfig config;
    std::optional<ForestModel> forest;
    std::optional<GaussianModel> gaussian;
};

PreparedMethod prepare_method(const MethodConfig& config, std::uint64_t seed) {
    PreparedMethod prepared{config, std::nullopt, std::nullopt};
    if (config.kind == MethodKind::RfSimple) {
        if (config.model_path) {
            prepared.forest = ForestModel::from_json_string(read_text_file(*config.model_path));
        } else {
            prepared.forest = fit_rf_from_manifest(read_manifest(*config.train_manifest),
                                                   config.width, 100, seed);
        }
    } else if (config.kind == MethodKind::Mahalanobis) {
        if (config.model_path) {
            prepared.gaussian =
                GaussianModel::from_json_string(read_text_file(*config.model_path));
        } else {
            prepared.gaussian = fit_mahalanobis_from_manifest(read_manifest(*config.train_manifest));
        }
    }
    return prepared;
}

struct CaseResult {
    CaseRecord record;
    std::vector<ErrorEntry> errors;
    bool usable = false;
};

CaseResult evaluate_case(const ManifestRow& row, const EvalConfig& config,
                         const std::vector<PreparedMethod>& methods) {
    CaseResult result;
    result.record.case_id = row.case_id;
    result.record.fold = row.fold;
    result.record.domain = row.domain;
    result.record.is_ood = row.is_ood;

    std::optional<LabelMap> pred;
    try {
        LabelMap gt = read_label_map(row.gt_path, row.spacing, row.label_mode, row.class_ids);
        pred = read_label_map(row.pred_path, row.spacing, row.label_mode, row.class_ids);
        for (const auto& risk : config.risks) {
            result.record.risks[risk.name] = compute_risk(*pred, gt, risk.spec);
            if (config.per_class_risks && risk.spec.metric != RiskMetric::GeneralizedDsc) {
                for (auto cid : row.class_ids) {
                    RiskSpec single = risk.spec;
                    single.class_subset = std::vector<std::int32_t>{cid};
                    result.record.risks[risk.name + ".class_" + std::to_string(cid)] =
                        compute_risk(*pred, gt, single);
                }
            }
        }
    } catch (const std::exception& e) {
        result.errors.push_back({row.case_id, "case", e.what()});
        return result;
    }
    result.usable = true;

    // confidence map shared across the aggregation methods, loaded on demand
    std::optional<ConfidenceMap> conf;
    auto confidence_map = [&]() -> const ConfidenceMap& {
        if (!conf) {
            if (!row.conf_path) {
                throw EvalError(ErrorCode::UnresolvedPath,
                                "case has no conf_path but an aggregation method is configured");
            }
            conf = read_confidence_map(*row.conf_path);
            validate_conf_pair(*conf, *pred);
        }
        return *conf;
    };

    for (const auto& prepared : methods) {
        const auto& m = prepared.config;
        try {
            double kappa = 0.0;
            switch (m.kind) {
                case MethodKind::Mean:
                    kappa = agg_mean(confidence_map());
                    break;
                case MethodKind::NonBoundary:
                    kappa = agg_non_boundary(confidence_map(), *pred, m.width);
                    break;
                case MethodKind::MeanForeground:
                    kappa = agg_mean_foreground(confidence_map(), *pred, m.width);
                    break;
                case MethodKind::PatchMin:
                    kappa = agg_patch_min(confidence_map(), m.patch_size);
                    break;
                case MethodKind::PairwiseDsc: {
                    if (row.sample_paths.size() < 2) {
                        throw EvalError(ErrorCode::TooFewSamples,
                                        "pairwise DSC needs at least 2 sample_paths");
                    }
                    std::vector<LabelMap> samples;
                    samples.reserve(row.sample_paths.size());
                    for (const auto& p : row.sample_paths) {
                        samples.push_back(
                            read_label_map(p, row.spacing, row.label_mode, row.class_ids));
                    }
                    kappa = pairwise_dsc(samples);
                    break;
                }
                case MethodKind::RfSimple: {
                    auto features = simple_features(confidence_map(), *pred, m.width);
                    kappa = rf_confidence(*prepared.forest, features);
                    break;
                }
                case MethodKind::Mahalanobis: {
                    if (!row.feature_path) {
                        throw EvalError(ErrorCode::UnresolvedPath,
                                        "case has no feature_path for the Mahalanobis method");
                    }
                    kappa = mahalanobis_confidence(*prepared.gaussian,
                                                   read_feature_values(*row.feature_path));
                    break;
                }
                case MethodKind::Oracle:
                    // diagnostic: perfect ranking on the first configured risk
                    kappa = -result.record.risks.at(config.risks.front().name);
                    break;
            }
            result.record.confidences[m.name] = kappa;
        } catch (const std::exception& e) {
            result.errors.push_back({row.case_id, m.name, e.what()});
        }
    }
    return result;
}

MethodSummary summarize(const std::string& method_name, const std::string& risk_name,
                        const std::vector<double>& risks, const std::vector<double>& confs,
                        const std::vector<std::uint8_t>& is_ood, const EvalConfig& config,
                        bool report_mae) {
    MethodSummary s;
    s.method = method_name;
    s.risk = risk_name;
    s.n = risks.size();
    s.curve = rc_curve(risks, confs);
    s.aurc_value = aurc(s.curve);
    s.aurc_random_value = aurc_random(risks);
    s.aurc_optimal_value = aurc_optimal(risks);
    try {
        s.naurc_value = naurc(s.aurc_value, s.aurc_random_value, s.aurc_optimal_value);
    } catch (const EvalError&) {
    }
    try {
        s.spearman_value = spearman(confs, risks);
    } catch (const EvalError&) {
    }
    try {
        s.pearson_value = pearson(confs, risks);
    } catch (const EvalError&) {
    }
    try {
        s.f_auroc_value = f_auroc(risks, confs, config.f_auroc_threshold);
    } catch (const EvalError&) {
    }
    try {
        s.ood_auroc_value = ood_auroc(is_ood, confs);
    } catch (const EvalError&) {
    }
    if (report_mae) {
        std::vector<double> metric(risks.size());
        for (std::size_t i = 0; i < risks.size(); ++i) metric[i] = 1.0 - risks[i];
        s.mae_value = mae(confs, metric);
    }
    s.curve_csv = "curves/" + method_name + "__" + risk_name + ".csv";
    return s;
}

}  // namespace

ForestModel fit_rf_from_manifest(const Manifest& manifest, int width, int n_trees,
                                 std::uint64_t seed) {
    std::size_t n = manifest.rows.size();
    if (n < 5) {
        throw EvalError(ErrorCode::TooFewSamples, "forest training manifest needs >= 5 rows");
    }
    const auto& class_ids = manifest.rows.front().class_ids;
    Matrix features(n, simple_feature_schema().size());
    Matrix targets(n, class_ids.size() + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = manifest.rows[i];
        if (!row.conf_path) {
            throw EvalError(ErrorCode::UnresolvedPath,
                            "training row '" + row.case_id + "' has no conf_path");
        }
        LabelMap gt = read_label_map(row.gt_path, row.spacing, row.label_mode, row.class_ids);
        LabelMap pred =
            read_label_map(row.pred_path, row.spacing, row.label_mode, row.class_ids);
        ConfidenceMap conf = read_confidence_map(*row.conf_path);
        validate_conf_pair(conf, pred);
        auto fv = simple_features(conf, pred, width);
        for (std::size_t j = 0; j < fv.values.size(); ++j) features.at(i, j) = fv.values[j];
        for (std::size_t c = 0; c < class_ids.size(); ++c) {
            targets.at(i, c) = dsc_binary(pred.class_mask(class_ids[c]),
                                          gt.class_mask(class_ids[c]));
        }
        targets.at(i, class_ids.size()) = generalized_dsc(pred, gt);
    }
    std::vector<std::string> target_schema;
    for (auto cid : class_ids) target_schema.push_back("dsc_class_" + std::to_string(cid));
    target_schema.push_back("generalized_dsc");
    return rf_fit(features, targets, simple_feature_schema(), target_schema,
                  RfOptions{n_trees, true, seed});
}

GaussianModel fit_mahalanobis_from_manifest(const Manifest& manifest, double ridge_epsilon) {
    if (manifest.rows.size() < 2) {
        throw EvalError(ErrorCode::TooFewSamples, "Gaussian training manifest needs >= 2 rows");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(manifest.rows.size());
    for (const auto& row : manifest.rows) {
        if (!row.feature_path) {
            throw EvalError(ErrorCode::UnresolvedPath,
                            "training row '" + row.case_id + "' has no feature_path");
        }
        rows.push_back(read_feature_values(*row.feature_path));
        if (rows.back().size() != rows.front().size()) {
            throw EvalError(ErrorCode::DimMismatch,
                            "feature vectors disagree on dimension at row '" + row.case_id + "'");
        }
    }
    Matrix features(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) features.at(i, j) = rows[i][j];
    }
    return mahalanobis_fit(features, ridge_epsilon);
}

EvalReport run_evaluate(const Manifest& manifest, const EvalConfig& config) {
    if (manifest.rows.empty()) {
        throw EvalError(ErrorCode::EmptyInput, "manifest has no rows");
    }

    std::vector<PreparedMethod> methods;
    methods.reserve(config.methods.size());
    for (const auto& m : config.methods) methods.push_back(prepare_method(m, config.seed));

    // bounded worker pool over cases; reduction below is in manifest order
    std::size_t n = manifest.rows.size();
    std::vector<CaseResult> results(n);
    unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            results[i] = evaluate_case(manifest.rows[i], config, methods);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    EvalReport report;
    report.version = kToolVersion;
    report.config_echo = config.echo;
    for (auto& result : results) {
        for (auto& e : result.errors) report.errors.push_back(std::move(e));
        if (result.usable) report.cases.push_back(std::move(result.record));
    }

    for (const auto& method : config.methods) {
        for (const auto& risk : config.risks) {
            std::vector<double> risks, confs;
            std::vector<std::uint8_t> is_ood;
            for (const auto& record : report.cases) {
                auto it = record.confidences.find(method.name);
                if (it == record.confidences.end()) continue;
                risks.push_back(record.risks.at(risk.name));
                confs.push_back(it->second);
                is_ood.push_back(record.is_ood ? 1 : 0);
            }
            if (risks.empty()) {
                report.errors.push_back(
                    {"", method.name, "no successful cases; summary for risk '" + risk.name +
                                          "' skipped"});
                continue;
            }
            report.summaries.push_back(summarize(method.name, risk.name, risks, confs, is_ood,
                                                 config, method.report_mae));
        }
    }

    if (config.bootstrap.enabled && !report.cases.empty()) {
        // ranking needs identical case sets per fold, so restrict to cases
        // every method scored
        std::set<int> folds;
        for (const auto& record : report.cases) folds.insert(record.fold);
        std::vector<MethodFolds> inputs;
        for (const auto& method : config.methods) {
            inputs.push_back({method.name, std::vector<FoldScores>(folds.size())});
        }
        const std::string& risk_name = config.risks.front().name;
        bool complete = true;
        std::size_t fold_idx = 0;
        for (int fold : folds) {
            std::size_t count = 0;
            for (const auto& record : report.cases) {
                if (record.fold != fold) continue;
                bool all = true;
                for (const auto& method : config.methods) {
                    if (record.confidences.find(method.name) == record.confidences.end()) {
                        all = false;
                        break;
                    }
                }
                if (!all) continue;
                ++count;
                for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
                    inputs[mi].folds[fold_idx].risks.push_back(record.risks.at(risk_name));
                    inputs[mi].folds[fold_idx].confidences.push_back(
                        record.confidences.at(config.methods[mi].name));
                }
            }
            if (count == 0) complete = false;
            ++fold_idx;
        }
        if (complete) {
            report.ranking =
                bootstrap_ranking(inputs, config.bootstrap.n_bootstrap, config.seed);
        } else {
            report.errors.push_back(
                {"", "ranking", "a fold has no cases scored by every method; ranking skipped"});
        }
    }
    return report;
}

namespace {

json optional_to_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

std::optional<double> optional_from_json(const json& v) {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

json ranking_to_json(const RankDistribution& ranking) {
    json doc;
    doc["methods"] = ranking.method_names;
    doc["n_bootstrap"] = ranking.n_bootstrap;
    doc["seed"] = ranking.seed;
    doc["median_rank"] = ranking.median_rank;
    doc["rank_counts"] = ranking.rank_counts;
    return doc;
}

RankDistribution ranking_from_json(const json& doc) {
    RankDistribution ranking;
    ranking.method_names = doc.at("methods").get<std::vector<std::string>>();
    ranking.n_bootstrap = doc.at("n_bootstrap").get<int>();
    ranking.seed = doc.at("seed").get<std::uint64_t>();
    ranking.median_rank = doc.at("median_rank").get<std::vector<double>>();
    ranking.rank_counts =
        doc.at("rank_counts").get<std::vector<std::vector<std::uint64_t>>>();
    return ranking;
}

}  // namespace

json report_to_json(const EvalReport& report) {
    json doc;
    doc["version"] = report.version;
    doc["config"] = report.config_echo;
    json cases = json::array();
    for (const auto& record : report.cases) {
        json jc;
        jc["case_id"] = record.case_id;
        jc["fold"] = record.fold;
        jc["domain"] = record.domain;
        jc["is_ood"] = record.is_ood;
        jc["risks"] = record.risks;
        jc["confidences"] = record.confidences;
        cases.push_back(std::move(jc));
    }
    doc["cases"] = std::move(cases);
    json summaries = json::array();
    for (const auto& s : report.summaries) {
        json js;
        js["method"] = s.method;
        js["risk"] = s.risk;
        js["n"] = s.n;
        js["aurc"] = s.aurc_value;
        js["aurc_random"] = s.aurc_random_value;
        js["aurc_optimal"] = s.aurc_optimal_value;
        js["naurc"] = optional_to_json(s.naurc_value);
        js["spearman"] = optional_to_json(s.spearman_value);
        js["pearson"] = optional_to_json(s.pearson_value);
        js["f_auroc"] = optional_to_json(s.f_auroc_value);
        js["ood_auroc"] = optional_to_json(s.ood_auroc_value);
        js["mae"] = optional_to_json(s.mae_value);
        js["curve_csv"] = s.curve_csv;
        summaries.push_back(std::move(js));
    }
    doc["summaries"] = std::move(summaries);
    json errors = json::array();
    for (const auto& e : report.errors) {
        errors.push_back(json{{"case_id", e.case_id}, {"method", e.method}, {"message", e.message}});
    }
    doc["errors"] = std::move(errors);
    if (report.ranking) {
        doc["ranking"] = ranking_to_json(*report.ranking);
    } else {
        doc["ranking"] = nullptr;
    }
    return doc;
}

EvalReport report_from_json(const json& doc) {
    EvalReport report;
    report.version = doc.at("version").get<std::string>();
    report.config_echo = doc.at("config");
    for (const auto& jc : doc.at("cases")) {
        CaseRecord record;
        record.case_id = jc.at("case_id").get<std::string>();
        record.fold = jc.at("fold").get<int>();
        record.domain = jc.at("domain").get<std::string>();
        record.is_ood = jc.at("is_ood").get<bool>();
        record.risks = jc.at("risks").get<std::map<std::string, double>>();
        record.confidences = jc.at("confidences").get<std::map<std::string, double>>();
        report.cases.push_back(std::move(record));
    }
    for (const auto& js : doc.at("summaries")) {
        MethodSummary s;
        s.method = js.at("method").get<std::string>();
        s.risk = js.at("risk").get<std::string>();
        s.n = js.at("n").get<std::size_t>();
        s.aurc_value = js.at("aurc").get<double>();
        s.aurc_random_value = js.at("aurc_random").get<double>();
        s.aurc_optimal_value = js.at("aurc_optimal").get<double>();
        s.naurc_value = optional_from_json(js.at("naurc"));
        s.spearman_value = optional_from_json(js.at("spearman"));
        s.pearson_value = optional_from_json(js.at("pearson"));
        s.f_auroc_value = optional_from_json(js.at("f_auroc"));
        s.ood_auroc_value = optional_from_json(js.at("ood_auroc"));
        s.mae_value = optional_from_json(js.at("mae"));
        s.curve_csv = js.at("curve_csv").get<std::string>();
        report.summaries.push_back(std::move(s));
    }
    for (const auto& je : doc.at("errors")) {
        report.errors.push_back({je.at("case_id").get<std::string>(),
                                 je.at("method").get<std::string>(),
                                 je.at("message").get<std::string>()});
    }
    if (!doc.at("ranking").is_null()) {
        report.ranking = ranking_from_json(doc.at("ranking"));
    }
    return report;
}

EvalReport read_report(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw EvalError(ErrorCode::BadValue,
                        "report '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return report_from_json(doc);
}

void emit_report(const EvalReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir / "report.json", report_to_json(report).dump(2) + "\n");

    std::string summary = "method,risk,n,aurc,naurc,aurc_random,aurc_optimal,spearman,pearson,"
                          "f_auroc,ood_auroc,mae\n";
    auto cell = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    for (const auto& s : report.summaries) {
        summary += s.method + "," + s.risk + "," + std::to_string(s.n) + "," +
                   format_double(s.aurc_value) + "," + cell(s.naurc_value) + "," +
                   format_double(s.aurc_random_value) + "," +
                   format_double(s.aurc_optimal_value) + "," + cell(s.spearman_value) + "," +
                   cell(s.pearson_value) + "," + cell(s.f_auroc_value) + "," +
                   cell(s.ood_auroc_value) + "," + cell(s.mae_value) + "\n";
    }
    write_text_file(out_dir / "summary.csv", summary);

    if (!report.summaries.empty()) {
        std::filesystem::create_directories(out_dir / "curves");
    }
    for (const auto& s : report.summaries) {
        if (s.curve.point_count() == 0) continue;  // reports loaded from disk carry no curves
        std::string rows = "coverage,selective_risk\n";
        for (std::size_t g = 0; g < s.curve.point_count(); ++g) {
            rows += format_double(s.curve.coverage[g]) + "," +
                    format_double(s.curve.selective_risk[g]) + "\n";
        }
        write_text_file(out_dir / s.curve_csv, rows);
    }

    if (report.ranking) {
        write_text_file(out_dir / "ranking.json", ranking_to_json(*report.ranking).dump(2) + "\n");
        std::string ranks = "method,median_rank\n";
        for (std::size_t m = 0; m < report.ranking->method_names.size(); ++m) {
            ranks += report.ranking->method_names[m] + "," +
                     format_double(report.ranking->median_rank[m]) + "\n";
        }
        write_text_file(out_dir / "ranking.csv", ranks);
    }
}

}  // namespace fdeval
