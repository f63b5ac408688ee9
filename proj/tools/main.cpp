// Command-line front end: evaluates failure-detection methods from a manifest,
// builds risk-coverage curves, aggregates confidence maps, fits the trained
// scorers, and ranks methods across reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fdeval/aggregation.hpp"
#include "fdeval/evaluate.hpp"
#include "fdeval/pairwise.hpp"
#include "fdeval/segmetrics.hpp"
#include "fdeval/volumeio.hpp"

namespace {

using namespace fdeval;

std::vector<double> parse_spacing(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(std::stod(part));
    return out;
}

std::vector<std::int32_t> parse_class_ids(const std::string& text) {
    std::vector<std::int32_t> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(static_cast<std::int32_t>(std::stol(part)));
    return out;
}

int cmd_evaluate(const std::string& manifest_path, const std::string& config_path,
                 const std::string& out_dir, std::optional<std::uint64_t> seed, bool strict) {
    auto config = EvalConfig::from_file(config_path);
    if (seed) {
        config.seed = *seed;
        config.echo["seed"] = *seed;  // keep the report's config echo truthful
    }
    if (strict) {
        config.strict = true;
        config.echo["strict"] = true;
    }
    auto manifest = read_manifest(manifest_path);
    auto report = run_evaluate(manifest, config);
    emit_report(report, out_dir);
    std::cout << "cases: " << report.cases.size() << ", summaries: " << report.summaries.size()
              << ", errors: " << report.errors.size() << "\n";
    for (const auto& e : report.errors) {
        std::cerr << "error [" << e.case_id << "/" << e.method << "] " << e.message << "\n";
    }
    if (config.strict && !report.errors.empty()) return 1;
    return 0;
}

int cmd_rc_curve(const std::string& input_path, const std::string& out_path) {
    std::ifstream in(input_path);
    if (!in) {
        throw EvalError(ErrorCode::IoError, "cannot open '" + input_path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto records = parse_csv(buffer.str());
    if (records.empty() || records[0].size() < 2 || records[0][0] != "risk" ||
        records[0][1] != "confidence") {
        throw EvalError(ErrorCode::MissingColumn,
                        "input must be a CSV with header 'risk,confidence'");
    }
    std::vector<double> risks, confs;
    for (std::size_t r = 1; r < records.size(); ++r) {
        risks.push_back(std::stod(records[r][0]));
        confs.push_back(std::stod(records[r][1]));
    }
    auto curve = rc_curve(risks, confs);
    double a = aurc(curve);
    double rnd = aurc_random(risks);
    double opt = aurc_optimal(risks);
    std::ofstream out(out_path);
    out << "coverage,selective_risk\n";
    for (std::size_t g = 0; g < curve.point_count(); ++g) {
        out << format_double(curve.coverage[g]) << "," << format_double(curve.selective_risk[g])
            << "\n";
    }
    std::cout << "aurc," << format_double(a) << "\n";
    std::cout << "aurc_random," << format_double(rnd) << "\n";
    std::cout << "aurc_optimal," << format_double(opt) << "\n";
    try {
        std::cout << "naurc," << format_double(naurc(a, rnd, opt)) << "\n";
    } catch (const EvalError&) {
        std::cout << "naurc,\n";
    }
    return 0;
}

int cmd_aggregate(const std::string& conf_path, const std::string& pred_path,
                  const std::string& spacing_text, const std::string& mode_text,
                  const std::string& class_text, int width, int patch_size) {
    auto spacing = parse_spacing(spacing_text);
    auto mode = parse_label_mode(mode_text);
    auto class_ids = parse_class_ids(class_text);
    auto conf = read_confidence_map(conf_path);
    auto pred = read_label_map(pred_path, spacing, mode, class_ids);
    validate_conf_pair(conf, pred);
    std::cout << "mean," << format_double(agg_mean(conf)) << "\n";
    std::cout << "non_boundary," << format_double(agg_non_boundary(conf, pred, width)) << "\n";
    std::cout << "mean_foreground," << format_double(agg_mean_foreground(conf, pred, width))
              << "\n";
    std::cout << "patch_min," << format_double(agg_patch_min(conf, patch_size)) << "\n";
    return 0;
}

int cmd_pairwise(const std::vector<std::string>& sample_paths, const std::string& spacing_text,
                 const std::string& mode_text, const std::string& class_text) {
    auto spacing = parse_spacing(spacing_text);
    auto mode = parse_label_mode(mode_text);
    auto class_ids = parse_class_ids(class_text);
    std::vector<LabelMap> samples;
    for (const auto& p : sample_paths) {
        samples.push_back(read_label_map(p, spacing, mode, class_ids));
    }
    std::cout << "pairwise_dsc," << format_double(pairwise_dsc(samples)) << "\n";
    return 0;
}

int cmd_fit_rf(const std::string& manifest_path, const std::string& out_path, int width,
               int trees, std::uint64_t seed) {
    auto model = fit_rf_from_manifest(read_manifest(manifest_path), width, trees, seed);
    std::ofstream out(out_path);
    if (!out) throw EvalError(ErrorCode::IoError, "cannot write '" + out_path + "'");
    out << model.to_json_string() << "\n";
    std::cout << "wrote " << out_path << " (" << model.trees.size() << " trees)\n";
    return 0;
}

int cmd_fit_mahalanobis(const std::string& manifest_path, const std::string& out_path,
                        double ridge) {
    auto model = fit_mahalanobis_from_manifest(read_manifest(manifest_path), ridge);
    std::ofstream out(out_path);
    if (!out) throw EvalError(ErrorCode::IoError, "cannot write '" + out_path + "'");
    out << model.to_json_string() << "\n";
    std::cout << "wrote " << out_path << " (d=" << model.mean.size() << ")\n";
    return 0;
}

int cmd_rank(const std::vector<std::string>& report_paths, const std::string& risk_name,
             int n_bootstrap, std::uint64_t seed, const std::string& out_dir) {
    // each (report, fold) pair becomes one ranking fold
    std::vector<std::string> method_names;
    std::vector<MethodFolds> inputs;
    for (std::size_t r = 0; r < report_paths.size(); ++r) {
        auto report = read_report(report_paths[r]);
        if (method_names.empty()) {
            for (const auto& s : report.summaries) {
                if (std::find(method_names.begin(), method_names.end(), s.method) ==
                    method_names.end()) {
                    method_names.push_back(s.method);
                }
            }
            inputs.resize(method_names.size());
            for (std::size_t m = 0; m < method_names.size(); ++m) {
                inputs[m].name = method_names[m];
            }
        }
        std::set<int> folds;
        for (const auto& record : report.cases) folds.insert(record.fold);
        for (int fold : folds) {
            for (auto& input : inputs) input.folds.emplace_back();
            for (const auto& record : report.cases) {
                if (record.fold != fold) continue;
                bool all = true;
                for (const auto& name : method_names) {
                    if (record.confidences.find(name) == record.confidences.end()) {
                        all = false;
                        break;
                    }
                }
                if (!all || record.risks.find(risk_name) == record.risks.end()) continue;
                for (std::size_t m = 0; m < method_names.size(); ++m) {
                    inputs[m].folds.back().risks.push_back(record.risks.at(risk_name));
                    inputs[m].folds.back().confidences.push_back(
                        record.confidences.at(method_names[m]));
                }
            }
        }
    }
    auto ranking = bootstrap_ranking(inputs, n_bootstrap, seed);
    EvalReport stub;
    stub.ranking = ranking;
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(std::filesystem::path(out_dir) / "ranking.csv");
        out << "method,median_rank\n";
        for (std::size_t m = 0; m < ranking.method_names.size(); ++m) {
            out << ranking.method_names[m] << "," << format_double(ranking.median_rank[m])
                << "\n";
        }
    }
    nlohmann::ordered_json doc;
    doc["methods"] = ranking.method_names;
    doc["n_bootstrap"] = ranking.n_bootstrap;
    doc["seed"] = ranking.seed;
    doc["median_rank"] = ranking.median_rank;
    doc["rank_counts"] = ranking.rank_counts;
    std::ofstream out(std::filesystem::path(out_dir) / "ranking.json");
    out << doc.dump(2) << "\n";
    for (std::size_t m = 0; m < ranking.method_names.size(); ++m) {
        std::cout << ranking.method_names[m] << "," << format_double(ranking.median_rank[m])
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Failure-detection evaluation for image segmentation"};
    app.require_subcommand(1);

    // evaluate
    std::string manifest_path, config_path, out_dir;
    std::optional<std::uint64_t> seed_override;
    std::uint64_t seed_value = 0;
    bool strict = false;
    auto* evaluate = app.add_subcommand("evaluate", "Run the evaluation pipeline on a manifest");
    evaluate->add_option("--manifest", manifest_path, "Manifest CSV")->required();
    evaluate->add_option("--config", config_path, "Config JSON")->required();
    evaluate->add_option("--out", out_dir, "Output directory")->required();
    auto* seed_opt = evaluate->add_option("--seed", seed_value, "Override the config seed");
    evaluate->add_flag("--strict", strict, "Exit 1 when the error ledger is non-empty");

    // rc-curve
    std::string rc_input, rc_output;
    auto* rc = app.add_subcommand("rc-curve", "Risk-coverage curve and AURC family from a CSV");
    rc->add_option("--input", rc_input, "CSV with header risk,confidence")->required();
    rc->add_option("--out", rc_output, "Curve CSV to write")->required();

    // aggregate
    std::string agg_conf, agg_pred, agg_spacing, agg_mode = "exclusive", agg_classes;
    int agg_width = 4, agg_patch = 10;
    auto* agg = app.add_subcommand("aggregate", "Aggregate one confidence map to scalar scores");
    agg->add_option("--conf", agg_conf, "Confidence map NPY")->required();
    agg->add_option("--pred", agg_pred, "Prediction NPY")->required();
    agg->add_option("--spacing", agg_spacing, "Comma-separated voxel spacing")->required();
    agg->add_option("--label-mode", agg_mode, "exclusive or regions");
    agg->add_option("--class-ids", agg_classes, "Comma-separated class ids")->required();
    agg->add_option("--width", agg_width, "Boundary width in voxels");
    agg->add_option("--patch-size", agg_patch, "Patch size per axis");

    // pairwise-dice
    std::vector<std::string> pw_samples;
    std::string pw_spacing, pw_mode = "exclusive", pw_classes;
    auto* pw = app.add_subcommand("pairwise-dice", "Mean pairwise DSC of prediction samples");
    pw->add_option("samples", pw_samples, "Sample NPY files")->required()->expected(-2);
    pw->add_option("--spacing", pw_spacing, "Comma-separated voxel spacing")->required();
    pw->add_option("--label-mode", pw_mode, "exclusive or regions");
    pw->add_option("--class-ids", pw_classes, "Comma-separated class ids")->required();

    // fit-rf
    std::string rf_manifest, rf_out;
    int rf_width = 4, rf_trees = 100;
    std::uint64_t rf_seed = 0;
    auto* fit_rf =
        app.add_subcommand("fit-rf", "Fit the simple-feature regression forest from a manifest");
    fit_rf->add_option("--manifest", rf_manifest, "Training manifest CSV")->required();
    fit_rf->add_option("--out", rf_out, "Model JSON to write")->required();
    fit_rf->add_option("--width", rf_width, "Boundary width for the features");
    fit_rf->add_option("--trees", rf_trees, "Number of trees");
    fit_rf->add_option("--seed", rf_seed, "Fit seed");

    // fit-mahalanobis
    std::string mh_manifest, mh_out;
    double mh_ridge = 1e-6;
    auto* fit_mh = app.add_subcommand("fit-mahalanobis",
                                      "Fit the Gaussian scorer from feature vectors");
    fit_mh->add_option("--manifest", mh_manifest, "Training manifest CSV")->required();
    fit_mh->add_option("--out", mh_out, "Model JSON to write")->required();
    fit_mh->add_option("--ridge", mh_ridge, "Relative ridge added to the covariance diagonal");

    // rank
    std::vector<std::string> rank_reports;
    std::string rank_risk = "dsc", rank_out;
    int rank_n = 500;
    std::uint64_t rank_seed = 0;
    auto* rank = app.add_subcommand("rank", "Bootstrap ranking stability across reports");
    rank->add_option("reports", rank_reports, "report.json files (one per run)")
        ->required()
        ->expected(-1);
    rank->add_option("--risk", rank_risk, "Risk name to rank by");
    rank->add_option("--n-bootstrap", rank_n, "Bootstrap draws per fold");
    rank->add_option("--seed", rank_seed, "Resampling seed");
    rank->add_option("--out", rank_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*evaluate) {
            if (seed_opt->count() > 0) seed_override = seed_value;
            return cmd_evaluate(manifest_path, config_path, out_dir, seed_override, strict);
        }
        if (*rc) return cmd_rc_curve(rc_input, rc_output);
        if (*agg) {
            return cmd_aggregate(agg_conf, agg_pred, agg_spacing, agg_mode, agg_classes,
                                 agg_width, agg_patch);
        }
        if (*pw) return cmd_pairwise(pw_samples, pw_spacing, pw_mode, pw_classes);
        if (*fit_rf) return cmd_fit_rf(rf_manifest, rf_out, rf_width, rf_trees, rf_seed);
        if (*fit_mh) return cmd_fit_mahalanobis(mh_manifest, mh_out, mh_ridge);
        if (*rank) return cmd_rank(rank_reports, rank_risk, rank_n, rank_seed, rank_out);
    } catch (const EvalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
