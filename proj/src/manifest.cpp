#include "fdeval/manifest.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fdeval {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool record_started = false;

    std::size_t i = 0;
    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
        record_started = false;
    };
    while (i < text.size()) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
            record_started = true;
        } else if (c == ',') {
            end_field();
            record_started = true;
        } else if (c == '\n') {
            if (record_started || !field.empty()) end_record();
        } else if (c == '\r') {
            // swallowed; LF terminates the record
        } else {
            field += c;
            record_started = true;
        }
        ++i;
    }
    if (record_started || !field.empty()) end_record();
    return records;
}

namespace {

std::vector<std::string> split_list(const std::string& cell) {
    std::vector<std::string> parts;
    std::string part;
    std::stringstream ss(cell);
    while (std::getline(ss, part, ';')) {
        if (!part.empty()) parts.push_back(part);
    }
    return parts;
}

bool parse_bool(const std::string& cell, std::size_t row) {
    if (cell == "0" || cell == "false" || cell == "False") return false;
    if (cell == "1" || cell == "true" || cell == "True") return true;
    throw EvalError(ErrorCode::BadValue,
                    "row " + std::to_string(row) + ": is_ood must be 0/1/true/false");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& cell,
                              std::size_t row) {
    std::filesystem::path p(cell);
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p)) {
        throw EvalError(ErrorCode::UnresolvedPath,
                        "row " + std::to_string(row) + ": '" + p.string() + "' does not exist");
    }
    return p;
}

}  // namespace

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw EvalError(ErrorCode::IoError, "cannot open manifest '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto records = parse_csv(buffer.str());
    if (records.empty()) {
        throw EvalError(ErrorCode::MissingColumn, "manifest is empty");
    }

    std::map<std::string, std::size_t> columns;
    for (std::size_t c = 0; c < records[0].size(); ++c) columns[records[0][c]] = c;
    for (const char* required : {"case_id", "fold", "domain", "is_ood", "gt_path", "pred_path",
                                 "spacing", "label_mode", "class_ids"}) {
        if (columns.find(required) == columns.end()) {
            throw EvalError(ErrorCode::MissingColumn,
                            std::string("manifest lacks required column '") + required + "'");
        }
    }

    Manifest manifest;
    manifest.base_dir = path.parent_path();
    std::set<std::pair<std::string, int>> seen;

    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        auto cell = [&](const char* name) -> std::string {
            auto it = columns.find(name);
            if (it == columns.end() || it->second >= rec.size()) return "";
            return rec[it->second];
        };
        std::size_t rownum = r + 1;  // 1-based file line, header is line 1

        ManifestRow row;
        row.case_id = cell("case_id");
        if (row.case_id.empty()) {
            throw EvalError(ErrorCode::BadValue,
                            "row " + std::to_string(rownum) + ": case_id is empty");
        }
        try {
            row.fold = std::stoi(cell("fold"));
        } catch (const std::exception&) {
            throw EvalError(ErrorCode::BadValue,
                            "row " + std::to_string(rownum) + ": fold must be an integer");
        }
        if (row.fold < 0) {
            throw EvalError(ErrorCode::BadValue,
                            "row " + std::to_string(rownum) + ": fold must be >= 0");
        }
        row.domain = cell("domain");
        row.is_ood = parse_bool(cell("is_ood"), rownum);

        if (!seen.insert({row.case_id, row.fold}).second) {
            throw EvalError(ErrorCode::DuplicateCase,
                            "row " + std::to_string(rownum) + ": duplicate case '" + row.case_id +
                                "' in fold " + std::to_string(row.fold));
        }

        for (const auto& s : split_list(cell("spacing"))) {
            row.spacing.push_back(std::stod(s));
        }
        row.label_mode = parse_label_mode(cell("label_mode"));
        for (const auto& s : split_list(cell("class_ids"))) {
            row.class_ids.push_back(static_cast<std::int32_t>(std::stol(s)));
        }

        row.gt_path = resolve(manifest.base_dir, cell("gt_path"), rownum);
        row.pred_path = resolve(manifest.base_dir, cell("pred_path"), rownum);
        if (auto c = cell("conf_path"); !c.empty()) {
            row.conf_path = resolve(manifest.base_dir, c, rownum);
        }
        for (const auto& s : split_list(cell("sample_paths"))) {
            row.sample_paths.push_back(resolve(manifest.base_dir, s, rownum));
        }
        if (auto c = cell("feature_path"); !c.empty()) {
            row.feature_path = resolve(manifest.base_dir, c, rownum);
        }

        manifest.rows.push_back(std::move(row));
    }

    // metadata must agree across rows so cases are comparable
    for (std::size_t r = 1; r < manifest.rows.size(); ++r) {
        const auto& a = manifest.rows[0];
        const auto& b = manifest.rows[r];
        if (a.spacing != b.spacing || a.label_mode != b.label_mode ||
            a.class_ids != b.class_ids) {
            throw EvalError(ErrorCode::BadValue,
                            "row " + std::to_string(r + 2) +
                                ": spacing/label_mode/class_ids differ from earlier rows");
        }
    }
    return manifest;
}

}  // namespace fdeval
