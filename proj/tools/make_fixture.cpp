// Regenerates the committed synthetic fixture used by the end-to-end tests:
// a 20-case test manifest, a 30-case training manifest, volumes, feature
// vectors, and the evaluation config. Everything is derived from fixed seeds,
// so the output is reproducible byte for byte.
//
// Usage: fdeval-make-fixture <output-dir>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include <json.hpp>

#include "fdeval/npy.hpp"

namespace fs = std::filesystem;
using fdeval::npy::from_f64;
using fdeval::npy::from_u8;
using fdeval::npy::save;

namespace {

constexpr std::int64_t kSize = 16;
constexpr std::int64_t kVoxels = kSize * kSize;

double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int randint(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

struct Rect {
    int y = 0, x = 0, h = 0, w = 0;
    std::uint8_t cls = 0;
};

void render(std::vector<std::uint8_t>& labels, const Rect& r) {
    for (int y = std::max(0, r.y); y < std::min<int>(kSize, r.y + r.h); ++y) {
        for (int x = std::max(0, r.x); x < std::min<int>(kSize, r.x + r.w); ++x) {
            labels[static_cast<std::size_t>(y) * kSize + x] = r.cls;
        }
    }
}

std::vector<std::uint8_t> render_case(const Rect& a, const Rect& b) {
    std::vector<std::uint8_t> labels(kVoxels, 0);
    render(labels, a);
    render(labels, b);
    return labels;
}

Rect shifted(const Rect& r, std::mt19937_64& rng, int max_shift) {
    Rect out = r;
    out.y += randint(rng, -max_shift, max_shift);
    out.x += randint(rng, -max_shift, max_shift);
    return out;
}

std::vector<double> confidence_for(const std::vector<std::uint8_t>& gt,
                                   const std::vector<std::uint8_t>& pred,
                                   std::mt19937_64& rng) {
    std::vector<double> conf(kVoxels);
    for (std::int64_t i = 0; i < kVoxels; ++i) {
        double v = 0.97 - (gt[i] != pred[i] ? 0.55 : 0.0) - 0.15 * uniform(rng);
        conf[static_cast<std::size_t>(i)] = std::min(1.0, std::max(0.0, v));
    }
    return conf;
}

std::vector<double> feature_vector(std::mt19937_64& rng, bool is_ood) {
    std::vector<double> f(4);
    for (auto& v : f) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += uniform(rng);
        v = s - 2.0 + (is_ood ? 3.0 : 0.0);
    }
    return f;
}

struct CaseFiles {
    std::string gt, pred, conf, feat;
    std::vector<std::string> samples;
};

CaseFiles make_case(const fs::path& dir, const std::string& stem, std::mt19937_64& rng,
                    bool is_ood, int n_samples) {
    Rect a{randint(rng, 1, 5), randint(rng, 1, 5), randint(rng, 4, 7), randint(rng, 4, 7), 1};
    Rect b{randint(rng, 8, 11), randint(rng, 8, 11), randint(rng, 3, 5), randint(rng, 3, 5), 2};
    auto gt = render_case(a, b);

    // shifted predictions; OOD cases fail harder and more often
    double severity = uniform(rng);
    int max_shift = 1;
    if (is_ood || severity < 0.2) max_shift = randint(rng, 3, 6);
    Rect pa = shifted(a, rng, max_shift);
    Rect pb = shifted(b, rng, max_shift);
    auto pred = render_case(pa, pb);
    auto conf = confidence_for(gt, pred, rng);
    auto feat = feature_vector(rng, is_ood);

    CaseFiles files;
    files.gt = stem + "_gt.npy";
    files.pred = stem + "_pred.npy";
    files.conf = stem + "_conf.npy";
    files.feat = stem + "_feat.npy";
    save(dir / files.gt, from_u8({kSize, kSize}, gt));
    save(dir / files.pred, from_u8({kSize, kSize}, pred));
    save(dir / files.conf, from_f64({kSize, kSize}, conf));
    save(dir / files.feat, from_f64({static_cast<std::int64_t>(feat.size())}, feat));
    for (int s = 0; s < n_samples; ++s) {
        auto sample = render_case(shifted(pa, rng, 1), shifted(pb, rng, 1));
        std::string name = stem + "_sample" + std::to_string(s) + ".npy";
        save(dir / name, from_u8({kSize, kSize}, sample));
        files.samples.push_back(name);
    }
    return files;
}

std::string manifest_header() {
    return "case_id,fold,domain,is_ood,gt_path,pred_path,conf_path,sample_paths,feature_path,"
           "spacing,label_mode,class_ids\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: fdeval-make-fixture <output-dir>\n";
        return 2;
    }
    fs::path root(argv[1]);
    fs::create_directories(root / "test");
    fs::create_directories(root / "train");

    // test cases
    std::mt19937_64 rng(20240601ULL);
    std::string manifest = manifest_header();
    for (int i = 0; i < 20; ++i) {
        bool is_ood = i % 5 == 4;
        char stem[16];
        std::snprintf(stem, sizeof(stem), "case%02d", i);
        auto files = make_case(root / "test", stem, rng, is_ood, 3);
        std::string samples;
        for (std::size_t s = 0; s < files.samples.size(); ++s) {
            if (s > 0) samples += ";";
            samples += "test/" + files.samples[s];
        }
        manifest += std::string(stem) + "," + std::to_string(i % 2) + "," +
                    (is_ood ? "shift" : "id") + "," + (is_ood ? "1" : "0") + ",test/" +
                    files.gt + ",test/" + files.pred + ",test/" + files.conf + "," + samples +
                    ",test/" + files.feat + ",1.0;1.0,exclusive,1;2\n";
    }
    std::ofstream(root / "manifest.csv") << manifest;

    // training cases (in-distribution only)
    std::mt19937_64 train_rng(911ULL);
    std::string train_manifest = manifest_header();
    for (int i = 0; i < 30; ++i) {
        char stem[16];
        std::snprintf(stem, sizeof(stem), "train%02d", i);
        auto files = make_case(root / "train", stem, train_rng, false, 0);
        train_manifest += std::string(stem) + ",0,id,0,train/" + files.gt + ",train/" +
                          files.pred + ",train/" + files.conf + ",,train/" + files.feat +
                          ",1.0;1.0,exclusive,1;2\n";
    }
    std::ofstream(root / "train_manifest.csv") << train_manifest;

    nlohmann::ordered_json config;
    config["seed"] = 7;
    config["risks"] = nlohmann::ordered_json::array(
        {{{"metric", "dsc"}}, {{"metric", "generalized_dsc"}}, {{"metric", "nsd"}, {"tolerance", 2.0}}});
    config["methods"]["mean"] = nlohmann::ordered_json::object();
    config["methods"]["non_boundary"] = {{"width", 4}};
    config["methods"]["mean_foreground"] = {{"width", 4}};
    config["methods"]["patch_min"] = {{"patch_size", 10}};
    config["methods"]["pairwise_dsc"] = nlohmann::ordered_json::object();
    config["methods"]["rf_simple"] = {{"train_manifest", "train_manifest.csv"}};
    config["methods"]["mahalanobis"] = {{"train_manifest", "train_manifest.csv"}};
    config["methods"]["oracle"] = nlohmann::ordered_json::object();
    config["bootstrap"] = {{"enabled", true}, {"n", 50}};
    config["f_auroc_threshold"] = 0.5;
    std::ofstream(root / "config.json") << config.dump(2) << "\n";

    std::cout << "fixture written to " << root << "\n";
    return 0;
}
