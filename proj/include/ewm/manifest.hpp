#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewm/format.hpp"
#include "ewm/geometry_metrics.hpp"
#include "ewm/pose_image.hpp"
#include "ewm/semantic_metrics.hpp"

namespace ewm {

// Evaluation configuration, one versioned JSON file. The canonical hash of
// the parsed content is embedded in every report for provenance.
struct EvalConfig {
    double epsilon = 1e-8;  // SA/TA inverse regularizer
    DynWeights dyn;
    std::string sa_sample_aggregation = "min";  // "min" (lowest-symH sample) or "mean"
    double voxel_cell = 0.05;
    std::size_t memory_k = 4;
    std::size_t chunk_frames = 9;
    double video_hz = 5.0;
    std::size_t action_steps = 54;
    double action_rate_hz = 30.0;
    unsigned workers = 1;
    // Optional weighted combination of the three semantic sub-scores; they
    // are always reported separately as well.
    std::optional<std::array<double, 3>> semantic_weights;  // bleu, keystep, logic

    nlohmann::ordered_json canonical_json() const {
        nlohmann::ordered_json j;
        j["version"] = 1;
        j["epsilon"] = epsilon;
        j["dyn"] = {{"alpha", dyn.alpha}, {"beta", dyn.beta}, {"epsilon", dyn.epsilon}};
        j["sa_sample_aggregation"] = sa_sample_aggregation;
        j["voxel_cell"] = voxel_cell;
        j["memory_k"] = memory_k;
        j["chunk_frames"] = chunk_frames;
        j["video_hz"] = video_hz;
        j["action_steps"] = action_steps;
        j["action_rate_hz"] = action_rate_hz;
        j["workers"] = workers;
        if (semantic_weights) {
            j["semantic_weights"] = {{"bleu", (*semantic_weights)[0]},
                                     {"keystep", (*semantic_weights)[1]},
                                     {"logic", (*semantic_weights)[2]}};
        } else {
            j["semantic_weights"] = nullptr;
        }
        return j;
    }

    std::string hash() const { return to_hex(fnv1a64(canonical_json().dump())); }
};

inline EvalConfig parse_eval_config(const nlohmann::json& j) {
    EvalConfig cfg;
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    if (j.contains("dyn")) {
        const auto& d = j.at("dyn");
        cfg.dyn.alpha = d.value("alpha", cfg.dyn.alpha);
        cfg.dyn.beta = d.value("beta", cfg.dyn.beta);
        cfg.dyn.epsilon = d.value("epsilon", cfg.dyn.epsilon);
    }
    cfg.sa_sample_aggregation = j.value("sa_sample_aggregation", cfg.sa_sample_aggregation);
    if (cfg.sa_sample_aggregation != "min" && cfg.sa_sample_aggregation != "mean")
        throw std::invalid_argument("config: sa_sample_aggregation must be 'min' or 'mean'");
    cfg.voxel_cell = j.value("voxel_cell", cfg.voxel_cell);
    cfg.memory_k = j.value("memory_k", cfg.memory_k);
    cfg.chunk_frames = j.value("chunk_frames", cfg.chunk_frames);
    cfg.video_hz = j.value("video_hz", cfg.video_hz);
    cfg.action_steps = j.value("action_steps", cfg.action_steps);
    cfg.action_rate_hz = j.value("action_rate_hz", cfg.action_rate_hz);
    cfg.workers = j.value("workers", cfg.workers);
    if (j.contains("semantic_weights") && !j.at("semantic_weights").is_null()) {
        const auto& w = j.at("semantic_weights");
        cfg.semantic_weights = {{w.at("bleu").get<double>(), w.at("keystep").get<double>(),
                                 w.at("logic").get<double>()}};
    }
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be > 0");
    validate(cfg.dyn);
    if (!(cfg.voxel_cell > 0.0)) throw std::invalid_argument("config: voxel_cell must be > 0");
    if (cfg.workers < 1) throw std::invalid_argument("config: workers must be >= 1");
    return cfg;
}

inline EvalConfig load_eval_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open config");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    return parse_eval_config(j);
}

// Binds one episode's instruction, ground truth, generated samples and the
// precomputed per-sample artifacts. All paths are resolved against the
// manifest file's directory and checked for existence at load time.
struct EpisodeManifest {
    std::string task_id;
    std::string episode_id;
    std::string instruction;
    std::filesystem::path gt_trajectory;
    std::vector<std::filesystem::path> samples;
    std::optional<std::filesystem::path> calibration;
    std::vector<std::filesystem::path> patch_embeddings;   // per sample, may be empty
    std::vector<std::filesystem::path> global_embeddings;  // per sample, may be empty
    std::optional<std::filesystem::path> captions;
    std::optional<std::filesystem::path> violations;
};

namespace detail {

inline std::filesystem::path resolve_checked(const std::filesystem::path& base,
                                             const std::string& rel, const std::string& manifest) {
    std::filesystem::path p = rel;
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p))
        throw std::runtime_error(manifest + ": referenced file not found: " + p.string());
    return p;
}

}  // namespace detail

inline EpisodeManifest load_episode_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open manifest");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    const std::filesystem::path base = path.parent_path();
    const std::string origin = path.string();

    EpisodeManifest m;
    m.task_id = j.at("task_id").get<std::string>();
    m.episode_id = j.at("episode_id").get<std::string>();
    m.instruction = j.value("instruction", "");
    m.gt_trajectory = detail::resolve_checked(base, j.at("gt_trajectory").get<std::string>(), origin);
    for (const auto& s : j.at("samples"))
        m.samples.push_back(detail::resolve_checked(base, s.get<std::string>(), origin));
    if (m.samples.empty()) throw std::runtime_error(origin + ": manifest needs >= 1 sample");
    if (j.contains("calibration") && !j.at("calibration").is_null())
        m.calibration = detail::resolve_checked(base, j.at("calibration").get<std::string>(), origin);
    auto load_list = [&](const char* key, std::vector<std::filesystem::path>& out) {
        if (!j.contains(key) || j.at(key).is_null()) return;
        for (const auto& s : j.at(key))
            out.push_back(detail::resolve_checked(base, s.get<std::string>(), origin));
        if (!out.empty() && out.size() != m.samples.size())
            throw std::runtime_error(origin + ": " + key + " count must match sample count");
    };
    load_list("patch_embeddings", m.patch_embeddings);
    load_list("global_embeddings", m.global_embeddings);
    if (j.contains("captions") && !j.at("captions").is_null())
        m.captions = detail::resolve_checked(base, j.at("captions").get<std::string>(), origin);
    if (j.contains("violations") && !j.at("violations").is_null())
        m.violations = detail::resolve_checked(base, j.at("violations").get<std::string>(), origin);
    return m;
}

// A manifest argument may be one episode file or a directory of *.json
// episode files (scanned in sorted order).
inline std::vector<EpisodeManifest> load_manifests(const std::filesystem::path& path) {
    std::vector<EpisodeManifest> out;
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::directory_iterator(path))
            if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) out.push_back(load_episode_manifest(f));
    } else {
        out.push_back(load_episode_manifest(path));
    }
    if (out.empty()) throw std::runtime_error(path.string() + ": no manifests found");
    return out;
}

// Instruction + generated summary + per-step caption embeddings.
struct CaptionRecord {
    std::string instruction;
    std::string summary;
    std::vector<std::vector<double>> steps_gt;
    std::vector<std::vector<double>> steps_gen;
};

inline CaptionRecord load_caption_record(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open captions");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    CaptionRecord r;
    r.instruction = j.at("instruction").get<std::string>();
    r.summary = j.at("summary").get<std::string>();
    auto load_steps = [&](const char* key, std::vector<std::vector<double>>& out) {
        if (!j.contains(key) || j.at(key).is_null()) return;
        for (const auto& v : j.at(key)) out.push_back(v.get<std::vector<double>>());
    };
    load_steps("steps_gt", r.steps_gt);
    load_steps("steps_gen", r.steps_gen);
    return r;
}

inline ViolationRecord load_violation_record(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open violations");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    ViolationRecord r;
    r.taxonomy_size = j.at("taxonomy_size").get<std::size_t>();
    if (j.contains("violations")) {
        for (const auto& v : j.at("violations"))
            r.violations.emplace_back(v.at("category").get<std::size_t>(),
                                      v.at("count").get<std::size_t>());
    }
    return r;
}

// Camera calibration record: fx, fy, cx, cy, rotation (9 row-major values),
// translation (3 values).
inline CameraModel load_camera_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open calibration");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    CameraModel cam;
    cam.fx = j.at("fx").get<double>();
    cam.fy = j.at("fy").get<double>();
    cam.cx = j.at("cx").get<double>();
    cam.cy = j.at("cy").get<double>();
    const auto& rot = j.at("rotation");
    if (rot.size() != 9) throw std::runtime_error(path.string() + ": rotation needs 9 values");
    for (int i = 0; i < 3; ++i)
        for (int c = 0; c < 3; ++c) cam.extrinsic_rotation[i][c] = rot.at(i * 3 + c).get<double>();
    const auto& tr = j.at("translation");
    if (tr.size() != 3) throw std::runtime_error(path.string() + ": translation needs 3 values");
    for (int i = 0; i < 3; ++i) cam.extrinsic_translation[i] = tr.at(i).get<double>();
    try {
        validate(cam);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    return cam;
}

}  // namespace ewm
