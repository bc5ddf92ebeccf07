#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ewm {

enum class ViewId { Head, LeftWrist, RightWrist };

inline const char* view_name(ViewId v) {
    switch (v) {
        case ViewId::Head: return "head";
        case ViewId::LeftWrist: return "left_wrist";
        default: return "right_wrist";
    }
}

// One camera frame; the payload is an opaque blob the rollout driver never
// inspects, so neural generators, replay files and synthetic stubs stay
// interchangeable.
struct Frame {
    ViewId view = ViewId::Head;
    std::vector<std::uint8_t> payload;
    std::size_t index = 0;  // unique per view within a rollout
};

// All three views of one timestep.
struct FrameGroup {
    Frame head, left_wrist, right_wrist;
};

struct VideoChunk {
    std::vector<FrameGroup> frames;  // N >= 1, constant within a rollout
};

// Ordered rollout history; sampling happens on read.
struct MemoryBuffer {
    std::vector<FrameGroup> history;

    void append(const VideoChunk& chunk) {
        history.insert(history.end(), chunk.frames.begin(), chunk.frames.end());
    }
};

// Dual-arm command block: K steps of 14 scalars at a fixed rate.
struct ActionChunk {
    std::vector<std::array<double, 14>> steps;
    double rate_hz = 30.0;

    double duration_seconds() const { return double(steps.size()) / rate_hz; }
};

// Fixed-interval sparse memory sampling: floor(j * len / k) for j = 0..k-1
// (always includes index 0). Shorter histories return every index,
// left-padded by repeating index 0 to length k.
inline std::vector<std::size_t> sample_sparse_memory(std::size_t history_len, std::size_t k) {
    if (k == 0) throw std::invalid_argument("sample_sparse_memory: k must be >= 1");
    std::vector<std::size_t> out;
    out.reserve(k);
    if (history_len >= k) {
        for (std::size_t j = 0; j < k; ++j) out.push_back(j * history_len / k);
    } else {
        for (std::size_t j = 0; j + history_len < k; ++j) out.push_back(0);
        for (std::size_t i = 0; i < history_len; ++i) out.push_back(i);
    }
    return out;
}

// What the policy and generator see each iteration: the most recent chunk
// plus sparsely sampled memory frames from the whole history.
struct Observation {
    const VideoChunk* latest = nullptr;
    std::vector<FrameGroup> memory;
    std::string instruction;
};

struct PolicyDecision {
    bool done = false;
    ActionChunk actions;
};

class PolicyInterface {
public:
    virtual ~PolicyInterface() = default;
    virtual PolicyDecision act(const Observation& obs) = 0;
};

class GeneratorInterface {
public:
    virtual ~GeneratorInterface() = default;
    virtual VideoChunk generate(const Observation& obs, const ActionChunk& actions) = 0;
};

enum class Termination { PolicyDone, Budget, Error };

inline const char* termination_name(Termination t) {
    switch (t) {
        case Termination::PolicyDone: return "policy_done";
        case Termination::Budget: return "budget";
        default: return "error";
    }
}

struct Rollout {
    std::string instruction;
    std::vector<VideoChunk> chunks;    // generated chunks, in order
    std::vector<ActionChunk> actions;  // one per generator call
    Termination termination = Termination::Budget;
    std::optional<std::size_t> failed_step;
    std::string error;
    bool time_windows_consistent = true;
};

struct RolloutConfig {
    std::size_t memory_k = 4;
    // When > 0, each action chunk's time span is checked against the video
    // chunk it produced (N frames at video_hz must cover the same window).
    double video_hz = 0.0;
};

// True when n_frames at video_hz spans the same wall-clock window as
// n_steps at action_hz (e.g. 9 frames @ 5 Hz == 54 steps @ 30 Hz).
inline bool consistent_time_window(std::size_t n_frames, double video_hz, std::size_t n_steps,
                                   double action_hz) {
    return std::abs(double(n_frames) / video_hz - double(n_steps) / action_hz) < 1e-9;
}

// The closed-loop protocol: policy(observation + memory, instruction) ->
// actions, generator(observation, actions) -> next chunk, appended to the
// memory; repeats until the policy signals done or max_chunks is reached.
// Interface failures abort the rollout with the step index recorded.
inline Rollout run_closed_loop(PolicyInterface& policy, GeneratorInterface& generator,
                               const std::string& instruction, const VideoChunk& init,
                               std::size_t max_chunks, const RolloutConfig& cfg = {}) {
    if (max_chunks < 1) throw std::invalid_argument("run_closed_loop: max_chunks must be >= 1");
    if (init.frames.empty()) throw std::invalid_argument("run_closed_loop: empty initial chunk");

    Rollout rollout;
    rollout.instruction = instruction;

    MemoryBuffer memory;
    memory.append(init);
    const VideoChunk* latest = &init;

    for (std::size_t step = 0; step < max_chunks; ++step) {
        Observation obs;
        obs.latest = latest;
        obs.instruction = instruction;
        for (std::size_t idx : sample_sparse_memory(memory.history.size(), cfg.memory_k))
            obs.memory.push_back(memory.history[idx]);

        try {
            PolicyDecision decision = policy.act(obs);
            if (decision.done) {
                rollout.termination = Termination::PolicyDone;
                return rollout;
            }
            rollout.actions.push_back(decision.actions);
            VideoChunk chunk = generator.generate(obs, decision.actions);
            if (chunk.frames.empty()) throw std::runtime_error("generator returned empty chunk");
            if (cfg.video_hz > 0.0 &&
                !consistent_time_window(chunk.frames.size(), cfg.video_hz,
                                        decision.actions.steps.size(), decision.actions.rate_hz))
                rollout.time_windows_consistent = false;
            rollout.chunks.push_back(std::move(chunk));
            memory.append(rollout.chunks.back());
            latest = &rollout.chunks.back();
        } catch (const std::exception& e) {
            rollout.termination = Termination::Error;
            rollout.failed_step = step;
            rollout.error = e.what();
            return rollout;
        }
    }
    rollout.termination = Termination::Budget;
    return rollout;
}

// Test double for the neural generator: returns pre-recorded chunks in
// order, ignoring the actions; throws once the recording is exhausted.
class ReplayGenerator : public GeneratorInterface {
public:
    explicit ReplayGenerator(std::vector<VideoChunk> recording)
        : recording_(std::move(recording)) {
        if (recording_.empty()) throw std::invalid_argument("ReplayGenerator: empty recording");
    }

    VideoChunk generate(const Observation&, const ActionChunk&) override {
        if (next_ >= recording_.size()) throw std::runtime_error("recording exhausted");
        return recording_[next_++];
    }

    std::size_t consumed() const { return next_; }

private:
    std::vector<VideoChunk> recording_;
    std::size_t next_ = 0;
};

// ---- rollout persistence ----------------------------------------------
// Directory layout: rollout.json with actions/indices/termination, plus one
// binary blob per frame under chunk_NNN/.

namespace detail {

inline std::string zero_pad(std::size_t v, int width) {
    std::string s = std::to_string(v);
    while (int(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

inline void write_blob(const std::filesystem::path& path, const std::vector<std::uint8_t>& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
}

inline std::vector<std::uint8_t> read_blob(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path.string() + ": cannot open");
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                     std::istreambuf_iterator<char>());
}

}  // namespace detail

inline void save_chunks(const std::vector<VideoChunk>& chunks, const std::filesystem::path& dir,
                        nlohmann::ordered_json& meta) {
    meta = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < chunks.size(); ++c) {
        std::string chunk_dir = "chunk_" + detail::zero_pad(c, 3);
        std::filesystem::create_directories(dir / chunk_dir);
        nlohmann::ordered_json entry;
        entry["dir"] = chunk_dir;
        entry["frames"] = chunks[c].frames.size();
        auto indices = nlohmann::ordered_json::array();
        for (std::size_t f = 0; f < chunks[c].frames.size(); ++f) {
            const FrameGroup& g = chunks[c].frames[f];
            indices.push_back(g.head.index);
            for (const Frame* fr : {&g.head, &g.left_wrist, &g.right_wrist}) {
                std::string name =
                    "frame_" + detail::zero_pad(f, 3) + "_" + view_name(fr->view) + ".bin";
                detail::write_blob(dir / chunk_dir / name, fr->payload);
            }
        }
        entry["frame_indices"] = indices;
        meta.push_back(entry);
    }
}

inline std::vector<VideoChunk> load_chunks(const std::filesystem::path& dir,
                                           const nlohmann::json& meta) {
    std::vector<VideoChunk> chunks;
    for (const auto& entry : meta) {
        VideoChunk chunk;
        std::string chunk_dir = entry.at("dir").get<std::string>();
        std::size_t n = entry.at("frames").get<std::size_t>();
        const auto& indices = entry.at("frame_indices");
        for (std::size_t f = 0; f < n; ++f) {
            FrameGroup g;
            g.head.view = ViewId::Head;
            g.left_wrist.view = ViewId::LeftWrist;
            g.right_wrist.view = ViewId::RightWrist;
            std::size_t idx = indices.at(f).get<std::size_t>();
            g.head.index = g.left_wrist.index = g.right_wrist.index = idx;
            for (Frame* fr : {&g.head, &g.left_wrist, &g.right_wrist}) {
                std::string name =
                    "frame_" + detail::zero_pad(f, 3) + "_" + view_name(fr->view) + ".bin";
                fr->payload = detail::read_blob(dir / chunk_dir / name);
            }
            chunk.frames.push_back(std::move(g));
        }
        chunks.push_back(std::move(chunk));
    }
    return chunks;
}

inline void save_rollout(const Rollout& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["instruction"] = r.instruction;
    doc["termination"] = termination_name(r.termination);
    if (r.failed_step)
        doc["failed_step"] = *r.failed_step;
    else
        doc["failed_step"] = nullptr;
    doc["error"] = r.error;
    doc["time_windows_consistent"] = r.time_windows_consistent;

    auto actions = nlohmann::ordered_json::array();
    for (const auto& a : r.actions) {
        nlohmann::ordered_json entry;
        entry["rate_hz"] = a.rate_hz;
        auto steps = nlohmann::ordered_json::array();
        for (const auto& s : a.steps) steps.push_back(s);
        entry["steps"] = steps;
        actions.push_back(entry);
    }
    doc["actions"] = actions;

    nlohmann::ordered_json chunk_meta;
    save_chunks(r.chunks, dir, chunk_meta);
    doc["chunks"] = chunk_meta;

    std::ofstream out(dir / "rollout.json", std::ios::binary);
    if (!out) throw std::runtime_error((dir / "rollout.json").string() + ": cannot write");
    out << doc.dump(2) << "\n";
}

inline Rollout load_rollout(const std::filesystem::path& dir) {
    std::ifstream in(dir / "rollout.json", std::ios::binary);
    if (!in) throw std::runtime_error((dir / "rollout.json").string() + ": cannot open");
    nlohmann::json doc = nlohmann::json::parse(in);

    Rollout r;
    r.instruction = doc.at("instruction").get<std::string>();
    std::string term = doc.at("termination").get<std::string>();
    r.termination = term == "policy_done" ? Termination::PolicyDone
                    : term == "budget"    ? Termination::Budget
                                          : Termination::Error;
    if (!doc.at("failed_step").is_null()) r.failed_step = doc.at("failed_step").get<std::size_t>();
    r.error = doc.value("error", "");
    r.time_windows_consistent = doc.value("time_windows_consistent", true);

    for (const auto& entry : doc.at("actions")) {
        ActionChunk a;
        a.rate_hz = entry.at("rate_hz").get<double>();
        for (const auto& s : entry.at("steps")) {
            std::array<double, 14> step{};
            for (std::size_t i = 0; i < 14; ++i) step[i] = s.at(i).get<double>();
            a.steps.push_back(step);
        }
        r.actions.push_back(std::move(a));
    }
    r.chunks = load_chunks(dir, doc.at("chunks"));
    return r;
}

// A recording is the chunk part of the rollout layout.
inline std::vector<VideoChunk> load_recording(const std::filesystem::path& dir) {
    std::ifstream in(dir / "rollout.json", std::ios::binary);
    if (!in) throw std::runtime_error((dir / "rollout.json").string() + ": cannot open");
    nlohmann::json doc = nlohmann::json::parse(in);
    return load_chunks(dir, doc.at("chunks"));
}

}  // namespace ewm
