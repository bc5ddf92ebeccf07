// ewm — batch evaluation CLI for the embodied-world-model metric suite.
//
// Subcommands: eval, curate, human-corr, rollout, render-pose.
// Exit codes: 0 success, 1 any failed episode (or failed rollout),
// 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ewm/closed_loop.hpp"
#include "ewm/curation.hpp"
#include "ewm/harness.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_formats(const std::string& formats) {
    std::vector<std::string> out;
    std::stringstream ss(formats);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int run_eval(const std::string& manifest_path, const std::string& config_path,
             const std::string& out_dir, const std::string& formats, unsigned workers) {
    ewm::EvalConfig cfg;
    std::vector<ewm::EpisodeManifest> manifests;
    try {
        cfg = ewm::load_eval_config(config_path);
        manifests = ewm::load_manifests(manifest_path);
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }
    if (workers > 0) cfg.workers = workers;

    ewm::MetricReport report = ewm::evaluate_benchmark(manifests, cfg);
    auto files = ewm::emit_report(report, split_formats(formats), out_dir);
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";

    std::size_t failed = 0;
    for (const auto& e : report.episodes)
        if (e.failed) {
            ++failed;
            std::cerr << "episode " << e.task_id << "/" << e.episode_id << " failed: " << e.error
                      << "\n";
        }
    std::cout << report.episodes.size() - failed << "/" << report.episodes.size()
              << " episodes evaluated\n";
    return failed == 0 ? 0 : 1;
}

int run_curate(const std::string& candidates_path, std::size_t n_select, double cell,
               const std::string& out_dir) {
    nlohmann::json doc;
    std::vector<fs::path> paths;
    try {
        std::ifstream in(candidates_path);
        if (!in) throw std::runtime_error(candidates_path + ": cannot open");
        doc = nlohmann::json::parse(in);
        fs::path base = fs::path(candidates_path).parent_path();
        for (const auto& p : doc.at("trajectories")) {
            fs::path t = p.get<std::string>();
            if (t.is_relative()) t = base / t;
            if (!fs::exists(t))
                throw std::runtime_error(candidates_path + ": trajectory not found: " + t.string());
            paths.push_back(t);
        }
        if (paths.empty()) throw std::runtime_error(candidates_path + ": no trajectories listed");
        if (n_select < 1 || n_select > paths.size())
            throw std::runtime_error("--select out of range (1.." +
                                     std::to_string(paths.size()) + ")");
        if (!(cell > 0.0)) throw std::runtime_error("--cell must be > 0");
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    try {
        std::vector<ewm::Trajectory> trajs;
        for (const auto& p : paths) trajs.push_back(ewm::parse_trajectory(p.string()));

        // Shared origin: bounding-box minimum over every candidate, both arms.
        std::array<double, 3> origin = {0, 0, 0};
        bool first = true;
        for (const auto& t : trajs) {
            for (const auto& s : t.steps) {
                for (const ewm::Pose* pose : {&s.left, &s.right}) {
                    for (int c = 0; c < 3; ++c) {
                        if (first || pose->position[c] < origin[c]) origin[c] = pose->position[c];
                    }
                    first = false;
                }
            }
        }

        std::vector<ewm::VoxelGrid> grids;
        for (const auto& t : trajs)
            grids.push_back(ewm::voxelize(t, ewm::ArmSelect::Both, origin, cell));
        ewm::SimilarityMatrix sim = ewm::iou_matrix(grids);
        std::vector<std::size_t> selected = ewm::greedy_select(sim, n_select);

        fs::create_directories(out_dir);
        {
            std::ofstream out(fs::path(out_dir) / "selected.csv", std::ios::binary);
            out << "order,index,path\n";
            for (std::size_t i = 0; i < selected.size(); ++i)
                out << i << "," << selected[i] << "," << paths[selected[i]].string() << "\n";
        }
        {
            std::ofstream out(fs::path(out_dir) / "similarity.csv", std::ios::binary);
            for (std::size_t i = 0; i < sim.n; ++i) {
                for (std::size_t j = 0; j < sim.n; ++j) {
                    if (j) out << ",";
                    out << ewm::format_double(sim.at(i, j));
                }
                out << "\n";
            }
        }
        std::cout << "selected " << selected.size() << " of " << paths.size()
                  << " trajectories\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_human_corr(const std::string& report_path, const std::string& annotations_path,
                   const std::string& method) {
    try {
        std::ifstream in(report_path);
        if (!in) throw std::runtime_error(report_path + ": cannot open");
        nlohmann::json scores_doc = nlohmann::json::parse(in);
        ewm::HumanAnnotations ann = ewm::load_human_annotations(annotations_path);

        // Report side: [{"model": name, "score": value}, ...] matched to the
        // annotation model list by name.
        std::vector<double> scores(ann.models.size(), 0.0);
        std::vector<bool> found(ann.models.size(), false);
        for (const auto& row : scores_doc) {
            std::string model = row.at("model").get<std::string>();
            for (std::size_t i = 0; i < ann.models.size(); ++i) {
                if (ann.models[i] == model) {
                    scores[i] = row.at("score").get<double>();
                    found[i] = true;
                }
            }
        }
        for (std::size_t i = 0; i < found.size(); ++i)
            if (!found[i])
                throw std::runtime_error("no score for model '" + ann.models[i] + "'");

        ewm::CorrelationMethod m = method == "kendall" ? ewm::CorrelationMethod::Kendall
                                                       : ewm::CorrelationMethod::Spearman;
        double corr = ewm::human_metric_correlation(scores, ann, m);
        std::cout << method << " correlation: " << ewm::format_double(corr) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

// Scripted policy used by the replay rollout: never signals done, emits a
// fixed-size zero action chunk each step.
class FixedActionPolicy : public ewm::PolicyInterface {
public:
    FixedActionPolicy(std::size_t steps, double rate_hz) : steps_(steps), rate_hz_(rate_hz) {}
    ewm::PolicyDecision act(const ewm::Observation&) override {
        ewm::PolicyDecision d;
        d.actions.rate_hz = rate_hz_;
        d.actions.steps.assign(steps_, {});
        return d;
    }

private:
    std::size_t steps_;
    double rate_hz_;
};

int run_rollout(const std::string& recording_dir, std::size_t budget, const std::string& out_dir,
                const std::string& instruction) {
    try {
        std::vector<ewm::VideoChunk> recording = ewm::load_recording(recording_dir);
        ewm::ReplayGenerator generator(recording);
        FixedActionPolicy policy(54, 30.0);
        ewm::VideoChunk init = recording.front();
        ewm::RolloutConfig cfg;
        ewm::Rollout rollout =
            ewm::run_closed_loop(policy, generator, instruction, init, budget, cfg);
        if (!out_dir.empty()) ewm::save_rollout(rollout, out_dir);
        std::cout << "rollout: " << rollout.chunks.size() << " chunks, termination "
                  << ewm::termination_name(rollout.termination) << "\n";
        return rollout.termination == ewm::Termination::Error ? 1 : 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_render_pose(const std::string& calib_path, const std::string& traj_path,
                    const std::string& out_dir, int width, int height) {
    ewm::CameraModel cam;
    ewm::Trajectory traj;
    try {
        cam = ewm::load_camera_model(calib_path);
        traj = ewm::parse_trajectory(traj_path);
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }
    try {
        fs::create_directories(out_dir);
        for (std::size_t i = 0; i < traj.size(); ++i) {
            ewm::PoseImage img = ewm::render_pose_image(cam, traj.steps[i].left,
                                                        traj.steps[i].right, width, height);
            std::string name = "pose_" + std::string(i < 10 ? "00" : i < 100 ? "0" : "") +
                               std::to_string(i) + ".ppm";
            ewm::write_ppm(img, (fs::path(out_dir) / name).string());
        }
        std::cout << "rendered " << traj.size() << " pose images\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EWMBench embodied-world-model evaluation toolkit"};
    app.require_subcommand(1);

    auto* eval = app.add_subcommand("eval", "Evaluate episode manifests and emit reports");
    std::string manifest, config, out = "out", formats = "csv,json";
    unsigned workers = 0;
    eval->add_option("--manifest", manifest, "Episode manifest file or directory")->required();
    eval->add_option("--config", config, "Evaluation config JSON")->required();
    eval->add_option("--out", out, "Output directory");
    eval->add_option("--format", formats, "Comma-separated: csv,json,svg");
    eval->add_option("--workers", workers, "Worker threads (overrides config)");

    auto* curate = app.add_subcommand("curate", "Select least-overlapping trajectories");
    std::string candidates, curate_out = "out";
    std::size_t n_select = 1;
    double cell = 0.05;
    curate->add_option("--candidates", candidates, "JSON manifest of candidate trajectories")
        ->required();
    curate->add_option("--select", n_select, "Number of trajectories to keep")->required();
    curate->add_option("--cell", cell, "Voxel edge length in meters");
    curate->add_option("--out", curate_out, "Output directory");

    auto* corr = app.add_subcommand("human-corr", "Metric-human rank correlation");
    std::string report_path, annotations, method = "spearman";
    corr->add_option("--report", report_path, "Per-model metric scores JSON")->required();
    corr->add_option("--annotations", annotations, "Human annotation JSON")->required();
    corr->add_option("--method", method, "spearman or kendall")
        ->check(CLI::IsMember({"spearman", "kendall"}));

    auto* rollout = app.add_subcommand("rollout", "Replay-driven closed-loop rollout");
    std::string recording, rollout_out, instruction;
    std::size_t budget = 1;
    rollout->add_option("--recording", recording, "Recorded rollout directory")->required();
    rollout->add_option("--budget", budget, "Maximum chunks to generate")->required();
    rollout->add_option("--out", rollout_out, "Directory to persist the rollout");
    rollout->add_option("--instruction", instruction, "Instruction text");

    auto* render = app.add_subcommand("render-pose", "Render pose conditioning images");
    std::string calib, traj, render_out = "out";
    int width = 512, height = 512;
    render->add_option("--calib", calib, "Camera calibration JSON")->required();
    render->add_option("--traj", traj, "Trajectory CSV")->required();
    render->add_option("--out", render_out, "Output directory");
    render->add_option("--width", width, "Image width in pixels");
    render->add_option("--height", height, "Image height in pixels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (eval->parsed()) return run_eval(manifest, config, out, formats, workers);
    if (curate->parsed()) return run_curate(candidates, n_select, cell, curate_out);
    if (corr->parsed()) return run_human_corr(report_path, annotations, method);
    if (rollout->parsed()) return run_rollout(recording, budget, rollout_out, instruction);
    if (render->parsed()) return run_render_pose(calib, traj, render_out, width, height);
    return 2;
}
