#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ewm/manifest.hpp"
#include "ewm/rank_correlation.hpp"
#include "ewm/report.hpp"

namespace ewm {

namespace detail {

// Runs fn(0..n-1) on `workers` threads pulling indices from a shared
// counter. Every index is processed exactly once; writers own disjoint
// result slots so no further synchronization is needed.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
}

inline double mean2(double a, double b) { return 0.5 * (a + b); }

}  // namespace detail

// Evaluates one episode: trajectory metrics on the lowest-symH sample, then
// scene/diversity/semantic scores from whichever files the manifest
// provides. Missing optional inputs leave the score null; unreadable or
// ill-formed files throw with path context.
inline EpisodeRecord evaluate_episode(const EpisodeManifest& m, const EvalConfig& cfg) {
    EpisodeRecord rec;
    rec.task_id = m.task_id;
    rec.episode_id = m.episode_id;

    Trajectory gt = parse_trajectory(m.gt_trajectory.string());
    std::vector<Trajectory> samples;
    samples.reserve(m.samples.size());
    for (const auto& p : m.samples) samples.push_back(parse_trajectory(p.string()));

    PointSeq gt_left = PointSeq::from_trajectory(gt, Arm::Left);
    PointSeq gt_right = PointSeq::from_trajectory(gt, Arm::Right);

    // Per-sample symH, averaged over arms; the lowest wins (ties -> lowest
    // index) and is the sample carried forward.
    std::vector<double> symh_left(samples.size()), symh_right(samples.size());
    std::size_t best = 0;
    double best_symh = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        symh_left[i] = symmetric_hausdorff(gt_left, PointSeq::from_trajectory(samples[i], Arm::Left));
        symh_right[i] =
            symmetric_hausdorff(gt_right, PointSeq::from_trajectory(samples[i], Arm::Right));
        double combined = detail::mean2(symh_left[i], symh_right[i]);
        if (i == 0 || combined < best_symh) {
            best_symh = combined;
            best = i;
        }
    }
    rec.selected = best;

    auto sa_of = [&](std::size_t i) {
        return detail::mean2(1.0 / (symh_left[i] + cfg.epsilon),
                             1.0 / (symh_right[i] + cfg.epsilon));
    };
    if (cfg.sa_sample_aggregation == "mean") {
        double sum = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) sum += sa_of(i);
        rec.sa = sum / double(samples.size());
    } else {
        rec.sa = sa_of(best);
    }

    const Trajectory& sel = samples[best];
    PointSeq sel_left = PointSeq::from_trajectory(sel, Arm::Left);
    PointSeq sel_right = PointSeq::from_trajectory(sel, Arm::Right);
    rec.ta = detail::mean2(ta_score(gt_left, sel_left, cfg.epsilon),
                           ta_score(gt_right, sel_right, cfg.epsilon));

    // DYN needs K >= 3 on both trajectories for an acceleration series.
    if (gt.size() >= 3 && sel.size() >= 3) {
        rec.dyn = detail::mean2(
            dyn_score(kinematic_profile(gt, Arm::Left), kinematic_profile(sel, Arm::Left), cfg.dyn),
            dyn_score(kinematic_profile(gt, Arm::Right), kinematic_profile(sel, Arm::Right),
                      cfg.dyn));
    }

    if (!m.patch_embeddings.empty())
        rec.scene = scene_consistency(load_patch_embeddings(m.patch_embeddings[best].string()));

    if (!m.global_embeddings.empty() && m.global_embeddings.size() >= 2) {
        std::vector<GlobalEmbedding> embs;
        for (const auto& p : m.global_embeddings) embs.push_back(load_global_embedding(p.string()));
        rec.diversity = diversity_score(embs);
    }

    if (m.captions) {
        CaptionRecord cap = load_caption_record(*m.captions);
        rec.bleu = bleu_global(cap.summary, cap.instruction);
        if (!cap.steps_gt.empty() && !cap.steps_gen.empty()) {
            KeyStepResult ks = keystep_consistency(cap.steps_gt, cap.steps_gen);
            rec.clip = ks.score;
            rec.keystep_mismatch = ks.mismatch_fraction;
        }
    }

    if (m.violations) rec.logic = logic_score(load_violation_record(*m.violations));

    if (cfg.semantic_weights && rec.bleu && rec.clip && rec.logic) {
        const auto& w = *cfg.semantic_weights;
        double total = w[0] + w[1] + w[2];
        rec.semantic_combined = (w[0] * *rec.bleu + w[1] * *rec.clip + w[2] * *rec.logic) / total;
    }
    return rec;
}

// Batch evaluation over a worker pool. Episode failures become failed
// records instead of aborting the batch, and the aggregation runs over
// episodes sorted by id, so the report is identical for any worker count
// and any input order.
inline MetricReport evaluate_benchmark(const std::vector<EpisodeManifest>& manifests,
                                       const EvalConfig& cfg, unsigned workers = 0) {
    if (manifests.empty()) throw std::invalid_argument("evaluate_benchmark: no manifests");
    if (workers == 0) workers = cfg.workers;

    MetricReport report;
    report.config_hash = cfg.hash();
    report.episodes.resize(manifests.size());
    detail::parallel_for(manifests.size(), workers, [&](std::size_t i) {
        try {
            report.episodes[i] = evaluate_episode(manifests[i], cfg);
        } catch (const std::exception& e) {
            EpisodeRecord rec;
            rec.task_id = manifests[i].task_id;
            rec.episode_id = manifests[i].episode_id;
            rec.failed = true;
            rec.error = e.what();
            report.episodes[i] = rec;
        }
    });
    aggregate_report(report);
    return report;
}

// Per-annotator ordinal rankings over a fixed model list.
struct HumanAnnotations {
    std::vector<std::string> models;
    // one entry per (annotator, sample): ranks[i] is the ordinal rank of
    // models[i], 1 = best; each entry is a permutation of 1..n.
    std::vector<std::vector<double>> rankings;
};

inline HumanAnnotations load_human_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open annotations");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    HumanAnnotations ann;
    ann.models = j.at("models").get<std::vector<std::string>>();
    const std::size_t n = ann.models.size();
    for (const auto& row : j.at("annotations")) {
        auto ranks = row.at("ranks").get<std::vector<double>>();
        if (ranks.size() != n)
            throw std::runtime_error(path.string() + ": ranks length != model count");
        std::vector<bool> seen(n, false);
        for (double r : ranks) {
            double idx = r - 1.0;
            if (idx != std::floor(idx) || idx < 0 || idx >= double(n) || seen[std::size_t(idx)])
                throw std::runtime_error(path.string() +
                                         ": ranks must be a permutation of 1..n");
            seen[std::size_t(idx)] = true;
        }
        ann.rankings.push_back(std::move(ranks));
    }
    if (ann.rankings.empty()) throw std::runtime_error(path.string() + ": no annotations");
    return ann;
}

// Mean ordinal rank per model across annotators and samples.
inline std::vector<double> aggregate_human_ranks(const HumanAnnotations& ann) {
    std::vector<double> mean(ann.models.size(), 0.0);
    for (const auto& row : ann.rankings)
        for (std::size_t i = 0; i < row.size(); ++i) mean[i] += row[i];
    for (double& v : mean) v /= double(ann.rankings.size());
    return mean;
}

// Correlates a metric score per model (higher = better) against aggregated
// human ranks. Scores are converted to ascending rank values (1 = best) so
// that agreement gives +1.
inline double human_metric_correlation(const std::vector<double>& metric_scores,
                                       const HumanAnnotations& ann, CorrelationMethod method) {
    if (metric_scores.size() != ann.models.size())
        throw std::invalid_argument("human_metric_correlation: score/model count mismatch");
    std::vector<double> neg;
    neg.reserve(metric_scores.size());
    for (double s : metric_scores) neg.push_back(-s);
    std::vector<double> metric_ranks = average_ranks(neg);  // best score -> rank 1
    return rank_correlation(metric_ranks, aggregate_human_ranks(ann), method);
}

}  // namespace ewm
