#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ewm/embedding.hpp"

namespace ewm {

namespace detail {

template <typename T>
double cosine(const T* a, const T* b, std::size_t n, const std::string& where) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dot += double(a[i]) * double(b[i]);
        na += double(a[i]) * double(a[i]);
        nb += double(b[i]) * double(b[i]);
    }
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument(where + ": zero-norm vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace detail

// Patch-level temporal consistency. For each frame t >= 1,
//   s_t = 1/2 * mean_p cos(f_t[p], f_{t-1}[p]) + 1/2 * mean_p cos(f_t[p], f_0[p])
// and the score is the mean of s_t. Embeddings are normalized inside the
// cosine, so raw (unnormalized) inputs are accepted.
inline double scene_consistency(const PatchEmbeddingSeq& e) {
    if (e.frames < 2) throw std::invalid_argument("scene_consistency: need at least 2 frames");
    double sum = 0.0;
    for (std::size_t t = 1; t < e.frames; ++t) {
        double prev_mean = 0.0, init_mean = 0.0;
        for (std::size_t p = 0; p < e.patches; ++p) {
            const std::string where = "frame " + std::to_string(t) + ", patch " + std::to_string(p);
            prev_mean += detail::cosine(e.patch(t, p), e.patch(t - 1, p), e.dim, where);
            init_mean += detail::cosine(e.patch(t, p), e.patch(0, p), e.dim,
                                        "frame 0 vs " + where);
        }
        prev_mean /= double(e.patches);
        init_mean /= double(e.patches);
        sum += 0.5 * prev_mean + 0.5 * init_mean;
    }
    return sum / double(e.frames - 1);
}

// 1 - mean pairwise cosine similarity over all unordered pairs.
inline double diversity_score(const std::vector<GlobalEmbedding>& embs) {
    if (embs.size() < 2) throw std::invalid_argument("diversity_score: need at least 2 embeddings");
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < embs.size(); ++i) {
        for (std::size_t j = i + 1; j < embs.size(); ++j) {
            if (embs[i].vector.size() != embs[j].vector.size())
                throw std::invalid_argument("diversity_score: embedding dimension mismatch");
            sum += detail::cosine(embs[i].vector.data(), embs[j].vector.data(),
                                  embs[i].vector.size(),
                                  "embeddings " + std::to_string(i) + "/" + std::to_string(j));
            ++pairs;
        }
    }
    return 1.0 - sum / double(pairs);
}

// Lowercase, split on non-alphanumeric.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            cur += char(std::tolower(c));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// BLEU with clipped n-gram precision, geometric mean over orders 1..4
// (uniform weights) and the standard brevity penalty. No smoothing: any
// zero precision gives 0. Orders above the shorter token count are dropped
// so that bleu(a, a) = 1 holds for short texts too.
inline double bleu_global(std::string_view candidate, std::string_view reference) {
    std::vector<std::string> cand = tokenize(candidate);
    std::vector<std::string> ref = tokenize(reference);
    if (cand.empty() || ref.empty()) throw std::invalid_argument("bleu_global: empty token stream");

    const std::size_t max_order = std::min<std::size_t>(4, std::min(cand.size(), ref.size()));
    double log_prec_sum = 0.0;
    for (std::size_t n = 1; n <= max_order; ++n) {
        std::map<std::vector<std::string>, std::size_t> ref_counts;
        for (std::size_t i = 0; i + n <= ref.size(); ++i)
            ++ref_counts[std::vector<std::string>(ref.begin() + i, ref.begin() + i + n)];
        std::map<std::vector<std::string>, std::size_t> cand_counts;
        for (std::size_t i = 0; i + n <= cand.size(); ++i)
            ++cand_counts[std::vector<std::string>(cand.begin() + i, cand.begin() + i + n)];

        std::size_t clipped = 0, total = 0;
        for (const auto& [gram, count] : cand_counts) {
            total += count;
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) clipped += std::min(count, it->second);
        }
        if (total == 0 || clipped == 0) return 0.0;
        log_prec_sum += std::log(double(clipped) / double(total));
    }

    double bp = 1.0;
    if (cand.size() < ref.size()) bp = std::exp(1.0 - double(ref.size()) / double(cand.size()));
    return bp * std::exp(log_prec_sum / double(max_order));
}

struct KeyStepResult {
    double score = 0.0;              // mean cosine over index-aligned pairs
    double mismatch_fraction = 0.0;  // (max len - min len) / max len
};

// Index-aligned mean cosine up to the shorter list; the unmatched tail is
// reported as a mismatch fraction rather than folded into the score.
inline KeyStepResult keystep_consistency(const std::vector<std::vector<double>>& steps_gt,
                                         const std::vector<std::vector<double>>& steps_gen) {
    if (steps_gt.empty() || steps_gen.empty())
        throw std::invalid_argument("keystep_consistency: empty step list");
    const std::size_t n = std::min(steps_gt.size(), steps_gen.size());
    const std::size_t m = std::max(steps_gt.size(), steps_gen.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (steps_gt[i].size() != steps_gen[i].size())
            throw std::invalid_argument("keystep_consistency: step embedding dimension mismatch");
        sum += detail::cosine(steps_gt[i].data(), steps_gen[i].data(), steps_gt[i].size(),
                              "step " + std::to_string(i));
    }
    return {sum / double(n), double(m - n) / double(m)};
}

// Violation annotations over a fixed error taxonomy.
struct ViolationRecord {
    std::size_t taxonomy_size = 0;
    std::vector<std::pair<std::size_t, std::size_t>> violations;  // (category id, count)
};

// score = max(0, 1 - sum(counts) / taxonomy_size).
inline double logic_score(const ViolationRecord& v) {
    if (v.taxonomy_size < 1) throw std::invalid_argument("logic_score: taxonomy_size must be >= 1");
    std::size_t total = 0;
    for (const auto& [id, count] : v.violations) {
        if (id >= v.taxonomy_size)
            throw std::invalid_argument("logic_score: category id " + std::to_string(id) +
                                        " outside taxonomy of size " +
                                        std::to_string(v.taxonomy_size));
        total += count;
    }
    return std::max(0.0, 1.0 - double(total) / double(v.taxonomy_size));
}

}  // namespace ewm
