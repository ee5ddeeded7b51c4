#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "examgen/corpus.hpp"
#include "examgen/errors.hpp"

namespace examgen {

struct RewardWeights {
    double w1 = 1.0 / 3.0;
    double w2 = 1.0 / 3.0;
    double w3 = 1.0 / 3.0;

    void validate() const {
        for (double w : {w1, w2, w3}) {
            if (w < 0.0 || w > 1.0) throw DomainError("reward weights must lie in [0,1]");
        }
    }
};

// Target score distribution on the normalized [0,1] scale.
struct NormalSpec {
    double mu = 0.7;
    double sigma = 0.15;

    void validate() const {
        if (sigma <= 0.0) throw DomainError("normal spec requires sigma > 0");
    }
};

// Acklam's rational approximation of the standard normal inverse CDF,
// |relative error| < 1.15e-9 over (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile requires p in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,  -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01, -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Deterministic m-point discretization of N(mu, sigma^2): quantiles at
// mid-probabilities (k - 0.5) / m, ascending.
inline std::vector<double> normal_quantile_sample(double mu, double sigma, int m) {
    if (m < 1) throw DomainError("quantile sample needs at least one point");
    if (sigma <= 0.0) throw DomainError("quantile sample requires sigma > 0");
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) {
        out[static_cast<std::size_t>(k - 1)] = mu + sigma * normal_quantile((k - 0.5) / m);
    }
    return out;
}

// W1 between two equal-size empirical samples: mean absolute difference of
// the sorted values, which attains the optimal-transport infimum.
inline double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("wasserstein_1d requires non-empty samples");
    if (a.size() != b.size()) {
        throw DomainError("wasserstein_1d requires equal sample sizes, got " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc / static_cast<double>(a.size());
}

// r1 = 1 - |d - Rbar| on the normalized score scale.
inline double difficulty_reward(double mean_normalized_score, double target_difficulty) {
    if (mean_normalized_score < 0.0 || mean_normalized_score > 1.0) {
        throw DomainError("difficulty_reward: normalized mean score out of [0,1]");
    }
    if (target_difficulty < 0.0 || target_difficulty > 1.0) {
        throw DomainError("difficulty_reward: target out of [0,1]");
    }
    return 1.0 - std::abs(target_difficulty - mean_normalized_score);
}

// r2 = clamp(1 - W1(normalized scores, quantile sample of the target normal)).
inline double rationality_reward(const std::vector<double>& normalized_scores, const NormalSpec& spec) {
    if (normalized_scores.empty()) throw DomainError("rationality_reward: empty scores");
    spec.validate();
    const auto sample = normal_quantile_sample(spec.mu, spec.sigma, static_cast<int>(normalized_scores.size()));
    const double w = wasserstein_1d(normalized_scores, sample);
    return std::clamp(1.0 - w, 0.0, 1.0);
}

inline double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

// Skill proportions of a paper: incidences per skill over total incidences.
inline Eigen::VectorXd paper_skill_proportions(const QuestionBank& bank, const std::vector<int>& paper_questions) {
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(bank.skill_count());
    for (int q : paper_questions) {
        for (int s : bank.question(q).skills) counts(s) += 1.0;
    }
    const double total = counts.sum();
    if (total == 0.0) throw DomainError("paper covers no skills");
    return counts / total;
}

// r3 = cosine(Vbar, Cbar); non-negative vectors keep it in [0,1].
inline double coverage_reward(const Eigen::VectorXd& paper_proportions, const Eigen::VectorXd& course_weights) {
    if (paper_proportions.size() != course_weights.size()) {
        throw DomainError("coverage_reward: dimension mismatch");
    }
    return cosine_similarity(paper_proportions, course_weights);
}

inline double coverage_reward(const QuestionBank& bank, const std::vector<int>& paper_questions,
                              const Eigen::VectorXd& course_weights) {
    return coverage_reward(paper_skill_proportions(bank, paper_questions), course_weights);
}

inline double combined_reward(double r1, double r2, double r3, const RewardWeights& w) {
    w.validate();
    return w.w1 * r1 + w.w2 * r2 + w.w3 * r3;
}

// ---------------------------------------------------------------------------
// Evaluation indicators (0-100 score scale)
// ---------------------------------------------------------------------------

inline double difficulty_indicator(const std::vector<double>& scores_percent) {
    if (scores_percent.empty()) throw DomainError("difficulty_indicator: empty scores");
    double mean = 0.0;
    for (double s : scores_percent) mean += s;
    mean /= static_cast<double>(scores_percent.size());
    return 1.0 - std::abs(mean - 70.0) / 100.0;
}

inline double rationality_indicator(const std::vector<double>& scores_percent) {
    if (scores_percent.empty()) throw DomainError("rationality_indicator: empty scores");
    std::vector<double> normalized(scores_percent.size());
    for (std::size_t i = 0; i < scores_percent.size(); ++i) normalized[i] = scores_percent[i] / 100.0;
    const auto sample = normal_quantile_sample(0.70, 0.15, static_cast<int>(normalized.size()));
    return 1.0 - wasserstein_1d(normalized, sample);
}

inline double validity_indicator(const QuestionBank& bank, const std::vector<int>& paper_questions,
                                 const Eigen::VectorXd& course_weights) {
    return coverage_reward(bank, paper_questions, course_weights);
}

// Duplication scale across K papers, unordered pairs counted once:
// 1 - (sum over pairs of |shared questions|) / (total questions).
inline double discrimination(const std::vector<std::vector<int>>& papers) {
    if (papers.size() < 2) throw DomainError("discrimination requires at least two papers");
    std::size_t total = 0;
    for (const auto& p : papers) total += p.size();
    double shared = 0.0;
    for (std::size_t i = 0; i < papers.size(); ++i) {
        std::vector<int> a = papers[i];
        std::sort(a.begin(), a.end());
        for (std::size_t j = i + 1; j < papers.size(); ++j) {
            std::vector<int> b = papers[j];
            std::sort(b.begin(), b.end());
            std::vector<int> both;
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
            shared += static_cast<double>(both.size());
        }
    }
    return 1.0 - shared / static_cast<double>(total);
}

}  // namespace examgen
