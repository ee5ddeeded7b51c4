#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Core>

#include "examgen/corpus.hpp"
#include "examgen/objectives.hpp"
#include "examgen/predictor.hpp"

namespace examgen {

struct RewardComponents {
    double r1 = 0.0;
    double r2 = 0.0;
    double r3 = 0.0;
    double combined = 0.0;
};

struct IndicatorValues {
    double difficulty = 0.0;
    double rationality = 0.0;
    double validity = 0.0;

    double mean() const { return (difficulty + rationality + validity) / 3.0; }
};

// Combined-reward scoring shared by the agent, the baselines and the CLI.
// Counts every evaluation so searches can be budget-matched.
class RewardEvaluator {
public:
    RewardEvaluator(const QuestionBank& bank, const Eigen::MatrixXd& proficiency, Eigen::VectorXd course_weights,
                    RewardWeights weights, NormalSpec normal, double total_points, double target_difficulty)
        : bank_(&bank),
          proficiency_(&proficiency),
          course_weights_(std::move(course_weights)),
          weights_(weights),
          normal_(normal),
          total_points_(total_points),
          target_difficulty_(target_difficulty) {
        weights_.validate();
        normal_.validate();
        normal_sample_ = normal_quantile_sample(normal_.mu, normal_.sigma, static_cast<int>(proficiency.rows()));
    }

    const QuestionBank& bank() const { return *bank_; }
    const Eigen::MatrixXd& proficiency() const { return *proficiency_; }
    const Eigen::VectorXd& course_weights() const { return course_weights_; }
    double total_points() const { return total_points_; }
    double target_difficulty() const { return target_difficulty_; }

    // Reward of a (scores, per-skill incidence counts) pair.
    RewardComponents evaluate(const Eigen::VectorXd& scores, const Eigen::VectorXd& skill_counts) const {
        ++evaluations_;
        RewardComponents out;
        const double mean_norm = scores.mean() / total_points_;
        out.r1 = 1.0 - std::abs(target_difficulty_ - mean_norm);

        sorted_buffer_.resize(static_cast<std::size_t>(scores.size()));
        for (Eigen::Index i = 0; i < scores.size(); ++i) {
            sorted_buffer_[static_cast<std::size_t>(i)] = scores(i) / total_points_;
        }
        std::sort(sorted_buffer_.begin(), sorted_buffer_.end());
        double w = 0.0;
        for (std::size_t i = 0; i < sorted_buffer_.size(); ++i) w += std::abs(sorted_buffer_[i] - normal_sample_[i]);
        w /= static_cast<double>(sorted_buffer_.size());
        out.r2 = std::clamp(1.0 - w, 0.0, 1.0);

        const double total = skill_counts.sum();
        out.r3 = total == 0.0 ? 0.0 : cosine_similarity(skill_counts / total, course_weights_);
        out.combined = weights_.w1 * out.r1 + weights_.w2 * out.r2 + weights_.w3 * out.r3;
        return out;
    }

    // Full recomputation from the paper alone.
    RewardComponents evaluate_paper(const ExamPaper& paper) const {
        const ScoreVector sv = group_scores(*proficiency_, *bank_, paper);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(bank_->skill_count());
        for (int q : paper.questions()) {
            for (int s : bank_->question(q).skills) counts(s) += 1.0;
        }
        return evaluate(sv.scores, counts);
    }

    IndicatorValues indicators(const ExamPaper& paper) const {
        const ScoreVector sv = group_scores(*proficiency_, *bank_, paper);
        IndicatorValues out;
        const auto percent = sv.percent();
        out.difficulty = difficulty_indicator(percent);
        out.rationality = rationality_indicator(percent);
        out.validity = validity_indicator(*bank_, paper.questions(), course_weights_);
        return out;
    }

    long evaluations() const { return evaluations_; }
    void reset_evaluations() const { evaluations_ = 0; }

private:
    const QuestionBank* bank_;
    const Eigen::MatrixXd* proficiency_;
    Eigen::VectorXd course_weights_;
    RewardWeights weights_;
    NormalSpec normal_;
    double total_points_;
    double target_difficulty_;
    std::vector<double> normal_sample_;
    mutable std::vector<double> sorted_buffer_;
    mutable long evaluations_ = 0;
};

}  // namespace examgen
