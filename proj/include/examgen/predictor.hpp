#pragma once

#include <vector>

#include <Eigen/Core>

#include "examgen/corpus.hpp"
#include "examgen/errors.hpp"

namespace examgen {

struct ScoreVector {
    Eigen::VectorXd scores;  // one predicted score per examinee
    double total_points = 0.0;

    double normalized_mean() const {
        if (scores.size() == 0) throw DomainError("empty score vector");
        return scores.mean() / total_points;
    }

    std::vector<double> normalized() const {
        std::vector<double> out(static_cast<std::size_t>(scores.size()));
        for (Eigen::Index i = 0; i < scores.size(); ++i) out[static_cast<std::size_t>(i)] = scores(i) / total_points;
        return out;
    }

    std::vector<double> percent() const {
        std::vector<double> out(static_cast<std::size_t>(scores.size()));
        for (Eigen::Index i = 0; i < scores.size(); ++i) {
            out[static_cast<std::size_t>(i)] = scores(i) * 100.0 / total_points;
        }
        return out;
    }
};

// r_{e,j} = product over covered skills of the examinee's mastery.
inline double answer_probability(const Eigen::VectorXd& proficiency_row, const Question& q) {
    double p = 1.0;
    for (int s : q.skills) p *= proficiency_row(s);
    return p;
}

// r_e = sum_j r_{e,j} * b_j over the paper's positions.
inline double exam_score(const Eigen::VectorXd& proficiency_row, const QuestionBank& bank, const ExamPaper& paper) {
    double total = 0.0;
    for (int j = 0; j < paper.size(); ++j) {
        total += answer_probability(proficiency_row, bank.question(paper.questions()[static_cast<std::size_t>(j)])) *
                 paper.points_at(j);
    }
    return total;
}

inline ScoreVector group_scores(const Eigen::MatrixXd& proficiency, const QuestionBank& bank, const ExamPaper& paper) {
    ScoreVector out;
    out.total_points = paper.spec().total_points;
    out.scores.resize(proficiency.rows());
    for (Eigen::Index e = 0; e < proficiency.rows(); ++e) {
        out.scores(e) = exam_score(proficiency.row(e), bank, paper);
    }
    return out;
}

// Holds per-examinee answer probabilities for the paper's current slots so
// that one-question replacements re-score in O(|E|) instead of O(n |E| |K|).
class AnswerProbabilityCache {
public:
    AnswerProbabilityCache(const Eigen::MatrixXd& proficiency, const QuestionBank& bank, const ExamPaper& paper)
        : proficiency_(&proficiency), bank_(&bank) {
        probs_.resize(proficiency.rows(), paper.size());
        for (int j = 0; j < paper.size(); ++j) {
            probs_.col(j) = probabilities_for(paper.questions()[static_cast<std::size_t>(j)]);
        }
        scores_.resize(proficiency.rows());
        for (Eigen::Index e = 0; e < proficiency.rows(); ++e) {
            double acc = 0.0;
            for (int j = 0; j < paper.size(); ++j) acc += probs_(e, j) * paper.points_at(j);
            scores_(e) = acc;
        }
        total_points_ = paper.spec().total_points;
    }

    Eigen::VectorXd probabilities_for(int question_idx) const {
        const Question& q = bank_->question(question_idx);
        Eigen::VectorXd out = Eigen::VectorXd::Ones(proficiency_->rows());
        for (int s : q.skills) out = out.cwiseProduct(proficiency_->col(s));
        return out;
    }

    // Scores if position h were replaced by a question with answer
    // probabilities `cand`, leaving the cache untouched.
    Eigen::VectorXd scores_with_replacement(const ExamPaper& paper, int h, const Eigen::VectorXd& cand) const {
        if (h < 0 || h >= paper.size()) throw DomainError("rescore position out of range");
        return scores_ + paper.points_at(h) * (cand - probs_.col(h));
    }

    // Commits the replacement at position h. Must be followed by the
    // matching update of the ExamPaper itself.
    void commit_replacement(const ExamPaper& paper, int h, int question_idx, const Eigen::VectorXd& cand) {
        scores_ = scores_with_replacement(paper, h, cand);
        probs_.col(h) = cand;
        (void)question_idx;
    }

    // Mirrors ExamPaper::replace_and_front on the cached columns.
    void rotate_front(const ExamPaper& paper, int h) {
        if (h == 0) return;
        Eigen::VectorXd moved = probs_.col(h);
        for (int j = h; j > 0; --j) probs_.col(j) = probs_.col(j - 1);
        probs_.col(0) = moved;
        (void)paper;
    }

    const Eigen::VectorXd& scores() const { return scores_; }
    const Eigen::MatrixXd& probabilities() const { return probs_; }

    ScoreVector score_vector() const {
        ScoreVector out;
        out.scores = scores_;
        out.total_points = total_points_;
        return out;
    }

private:
    const Eigen::MatrixXd* proficiency_;
    const QuestionBank* bank_;
    Eigen::MatrixXd probs_;   // |E| x n
    Eigen::VectorXd scores_;  // |E|
    double total_points_ = 0.0;
};

// Convenience wrapper matching the one-call contract: swap position h to
// `question_idx` and return the updated (cache, scores) pair state.
inline void rescore_after_swap(AnswerProbabilityCache& cache, ExamPaper& paper, int h, int question_idx) {
    const Eigen::VectorXd cand = cache.probabilities_for(question_idx);
    cache.commit_replacement(paper, h, question_idx, cand);
    paper.replace_at(h, question_idx);
}

}  // namespace examgen
