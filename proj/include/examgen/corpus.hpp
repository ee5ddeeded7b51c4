#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>

#include "examgen/csv.hpp"
#include "examgen/errors.hpp"
#include "examgen/rng.hpp"

namespace examgen {

struct Skill {
    std::string id;
    int index = -1;
};

struct Question {
    std::string id;
    std::vector<int> skills;  // sorted, distinct skill indices; never empty
    double score = 1.0;
};

class QuestionBank {
public:
    QuestionBank() = default;

    int add_skill(const std::string& id) {
        auto it = skill_by_id_.find(id);
        if (it != skill_by_id_.end()) return it->second;
        const int idx = static_cast<int>(skills_.size());
        skills_.push_back(Skill{id, idx});
        skill_by_id_.emplace(id, idx);
        return idx;
    }

    void add_question(Question q) {
        if (q.skills.empty()) throw DomainError("question '" + q.id + "' covers no skill");
        if (q.score <= 0.0) throw DomainError("question '" + q.id + "' has non-positive score");
        if (question_by_id_.count(q.id)) throw ReferenceError("duplicate question id '" + q.id + "'");
        std::sort(q.skills.begin(), q.skills.end());
        q.skills.erase(std::unique(q.skills.begin(), q.skills.end()), q.skills.end());
        for (int s : q.skills) {
            if (s < 0 || s >= skill_count()) {
                throw ReferenceError("question '" + q.id + "' references unknown skill index");
            }
        }
        question_by_id_.emplace(q.id, static_cast<int>(questions_.size()));
        questions_.push_back(std::move(q));
    }

    int skill_count() const { return static_cast<int>(skills_.size()); }
    int question_count() const { return static_cast<int>(questions_.size()); }
    const std::vector<Skill>& skills() const { return skills_; }
    const std::vector<Question>& questions() const { return questions_; }
    const Question& question(int idx) const { return questions_.at(static_cast<std::size_t>(idx)); }

    int find_question(const std::string& id) const {
        auto it = question_by_id_.find(id);
        return it == question_by_id_.end() ? -1 : it->second;
    }

    std::vector<double> incidence_row(int question_idx) const {
        std::vector<double> row(static_cast<std::size_t>(skill_count()), 0.0);
        for (int s : question(question_idx).skills) row[static_cast<std::size_t>(s)] = 1.0;
        return row;
    }

private:
    std::vector<Skill> skills_;
    std::vector<Question> questions_;
    std::unordered_map<std::string, int> skill_by_id_;
    std::unordered_map<std::string, int> question_by_id_;
};

struct InteractionRecord {
    int question_index = -1;
    int correct = 0;  // 0 or 1
};

struct InteractionLog {
    std::vector<std::string> examinee_ids;                  // first-appearance order
    std::vector<std::vector<InteractionRecord>> sequences;  // aligned with examinee_ids

    int examinee_count() const { return static_cast<int>(sequences.size()); }
};

struct ExamSpec {
    int n = 0;
    std::vector<double> points;   // per-position points b, length n
    double total_points = 0.0;    // o = sum(points)
    double target_difficulty = 0.7;

    static ExamSpec uniform(int n, double points_each, double target_difficulty) {
        ExamSpec s;
        if (n < 1) throw DomainError("exam spec requires n >= 1");
        if (points_each <= 0.0) throw DomainError("per-question points must be positive");
        if (target_difficulty < 0.0 || target_difficulty > 1.0) {
            throw DomainError("target difficulty must lie in [0,1]");
        }
        s.n = n;
        s.points.assign(static_cast<std::size_t>(n), points_each);
        s.total_points = points_each * n;
        s.target_difficulty = target_difficulty;
        return s;
    }

    static ExamSpec from_points(std::vector<double> b, double target_difficulty) {
        ExamSpec s;
        if (b.empty()) throw DomainError("exam spec requires n >= 1");
        if (target_difficulty < 0.0 || target_difficulty > 1.0) {
            throw DomainError("target difficulty must lie in [0,1]");
        }
        for (double p : b) {
            if (p <= 0.0) throw DomainError("per-question points must be positive");
        }
        s.n = static_cast<int>(b.size());
        s.total_points = std::accumulate(b.begin(), b.end(), 0.0);
        s.points = std::move(b);
        s.target_difficulty = target_difficulty;
        return s;
    }
};

// Ordered selection of n distinct questions. Points travel with the
// questions when the ordering changes, so the multiset of points (and the
// total o) is invariant under every transition.
class ExamPaper {
public:
    ExamPaper(std::vector<int> questions, ExamSpec spec)
        : questions_(std::move(questions)), spec_(std::move(spec)) {
        if (static_cast<int>(questions_.size()) != spec_.n) {
            throw DomainError("paper has " + std::to_string(questions_.size()) + " questions, spec demands " +
                              std::to_string(spec_.n));
        }
        std::unordered_set<int> seen;
        for (int q : questions_) {
            if (!seen.insert(q).second) throw DomainError("paper contains duplicate question index " + std::to_string(q));
        }
    }

    const std::vector<int>& questions() const { return questions_; }
    const ExamSpec& spec() const { return spec_; }
    int size() const { return spec_.n; }
    double points_at(int pos) const { return spec_.points.at(static_cast<std::size_t>(pos)); }

    bool contains(int question_idx) const {
        return std::find(questions_.begin(), questions_.end(), question_idx) != questions_.end();
    }

    // Replace position h with `candidate`, then move the replaced slot to
    // the front: new order = [candidate, everything else in old order].
    void replace_and_front(int h, int candidate) {
        if (h < 0 || h >= spec_.n) throw DomainError("position out of range");
        if (contains(candidate)) throw DomainError("candidate already in paper");
        const double pts = spec_.points[static_cast<std::size_t>(h)];
        questions_.erase(questions_.begin() + h);
        spec_.points.erase(spec_.points.begin() + h);
        questions_.insert(questions_.begin(), candidate);
        spec_.points.insert(spec_.points.begin(), pts);
    }

    // Plain positional swap, ordering preserved.
    void replace_at(int h, int candidate) {
        if (h < 0 || h >= spec_.n) throw DomainError("position out of range");
        if (contains(candidate)) throw DomainError("candidate already in paper");
        questions_[static_cast<std::size_t>(h)] = candidate;
    }

private:
    std::vector<int> questions_;
    ExamSpec spec_;
};

// ---------------------------------------------------------------------------
// CSV ingestion / emission
// ---------------------------------------------------------------------------

inline QuestionBank load_question_bank(const std::string& path) {
    csv::Reader reader(path, {"question_id", "skill_ids", "score"});
    QuestionBank bank;
    std::vector<std::string> row;
    while (reader.next(row)) {
        const std::string& qid = row[0];
        if (qid.empty()) throw ParseError(path, reader.line(), "empty question_id");
        const auto skill_ids = csv::split(row[1], ';');
        Question q;
        q.id = qid;
        for (const auto& sid : skill_ids) {
            if (sid.empty()) continue;
            q.skills.push_back(bank.add_skill(sid));
        }
        if (q.skills.empty()) {
            throw DomainError(path + ":" + std::to_string(reader.line()) + ": question '" + qid +
                              "' lists no skills");
        }
        q.score = csv::parse_double(row[2], path, reader.line());
        if (q.score <= 0.0) {
            throw DomainError(path + ":" + std::to_string(reader.line()) + ": score must be positive");
        }
        bank.add_question(std::move(q));
    }
    return bank;
}

inline void write_question_bank(const QuestionBank& bank, const std::string& path) {
    csv::Writer w(path, {"question_id", "skill_ids", "score"});
    for (const auto& q : bank.questions()) {
        std::string sk;
        for (std::size_t i = 0; i < q.skills.size(); ++i) {
            if (i) sk.push_back(';');
            sk += bank.skills()[static_cast<std::size_t>(q.skills[i])].id;
        }
        w.write_row({q.id, sk, csv::format_double(q.score)});
    }
    w.close();
}

inline InteractionLog load_interactions(const std::string& path, const QuestionBank& bank) {
    csv::Reader reader(path, {"examinee_id", "question_id", "correct"});
    InteractionLog log;
    std::unordered_map<std::string, int> examinee_index;
    std::vector<std::string> row;
    while (reader.next(row)) {
        const std::string& eid = row[0];
        if (eid.empty()) throw ParseError(path, reader.line(), "empty examinee_id");
        const int qidx = bank.find_question(row[1]);
        if (qidx < 0) {
            throw ReferenceError(path + ":" + std::to_string(reader.line()) + ": unknown question id '" + row[1] +
                                 "'");
        }
        const long correct = csv::parse_long(row[2], path, reader.line());
        if (correct != 0 && correct != 1) {
            throw DomainError(path + ":" + std::to_string(reader.line()) + ": correct must be 0 or 1, got " +
                              row[2]);
        }
        auto it = examinee_index.find(eid);
        int e;
        if (it == examinee_index.end()) {
            e = static_cast<int>(log.sequences.size());
            examinee_index.emplace(eid, e);
            log.examinee_ids.push_back(eid);
            log.sequences.emplace_back();
        } else {
            e = it->second;
        }
        log.sequences[static_cast<std::size_t>(e)].push_back(InteractionRecord{qidx, static_cast<int>(correct)});
    }
    return log;
}

inline void write_interactions(const InteractionLog& log, const QuestionBank& bank, const std::string& path) {
    csv::Writer w(path, {"examinee_id", "question_id", "correct"});
    for (std::size_t e = 0; e < log.sequences.size(); ++e) {
        for (const auto& rec : log.sequences[e]) {
            w.write_row({log.examinee_ids[e], bank.question(rec.question_index).id, std::to_string(rec.correct)});
        }
    }
    w.close();
}

// Drops examinees with fewer than min_records interactions.
inline InteractionLog filter_min_records(const InteractionLog& log, int min_records) {
    InteractionLog out;
    for (std::size_t e = 0; e < log.sequences.size(); ++e) {
        if (static_cast<int>(log.sequences[e].size()) >= min_records) {
            out.examinee_ids.push_back(log.examinee_ids[e]);
            out.sequences.push_back(log.sequences[e]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

// Per-examinee per-skill success probabilities. Synthesis-only artifact:
// it must never reach the tracer, only validation code.
struct GroundTruthMastery {
    Eigen::MatrixXd initial;  // |E| x |K|
    Eigen::MatrixXd final_;   // after learning drift

    const Eigen::MatrixXd& values() const { return final_; }
};

struct SynthesisConfig {
    int num_skills = 50;
    int num_questions = 2000;
    int num_examinees = 50;
    int records_min = 80;
    int records_max = 120;

    int skills_per_question_min = 1;
    int skills_per_question_max = 3;
    // Skill popularity ~ 1/(1+rank)^exponent; 0 gives uniform skills.
    double skill_popularity_exponent = 0.7;

    // Bimodal mastery model: each (examinee, skill) pair is "strong" with
    // probability high_prob, success probability drawn from the matching range.
    double mastery_high_prob = 0.65;
    double mastery_high_lo = 0.90;
    double mastery_high_hi = 0.99;
    double mastery_low_lo = 0.15;
    double mastery_low_hi = 0.40;

    // After each attempt touching a skill: p <- p + drift * (1 - p).
    double learning_drift = 0.0;

    // 0: questions drawn uniformly. >= 1: session-structured practice — a
    // focus skill is held for a geometric run of this mean length and each
    // record draws a question covering it.
    double session_length_mean = 0.0;

    double question_score = 1.0;

    // Optional seed bank: new questions sample their skill sets from the
    // empirical skill-set distribution of this bank.
    const QuestionBank* seed_bank = nullptr;

    void validate() const {
        if (num_skills < 1 || num_questions < 1 || num_examinees < 1) {
            throw ConfigError("synthesis requires positive |K|, |Q|, |E|");
        }
        if (records_min < 1 || records_max < records_min) {
            throw ConfigError("synthesis requires 1 <= records_min <= records_max");
        }
        if (skills_per_question_min < 1 || skills_per_question_max < skills_per_question_min ||
            skills_per_question_max > num_skills) {
            throw ConfigError("invalid skills-per-question range");
        }
        if (mastery_high_prob < 0.0 || mastery_high_prob > 1.0) throw ConfigError("mastery_high_prob out of [0,1]");
        if (learning_drift < 0.0 || learning_drift >= 1.0) throw ConfigError("learning_drift out of [0,1)");
        if (session_length_mean != 0.0 && session_length_mean < 1.0) {
            throw ConfigError("session_length_mean must be 0 (uniform) or >= 1");
        }
        if (question_score <= 0.0) throw ConfigError("question score must be positive");
    }
};

struct SyntheticCorpus {
    QuestionBank bank;
    InteractionLog log;
    GroundTruthMastery mastery;
};

namespace detail {

inline std::vector<int> draw_skill_set(const SynthesisConfig& cfg, const std::vector<double>& skill_cdf, Rng& rng) {
    const int k = cfg.skills_per_question_min +
                  rng.uniform_int(cfg.skills_per_question_max - cfg.skills_per_question_min + 1);
    std::vector<int> skills;
    skills.reserve(static_cast<std::size_t>(k));
    while (static_cast<int>(skills.size()) < k) {
        const double u = rng.uniform01();
        const int s = static_cast<int>(std::lower_bound(skill_cdf.begin(), skill_cdf.end(), u) - skill_cdf.begin());
        const int clamped = std::min(s, cfg.num_skills - 1);
        if (std::find(skills.begin(), skills.end(), clamped) == skills.end()) skills.push_back(clamped);
    }
    std::sort(skills.begin(), skills.end());
    return skills;
}

}  // namespace detail

inline SyntheticCorpus synthesize_corpus(const SynthesisConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(mix_seed(seed, 0));

    SyntheticCorpus out;

    // Skill catalog. When a seed bank is given its catalog is reused so the
    // empirical skill-set distribution carries over.
    if (cfg.seed_bank != nullptr) {
        for (const auto& s : cfg.seed_bank->skills()) out.bank.add_skill(s.id);
    } else {
        for (int i = 0; i < cfg.num_skills; ++i) out.bank.add_skill("s" + std::to_string(i));
    }
    const int num_skills = out.bank.skill_count();

    std::vector<double> skill_cdf;
    if (cfg.seed_bank == nullptr) {
        std::vector<double> w(static_cast<std::size_t>(num_skills));
        double total = 0.0;
        for (int i = 0; i < num_skills; ++i) {
            w[static_cast<std::size_t>(i)] = std::pow(1.0 + i, -cfg.skill_popularity_exponent);
            total += w[static_cast<std::size_t>(i)];
        }
        skill_cdf.resize(w.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc += w[i] / total;
            skill_cdf[i] = acc;
        }
        skill_cdf.back() = 1.0;
    }

    for (int j = 0; j < cfg.num_questions; ++j) {
        Question q;
        q.id = "q" + std::to_string(j);
        q.score = cfg.question_score;
        if (cfg.seed_bank != nullptr) {
            const int pick = rng.uniform_int(cfg.seed_bank->question_count());
            q.skills = cfg.seed_bank->question(pick).skills;
        } else {
            q.skills = detail::draw_skill_set(cfg, skill_cdf, rng);
        }
        out.bank.add_question(std::move(q));
    }

    // Ground-truth mastery.
    Eigen::MatrixXd mastery(cfg.num_examinees, num_skills);
    for (int e = 0; e < cfg.num_examinees; ++e) {
        for (int i = 0; i < num_skills; ++i) {
            const bool strong = rng.uniform01() < cfg.mastery_high_prob;
            mastery(e, i) = strong ? rng.uniform(cfg.mastery_high_lo, cfg.mastery_high_hi)
                                   : rng.uniform(cfg.mastery_low_lo, cfg.mastery_low_hi);
        }
    }
    out.mastery.initial = mastery;

    // Interaction sequences: Bernoulli correctness with probability =
    // product of the covered skills' current mastery. Question choice is
    // uniform, or session-structured when session_length_mean >= 1.
    std::vector<std::vector<int>> by_skill(static_cast<std::size_t>(num_skills));
    if (cfg.session_length_mean >= 1.0) {
        for (int j = 0; j < out.bank.question_count(); ++j) {
            for (int s : out.bank.question(j).skills) by_skill[static_cast<std::size_t>(s)].push_back(j);
        }
    }
    for (int e = 0; e < cfg.num_examinees; ++e) {
        out.log.examinee_ids.push_back("e" + std::to_string(e));
        const int len = cfg.records_min + rng.uniform_int(cfg.records_max - cfg.records_min + 1);
        std::vector<InteractionRecord> seq;
        seq.reserve(static_cast<std::size_t>(len));
        int focus = -1;
        for (int t = 0; t < len; ++t) {
            int qidx;
            if (cfg.session_length_mean >= 1.0) {
                if (focus < 0 || rng.uniform01() < 1.0 / cfg.session_length_mean) {
                    focus = rng.uniform_int(num_skills);
                    while (by_skill[static_cast<std::size_t>(focus)].empty()) focus = rng.uniform_int(num_skills);
                }
                const auto& pool = by_skill[static_cast<std::size_t>(focus)];
                qidx = pool[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(pool.size())))];
            } else {
                qidx = rng.uniform_int(out.bank.question_count());
            }
            double p = 1.0;
            for (int s : out.bank.question(qidx).skills) p *= mastery(e, s);
            const int y = rng.uniform01() < p ? 1 : 0;
            seq.push_back(InteractionRecord{qidx, y});
            if (cfg.learning_drift > 0.0) {
                for (int s : out.bank.question(qidx).skills) {
                    mastery(e, s) += cfg.learning_drift * (1.0 - mastery(e, s));
                }
            }
        }
        out.log.sequences.push_back(std::move(seq));
    }
    out.mastery.final_ = mastery;
    return out;
}

// ---------------------------------------------------------------------------
// Derived statistics
// ---------------------------------------------------------------------------

// Historical right rate of one question: correct attempts / total attempts.
inline double question_difficulty_label(const InteractionLog& log, int question_idx) {
    long attempts = 0;
    long correct = 0;
    for (const auto& seq : log.sequences) {
        for (const auto& rec : seq) {
            if (rec.question_index == question_idx) {
                ++attempts;
                correct += rec.correct;
            }
        }
    }
    if (attempts == 0) {
        throw UndefinedLabelError("question index " + std::to_string(question_idx) + " was never attempted");
    }
    return static_cast<double>(correct) / static_cast<double>(attempts);
}

// c_i = (#questions covering skill i) / (total skill incidences in the bank).
inline Eigen::VectorXd course_skill_weights(const QuestionBank& bank) {
    if (bank.question_count() == 0) throw DomainError("course_skill_weights: empty bank");
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(bank.skill_count());
    for (const auto& q : bank.questions()) {
        for (int s : q.skills) counts(s) += 1.0;
    }
    const double total = counts.sum();
    return counts / total;
}

}  // namespace examgen
