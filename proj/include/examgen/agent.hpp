#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "examgen/corpus.hpp"
#include "examgen/errors.hpp"
#include "examgen/evaluator.hpp"
#include "examgen/optim.hpp"
#include "examgen/partitioner.hpp"
#include "examgen/predictor.hpp"
#include "examgen/rng.hpp"

namespace examgen {

struct AgentConfig {
    double gamma = 0.9;
    double eps_start = 0.99;
    double eps_end = 0.1;
    int batch_size = 128;
    int target_sync_interval = 100;
    int replay_capacity = 2000;
    int episodes = 5000;
    int steps_per_episode = 50;
    double subspace_threshold = 0.91;  // ts
    double restart_from_best_prob = 0.5;
    int qnet_hidden = 200;  // d_h
    std::uint64_t seed = 1;
    bool partition_disabled = false;  // ablation arm: whole bank, no threshold rule

    void validate() const {
        if (gamma < 0.0 || gamma >= 1.0) throw ConfigError("agent gamma must lie in [0,1)");
        if (eps_end > eps_start) throw ConfigError("agent eps_end must not exceed eps_start");
        if (batch_size < 1 || replay_capacity < batch_size) {
            throw ConfigError("agent requires batch_size >= 1 and replay_capacity >= batch_size");
        }
        if (episodes < 1 || steps_per_episode < 1) throw ConfigError("agent episode counts must be positive");
        if (target_sync_interval < 1) throw ConfigError("target sync interval must be positive");
        if (qnet_hidden < 1) throw ConfigError("qnet hidden size must be positive");
    }
};

// Linear per-step schedule: after t steps eps = max(end, start - t*slope),
// with slope chosen to reach eps_end exactly after total_steps.
inline double epsilon_at(const AgentConfig& cfg, long step, long total_steps) {
    if (total_steps <= 0) return cfg.eps_end;
    const double slope = (cfg.eps_start - cfg.eps_end) / static_cast<double>(total_steps);
    return std::max(cfg.eps_end, cfg.eps_start - static_cast<double>(step) * slope);
}

// State encoding: concatenation of the paper's question embeddings, in
// paper order. `embeddings` has one column per bank question.
inline Eigen::VectorXd encode_state(const std::vector<int>& paper_questions, const Eigen::MatrixXd& embeddings) {
    const Eigen::Index d_q = embeddings.rows();
    Eigen::VectorXd out(static_cast<Eigen::Index>(paper_questions.size()) * d_q);
    for (std::size_t j = 0; j < paper_questions.size(); ++j) {
        out.segment(static_cast<Eigen::Index>(j) * d_q, d_q) = embeddings.col(paper_questions[j]);
    }
    return out;
}

inline Eigen::VectorXd encode_state(const ExamPaper& paper, const Eigen::MatrixXd& embeddings) {
    return encode_state(paper.questions(), embeddings);
}

// Scalar scoring network Q(state ⊕ question embedding) with one tanh
// hidden layer. The paper-side weights see d_s inputs, the candidate-side
// weights d_q, which keeps per-candidate evaluation cheap: the state
// projection is shared across a candidate set.
struct QNetwork {
    int d_s = 0;
    int d_q = 0;
    int d_h = 0;
    Eigen::MatrixXd W1;  // d_h x (d_s + d_q)
    Eigen::MatrixXd b1;  // d_h x 1
    Eigen::MatrixXd w2;  // 1 x d_h
    Eigen::MatrixXd b2;  // 1 x 1

    static QNetwork zeros(int d_s, int d_q, int d_h) {
        QNetwork q;
        q.d_s = d_s;
        q.d_q = d_q;
        q.d_h = d_h;
        q.W1 = Eigen::MatrixXd::Zero(d_h, d_s + d_q);
        q.b1 = Eigen::MatrixXd::Zero(d_h, 1);
        q.w2 = Eigen::MatrixXd::Zero(1, d_h);
        q.b2 = Eigen::MatrixXd::Zero(1, 1);
        return q;
    }

    static QNetwork random_init(int d_s, int d_q, int d_h, Rng& rng) {
        QNetwork q = zeros(d_s, d_q, d_h);
        const double k1 = 1.0 / std::sqrt(static_cast<double>(d_s + d_q));
        for (Eigen::Index r = 0; r < q.W1.rows(); ++r) {
            for (Eigen::Index c = 0; c < q.W1.cols(); ++c) q.W1(r, c) = rng.uniform(-k1, k1);
        }
        const double k2 = 1.0 / std::sqrt(static_cast<double>(d_h));
        for (Eigen::Index c = 0; c < q.w2.cols(); ++c) q.w2(0, c) = rng.uniform(-k2, k2);
        return q;
    }

    std::vector<std::pair<std::string, Eigen::MatrixXd*>> tensors() {
        return {{"W1", &W1}, {"b1", &b1}, {"w2", &w2}, {"b2", &b2}};
    }

    double value(const Eigen::VectorXd& state, const Eigen::VectorXd& question_emb) const {
        const Eigen::VectorXd a =
            (W1.leftCols(d_s) * state + W1.rightCols(d_q) * question_emb + b1.col(0)).array().tanh();
        return (w2 * a)(0, 0) + b2(0, 0);
    }

    // Shared state projection for scoring many candidates against one state.
    Eigen::VectorXd state_projection(const Eigen::VectorXd& state) const {
        return W1.leftCols(d_s) * state + b1.col(0);
    }

    double value_with_projection(const Eigen::VectorXd& state_proj, const Eigen::VectorXd& question_emb) const {
        const Eigen::VectorXd a = (state_proj + W1.rightCols(d_q) * question_emb).array().tanh();
        return (w2 * a)(0, 0) + b2(0, 0);
    }
};

struct Transition {
    std::vector<int> paper_before;  // question ordering behind s_t
    int action = -1;                // candidate question index a_t
    double reward = 0.0;            // r_{t+1}, post-commit
    std::vector<int> paper_after;   // question ordering behind s_{t+1}
    int next_subspace = 0;          // cluster active at t+1
};

// Bounded FIFO of transitions.
class ReplayMemory {
public:
    explicit ReplayMemory(int capacity) : capacity_(capacity) {
        if (capacity < 1) throw ConfigError("replay capacity must be positive");
    }

    void push(Transition t) {
        buffer_.push_back(std::move(t));
        if (static_cast<int>(buffer_.size()) > capacity_) buffer_.pop_front();
    }

    std::size_t size() const { return buffer_.size(); }
    int capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return buffer_.at(i); }  // oldest first

    // Uniform sample without replacement.
    std::vector<const Transition*> sample(int n, Rng& rng) const {
        if (n > static_cast<int>(buffer_.size())) throw DomainError("replay sample larger than memory");
        std::vector<int> idx(buffer_.size());
        for (std::size_t i = 0; i < buffer_.size(); ++i) idx[i] = static_cast<int>(i);
        std::vector<const Transition*> out;
        out.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const std::size_t j = rng.uniform_index(idx.size() - static_cast<std::size_t>(i));
            out.push_back(&buffer_[static_cast<std::size_t>(idx[j])]);
            std::swap(idx[j], idx[idx.size() - 1 - static_cast<std::size_t>(i)]);
        }
        return out;
    }

private:
    int capacity_;
    std::deque<Transition> buffer_;
};

// ---------------------------------------------------------------------------
// Environment
// ---------------------------------------------------------------------------

// Holds the paper under construction plus the incremental score cache and
// skill incidence counts, so each candidate placement is O(|E| log |E|).
class PaperEnv {
public:
    PaperEnv(const RewardEvaluator& evaluator, const Eigen::MatrixXd& question_embeddings, ExamPaper paper)
        : evaluator_(&evaluator), embeddings_(&question_embeddings), paper_(std::move(paper)) {
        rebuild();
    }

    void reset(ExamPaper paper) {
        paper_ = std::move(paper);
        rebuild();
    }

    const ExamPaper& paper() const { return paper_; }
    const RewardEvaluator& evaluator() const { return *evaluator_; }
    Eigen::VectorXd state() const { return encode_state(paper_, *embeddings_); }
    RewardComponents current() const { return current_; }

    struct TransitionOutcome {
        int position = -1;
        RewardComponents components;
    };

    // The transition rule: tentatively place the candidate at every
    // position, commit the placement with the highest combined reward
    // (ties to the lowest position), and rotate the new question to the
    // front of the ordering.
    TransitionOutcome apply_transition(int candidate) {
        if (paper_.contains(candidate)) throw DomainError("candidate already in paper");
        const Eigen::VectorXd cand_probs = cache_->probabilities_for(candidate);
        const auto& cand_skills = evaluator_->bank().question(candidate).skills;

        TransitionOutcome best;
        double best_value = -std::numeric_limits<double>::infinity();
        Eigen::VectorXd counts = skill_counts_;
        for (int h = 0; h < paper_.size(); ++h) {
            const Eigen::VectorXd scores = cache_->scores_with_replacement(paper_, h, cand_probs);
            counts = skill_counts_;
            for (int s : evaluator_->bank().question(paper_.questions()[static_cast<std::size_t>(h)]).skills) {
                counts(s) -= 1.0;
            }
            for (int s : cand_skills) counts(s) += 1.0;
            const RewardComponents comps = evaluator_->evaluate(scores, counts);
            if (comps.combined > best_value) {
                best_value = comps.combined;
                best.position = h;
                best.components = comps;
            }
        }

        const int h = best.position;
        for (int s : evaluator_->bank().question(paper_.questions()[static_cast<std::size_t>(h)]).skills) {
            skill_counts_(s) -= 1.0;
        }
        for (int s : cand_skills) skill_counts_(s) += 1.0;
        cache_->commit_replacement(paper_, h, candidate, cand_probs);
        paper_.replace_and_front(h, candidate);
        cache_->rotate_front(paper_, h);
        current_ = best.components;
        return best;
    }

private:
    void rebuild() {
        cache_.emplace(evaluator_->proficiency(), evaluator_->bank(), paper_);
        skill_counts_ = Eigen::VectorXd::Zero(evaluator_->bank().skill_count());
        for (int q : paper_.questions()) {
            for (int s : evaluator_->bank().question(q).skills) skill_counts_(s) += 1.0;
        }
        current_ = evaluator_->evaluate(cache_->scores(), skill_counts_);
    }

    const RewardEvaluator* evaluator_;
    const Eigen::MatrixXd* embeddings_;
    ExamPaper paper_;
    std::optional<AnswerProbabilityCache> cache_;
    Eigen::VectorXd skill_counts_;
    RewardComponents current_;
};

// ---------------------------------------------------------------------------
// Policy and learning
// ---------------------------------------------------------------------------

inline std::vector<int> eligible_actions(const std::vector<int>& subspace_questions, const ExamPaper& paper) {
    std::vector<int> out;
    out.reserve(subspace_questions.size());
    for (int q : subspace_questions) {
        if (!paper.contains(q)) out.push_back(q);
    }
    return out;
}

// ε-greedy over the subspace's eligible questions; exploitation scores all
// eligible candidates in one matrix pass and takes the argmax, ties to the
// lowest index.
inline int select_action(const QNetwork& qnet, const Eigen::VectorXd& state,
                         const std::vector<int>& subspace_questions, const ExamPaper& paper,
                         const Eigen::MatrixXd& embeddings, double eps, Rng& rng) {
    const std::vector<int> eligible = eligible_actions(subspace_questions, paper);
    if (eligible.empty()) throw EmptyActionError("subspace fully contained in the paper");
    if (rng.uniform01() < eps) return eligible[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(eligible.size())))];

    const Eigen::VectorXd proj = qnet.state_projection(state);
    Eigen::MatrixXd emb_block(qnet.d_q, static_cast<Eigen::Index>(eligible.size()));
    for (std::size_t k = 0; k < eligible.size(); ++k) {
        emb_block.col(static_cast<Eigen::Index>(k)) = embeddings.col(eligible[k]);
    }
    const Eigen::MatrixXd hidden =
        ((qnet.W1.rightCols(qnet.d_q) * emb_block).colwise() + proj).array().tanh().matrix();
    const Eigen::RowVectorXd qs = (qnet.w2 * hidden).row(0).array() + qnet.b2(0, 0);

    int best = eligible.front();
    double best_q = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < eligible.size(); ++k) {
        if (qs(static_cast<Eigen::Index>(k)) > best_q) {
            best_q = qs(static_cast<Eigen::Index>(k));
            best = eligible[k];
        }
    }
    return best;
}

// Subspace schedule: keep the current cluster while the post-swap coverage
// reward clears ts, otherwise jump to a uniformly random other cluster.
inline int next_subspace(int cluster_count, int current, double coverage_value, double ts, Rng& rng) {
    if (cluster_count < 2) throw ConfigError("subspace schedule requires at least two clusters");
    if (coverage_value >= ts) return current;
    const int pick = rng.uniform_int(cluster_count - 1);
    return pick >= current ? pick + 1 : pick;
}

// y = r + gamma * Q(s', argmax_a Q(s', a; online); target), the argmax
// running over the stored next subspace's questions not already in the
// next paper (falling back to the whole subspace if the paper covers it).
// State and candidate projections are batched: one GEMM for all next
// states, one GEMM per subspace appearing in the batch.
inline std::vector<double> ddqn_target(const std::vector<const Transition*>& batch, const QNetwork& online,
                                       const QNetwork& target, double gamma,
                                       const std::vector<std::vector<int>>& subspaces,
                                       const Eigen::MatrixXd& embeddings) {
    const int n = static_cast<int>(batch.size());
    Eigen::MatrixXd s_next(online.d_s, n);
    for (int i = 0; i < n; ++i) {
        s_next.col(i) = encode_state(batch[static_cast<std::size_t>(i)]->paper_after, embeddings);
    }
    const Eigen::MatrixXd online_state_proj =
        (online.W1.leftCols(online.d_s) * s_next).colwise() + online.b1.col(0);
    const Eigen::MatrixXd target_state_proj =
        (target.W1.leftCols(target.d_s) * s_next).colwise() + target.b1.col(0);

    // per-subspace candidate projections under the online net, shared
    // across the batch
    std::vector<Eigen::MatrixXd> cluster_proj(subspaces.size());
    std::vector<bool> cluster_ready(subspaces.size(), false);
    std::vector<char> in_paper(static_cast<std::size_t>(embeddings.cols()), 0);

    Eigen::MatrixXd hidden;
    std::vector<double> out;
    out.reserve(batch.size());
    for (int i = 0; i < n; ++i) {
        const Transition* t = batch[static_cast<std::size_t>(i)];
        const std::size_t cluster = static_cast<std::size_t>(t->next_subspace);
        const auto& subspace = subspaces.at(cluster);
        if (!cluster_ready[cluster]) {
            Eigen::MatrixXd emb_block(online.d_q, static_cast<Eigen::Index>(subspace.size()));
            for (std::size_t k = 0; k < subspace.size(); ++k) emb_block.col(static_cast<Eigen::Index>(k)) = embeddings.col(subspace[k]);
            cluster_proj[cluster] = online.W1.rightCols(online.d_q) * emb_block;
            cluster_ready[cluster] = true;
        }
        const Eigen::MatrixXd& proj_q = cluster_proj[cluster];

        for (int q : t->paper_after) in_paper[static_cast<std::size_t>(q)] = 1;
        hidden = (proj_q.colwise() + online_state_proj.col(i)).array().tanh().matrix();
        const Eigen::RowVectorXd qs = (online.w2 * hidden).row(0).array() + online.b2(0, 0);

        int best = -1;
        double best_q = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < subspace.size(); ++k) {
            if (in_paper[static_cast<std::size_t>(subspace[k])]) continue;
            if (qs(static_cast<Eigen::Index>(k)) > best_q) {
                best_q = qs(static_cast<Eigen::Index>(k));
                best = subspace[k];
            }
        }
        if (best < 0) {
            // whole subspace already inside the paper: bootstrap over it anyway
            for (std::size_t k = 0; k < subspace.size(); ++k) {
                if (qs(static_cast<Eigen::Index>(k)) > best_q) {
                    best_q = qs(static_cast<Eigen::Index>(k));
                    best = subspace[k];
                }
            }
        }
        for (int q : t->paper_after) in_paper[static_cast<std::size_t>(q)] = 0;

        const Eigen::VectorXd a_target =
            (target_state_proj.col(i) + target.W1.rightCols(target.d_q) * embeddings.col(best)).array().tanh();
        out.push_back(t->reward + gamma * ((target.w2 * a_target)(0, 0) + target.b2(0, 0)));
    }
    return out;
}

// Mean-squared TD loss and its gradients for one batch.
struct QTrainStats {
    double loss = 0.0;
};

inline QNetwork q_loss_gradients(const QNetwork& qnet, const std::vector<const Transition*>& batch,
                                 const std::vector<double>& targets, const Eigen::MatrixXd& embeddings,
                                 double* loss_out) {
    const int n = static_cast<int>(batch.size());
    const int d_in = qnet.d_s + qnet.d_q;
    Eigen::MatrixXd Z(d_in, n);
    for (int i = 0; i < n; ++i) {
        Z.col(i).head(qnet.d_s) = encode_state(batch[static_cast<std::size_t>(i)]->paper_before, embeddings);
        Z.col(i).tail(qnet.d_q) = embeddings.col(batch[static_cast<std::size_t>(i)]->action);
    }
    const Eigen::MatrixXd A = ((qnet.W1 * Z).colwise() + qnet.b1.col(0)).array().tanh().matrix();
    const Eigen::RowVectorXd q = (qnet.w2 * A).row(0).array() + qnet.b2(0, 0);

    Eigen::RowVectorXd residual(n);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        residual(i) = q(i) - targets[static_cast<std::size_t>(i)];
        loss += residual(i) * residual(i);
    }
    loss /= static_cast<double>(n);
    if (loss_out) *loss_out = loss;

    const Eigen::RowVectorXd dq = 2.0 * residual / static_cast<double>(n);
    QNetwork grads = QNetwork::zeros(qnet.d_s, qnet.d_q, qnet.d_h);
    const Eigen::MatrixXd dA =
        (qnet.w2.transpose() * dq).cwiseProduct((1.0 - A.array().square()).matrix());
    grads.W1 = dA * Z.transpose();
    grads.b1.col(0) = dA.rowwise().sum();
    grads.w2 = dq * A.transpose();
    grads.b2(0, 0) = dq.sum();
    return grads;
}

struct DdqnLearner {
    QNetwork online;
    QNetwork target;
    Adam<QNetwork> adam;
    long train_steps = 0;

    DdqnLearner(int d_s, int d_q, int d_h, Rng& rng) {
        online = QNetwork::random_init(d_s, d_q, d_h, rng);
        target = online;
        adam.init(online);
    }
};

// One DDQN update: uniform batch, double-Q targets, Adam step on the
// online network, periodic hard sync of the target network.
inline double train_step(DdqnLearner& learner, const ReplayMemory& memory, const AgentConfig& cfg,
                         const std::vector<std::vector<int>>& subspaces, const Eigen::MatrixXd& embeddings,
                         Rng& rng) {
    if (static_cast<int>(memory.size()) < cfg.batch_size) {
        throw DomainError("train_step requires memory size >= batch size");
    }
    const auto batch = memory.sample(cfg.batch_size, rng);
    const auto targets = ddqn_target(batch, learner.online, learner.target, cfg.gamma, subspaces, embeddings);
    double loss = 0.0;
    QNetwork grads = q_loss_gradients(learner.online, batch, targets, embeddings, &loss);
    learner.adam.step(learner.online, grads, 1e-3);
    ++learner.train_steps;
    if (learner.train_steps % cfg.target_sync_interval == 0) learner.target = learner.online;
    return loss;
}

// ---------------------------------------------------------------------------
// Generation loop
// ---------------------------------------------------------------------------

struct GenerationResult {
    std::optional<ExamPaper> paper;
    double best_reward = 0.0;
    std::vector<double> episode_rewards;  // cumulative reward per episode
    long reward_evaluations = 0;
    long training_steps = 0;
};

inline ExamPaper random_paper(const QuestionBank& bank, const ExamSpec& spec, Rng& rng) {
    if (bank.question_count() < spec.n) {
        throw ConfigError("bank holds fewer questions than the requested paper size");
    }
    return ExamPaper(rng.sample_distinct(bank.question_count(), spec.n), spec);
}

// Full loop: ε-greedy subspace-restricted selection, best-position
// transitions, replay + DDQN updates, linear ε decay, best-ever paper
// retention. Deterministic for a fixed seed.
inline GenerationResult generate_exam(const RewardEvaluator& evaluator, const Eigen::MatrixXd& question_embeddings,
                                      const Partition* partition, const ExamSpec& spec, const AgentConfig& cfg) {
    cfg.validate();
    const QuestionBank& bank = evaluator.bank();
    if (bank.question_count() < spec.n) {
        throw ConfigError("bank holds fewer questions than the requested paper size");
    }

    std::vector<std::vector<int>> subspaces;
    if (cfg.partition_disabled || partition == nullptr) {
        std::vector<int> all(static_cast<std::size_t>(bank.question_count()));
        for (int q = 0; q < bank.question_count(); ++q) all[static_cast<std::size_t>(q)] = q;
        subspaces.push_back(std::move(all));
    } else {
        subspaces = partition->clusters();
    }
    const int cluster_count = static_cast<int>(subspaces.size());

    Rng rng(mix_seed(cfg.seed, 7));
    evaluator.reset_evaluations();

    DdqnLearner learner(spec.n * static_cast<int>(question_embeddings.rows()),
                        static_cast<int>(question_embeddings.rows()), cfg.qnet_hidden, rng);
    ReplayMemory memory(cfg.replay_capacity);

    GenerationResult result;
    const long total_steps = static_cast<long>(cfg.episodes) * cfg.steps_per_episode;
    long env_step = 0;

    PaperEnv env(evaluator, question_embeddings, random_paper(bank, spec, rng));
    double best_reward = -std::numeric_limits<double>::infinity();
    std::optional<ExamPaper> best_paper;

    for (int ep = 0; ep < cfg.episodes; ++ep) {
        if (ep > 0) {
            const bool from_best = rng.uniform01() < cfg.restart_from_best_prob && best_paper.has_value();
            env.reset(from_best ? *best_paper : random_paper(bank, spec, rng));
        }
        int active = cluster_count == 1 ? 0 : rng.uniform_int(cluster_count);

        RewardComponents comps = env.current();
        if (comps.combined > best_reward) {
            best_reward = comps.combined;
            best_paper = env.paper();
        }

        double cumulative = 0.0;
        for (int step = 0; step < cfg.steps_per_episode; ++step) {
            // make sure the active subspace still offers an action
            if (eligible_actions(subspaces[static_cast<std::size_t>(active)], env.paper()).empty()) {
                std::vector<int> open;
                for (int k = 0; k < cluster_count; ++k) {
                    if (!eligible_actions(subspaces[static_cast<std::size_t>(k)], env.paper()).empty()) open.push_back(k);
                }
                if (open.empty()) throw ConfigError("no subspace offers a question outside the paper");
                active = open[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(open.size())))];
            }

            const double eps = epsilon_at(cfg, env_step, total_steps);
            const Eigen::VectorXd state = env.state();
            const std::vector<int> paper_before = env.paper().questions();
            const int action = select_action(learner.online, state, subspaces[static_cast<std::size_t>(active)],
                                             env.paper(), question_embeddings, eps, rng);

            const auto outcome = env.apply_transition(action);
            cumulative += outcome.components.combined;
            if (outcome.components.combined > best_reward) {
                best_reward = outcome.components.combined;
                best_paper = env.paper();
            }

            const int upcoming = cluster_count == 1
                                     ? 0
                                     : next_subspace(cluster_count, active, outcome.components.r3,
                                                     cfg.subspace_threshold, rng);
            memory.push(Transition{paper_before, action, outcome.components.combined, env.paper().questions(),
                                   upcoming});
            if (static_cast<int>(memory.size()) >= cfg.batch_size) {
                train_step(learner, memory, cfg, subspaces, question_embeddings, rng);
            }
            active = upcoming;
            ++env_step;
        }
        result.episode_rewards.push_back(cumulative);
    }

    result.paper = std::move(best_paper);
    result.best_reward = best_reward;
    result.reward_evaluations = evaluator.evaluations();
    result.training_steps = learner.train_steps;
    return result;
}

}  // namespace examgen
