#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "examgen/corpus.hpp"
#include "examgen/errors.hpp"
#include "examgen/optim.hpp"
#include "examgen/rng.hpp"

namespace examgen {

struct TracerConfig {
    int d_q = 30;
    int d_h = 200;
    double learning_rate = 1e-3;
    int max_epochs = 100;
    int batch_size = 32;
    double grad_clip = 5.0;
    double heldout_fraction = 0.1;
    std::uint64_t seed = 1;

    void validate() const {
        if (max_epochs < 1 || max_epochs > 100) throw ConfigError("tracer max_epochs must lie in [1, 100]");
        if (learning_rate <= 0.0) throw ConfigError("tracer learning_rate must be positive");
        if (d_q < 1 || d_h < 1 || batch_size < 1) throw ConfigError("tracer dims and batch size must be positive");
        if (heldout_fraction < 0.0 || heldout_fraction >= 1.0) throw ConfigError("heldout_fraction out of [0,1)");
    }
};

// Probability clamp inside the cross-entropy logs.
inline constexpr double kProbClamp = 1e-7;

// Single-layer LSTM with a learned input-embedding table. Row 2*i + y of
// the table encodes skill i attempted with correctness y; a record's input
// is the sum of the rows for its question's skills. The output head maps
// the output gate through a sigmoid to per-skill correctness probabilities.
struct DktModel {
    int num_skills = 0;
    int d_q = 0;
    int d_h = 0;

    Eigen::MatrixXd embeddings;  // 2|K| x d_q
    Eigen::MatrixXd W_xi, W_hi, b_i;
    Eigen::MatrixXd W_xf, W_hf, b_f;
    Eigen::MatrixXd W_xo, W_ho, b_o;
    Eigen::MatrixXd W_xc, W_hc, b_c;
    Eigen::MatrixXd W_s, b_s;  // |K| x d_h, |K| x 1

    static DktModel zeros(int num_skills, int d_q, int d_h) {
        DktModel m;
        m.num_skills = num_skills;
        m.d_q = d_q;
        m.d_h = d_h;
        m.embeddings = Eigen::MatrixXd::Zero(2 * num_skills, d_q);
        auto gate_x = [&] { return Eigen::MatrixXd::Zero(d_h, d_q); };
        auto gate_h = [&] { return Eigen::MatrixXd::Zero(d_h, d_h); };
        auto gate_b = [&] { return Eigen::MatrixXd::Zero(d_h, 1); };
        m.W_xi = gate_x(); m.W_hi = gate_h(); m.b_i = gate_b();
        m.W_xf = gate_x(); m.W_hf = gate_h(); m.b_f = gate_b();
        m.W_xo = gate_x(); m.W_ho = gate_h(); m.b_o = gate_b();
        m.W_xc = gate_x(); m.W_hc = gate_h(); m.b_c = gate_b();
        m.W_s = Eigen::MatrixXd::Zero(num_skills, d_h);
        m.b_s = Eigen::MatrixXd::Zero(num_skills, 1);
        return m;
    }

    static DktModel random_init(int num_skills, int d_q, int d_h, Rng& rng) {
        DktModel m = zeros(num_skills, d_q, d_h);
        if (num_skills <= d_q) {
            // signed identity basis: skill i on coordinate i, correctness as
            // sign — the classic one-hot-style encoding, still learned
            for (int i = 0; i < num_skills; ++i) {
                m.embeddings(2 * i + 1, i) = 1.0;
                m.embeddings(2 * i + 0, i) = -1.0;
            }
        } else {
            for (Eigen::Index r = 0; r < m.embeddings.rows(); ++r) {
                for (Eigen::Index c = 0; c < m.embeddings.cols(); ++c) m.embeddings(r, c) = rng.normal(0.0, 0.5);
            }
        }
        const double k = 1.0 / std::sqrt(static_cast<double>(d_h));
        auto fill = [&](Eigen::MatrixXd& w) {
            for (Eigen::Index r = 0; r < w.rows(); ++r) {
                for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-k, k);
            }
        };
        for (auto* w : {&m.W_xi, &m.W_hi, &m.b_i, &m.W_xf, &m.W_hf, &m.b_f, &m.W_xo, &m.W_ho, &m.b_o, &m.W_xc,
                        &m.W_hc, &m.b_c, &m.W_s, &m.b_s}) {
            fill(*w);
        }
        // persistent memory at init: without it, evidence decays with a
        // half-life of one step and long-range credit never forms
        m.b_f.array() += 3.0;
        return m;
    }

    // Fixed traversal order; serialization, Adam and the finite-difference
    // suite all rely on it.
    std::vector<std::pair<std::string, Eigen::MatrixXd*>> tensors() {
        return {{"embeddings", &embeddings}, {"W_xi", &W_xi}, {"W_hi", &W_hi}, {"b_i", &b_i},
                {"W_xf", &W_xf},             {"W_hf", &W_hf}, {"b_f", &b_f},   {"W_xo", &W_xo},
                {"W_ho", &W_ho},             {"b_o", &b_o},   {"W_xc", &W_xc}, {"W_hc", &W_hc},
                {"b_c", &b_c},               {"W_s", &W_s},   {"b_s", &b_s}};
    }

    std::vector<std::pair<std::string, const Eigen::MatrixXd*>> tensors() const {
        auto mutable_view = const_cast<DktModel*>(this)->tensors();
        std::vector<std::pair<std::string, const Eigen::MatrixXd*>> out;
        out.reserve(mutable_view.size());
        for (auto& [name, ptr] : mutable_view) out.emplace_back(name, ptr);
        return out;
    }

    Eigen::Index embedding_row(int skill, int correct) const {
        if (skill < 0 || skill >= num_skills) throw DomainError("skill index out of range");
        return 2 * skill + correct;
    }
};

inline Eigen::VectorXd skill_embedding(const DktModel& model, int skill) {
    return model.embeddings.row(model.embedding_row(skill, 1)).transpose();
}

// Input encoding of one record: sum of embedding rows (skill, correctness)
// over the attempted question's skills.
inline Eigen::VectorXd encode_input(const DktModel& model, const QuestionBank& bank, const InteractionRecord& rec) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(model.d_q);
    for (int s : bank.question(rec.question_index).skills) {
        x += model.embeddings.row(model.embedding_row(s, rec.correct)).transpose();
    }
    return x;
}

namespace detail {

inline Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

}  // namespace detail

// Stepwise forward pass over one sequence; returns p_t for every step.
inline std::vector<Eigen::VectorXd> forward(const DktModel& model, const QuestionBank& bank,
                                            const std::vector<InteractionRecord>& sequence) {
    if (sequence.empty()) throw DomainError("forward requires a non-empty sequence");
    Eigen::VectorXd h = Eigen::VectorXd::Zero(model.d_h);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(model.d_h);
    std::vector<Eigen::VectorXd> out;
    out.reserve(sequence.size());
    for (const auto& rec : sequence) {
        const Eigen::VectorXd x = encode_input(model, bank, rec);
        const Eigen::VectorXd i = detail::sigmoid(model.W_xi * x + model.W_hi * h + model.b_i.col(0));
        const Eigen::VectorXd f = detail::sigmoid(model.W_xf * x + model.W_hf * h + model.b_f.col(0));
        const Eigen::VectorXd o = detail::sigmoid(model.W_xo * x + model.W_ho * h + model.b_o.col(0));
        const Eigen::VectorXd g = (model.W_xc * x + model.W_hc * h + model.b_c.col(0)).array().tanh();
        c = f.cwiseProduct(c) + i.cwiseProduct(g);
        h = o.cwiseProduct(c.array().tanh().matrix());
        out.push_back(detail::sigmoid(model.W_s * h + model.b_s.col(0)));
    }
    return out;
}

// Predicted probability for the response at step t (t >= 1): mean of the
// previous step's output over the question's skills.
inline double predicted_response_probability(const Eigen::VectorXd& p_prev, const Question& q) {
    double acc = 0.0;
    for (int s : q.skills) acc += p_prev(s);
    return acc / static_cast<double>(q.skills.size());
}

namespace detail {

inline double bce_term(double p_hat, int y) {
    const double p = std::clamp(p_hat, kProbClamp, 1.0 - kProbClamp);
    return -(y * std::log(p) + (1 - y) * std::log(1.0 - p));
}

inline double bce_term_grad(double p_hat, int y) {
    if (p_hat <= kProbClamp || p_hat >= 1.0 - kProbClamp) return 0.0;  // clamped region is flat
    return (p_hat - y) / (p_hat * (1.0 - p_hat));
}

}  // namespace detail

// Sum of binary cross-entropy terms over all sequences; the response at
// step t is predicted from p_{t-1}, so the first record is input-only.
inline double loss(const DktModel& model, const QuestionBank& bank, const InteractionLog& log,
                   const std::vector<int>* subset = nullptr) {
    double total = 0.0;
    const int count = subset ? static_cast<int>(subset->size()) : log.examinee_count();
    for (int idx = 0; idx < count; ++idx) {
        const int e = subset ? (*subset)[static_cast<std::size_t>(idx)] : idx;
        const auto& seq = log.sequences[static_cast<std::size_t>(e)];
        if (seq.size() < 2) continue;
        const auto probs = forward(model, bank, seq);
        for (std::size_t t = 1; t < seq.size(); ++t) {
            const double p_hat = predicted_response_probability(probs[t - 1], bank.question(seq[t].question_index));
            total += detail::bce_term(p_hat, seq[t].correct);
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Batched BPTT
// ---------------------------------------------------------------------------

struct DktGradients {
    DktModel g;  // same shapes as the model, gradient values
    double loss_sum = 0.0;
    long target_terms = 0;

    static DktGradients zeros(const DktModel& model) {
        DktGradients out;
        out.g = DktModel::zeros(model.num_skills, model.d_q, model.d_h);
        return out;
    }
};

namespace detail {

struct BatchStep {
    Eigen::MatrixXd x, i, f, o, g, c, tanh_c, h, p;
};

// Forward + backward over a batch of sequences, accumulating gradients of
// the summed BCE loss. Columns of step matrices belong to sequences;
// finished sequences carry zero input and zero loss, so their columns
// contribute nothing to any gradient.
inline void batch_backprop(const DktModel& model, const QuestionBank& bank, const InteractionLog& log,
                           const std::vector<int>& batch, DktGradients& grads) {
    const int B = static_cast<int>(batch.size());
    std::size_t T = 0;
    for (int e : batch) T = std::max(T, log.sequences[static_cast<std::size_t>(e)].size());

    std::vector<BatchStep> steps(T);
    Eigen::MatrixXd h_prev = Eigen::MatrixXd::Zero(model.d_h, B);
    Eigen::MatrixXd c_prev = Eigen::MatrixXd::Zero(model.d_h, B);

    for (std::size_t t = 0; t < T; ++t) {
        BatchStep& st = steps[t];
        st.x = Eigen::MatrixXd::Zero(model.d_q, B);
        for (int b = 0; b < B; ++b) {
            const auto& seq = log.sequences[static_cast<std::size_t>(batch[static_cast<std::size_t>(b)])];
            if (t < seq.size()) {
                const auto& rec = seq[t];
                for (int s : bank.question(rec.question_index).skills) {
                    st.x.col(b) += model.embeddings.row(model.embedding_row(s, rec.correct)).transpose();
                }
            }
        }
        st.i = sigmoid(((model.W_xi * st.x + model.W_hi * h_prev).colwise() + model.b_i.col(0)));
        st.f = sigmoid(((model.W_xf * st.x + model.W_hf * h_prev).colwise() + model.b_f.col(0)));
        st.o = sigmoid(((model.W_xo * st.x + model.W_ho * h_prev).colwise() + model.b_o.col(0)));
        st.g = ((model.W_xc * st.x + model.W_hc * h_prev).colwise() + model.b_c.col(0)).array().tanh().matrix();
        st.c = st.f.cwiseProduct(c_prev) + st.i.cwiseProduct(st.g);
        st.tanh_c = st.c.array().tanh().matrix();
        st.h = st.o.cwiseProduct(st.tanh_c);
        st.p = sigmoid(((model.W_s * st.h).colwise() + model.b_s.col(0)));
        h_prev = st.h;
        c_prev = st.c;
    }

    Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(model.d_h, B);
    Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(model.d_h, B);
    const Eigen::MatrixXd zero_state = Eigen::MatrixXd::Zero(model.d_h, B);

    for (std::size_t t_plus_1 = T; t_plus_1 > 0; --t_plus_1) {
        const std::size_t t = t_plus_1 - 1;
        const BatchStep& st = steps[t];
        const Eigen::MatrixXd& h_before = t == 0 ? zero_state : steps[t - 1].h;
        const Eigen::MatrixXd& c_before = t == 0 ? zero_state : steps[t - 1].c;

        // Loss gradient into p_t comes from the records observed at t+1.
        Eigen::MatrixXd dp = Eigen::MatrixXd::Zero(model.num_skills, B);
        for (int b = 0; b < B; ++b) {
            const auto& seq = log.sequences[static_cast<std::size_t>(batch[static_cast<std::size_t>(b)])];
            if (t + 1 < seq.size()) {
                const auto& rec = seq[t + 1];
                const auto& q = bank.question(rec.question_index);
                const double p_hat = predicted_response_probability(st.p.col(b), q);
                grads.loss_sum += bce_term(p_hat, rec.correct);
                ++grads.target_terms;
                const double d_phat = bce_term_grad(p_hat, rec.correct) / static_cast<double>(q.skills.size());
                for (int s : q.skills) dp(s, b) += d_phat;
            }
        }

        const Eigen::MatrixXd dz = dp.cwiseProduct(st.p).cwiseProduct((1.0 - st.p.array()).matrix());
        grads.g.W_s += dz * st.h.transpose();
        grads.g.b_s.col(0) += dz.rowwise().sum();

        // h feeds both the output head and the next step
        const Eigen::MatrixXd dh = model.W_s.transpose() * dz + dh_next;
        const Eigen::MatrixXd do_act = dh.cwiseProduct(st.tanh_c);
        Eigen::MatrixXd dc = dh.cwiseProduct(st.o).cwiseProduct(
                                 (1.0 - st.tanh_c.array().square()).matrix()) +
                             dc_next;

        const Eigen::MatrixXd di_pre =
            dc.cwiseProduct(st.g).cwiseProduct(st.i).cwiseProduct((1.0 - st.i.array()).matrix());
        const Eigen::MatrixXd df_pre =
            dc.cwiseProduct(c_before).cwiseProduct(st.f).cwiseProduct((1.0 - st.f.array()).matrix());
        const Eigen::MatrixXd do_pre = do_act.cwiseProduct(st.o).cwiseProduct((1.0 - st.o.array()).matrix());
        const Eigen::MatrixXd dg_pre = dc.cwiseProduct(st.i).cwiseProduct((1.0 - st.g.array().square()).matrix());

        grads.g.W_xi += di_pre * st.x.transpose();
        grads.g.W_hi += di_pre * h_before.transpose();
        grads.g.b_i.col(0) += di_pre.rowwise().sum();
        grads.g.W_xf += df_pre * st.x.transpose();
        grads.g.W_hf += df_pre * h_before.transpose();
        grads.g.b_f.col(0) += df_pre.rowwise().sum();
        grads.g.W_xo += do_pre * st.x.transpose();
        grads.g.W_ho += do_pre * h_before.transpose();
        grads.g.b_o.col(0) += do_pre.rowwise().sum();
        grads.g.W_xc += dg_pre * st.x.transpose();
        grads.g.W_hc += dg_pre * h_before.transpose();
        grads.g.b_c.col(0) += dg_pre.rowwise().sum();

        const Eigen::MatrixXd dx = model.W_xi.transpose() * di_pre + model.W_xf.transpose() * df_pre +
                                   model.W_xo.transpose() * do_pre + model.W_xc.transpose() * dg_pre;
        for (int b = 0; b < B; ++b) {
            const auto& seq = log.sequences[static_cast<std::size_t>(batch[static_cast<std::size_t>(b)])];
            if (t < seq.size()) {
                const auto& rec = seq[t];
                for (int s : bank.question(rec.question_index).skills) {
                    grads.g.embeddings.row(model.embedding_row(s, rec.correct)) += dx.col(b).transpose();
                }
            }
        }

        dh_next = model.W_hi.transpose() * di_pre + model.W_hf.transpose() * df_pre +
                  model.W_ho.transpose() * do_pre + model.W_hc.transpose() * dg_pre;
        dc_next = dc.cwiseProduct(st.f);
    }
}

}  // namespace detail

// Analytic gradients of the summed BCE loss over the given sequences.
inline DktGradients loss_gradients(const DktModel& model, const QuestionBank& bank, const InteractionLog& log,
                                   const std::vector<int>* subset = nullptr) {
    DktGradients grads = DktGradients::zeros(model);
    std::vector<int> all;
    if (!subset) {
        all.resize(static_cast<std::size_t>(log.examinee_count()));
        for (int e = 0; e < log.examinee_count(); ++e) all[static_cast<std::size_t>(e)] = e;
        subset = &all;
    }
    if (!subset->empty()) detail::batch_backprop(model, bank, log, *subset, grads);
    return grads;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double heldout_loss = 0.0;
};

struct TrainResult {
    DktModel model;
    std::vector<EpochStats> curve;
    int selected_epoch = 0;
    std::vector<int> heldout_examinees;
};

// Minibatched BPTT with Adam. Model selection picks the epoch with the
// lowest held-out loss (train loss when the log is too small to split).
inline TrainResult train(const InteractionLog& log, const QuestionBank& bank, const TracerConfig& cfg) {
    cfg.validate();
    if (log.examinee_count() == 0) throw DomainError("train: empty interaction log");
    for (const auto& seq : log.sequences) {
        if (seq.empty()) throw DomainError("train: empty sequence in log");
    }

    Rng init_rng(mix_seed(cfg.seed, 0));
    Rng split_rng(mix_seed(cfg.seed, 1));

    TrainResult result;
    result.model = DktModel::random_init(bank.skill_count(), cfg.d_q, cfg.d_h, init_rng);

    const int num_examinees = log.examinee_count();
    std::vector<int> order(static_cast<std::size_t>(num_examinees));
    for (int e = 0; e < num_examinees; ++e) order[static_cast<std::size_t>(e)] = e;
    split_rng.shuffle(order);
    int heldout_count = static_cast<int>(cfg.heldout_fraction * num_examinees);
    if (heldout_count == 0 && num_examinees >= 5 && cfg.heldout_fraction > 0.0) heldout_count = 1;
    std::vector<int> heldout(order.begin(), order.begin() + heldout_count);
    std::vector<int> training(order.begin() + heldout_count, order.end());
    std::sort(heldout.begin(), heldout.end());
    std::sort(training.begin(), training.end());
    result.heldout_examinees = heldout;

    Adam<DktModel> adam;
    adam.init(result.model);

    DktModel best = result.model;
    double best_heldout = std::numeric_limits<double>::infinity();
    int best_epoch = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        Rng epoch_rng(mix_seed(cfg.seed, 100 + static_cast<std::uint64_t>(epoch)));
        std::vector<int> shuffled = training;
        epoch_rng.shuffle(shuffled);

        for (std::size_t start = 0; start < shuffled.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(shuffled.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<int> batch(shuffled.begin() + static_cast<std::ptrdiff_t>(start),
                                   shuffled.begin() + static_cast<std::ptrdiff_t>(end));
            DktGradients grads = DktGradients::zeros(result.model);
            detail::batch_backprop(result.model, bank, log, batch, grads);
            if (!std::isfinite(grads.loss_sum)) {
                throw TrainingDivergedError("training diverged at epoch " + std::to_string(epoch));
            }
            if (grads.target_terms == 0) continue;
            // updates use the per-target mean so the step size is
            // insensitive to batch composition
            for (auto& [name, tensor] : grads.g.tensors()) *tensor /= static_cast<double>(grads.target_terms);
            clip_gradient_norm(grads.g, cfg.grad_clip);
            adam.step(result.model, grads.g, cfg.learning_rate);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss(result.model, bank, log, &training);
        stats.heldout_loss = heldout.empty() ? stats.train_loss : loss(result.model, bank, log, &heldout);
        if (!std::isfinite(stats.train_loss) || !std::isfinite(stats.heldout_loss)) {
            throw TrainingDivergedError("training diverged at epoch " + std::to_string(epoch));
        }
        result.curve.push_back(stats);
        if (stats.heldout_loss < best_heldout) {
            best_heldout = stats.heldout_loss;
            best = result.model;
            best_epoch = epoch;
        }
    }

    result.model = best;
    result.selected_epoch = best_epoch;
    return result;
}

// Final-step prediction vector per examinee.
inline Eigen::MatrixXd proficiency(const DktModel& model, const QuestionBank& bank, const InteractionLog& log) {
    Eigen::MatrixXd out(log.examinee_count(), model.num_skills);
    for (int e = 0; e < log.examinee_count(); ++e) {
        const auto probs = forward(model, bank, log.sequences[static_cast<std::size_t>(e)]);
        out.row(e) = probs.back().transpose();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoint I/O
// ---------------------------------------------------------------------------

inline void save_checkpoint(const DktModel& model, const std::string& path) {
    nlohmann::json j;
    j["format"] = "examgen-dkt";
    j["version"] = 1;
    j["num_skills"] = model.num_skills;
    j["d_q"] = model.d_q;
    j["d_h"] = model.d_h;
    nlohmann::json tensors = nlohmann::json::object();
    for (const auto& [name, tensor] : model.tensors()) {
        nlohmann::json t;
        t["rows"] = tensor->rows();
        t["cols"] = tensor->cols();
        std::vector<double> data;
        data.reserve(static_cast<std::size_t>(tensor->size()));
        for (Eigen::Index r = 0; r < tensor->rows(); ++r) {
            for (Eigen::Index c = 0; c < tensor->cols(); ++c) data.push_back((*tensor)(r, c));
        }
        t["data"] = std::move(data);
        tensors[name] = std::move(t);
    }
    j["tensors"] = std::move(tensors);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + path);
    out << j.dump() << '\n';
    if (!out) throw IoError("failed writing checkpoint " + path);
}

inline DktModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, 0, std::string("invalid checkpoint JSON: ") + e.what());
    }
    if (j.value("format", "") != "examgen-dkt") throw ParseError(path, 0, "not a tracer checkpoint");
    if (j.value("version", 0) != 1) throw ParseError(path, 0, "unsupported checkpoint version");
    DktModel model = DktModel::zeros(j.at("num_skills").get<int>(), j.at("d_q").get<int>(), j.at("d_h").get<int>());
    for (auto& [name, tensor] : model.tensors()) {
        const auto& t = j.at("tensors").at(name);
        const auto rows = t.at("rows").get<Eigen::Index>();
        const auto cols = t.at("cols").get<Eigen::Index>();
        if (rows != tensor->rows() || cols != tensor->cols()) {
            throw ParseError(path, 0, "tensor '" + name + "' has unexpected shape");
        }
        const auto& data = t.at("data");
        if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
            throw ParseError(path, 0, "tensor '" + name + "' has wrong element count");
        }
        std::size_t k = 0;
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) (*tensor)(r, c) = data[k++].get<double>();
        }
    }
    return model;
}

}  // namespace examgen
