#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "examgen/agent.hpp"
#include "examgen/baselines.hpp"
#include "examgen/corpus.hpp"
#include "examgen/csv.hpp"
#include "examgen/errors.hpp"
#include "examgen/evaluator.hpp"
#include "examgen/objectives.hpp"
#include "examgen/partitioner.hpp"
#include "examgen/predictor.hpp"
#include "examgen/tracer.hpp"

namespace examgen {

// Single source of truth for a run: a JSON config file, with every CLI
// flag overriding the corresponding field.
struct RunConfig {
    std::string bank_path;
    std::string interactions_path;
    std::string checkpoint_path;
    std::string partition_path;
    std::string out_dir = ".";
    std::string papers_dir;
    std::string embeddings_out;
    std::string scatter_out;
    std::string scores_out;
    std::vector<std::uint64_t> seeds = {1};
    int min_records = 1;

    int exam_n = 100;
    double points_per_question = 1.0;
    double target_difficulty = 0.7;

    RewardWeights weights;
    double reward_mu = -1.0;  // negative: follow target_difficulty
    double reward_sigma = 0.15;

    TracerConfig tracer;
    int partition_f = 10;
    int partition_max_iters = 300;
    AgentConfig agent;

    std::string baseline_method = "rsf";
    BaselineConfig baseline;

    SynthesisConfig synthesis;
    std::string synthesis_seed_bank;

    int kepg_k = 3;
    int kepg_repeats = 10;

    NormalSpec reward_normal() const {
        NormalSpec spec;
        spec.mu = reward_mu < 0.0 ? target_difficulty : reward_mu;
        spec.sigma = reward_sigma;
        return spec;
    }

    ExamSpec exam_spec() const { return ExamSpec::uniform(exam_n, points_per_question, target_difficulty); }
};

namespace cfgio {

inline void read_if(const nlohmann::json& j, const char* key, std::string& out) {
    if (j.contains(key)) out = j.at(key).get<std::string>();
}
inline void read_if(const nlohmann::json& j, const char* key, double& out) {
    if (j.contains(key)) out = j.at(key).get<double>();
}
inline void read_if(const nlohmann::json& j, const char* key, int& out) {
    if (j.contains(key)) out = j.at(key).get<int>();
}
inline void read_if(const nlohmann::json& j, const char* key, long& out) {
    if (j.contains(key)) out = j.at(key).get<long>();
}
inline void read_if(const nlohmann::json& j, const char* key, bool& out) {
    if (j.contains(key)) out = j.at(key).get<bool>();
}
inline void read_if(const nlohmann::json& j, const char* key, std::uint64_t& out) {
    if (j.contains(key)) out = j.at(key).get<std::uint64_t>();
}

}  // namespace cfgio

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    using namespace cfgio;
    RunConfig c;
    read_if(j, "bank", c.bank_path);
    read_if(j, "interactions", c.interactions_path);
    read_if(j, "checkpoint", c.checkpoint_path);
    read_if(j, "partition", c.partition_path);
    read_if(j, "out", c.out_dir);
    read_if(j, "papers_dir", c.papers_dir);
    read_if(j, "embeddings_out", c.embeddings_out);
    read_if(j, "scatter_out", c.scatter_out);
    read_if(j, "scores_out", c.scores_out);
    read_if(j, "min_records", c.min_records);
    if (j.contains("seeds")) {
        c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (c.seeds.empty()) throw ConfigError("seeds list must not be empty");
    }
    if (j.contains("exam")) {
        const auto& e = j.at("exam");
        read_if(e, "n", c.exam_n);
        read_if(e, "points_per_question", c.points_per_question);
        read_if(e, "target_difficulty", c.target_difficulty);
    }
    if (j.contains("weights")) {
        const auto& w = j.at("weights");
        read_if(w, "w1", c.weights.w1);
        read_if(w, "w2", c.weights.w2);
        read_if(w, "w3", c.weights.w3);
    }
    if (j.contains("reward_normal")) {
        const auto& n = j.at("reward_normal");
        read_if(n, "mu", c.reward_mu);
        read_if(n, "sigma", c.reward_sigma);
    }
    if (j.contains("tracer")) {
        const auto& t = j.at("tracer");
        read_if(t, "d_q", c.tracer.d_q);
        read_if(t, "d_h", c.tracer.d_h);
        read_if(t, "learning_rate", c.tracer.learning_rate);
        read_if(t, "max_epochs", c.tracer.max_epochs);
        read_if(t, "batch_size", c.tracer.batch_size);
        read_if(t, "grad_clip", c.tracer.grad_clip);
        read_if(t, "heldout_fraction", c.tracer.heldout_fraction);
    }
    if (j.contains("partition_cfg")) {
        const auto& p = j.at("partition_cfg");
        read_if(p, "f", c.partition_f);
        read_if(p, "max_iters", c.partition_max_iters);
    }
    if (j.contains("agent")) {
        const auto& a = j.at("agent");
        read_if(a, "gamma", c.agent.gamma);
        read_if(a, "eps_start", c.agent.eps_start);
        read_if(a, "eps_end", c.agent.eps_end);
        read_if(a, "batch_size", c.agent.batch_size);
        read_if(a, "target_sync_interval", c.agent.target_sync_interval);
        read_if(a, "replay_capacity", c.agent.replay_capacity);
        read_if(a, "episodes", c.agent.episodes);
        read_if(a, "steps_per_episode", c.agent.steps_per_episode);
        read_if(a, "ts", c.agent.subspace_threshold);
        read_if(a, "restart_from_best_prob", c.agent.restart_from_best_prob);
        read_if(a, "qnet_hidden", c.agent.qnet_hidden);
        read_if(a, "partition_disabled", c.agent.partition_disabled);
    }
    if (j.contains("baseline")) {
        const auto& b = j.at("baseline");
        read_if(b, "method", c.baseline_method);
        read_if(b, "trials", c.baseline.trials);
        read_if(b, "population", c.baseline.population);
        read_if(b, "generations", c.baseline.generations);
        read_if(b, "mutation_rate", c.baseline.mutation_rate);
        read_if(b, "tournament", c.baseline.tournament);
        read_if(b, "iterations", c.baseline.iterations);
        read_if(b, "initial_temperature", c.baseline.initial_temperature);
        read_if(b, "cooling_factor", c.baseline.cooling_factor);
    }
    if (j.contains("synthesis")) {
        const auto& s = j.at("synthesis");
        read_if(s, "num_skills", c.synthesis.num_skills);
        read_if(s, "num_questions", c.synthesis.num_questions);
        read_if(s, "num_examinees", c.synthesis.num_examinees);
        read_if(s, "records_min", c.synthesis.records_min);
        read_if(s, "records_max", c.synthesis.records_max);
        read_if(s, "skills_per_question_min", c.synthesis.skills_per_question_min);
        read_if(s, "skills_per_question_max", c.synthesis.skills_per_question_max);
        read_if(s, "skill_popularity_exponent", c.synthesis.skill_popularity_exponent);
        read_if(s, "mastery_high_prob", c.synthesis.mastery_high_prob);
        read_if(s, "mastery_high_lo", c.synthesis.mastery_high_lo);
        read_if(s, "mastery_high_hi", c.synthesis.mastery_high_hi);
        read_if(s, "mastery_low_lo", c.synthesis.mastery_low_lo);
        read_if(s, "mastery_low_hi", c.synthesis.mastery_low_hi);
        read_if(s, "learning_drift", c.synthesis.learning_drift);
        read_if(s, "question_score", c.synthesis.question_score);
        read_if(s, "seed_bank", c.synthesis_seed_bank);
    }
    if (j.contains("kepg")) {
        const auto& k = j.at("kepg");
        read_if(k, "k", c.kepg_k);
        read_if(k, "repeats", c.kepg_repeats);
    }
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, 0, std::string("invalid config JSON: ") + e.what());
    }
    try {
        return run_config_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Paper files
// ---------------------------------------------------------------------------

inline void save_paper(const ExamPaper& paper, const QuestionBank& bank, const std::string& path) {
    nlohmann::json j;
    j["format"] = "examgen-paper";
    j["version"] = 1;
    j["n"] = paper.size();
    j["total_points"] = paper.spec().total_points;
    j["target_difficulty"] = paper.spec().target_difficulty;
    nlohmann::json questions = nlohmann::json::array();
    for (int i = 0; i < paper.size(); ++i) {
        nlohmann::json q;
        q["id"] = bank.question(paper.questions()[static_cast<std::size_t>(i)]).id;
        q["points"] = paper.points_at(i);
        questions.push_back(std::move(q));
    }
    j["questions"] = std::move(questions);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write paper " + path);
    out << j.dump(1, ' ') << '\n';
    if (!out) throw IoError("failed writing paper " + path);
}

inline ExamPaper load_paper(const std::string& path, const QuestionBank& bank) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open paper " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, 0, std::string("invalid paper JSON: ") + e.what());
    }
    if (j.value("format", "") != "examgen-paper") throw ParseError(path, 0, "not a paper file");
    std::vector<int> questions;
    std::vector<double> points;
    for (const auto& q : j.at("questions")) {
        const std::string id = q.at("id").get<std::string>();
        const int idx = bank.find_question(id);
        if (idx < 0) throw ReferenceError(path + ": paper question '" + id + "' not in bank");
        questions.push_back(idx);
        points.push_back(q.at("points").get<double>());
    }
    const double target = j.value("target_difficulty", 0.7);
    return ExamPaper(questions, ExamSpec::from_points(points, target));
}

// ---------------------------------------------------------------------------
// Shared loading
// ---------------------------------------------------------------------------

namespace harness_detail {

inline void require_file(const std::string& path, const std::string& what, const std::string& hint) {
    if (path.empty() || !std::filesystem::exists(path)) {
        throw ConfigError(what + " '" + path + "' not found; " + hint);
    }
}

inline void ensure_out_dir(const RunConfig& cfg) { std::filesystem::create_directories(cfg.out_dir); }

inline std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

struct LoadedEngine {
    QuestionBank bank;
    InteractionLog log;
    DktModel model;
    Eigen::MatrixXd proficiency;
    Eigen::MatrixXd question_embeddings;
    Eigen::VectorXd course_weights;
};

inline LoadedEngine load_engine(const RunConfig& cfg, bool need_model) {
    require_file(cfg.bank_path, "question bank", "supply --bank or the `bank` config key");
    require_file(cfg.interactions_path, "interaction log", "supply --interactions (run `examgen synthesize` first)");
    LoadedEngine eng;
    eng.bank = load_question_bank(cfg.bank_path);
    eng.log = load_interactions(cfg.interactions_path, eng.bank);
    if (cfg.min_records > 1) eng.log = filter_min_records(eng.log, cfg.min_records);
    if (eng.log.examinee_count() == 0) throw ConfigError("interaction log is empty after filtering");
    eng.course_weights = course_skill_weights(eng.bank);
    if (need_model) {
        require_file(cfg.checkpoint_path, "tracer checkpoint", "run `examgen train-dkt` first");
        eng.model = load_checkpoint(cfg.checkpoint_path);
        if (eng.model.num_skills != eng.bank.skill_count()) {
            throw ReferenceError("checkpoint skill count does not match the bank");
        }
        eng.proficiency = proficiency(eng.model, eng.bank, eng.log);
        eng.question_embeddings = question_embedding_matrix(eng.model, eng.bank);
    }
    return eng;
}

inline std::vector<std::string> list_paper_files(const std::string& dir) {
    if (dir.empty() || !std::filesystem::is_directory(dir)) {
        throw ConfigError("papers directory '" + dir + "' not found; run `examgen generate` first");
    }
    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > 5 && name.rfind("paper", 0) == 0 &&
            entry.path().extension() == ".json") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

inline void write_trace(const std::string& path, const std::vector<double>& episode_rewards) {
    csv::Writer w(path, {"episode", "cumulative_reward"});
    for (std::size_t ep = 0; ep < episode_rewards.size(); ++ep) {
        w.write_row({std::to_string(ep + 1), csv::format_double(episode_rewards[ep])});
    }
    w.close();
}

inline double mean_last_fraction(const std::vector<double>& values, double fraction) {
    if (values.empty()) return 0.0;
    const std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                           std::ceil(fraction * static_cast<double>(values.size()))));
    double acc = 0.0;
    for (std::size_t i = values.size() - count; i < values.size(); ++i) acc += values[i];
    return acc / static_cast<double>(count);
}

}  // namespace harness_detail

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

inline void cmd_synthesize(const RunConfig& cfg) {
    harness_detail::ensure_out_dir(cfg);
    SynthesisConfig synth = cfg.synthesis;
    QuestionBank seed_bank;
    if (!cfg.synthesis_seed_bank.empty()) {
        seed_bank = load_question_bank(cfg.synthesis_seed_bank);
        synth.seed_bank = &seed_bank;
    }
    const SyntheticCorpus corpus = synthesize_corpus(synth, cfg.seeds.front());
    write_question_bank(corpus.bank, harness_detail::out_path(cfg, "bank.csv"));
    write_interactions(corpus.log, corpus.bank, harness_detail::out_path(cfg, "interactions.csv"));

    csv::Writer w(harness_detail::out_path(cfg, "ground_truth.csv"), {"examinee_id", "skill_id", "mastery"});
    const Eigen::MatrixXd& mastery = corpus.mastery.values();
    for (Eigen::Index e = 0; e < mastery.rows(); ++e) {
        for (Eigen::Index s = 0; s < mastery.cols(); ++s) {
            w.write_row({corpus.log.examinee_ids[static_cast<std::size_t>(e)],
                         corpus.bank.skills()[static_cast<std::size_t>(s)].id, csv::format_double(mastery(e, s))});
        }
    }
    w.close();
}

inline void cmd_train_dkt(const RunConfig& cfg) {
    harness_detail::ensure_out_dir(cfg);
    const auto eng = harness_detail::load_engine(cfg, /*need_model=*/false);
    TracerConfig tc = cfg.tracer;
    tc.seed = cfg.seeds.front();
    const TrainResult result = train(eng.log, eng.bank, tc);
    const std::string checkpoint =
        cfg.checkpoint_path.empty() ? harness_detail::out_path(cfg, "dkt.json") : cfg.checkpoint_path;
    save_checkpoint(result.model, checkpoint);

    csv::Writer w(harness_detail::out_path(cfg, "training_curve.csv"), {"epoch", "train_loss", "heldout_loss"});
    for (const auto& row : result.curve) {
        w.write_row({std::to_string(row.epoch), csv::format_double(row.train_loss),
                     csv::format_double(row.heldout_loss)});
    }
    w.close();
}

inline void cmd_partition(const RunConfig& cfg) {
    harness_detail::ensure_out_dir(cfg);
    harness_detail::require_file(cfg.bank_path, "question bank", "supply --bank");
    harness_detail::require_file(cfg.checkpoint_path, "tracer checkpoint", "run `examgen train-dkt` first");
    const QuestionBank bank = load_question_bank(cfg.bank_path);
    const DktModel model = load_checkpoint(cfg.checkpoint_path);
    if (model.num_skills != bank.skill_count()) throw ReferenceError("checkpoint skill count does not match the bank");
    const Eigen::MatrixXd embeddings = question_embedding_matrix(model, bank);
    const Partition part = kmeans_partition(embeddings, cfg.partition_f, cfg.seeds.front(), cfg.partition_max_iters);
    const std::string path =
        cfg.partition_path.empty() ? harness_detail::out_path(cfg, "partition.json") : cfg.partition_path;
    save_partition(part, bank, path);
    if (!cfg.embeddings_out.empty()) export_embeddings(model, bank, cfg.embeddings_out, &part);
}

namespace harness_detail {

struct GenerateRun {
    std::uint64_t seed = 0;
    double best_reward = 0.0;
    IndicatorValues indicators;
    long reward_evaluations = 0;
    std::vector<double> episode_rewards;
    std::string paper_file;
};

inline GenerateRun run_one_generation(const RunConfig& cfg, const LoadedEngine& eng, const RewardEvaluator& evaluator,
                                      const Partition* partition, std::uint64_t seed, const std::string& tag) {
    AgentConfig agent = cfg.agent;
    agent.seed = seed;
    const GenerationResult result =
        generate_exam(evaluator, eng.question_embeddings, partition, cfg.exam_spec(), agent);

    GenerateRun run;
    run.seed = seed;
    run.best_reward = result.best_reward;
    run.reward_evaluations = result.reward_evaluations;
    run.episode_rewards = result.episode_rewards;
    run.indicators = evaluator.indicators(*result.paper);
    run.paper_file = out_path(cfg, "paper_" + tag + std::to_string(seed) + ".json");
    save_paper(*result.paper, eng.bank, run.paper_file);
    write_trace(out_path(cfg, "trace_" + tag + std::to_string(seed) + ".csv"), result.episode_rewards);
    return run;
}

inline void write_summary(const std::string& path, const std::vector<GenerateRun>& runs) {
    csv::Writer w(path, {"paper_id", "seed", "best_reward", "difficulty", "rationality", "validity"});
    for (const auto& run : runs) {
        w.write_row({std::filesystem::path(run.paper_file).stem().string(), std::to_string(run.seed),
                     csv::format_double(run.best_reward), csv::format_double(run.indicators.difficulty),
                     csv::format_double(run.indicators.rationality), csv::format_double(run.indicators.validity)});
    }
    w.close();
}

}  // namespace harness_detail

inline void cmd_generate(const RunConfig& cfg) {
    harness_detail::ensure_out_dir(cfg);
    const auto eng = harness_detail::load_engine(cfg, /*need_model=*/true);
    harness_detail::require_file(cfg.partition_path, "partition file", "run `examgen partition` first");
    const Partition partition = load_partition(cfg.partition_path, eng.bank);

    const ExamSpec spec = cfg.exam_spec();
    const RewardEvaluator evaluator(eng.bank, eng.proficiency, eng.course_weights, cfg.weights, cfg.reward_normal(),
                                    spec.total_points, spec.target_difficulty);
    std::vector<harness_detail::GenerateRun> runs;
    for (const std::uint64_t seed : cfg.seeds) {
        runs.push_back(harness_detail::run_one_generation(cfg, eng, evaluator, &partition, seed, ""));
    }
    harness_detail::write_summary(harness_detail::out_path(cfg, "summary.csv"), runs);
}

inline void cmd_baseline(const RunConfig& cfg) {
    harness_detail::ensure_out_dir(cfg);
    const auto eng = harness_detail::load_engine(cfg, /*need_model=*/true);
    const ExamSpec spec = cfg.exam_spec();
    const RewardEvaluator evaluator(eng.bank, eng.proficiency, eng.course_weights, cfg.weights, cfg.reward_normal(),
                                    spec.total_points, spec.target_difficulty);

    std::vector<harness_detail::GenerateRun> runs;
    for (const std::uint64_t seed : cfg.seeds) {
        BaselineConfig bc = cfg.baseline;
        bc.seed = seed;
        BaselineResult result;
        if (cfg.baseline_method == "rsf") {
            result = rsf_generate(evaluator, spec, bc);
        } else if (cfg.baseline_method == "ga") {
            result = ga_generate(evaluator, spec, bc);
        } else if (cfg.baseline_method == "sa") {
            result = sa_generate(evaluator, spec, bc);
        } else {
            throw ConfigError("unknown baseline method '" + cfg.baseline_method + "' (expected rsf, ga or sa)");
        }
        harness_detail::GenerateRun run;
        run.seed = seed;
        run.best_reward = result.best_reward;
        run.reward_evaluations = result.reward_evaluations;
        run.episode_rewards = result.trace;
        run.indicators = evaluator.indicators(*result.paper);
        run.paper_file = harness_detail::out_path(
            cfg, "paper_" + cfg.baseline_method + "_" + std::to_string(seed) + ".json");
        save_paper(*result.paper, eng.bank, run.paper_file);
        harness_detail::write_trace(
            harness_detail::out_path(cfg, "trace_" + cfg.baseline_method + "_" + std::to_string(seed) + ".csv"),
            result.trace);
        runs.push_back(std::move(run));
    }
    harness_detail::write_summary(harness_detail::out_path(cfg, "summary.csv"), runs);
}

inline void cmd_evaluate(const RunConfig& cfg) {
    harness_detail::ensure_out_dir(cfg);
    const auto eng = harness_detail::load_engine(cfg, /*need_model=*/true);
    const std::vector<std::string> files = harness_detail::list_paper_files(
        cfg.papers_dir.empty() ? cfg.out_dir : cfg.papers_dir);

    csv::Writer indicators_csv(harness_detail::out_path(cfg, "indicators.csv"),
                               {"paper_id", "difficulty", "rationality", "validity"});
    std::optional<csv::Writer> scatter;
    if (!cfg.scatter_out.empty()) scatter.emplace(cfg.scatter_out, std::vector<std::string>{"difficulty", "validity"});

    for (const auto& file : files) {
        const ExamPaper paper = load_paper(file, eng.bank);
        const RewardEvaluator evaluator(eng.bank, eng.proficiency, eng.course_weights, cfg.weights,
                                        cfg.reward_normal(), paper.spec().total_points,
                                        paper.spec().target_difficulty);
        const IndicatorValues vals = evaluator.indicators(paper);
        const std::string id = std::filesystem::path(file).stem().string();
        indicators_csv.write_row({id, csv::format_double(vals.difficulty), csv::format_double(vals.rationality),
                                  csv::format_double(vals.validity)});
        if (scatter) scatter->write_row({csv::format_double(vals.difficulty), csv::format_double(vals.validity)});
        if (!cfg.scores_out.empty()) {
            // one `examinee_id,score` dump per paper
            std::filesystem::path base(cfg.scores_out);
            const std::string path = files.size() == 1
                                         ? cfg.scores_out
                                         : (base.parent_path() / (base.stem().string() + "_" + id +
                                                                  base.extension().string()))
                                               .string();
            csv::Writer scores_csv(path, {"examinee_id", "score"});
            const ScoreVector sv = group_scores(eng.proficiency, eng.bank, paper);
            for (Eigen::Index e = 0; e < sv.scores.size(); ++e) {
                scores_csv.write_row({eng.log.examinee_ids[static_cast<std::size_t>(e)],
                                      csv::format_double(sv.scores(e))});
            }
            scores_csv.close();
        }
    }
    indicators_csv.close();
    if (scatter) scatter->close();
}

// Paired comparison of the full engine against the partition-disabled
// variant (whole bank as a single subspace, threshold rule off).
inline void cmd_ablation(const RunConfig& cfg) {
    harness_detail::ensure_out_dir(cfg);
    const auto eng = harness_detail::load_engine(cfg, /*need_model=*/true);
    harness_detail::require_file(cfg.partition_path, "partition file", "run `examgen partition` first");
    const Partition partition = load_partition(cfg.partition_path, eng.bank);
    const ExamSpec spec = cfg.exam_spec();
    const RewardEvaluator evaluator(eng.bank, eng.proficiency, eng.course_weights, cfg.weights, cfg.reward_normal(),
                                    spec.total_points, spec.target_difficulty);

    struct Arm {
        std::string name;
        bool partition_disabled;
    };
    const std::vector<Arm> arms = {{"full", false}, {"noqsp", true}};

    csv::Writer summary(harness_detail::out_path(cfg, "ablation_summary.csv"),
                        {"arm", "seed", "partition_disabled", "mean_last10pct_reward", "best_reward", "difficulty",
                         "rationality", "validity"});
    for (const auto& arm : arms) {
        RunConfig arm_cfg = cfg;
        arm_cfg.agent.partition_disabled = arm.partition_disabled;
        nlohmann::json provenance;
        provenance["arm"] = arm.name;
        provenance["partition_disabled"] = arm.partition_disabled;
        provenance["seeds"] = cfg.seeds;
        provenance["episodes"] = cfg.agent.episodes;
        provenance["steps_per_episode"] = cfg.agent.steps_per_episode;
        {
            std::ofstream out(harness_detail::out_path(cfg, "run_config_" + arm.name + ".json"), std::ios::binary);
            if (!out) throw IoError("cannot write ablation run config");
            out << provenance.dump(1, ' ') << '\n';
        }
        for (const std::uint64_t seed : cfg.seeds) {
            const auto run = harness_detail::run_one_generation(arm_cfg, eng, evaluator,
                                                                arm.partition_disabled ? nullptr : &partition, seed,
                                                                arm.name + "_");
            summary.write_row({arm.name, std::to_string(seed), arm.partition_disabled ? "true" : "false",
                               csv::format_double(harness_detail::mean_last_fraction(run.episode_rewards, 0.1)),
                               csv::format_double(run.best_reward), csv::format_double(run.indicators.difficulty),
                               csv::format_double(run.indicators.rationality),
                               csv::format_double(run.indicators.validity)});
        }
    }
    summary.close();
}

// Parallel exam-paper report: sample K papers from a batch, compute the
// discrimination indicator, repeat, publish mean and standard deviation.
inline void cmd_kepg(const RunConfig& cfg) {
    harness_detail::ensure_out_dir(cfg);
    harness_detail::require_file(cfg.bank_path, "question bank", "supply --bank");
    const QuestionBank bank = load_question_bank(cfg.bank_path);
    const std::vector<std::string> files = harness_detail::list_paper_files(
        cfg.papers_dir.empty() ? cfg.out_dir : cfg.papers_dir);
    if (static_cast<int>(files.size()) < cfg.kepg_k) {
        throw ConfigError("kepg needs at least " + std::to_string(cfg.kepg_k) + " papers, found " +
                          std::to_string(files.size()));
    }
    if (cfg.kepg_k < 2) throw ConfigError("kepg requires k >= 2");

    std::vector<std::vector<int>> papers;
    for (const auto& file : files) papers.push_back(load_paper(file, bank).questions());

    Rng rng(mix_seed(cfg.seeds.front(), 23));
    std::vector<double> values;
    nlohmann::json runs = nlohmann::json::array();
    for (int rep = 0; rep < cfg.kepg_repeats; ++rep) {
        const std::vector<int> picked = rng.sample_distinct(static_cast<int>(papers.size()), cfg.kepg_k);
        std::vector<std::vector<int>> selection;
        for (int idx : picked) selection.push_back(papers[static_cast<std::size_t>(idx)]);
        const double d = discrimination(selection);
        values.push_back(d);
        nlohmann::json row;
        row["run"] = rep + 1;
        std::vector<std::string> names;
        for (int idx : picked) names.push_back(std::filesystem::path(files[static_cast<std::size_t>(idx)]).stem());
        row["papers"] = names;
        row["discrimination"] = d;
        runs.push_back(std::move(row));
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double stddev = values.size() > 1 ? std::sqrt(var / static_cast<double>(values.size() - 1)) : 0.0;

    nlohmann::json report;
    report["k"] = cfg.kepg_k;
    report["repeats"] = cfg.kepg_repeats;
    report["runs"] = std::move(runs);
    report["mean"] = mean;
    report["std"] = stddev;
    {
        std::ofstream out(harness_detail::out_path(cfg, "discrimination.json"), std::ios::binary);
        if (!out) throw IoError("cannot write discrimination report");
        out << report.dump(1, ' ') << '\n';
    }

    csv::Writer w(harness_detail::out_path(cfg, "kepg.csv"), {"run", "discrimination"});
    for (std::size_t i = 0; i < values.size(); ++i) {
        w.write_row({std::to_string(i + 1), csv::format_double(values[i])});
    }
    w.write_row({"mean", csv::format_double(mean)});
    w.close();
}

}  // namespace examgen
