// examgen: multi-objective exam paper generation from interaction logs.
//
// Pipeline: synthesize (or bring your own CSVs) -> train-dkt -> partition
// -> generate / baseline -> evaluate / ablation / kepg.

#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "examgen/harness.hpp"

namespace {

using examgen::RunConfig;

struct CommonFlags {
    std::string config;
    std::vector<std::uint64_t> seeds;
    std::string out;
    std::string bank;
    std::string interactions;
    std::string checkpoint;
    std::string partition;
    std::string papers_dir;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config, "JSON config file; flags override its fields");
    cmd->add_option("--seed,--seeds", flags.seeds, "seed list (repeatable or comma separated)")->delimiter(',');
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--bank", flags.bank, "question bank CSV");
    cmd->add_option("--interactions", flags.interactions, "interaction log CSV");
    cmd->add_option("--checkpoint", flags.checkpoint, "tracer checkpoint JSON");
    cmd->add_option("--partition", flags.partition, "partition JSON");
    cmd->add_option("--papers-dir", flags.papers_dir, "directory of paper_*.json files");
}

RunConfig build_config(const CLI::App* cmd, const CommonFlags& flags) {
    RunConfig cfg;
    if (!flags.config.empty()) cfg = examgen::load_run_config(flags.config);
    if (cmd->count("--seed") > 0) {
        if (flags.seeds.empty()) throw examgen::ConfigError("seed list must not be empty");
        cfg.seeds = flags.seeds;
    }
    if (cmd->count("--out") > 0) cfg.out_dir = flags.out;
    if (cmd->count("--bank") > 0) cfg.bank_path = flags.bank;
    if (cmd->count("--interactions") > 0) cfg.interactions_path = flags.interactions;
    if (cmd->count("--checkpoint") > 0) cfg.checkpoint_path = flags.checkpoint;
    if (cmd->count("--partition") > 0) cfg.partition_path = flags.partition;
    if (cmd->count("--papers-dir") > 0) cfg.papers_dir = flags.papers_dir;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-objective exam paper generation engine"};
    app.require_subcommand(1);

    // one CommonFlags per subcommand so counts stay separated
    struct Sub {
        CLI::App* cmd = nullptr;
        CommonFlags flags;
        std::function<void(RunConfig&)> tweak;  // applies command-specific flags
        std::function<void(const RunConfig&)> run;
    };
    std::vector<Sub> subs(8);

    // synthesize
    {
        Sub& s = subs[0];
        s.cmd = app.add_subcommand("synthesize", "generate a synthetic corpus (bank, interactions, ground truth)");
        add_common(s.cmd, s.flags);
        auto skills = std::make_shared<int>(0);
        auto questions = std::make_shared<int>(0);
        auto examinees = std::make_shared<int>(0);
        auto seed_bank = std::make_shared<std::string>();
        s.cmd->add_option("--skills", *skills, "number of skills |K|");
        s.cmd->add_option("--questions", *questions, "number of questions |Q|");
        s.cmd->add_option("--examinees", *examinees, "number of examinees |E|");
        s.cmd->add_option("--seed-bank", *seed_bank, "bank CSV whose skill-set distribution seeds new questions");
        CLI::App* cmd = s.cmd;
        s.tweak = [cmd, skills, questions, examinees, seed_bank](RunConfig& cfg) {
            if (cmd->count("--skills")) cfg.synthesis.num_skills = *skills;
            if (cmd->count("--questions")) cfg.synthesis.num_questions = *questions;
            if (cmd->count("--examinees")) cfg.synthesis.num_examinees = *examinees;
            if (cmd->count("--seed-bank")) cfg.synthesis_seed_bank = *seed_bank;
        };
        s.run = examgen::cmd_synthesize;
    }

    // train-dkt
    {
        Sub& s = subs[1];
        s.cmd = app.add_subcommand("train-dkt", "train the knowledge tracer and write a checkpoint");
        add_common(s.cmd, s.flags);
        auto epochs = std::make_shared<int>(0);
        auto min_records = std::make_shared<int>(0);
        s.cmd->add_option("--epochs", *epochs, "maximum training epochs");
        s.cmd->add_option("--min-records", *min_records, "drop examinees with fewer records");
        CLI::App* cmd = s.cmd;
        s.tweak = [cmd, epochs, min_records](RunConfig& cfg) {
            if (cmd->count("--epochs")) cfg.tracer.max_epochs = *epochs;
            if (cmd->count("--min-records")) cfg.min_records = *min_records;
        };
        s.run = examgen::cmd_train_dkt;
    }

    // partition
    {
        Sub& s = subs[2];
        s.cmd = app.add_subcommand("partition", "cluster question embeddings into subspaces");
        add_common(s.cmd, s.flags);
        auto f = std::make_shared<int>(0);
        auto embeddings_out = std::make_shared<std::string>();
        s.cmd->add_option("--f", *f, "number of clusters");
        s.cmd->add_option("--embeddings-out", *embeddings_out, "also export embeddings CSV here");
        CLI::App* cmd = s.cmd;
        s.tweak = [cmd, f, embeddings_out](RunConfig& cfg) {
            if (cmd->count("--f")) cfg.partition_f = *f;
            if (cmd->count("--embeddings-out")) cfg.embeddings_out = *embeddings_out;
        };
        s.run = examgen::cmd_partition;
    }

    // generate
    {
        Sub& s = subs[3];
        s.cmd = app.add_subcommand("generate", "assemble exam papers with the DDQN agent");
        add_common(s.cmd, s.flags);
        auto n = std::make_shared<int>(0);
        auto difficulty = std::make_shared<double>(0.0);
        auto episodes = std::make_shared<int>(0);
        auto steps = std::make_shared<int>(0);
        auto ts = std::make_shared<double>(0.0);
        s.cmd->add_option("--n", *n, "questions per paper");
        s.cmd->add_option("--difficulty", *difficulty, "target difficulty in [0,1]");
        s.cmd->add_option("--episodes", *episodes, "training episodes");
        s.cmd->add_option("--steps", *steps, "steps per episode");
        s.cmd->add_option("--ts", *ts, "subspace coverage threshold");
        CLI::App* cmd = s.cmd;
        s.tweak = [cmd, n, difficulty, episodes, steps, ts](RunConfig& cfg) {
            if (cmd->count("--n")) cfg.exam_n = *n;
            if (cmd->count("--difficulty")) cfg.target_difficulty = *difficulty;
            if (cmd->count("--episodes")) cfg.agent.episodes = *episodes;
            if (cmd->count("--steps")) cfg.agent.steps_per_episode = *steps;
            if (cmd->count("--ts")) cfg.agent.subspace_threshold = *ts;
        };
        s.run = examgen::cmd_generate;
    }

    // baseline
    {
        Sub& s = subs[4];
        s.cmd = app.add_subcommand("baseline", "assemble papers with rsf, ga or sa");
        add_common(s.cmd, s.flags);
        auto method = std::make_shared<std::string>();
        auto trials = std::make_shared<long>(0);
        auto n = std::make_shared<int>(0);
        auto difficulty = std::make_shared<double>(0.0);
        s.cmd->add_option("--method", *method, "rsf, ga or sa")->check(CLI::IsMember({"rsf", "ga", "sa"}));
        s.cmd->add_option("--trials", *trials, "rsf trial count");
        s.cmd->add_option("--n", *n, "questions per paper");
        s.cmd->add_option("--difficulty", *difficulty, "target difficulty in [0,1]");
        CLI::App* cmd = s.cmd;
        s.tweak = [cmd, method, trials, n, difficulty](RunConfig& cfg) {
            if (cmd->count("--method")) cfg.baseline_method = *method;
            if (cmd->count("--trials")) cfg.baseline.trials = *trials;
            if (cmd->count("--n")) cfg.exam_n = *n;
            if (cmd->count("--difficulty")) cfg.target_difficulty = *difficulty;
        };
        s.run = examgen::cmd_baseline;
    }

    // evaluate
    {
        Sub& s = subs[5];
        s.cmd = app.add_subcommand("evaluate", "compute indicators for emitted papers");
        add_common(s.cmd, s.flags);
        auto scatter = std::make_shared<std::string>();
        auto scores = std::make_shared<std::string>();
        s.cmd->add_option("--scatter-out", *scatter, "write difficulty/validity scatter CSV here");
        s.cmd->add_option("--scores-out", *scores, "dump predicted per-examinee scores here");
        CLI::App* cmd = s.cmd;
        s.tweak = [cmd, scatter, scores](RunConfig& cfg) {
            if (cmd->count("--scatter-out")) cfg.scatter_out = *scatter;
            if (cmd->count("--scores-out")) cfg.scores_out = *scores;
        };
        s.run = examgen::cmd_evaluate;
    }

    // ablation
    {
        Sub& s = subs[6];
        s.cmd = app.add_subcommand("ablation", "paired full vs partition-disabled comparison");
        add_common(s.cmd, s.flags);
        auto episodes = std::make_shared<int>(0);
        auto steps = std::make_shared<int>(0);
        s.cmd->add_option("--episodes", *episodes, "training episodes");
        s.cmd->add_option("--steps", *steps, "steps per episode");
        CLI::App* cmd = s.cmd;
        s.tweak = [cmd, episodes, steps](RunConfig& cfg) {
            if (cmd->count("--episodes")) cfg.agent.episodes = *episodes;
            if (cmd->count("--steps")) cfg.agent.steps_per_episode = *steps;
        };
        s.run = examgen::cmd_ablation;
    }

    // kepg
    {
        Sub& s = subs[7];
        s.cmd = app.add_subcommand("kepg", "parallel-paper discrimination report");
        add_common(s.cmd, s.flags);
        auto k = std::make_shared<int>(0);
        auto repeats = std::make_shared<int>(0);
        s.cmd->add_option("--k", *k, "papers per parallel set");
        s.cmd->add_option("--repeats", *repeats, "independent draws");
        CLI::App* cmd = s.cmd;
        s.tweak = [cmd, k, repeats](RunConfig& cfg) {
            if (cmd->count("--k")) cfg.kepg_k = *k;
            if (cmd->count("--repeats")) cfg.kepg_repeats = *repeats;
        };
        s.run = examgen::cmd_kepg;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto& s : subs) {
            if (s.cmd->parsed()) {
                RunConfig cfg = build_config(s.cmd, s.flags);
                if (s.tweak) s.tweak(cfg);
                s.run(cfg);
                return 0;
            }
        }
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const examgen::EngineError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
