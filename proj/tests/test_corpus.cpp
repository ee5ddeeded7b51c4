#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "examgen/corpus.hpp"
#include "test_support.hpp"

using namespace examgen;
using testsupport::TempDir;
using testsupport::write_file;

TEST(LoadQuestionBank, ParsesSkillListsAndIndexesByFirstAppearance) {
    TempDir tmp("bank_parse");
    write_file(tmp.path("bank.csv"),
               "question_id,skill_ids,score\n"
               "q1,s1;s2,1\n"
               "q2,s2,1\n");
    const QuestionBank bank = load_question_bank(tmp.path("bank.csv"));
    EXPECT_EQ(bank.skill_count(), 2);
    EXPECT_EQ(bank.question_count(), 2);
    EXPECT_EQ(bank.skills()[0].id, "s1");
    EXPECT_EQ(bank.skills()[1].id, "s2");
    EXPECT_EQ(bank.incidence_row(0), (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(bank.incidence_row(1), (std::vector<double>{0.0, 1.0}));
}

TEST(LoadQuestionBank, EmptySkillListIsDomainError) {
    TempDir tmp("bank_noskill");
    write_file(tmp.path("bank.csv"),
               "question_id,skill_ids,score\n"
               "q3,,1\n");
    EXPECT_THROW(load_question_bank(tmp.path("bank.csv")), DomainError);
}

TEST(LoadQuestionBank, DuplicateQuestionIdIsReferenceError) {
    TempDir tmp("bank_dup");
    write_file(tmp.path("bank.csv"),
               "question_id,skill_ids,score\n"
               "q1,s1,1\n"
               "q1,s2,1\n");
    EXPECT_THROW(load_question_bank(tmp.path("bank.csv")), ReferenceError);
}

TEST(LoadQuestionBank, StaticsScaleFile) {
    TempDir tmp("bank_300");
    std::string body = "question_id,skill_ids,score\n";
    for (int i = 0; i < 300; ++i) {
        body += "q" + std::to_string(i) + ",s" + std::to_string(i % 17) + ",1\n";
    }
    write_file(tmp.path("bank.csv"), body);
    const QuestionBank bank = load_question_bank(tmp.path("bank.csv"));
    EXPECT_EQ(bank.question_count(), 300);
}

TEST(LoadQuestionBank, RoundTripReproducesCanonicalFile) {
    TempDir tmp("bank_rt");
    const std::string canonical =
        "question_id,skill_ids,score\n"
        "q1,s1;s2,1\n"
        "q2,s2,2.5\n"
        "q3,s3,1\n";
    write_file(tmp.path("bank.csv"), canonical);
    const QuestionBank bank = load_question_bank(tmp.path("bank.csv"));
    write_question_bank(bank, tmp.path("bank2.csv"));
    EXPECT_EQ(testsupport::read_file(tmp.path("bank2.csv")), canonical);
}

TEST(LoadInteractions, GroupsOneExaminee) {
    TempDir tmp("log_one");
    write_file(tmp.path("bank.csv"), "question_id,skill_ids,score\nq1,s1,1\nq2,s2,1\n");
    write_file(tmp.path("log.csv"),
               "examinee_id,question_id,correct\n"
               "e1,q1,1\n"
               "e1,q2,1\n");
    const QuestionBank bank = load_question_bank(tmp.path("bank.csv"));
    const InteractionLog log = load_interactions(tmp.path("log.csv"), bank);
    ASSERT_EQ(log.examinee_count(), 1);
    ASSERT_EQ(log.sequences[0].size(), 2u);
    EXPECT_EQ(log.sequences[0][0].correct, 1);
    EXPECT_EQ(log.sequences[0][1].correct, 1);
}

TEST(LoadInteractions, BadCorrectValueNamesLine) {
    TempDir tmp("log_bad");
    write_file(tmp.path("bank.csv"), "question_id,skill_ids,score\nq1,s1,1\n");
    write_file(tmp.path("log.csv"),
               "examinee_id,question_id,correct\n"
               "e1,q1,1\n"
               "e1,q1,2\n");
    const QuestionBank bank = load_question_bank(tmp.path("bank.csv"));
    try {
        load_interactions(tmp.path("log.csv"), bank);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
    }
}

TEST(LoadInteractions, UnknownQuestionIsReferenceError) {
    TempDir tmp("log_unknown");
    write_file(tmp.path("bank.csv"), "question_id,skill_ids,score\nq1,s1,1\n");
    write_file(tmp.path("log.csv"), "examinee_id,question_id,correct\ne1,qX,1\n");
    const QuestionBank bank = load_question_bank(tmp.path("bank.csv"));
    EXPECT_THROW(load_interactions(tmp.path("log.csv"), bank), ReferenceError);
}

TEST(LoadInteractions, InterleavedExamineesPreserveFileOrder) {
    TempDir tmp("log_interleave");
    write_file(tmp.path("bank.csv"), "question_id,skill_ids,score\nq0,s1,1\nq1,s1,1\nq2,s1,1\nq3,s1,1\n");
    const QuestionBank bank = load_question_bank(tmp.path("bank.csv"));

    // rows: (examinee, question, correct) in file order
    struct Row {
        std::string e;
        std::string q;
        int y;
    };
    const std::vector<Row> rows = {{"a", "q0", 1}, {"b", "q1", 0}, {"a", "q2", 0},
                                   {"b", "q3", 1}, {"a", "q1", 1}, {"b", "q0", 0}};
    std::string body = "examinee_id,question_id,correct\n";
    for (const auto& r : rows) body += r.e + "," + r.q + "," + std::to_string(r.y) + "\n";
    write_file(tmp.path("log.csv"), body);

    const InteractionLog log = load_interactions(tmp.path("log.csv"), bank);

    // oracle: stable grouping by (examinee, original line)
    std::map<std::string, std::vector<std::pair<int, int>>> expected;
    for (const auto& r : rows) expected[r.e].push_back({bank.find_question(r.q), r.y});

    ASSERT_EQ(log.examinee_count(), 2);
    for (int e = 0; e < log.examinee_count(); ++e) {
        const auto& want = expected.at(log.examinee_ids[static_cast<std::size_t>(e)]);
        const auto& got = log.sequences[static_cast<std::size_t>(e)];
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t t = 0; t < got.size(); ++t) {
            EXPECT_EQ(got[t].question_index, want[t].first);
            EXPECT_EQ(got[t].correct, want[t].second);
        }
    }
}

TEST(InteractionsRoundTrip, WriteThenLoadIsIdentity) {
    TempDir tmp("log_rt");
    SynthesisConfig cfg;
    cfg.num_skills = 5;
    cfg.num_questions = 20;
    cfg.num_examinees = 4;
    cfg.records_min = 3;
    cfg.records_max = 8;
    cfg.skills_per_question_max = 2;
    const SyntheticCorpus corpus = synthesize_corpus(cfg, 3);
    write_interactions(corpus.log, corpus.bank, tmp.path("log.csv"));
    const InteractionLog back = load_interactions(tmp.path("log.csv"), corpus.bank);
    ASSERT_EQ(back.examinee_count(), corpus.log.examinee_count());
    for (int e = 0; e < back.examinee_count(); ++e) {
        ASSERT_EQ(back.sequences[static_cast<std::size_t>(e)].size(),
                  corpus.log.sequences[static_cast<std::size_t>(e)].size());
        for (std::size_t t = 0; t < back.sequences[static_cast<std::size_t>(e)].size(); ++t) {
            EXPECT_EQ(back.sequences[static_cast<std::size_t>(e)][t].question_index,
                      corpus.log.sequences[static_cast<std::size_t>(e)][t].question_index);
            EXPECT_EQ(back.sequences[static_cast<std::size_t>(e)][t].correct,
                      corpus.log.sequences[static_cast<std::size_t>(e)][t].correct);
        }
    }
}

TEST(SynthesizeCorpus, SameSeedIsByteIdentical) {
    TempDir tmp("synth_det");
    SynthesisConfig cfg;
    cfg.num_skills = 2;
    cfg.num_questions = 10;
    cfg.num_examinees = 3;
    cfg.records_min = 5;
    cfg.records_max = 5;
    cfg.skills_per_question_max = 2;
    const SyntheticCorpus a = synthesize_corpus(cfg, 7);
    const SyntheticCorpus b = synthesize_corpus(cfg, 7);

    write_question_bank(a.bank, tmp.path("a_bank.csv"));
    write_question_bank(b.bank, tmp.path("b_bank.csv"));
    write_interactions(a.log, a.bank, tmp.path("a_log.csv"));
    write_interactions(b.log, b.bank, tmp.path("b_log.csv"));
    EXPECT_EQ(testsupport::read_file(tmp.path("a_bank.csv")), testsupport::read_file(tmp.path("b_bank.csv")));
    EXPECT_EQ(testsupport::read_file(tmp.path("a_log.csv")), testsupport::read_file(tmp.path("b_log.csv")));
    EXPECT_EQ(a.mastery.values(), b.mastery.values());
}

TEST(SynthesizeCorpus, DifferentSeedsDiffer) {
    SynthesisConfig cfg;
    cfg.num_skills = 6;
    cfg.num_questions = 40;
    cfg.num_examinees = 2;
    cfg.records_min = 3;
    cfg.records_max = 3;
    cfg.skills_per_question_max = 3;
    const SyntheticCorpus a = synthesize_corpus(cfg, 1);
    const SyntheticCorpus b = synthesize_corpus(cfg, 2);
    bool any_diff = false;
    for (int j = 0; j < a.bank.question_count() && !any_diff; ++j) {
        any_diff = a.bank.question(j).skills != b.bank.question(j).skills;
    }
    EXPECT_TRUE(any_diff);
}

TEST(SynthesizeCorpus, PerfectMasteryMeansAllCorrect) {
    SynthesisConfig cfg;
    cfg.num_skills = 4;
    cfg.num_questions = 15;
    cfg.num_examinees = 5;
    cfg.records_min = 10;
    cfg.records_max = 10;
    cfg.skills_per_question_max = 3;
    cfg.mastery_high_prob = 1.0;
    cfg.mastery_high_lo = 1.0;
    cfg.mastery_high_hi = 1.0;
    const SyntheticCorpus corpus = synthesize_corpus(cfg, 5);
    for (const auto& seq : corpus.log.sequences) {
        for (const auto& rec : seq) EXPECT_EQ(rec.correct, 1);
    }
}

TEST(SynthesizeCorpus, SeedBankSkillFrequencyWithinTolerance) {
    // seed bank with a skewed skill distribution
    SynthesisConfig seed_cfg;
    seed_cfg.num_skills = 20;
    seed_cfg.num_questions = 300;
    seed_cfg.num_examinees = 1;
    seed_cfg.records_min = 1;
    seed_cfg.records_max = 1;
    seed_cfg.skills_per_question_max = 3;
    seed_cfg.skill_popularity_exponent = 1.0;
    const SyntheticCorpus seed_corpus = synthesize_corpus(seed_cfg, 11);

    SynthesisConfig cfg = seed_cfg;
    cfg.num_questions = 2000;
    cfg.seed_bank = &seed_corpus.bank;
    const SyntheticCorpus corpus = synthesize_corpus(cfg, 12);
    ASSERT_EQ(corpus.bank.question_count(), 2000);
    ASSERT_EQ(corpus.bank.skill_count(), seed_corpus.bank.skill_count());

    // brute-force incidence frequencies in both banks
    auto freq = [](const QuestionBank& bank) {
        std::vector<double> counts(static_cast<std::size_t>(bank.skill_count()), 0.0);
        double total = 0.0;
        for (const auto& q : bank.questions()) {
            for (int s : q.skills) {
                counts[static_cast<std::size_t>(s)] += 1.0;
                total += 1.0;
            }
        }
        for (auto& c : counts) c /= total;
        return counts;
    };
    const auto p = freq(seed_corpus.bank);
    const auto q = freq(corpus.bank);
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    tv *= 0.5;
    EXPECT_LT(tv, 0.05);
}

TEST(SynthesizeCorpus, InfeasibleConfigIsConfigError) {
    SynthesisConfig cfg;
    cfg.num_questions = 0;
    EXPECT_THROW(synthesize_corpus(cfg, 1), ConfigError);
}

TEST(DifficultyLabel, MatchesRightRate) {
    QuestionBank bank;
    bank.add_skill("s");
    bank.add_question({"q0", {0}, 1.0});
    InteractionLog log;
    log.examinee_ids = {"e0", "e1"};
    log.sequences = {{{0, 1}, {0, 1}}, {{0, 1}, {0, 0}}};
    EXPECT_DOUBLE_EQ(question_difficulty_label(log, 0), 0.75);
}

TEST(DifficultyLabel, NeverAttemptedIsError) {
    QuestionBank bank;
    bank.add_skill("s");
    bank.add_question({"q0", {0}, 1.0});
    bank.add_question({"q1", {0}, 1.0});
    InteractionLog log;
    log.examinee_ids = {"e0"};
    log.sequences = {{{0, 1}}};
    EXPECT_THROW(question_difficulty_label(log, 1), UndefinedLabelError);
}

TEST(DifficultyLabel, AgreesWithIndependentTallyOnSyntheticCorpus) {
    SynthesisConfig cfg;
    cfg.num_skills = 8;
    cfg.num_questions = 30;
    cfg.num_examinees = 12;
    cfg.records_min = 20;
    cfg.records_max = 30;
    cfg.skills_per_question_max = 2;
    const SyntheticCorpus corpus = synthesize_corpus(cfg, 21);

    std::vector<long> attempts(30, 0), correct(30, 0);
    for (const auto& seq : corpus.log.sequences) {
        for (const auto& rec : seq) {
            ++attempts[static_cast<std::size_t>(rec.question_index)];
            correct[static_cast<std::size_t>(rec.question_index)] += rec.correct;
        }
    }
    for (int q = 0; q < 30; ++q) {
        if (attempts[static_cast<std::size_t>(q)] == 0) {
            EXPECT_THROW(question_difficulty_label(corpus.log, q), UndefinedLabelError);
        } else {
            EXPECT_DOUBLE_EQ(question_difficulty_label(corpus.log, q),
                             static_cast<double>(correct[static_cast<std::size_t>(q)]) /
                                 static_cast<double>(attempts[static_cast<std::size_t>(q)]));
        }
    }
}

TEST(CourseSkillWeights, HandComputedBank) {
    QuestionBank bank;
    bank.add_skill("a");
    bank.add_skill("b");
    bank.add_question({"q1", {0, 1}, 1.0});
    bank.add_question({"q2", {1}, 1.0});
    const Eigen::VectorXd w = course_skill_weights(bank);
    EXPECT_DOUBLE_EQ(w(0), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(w(1), 2.0 / 3.0);
}

TEST(CourseSkillWeights, SingleSkillBankIsOneHot) {
    QuestionBank bank;
    bank.add_skill("a");
    bank.add_skill("b");
    bank.add_question({"q1", {1}, 1.0});
    bank.add_question({"q2", {1}, 1.0});
    const Eigen::VectorXd w = course_skill_weights(bank);
    EXPECT_DOUBLE_EQ(w(0), 0.0);
    EXPECT_DOUBLE_EQ(w(1), 1.0);
}

TEST(CourseSkillWeights, ProbabilityVectorAndOracleOnSyntheticBank) {
    SynthesisConfig cfg;
    cfg.num_skills = 25;
    cfg.num_questions = 2000;
    cfg.num_examinees = 1;
    cfg.records_min = 1;
    cfg.records_max = 1;
    cfg.skills_per_question_max = 3;
    const SyntheticCorpus corpus = synthesize_corpus(cfg, 31);
    const Eigen::VectorXd w = course_skill_weights(corpus.bank);

    Eigen::VectorXd oracle = Eigen::VectorXd::Zero(25);
    double total = 0.0;
    for (const auto& q : corpus.bank.questions()) {
        for (int s : q.skills) {
            oracle(s) += 1.0;
            total += 1.0;
        }
    }
    oracle /= total;
    EXPECT_NEAR((w - oracle).cwiseAbs().maxCoeff(), 0.0, 0.0);
    EXPECT_NEAR(w.sum(), 1.0, 1e-12);
    EXPECT_GE(w.minCoeff(), 0.0);
}

TEST(ExamPaper, RejectsDuplicatesAndWrongSize) {
    const ExamSpec spec = ExamSpec::uniform(3, 1.0, 0.7);
    EXPECT_THROW(ExamPaper({0, 1, 1}, spec), DomainError);
    EXPECT_THROW(ExamPaper({0, 1}, spec), DomainError);
    EXPECT_NO_THROW(ExamPaper({2, 0, 1}, spec));
}

TEST(ExamPaper, NoDuplicatesUnderRandomMutations) {
    const ExamSpec spec = ExamSpec::uniform(8, 1.0, 0.7);
    Rng rng(99);
    ExamPaper paper(rng.sample_distinct(40, 8), spec);
    for (int step = 0; step < 2000; ++step) {
        int candidate = rng.uniform_int(40);
        while (paper.contains(candidate)) candidate = rng.uniform_int(40);
        const int h = rng.uniform_int(8);
        if (step % 2 == 0) {
            paper.replace_and_front(h, candidate);
        } else {
            paper.replace_at(h, candidate);
        }
        std::set<int> distinct(paper.questions().begin(), paper.questions().end());
        ASSERT_EQ(distinct.size(), 8u);
        ASSERT_EQ(paper.questions().size(), 8u);
    }
}

TEST(ExamPaper, ReplaceAndFrontKeepsPointsWithQuestions) {
    ExamSpec spec = ExamSpec::from_points({1.0, 2.0, 3.0}, 0.5);
    ExamPaper paper({10, 11, 12}, spec);
    paper.replace_and_front(1, 20);  // 20 inherits the 2.0 points
    EXPECT_EQ(paper.questions(), (std::vector<int>{20, 10, 12}));
    EXPECT_DOUBLE_EQ(paper.points_at(0), 2.0);
    EXPECT_DOUBLE_EQ(paper.points_at(1), 1.0);
    EXPECT_DOUBLE_EQ(paper.points_at(2), 3.0);
    EXPECT_DOUBLE_EQ(paper.spec().total_points, 6.0);
}

TEST(ExamSpec, ValidatesFields) {
    EXPECT_THROW(ExamSpec::uniform(0, 1.0, 0.5), DomainError);
    EXPECT_THROW(ExamSpec::uniform(5, -1.0, 0.5), DomainError);
    EXPECT_THROW(ExamSpec::uniform(5, 1.0, 1.5), DomainError);
    const ExamSpec s = ExamSpec::from_points({2.0, 3.0}, 0.4);
    EXPECT_DOUBLE_EQ(s.total_points, 5.0);
    EXPECT_EQ(s.n, 2);
}

TEST(FilterMinRecords, DropsShortSequences) {
    InteractionLog log;
    log.examinee_ids = {"a", "b", "c"};
    log.sequences = {{{0, 1}}, {{0, 1}, {0, 0}, {0, 1}}, {{0, 0}, {0, 1}}};
    const InteractionLog filtered = filter_min_records(log, 2);
    ASSERT_EQ(filtered.examinee_count(), 2);
    EXPECT_EQ(filtered.examinee_ids[0], "b");
    EXPECT_EQ(filtered.examinee_ids[1], "c");
}
