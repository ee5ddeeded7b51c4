#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "examgen/objectives.hpp"
#include "examgen/rng.hpp"
#include "test_support.hpp"

using namespace examgen;

namespace {

// Brute-force optimal transport between equal-size uniform empirical
// samples: minimum over all permutation couplings of the mean cost.
double wasserstein_bruteforce(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<int> perm(b.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) cost += std::abs(a[i] - b[static_cast<std::size_t>(perm[i])]);
        best = std::min(best, cost / static_cast<double>(a.size()));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

TEST(NormalQuantile, MatchesTabulatedValues) {
    EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-9);
    EXPECT_NEAR(normal_quantile(0.975), 1.959964, 1e-5);
    EXPECT_NEAR(normal_quantile(0.95), 1.6448536, 1e-5);
    EXPECT_NEAR(normal_quantile(0.8413447), 1.0, 1e-4);
    for (double p : {0.01, 0.1, 0.3, 0.45}) {
        EXPECT_NEAR(normal_quantile(p), -normal_quantile(1.0 - p), 1e-8);
    }
    EXPECT_THROW(normal_quantile(0.0), DomainError);
    EXPECT_THROW(normal_quantile(1.0), DomainError);
}

TEST(NormalQuantileSample, MidProbabilityPointsAscending) {
    const auto s = normal_quantile_sample(0.7, 0.15, 50);
    ASSERT_EQ(s.size(), 50u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    // symmetric quantiles average to the mean
    EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0) / 50.0, 0.7, 1e-12);
}

TEST(Wasserstein, IdenticalVectorsAreZero) {
    EXPECT_DOUBLE_EQ(wasserstein_1d({0.3, 0.1, 0.9}, {0.9, 0.3, 0.1}), 0.0);
}

TEST(Wasserstein, SingleMassMove) { EXPECT_DOUBLE_EQ(wasserstein_1d({0.0}, {1.0}), 1.0); }

TEST(Wasserstein, TwoAtomCase) { EXPECT_DOUBLE_EQ(wasserstein_1d({0.0, 1.0}, {0.5, 0.5}), 0.5); }

TEST(Wasserstein, SizeMismatchIsDomainError) {
    EXPECT_THROW(wasserstein_1d({0.0, 1.0}, {0.5}), DomainError);
    EXPECT_THROW(wasserstein_1d({}, {}), DomainError);
}

TEST(Wasserstein, SortedPairingEqualsBruteForceTransport) {
    Rng rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + rng.uniform_int(6);
        std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
        for (auto& v : a) v = rng.uniform(-2.0, 2.0);
        for (auto& v : b) v = rng.uniform(-2.0, 2.0);
        EXPECT_NEAR(wasserstein_1d(a, b), wasserstein_bruteforce(a, b), 1e-9);
    }
}

TEST(Wasserstein, MetricPropertiesOnRandomTriples) {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + rng.uniform_int(8);
        std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n)), c(static_cast<std::size_t>(n));
        for (auto& v : a) v = rng.uniform(0.0, 1.0);
        for (auto& v : b) v = rng.uniform(0.0, 1.0);
        for (auto& v : c) v = rng.uniform(0.0, 1.0);
        const double ab = wasserstein_1d(a, b);
        const double ba = wasserstein_1d(b, a);
        const double ac = wasserstein_1d(a, c);
        const double cb = wasserstein_1d(c, b);
        EXPECT_DOUBLE_EQ(ab, ba);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, ac + cb + 1e-12);  // triangle inequality

        // zero iff sorted-equal
        std::vector<double> sa = a, sb = b;
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa == sb) {
            EXPECT_DOUBLE_EQ(ab, 0.0);
        } else {
            EXPECT_GT(ab, 0.0);
        }
        EXPECT_DOUBLE_EQ(wasserstein_1d(a, a), 0.0);
    }
}

TEST(DifficultyReward, HandCases) {
    EXPECT_DOUBLE_EQ(difficulty_reward(0.7, 0.7), 1.0);
    EXPECT_DOUBLE_EQ(difficulty_reward(0.5, 0.7), 0.8);
    EXPECT_THROW(difficulty_reward(1.2, 0.7), DomainError);
}

TEST(DifficultyReward, GroupMeanMatchesBruteForce) {
    Rng rng(5);
    std::vector<double> scores(50);
    for (auto& s : scores) s = rng.uniform(0.0, 1.0);
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= 50.0;
    EXPECT_DOUBLE_EQ(difficulty_reward(mean, 0.7), 1.0 - std::abs(0.7 - mean));
}

TEST(RationalityReward, ExactQuantileSampleScoresOne) {
    NormalSpec spec;
    const auto sample = normal_quantile_sample(spec.mu, spec.sigma, 40);
    EXPECT_DOUBLE_EQ(rationality_reward(sample, spec), 1.0);
}

TEST(RationalityReward, AllZeroScoresAgainstDefaultNormal) {
    NormalSpec spec;
    const int m = 50;
    const auto sample = normal_quantile_sample(spec.mu, spec.sigma, m);
    // independent summation: every zero pairs with one quantile point
    double expected_w = 0.0;
    for (double s : sample) expected_w += std::abs(s);
    expected_w /= m;
    const std::vector<double> zeros(static_cast<std::size_t>(m), 0.0);
    EXPECT_NEAR(rationality_reward(zeros, spec), std::clamp(1.0 - expected_w, 0.0, 1.0), 1e-12);
    EXPECT_NEAR(rationality_reward(zeros, spec), 0.3, 0.01);
}

TEST(RationalityReward, ClampedToUnitIntervalOnRandomInputs) {
    Rng rng(9);
    NormalSpec spec;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + rng.uniform_int(60);
        std::vector<double> scores(static_cast<std::size_t>(n));
        for (auto& s : scores) s = rng.uniform(-2.0, 3.0);
        const double r2 = rationality_reward(scores, spec);
        EXPECT_GE(r2, 0.0);
        EXPECT_LE(r2, 1.0);
    }
}

TEST(CoverageReward, ParallelVectorsScoreOne) {
    Eigen::VectorXd v(3), c(3);
    v << 0.2, 0.3, 0.5;
    c << 0.2, 0.3, 0.5;
    EXPECT_NEAR(coverage_reward(v, c), 1.0, 1e-12);
}

TEST(CoverageReward, DisjointSupportsScoreZero) {
    Eigen::VectorXd v(4), c(4);
    v << 0.5, 0.5, 0.0, 0.0;
    c << 0.0, 0.0, 0.5, 0.5;
    EXPECT_DOUBLE_EQ(coverage_reward(v, c), 0.0);
}

TEST(CoverageReward, ToyPaperMatchesHandCountAndIndependentCosine) {
    const QuestionBank bank = testsupport::tiny_bank();
    // paper {q0, q1, q3}: incidences s0:2, s1:2, s2:1, total 5
    const std::vector<int> paper = {0, 1, 3};
    const Eigen::VectorXd v = paper_skill_proportions(bank, paper);
    EXPECT_DOUBLE_EQ(v(0), 2.0 / 5.0);
    EXPECT_DOUBLE_EQ(v(1), 2.0 / 5.0);
    EXPECT_DOUBLE_EQ(v(2), 1.0 / 5.0);

    const Eigen::VectorXd c = course_skill_weights(bank);
    double dot = 0.0, nv = 0.0, nc = 0.0;
    for (int i = 0; i < 3; ++i) {
        dot += v(i) * c(i);
        nv += v(i) * v(i);
        nc += c(i) * c(i);
    }
    const double expected = dot / (std::sqrt(nv) * std::sqrt(nc));
    EXPECT_NEAR(coverage_reward(bank, paper, c), expected, 1e-12);
}

TEST(CoverageReward, ScaleInvariantInCourseWeights) {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd v(5), c(5);
        for (int i = 0; i < 5; ++i) {
            v(i) = rng.uniform(0.0, 1.0);
            c(i) = rng.uniform(0.01, 1.0);
        }
        const double alpha = rng.uniform(0.1, 10.0);
        EXPECT_NEAR(coverage_reward(v, c), coverage_reward(v, (alpha * c).eval()), 1e-12);
    }
}

TEST(CombinedReward, WeightedSumCases) {
    RewardWeights thirds;
    EXPECT_DOUBLE_EQ(combined_reward(1.0, 1.0, 1.0, thirds), 1.0);
    RewardWeights w{1.0, 0.0, 0.0};
    EXPECT_DOUBLE_EQ(combined_reward(0.42, 0.9, 0.1, w), 0.42);
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const double r1 = rng.uniform01(), r2 = rng.uniform01(), r3 = rng.uniform01();
        RewardWeights ww{rng.uniform01(), rng.uniform01(), rng.uniform01()};
        EXPECT_DOUBLE_EQ(combined_reward(r1, r2, r3, ww), ww.w1 * r1 + ww.w2 * r2 + ww.w3 * r3);
    }
}

TEST(DifficultyIndicator, HandCases) {
    EXPECT_DOUBLE_EQ(difficulty_indicator({70.0, 70.0}), 1.0);
    EXPECT_DOUBLE_EQ(difficulty_indicator({45.0}), 0.75);
}

TEST(RationalityIndicator, QuantileSampleScoresOne) {
    const auto sample = normal_quantile_sample(0.70, 0.15, 30);
    std::vector<double> percent(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) percent[i] = sample[i] * 100.0;
    EXPECT_NEAR(rationality_indicator(percent), 1.0, 1e-12);
}

TEST(RationalityIndicator, DegenerateSeventyAgainstOracle) {
    const int m = 40;
    const std::vector<double> all70(static_cast<std::size_t>(m), 70.0);
    const auto sample = normal_quantile_sample(0.70, 0.15, m);
    double expected_w = 0.0;
    for (double s : sample) expected_w += std::abs(0.70 - s);
    expected_w /= m;
    EXPECT_NEAR(rationality_indicator(all70), 1.0 - expected_w, 1e-12);
    EXPECT_LE(rationality_indicator(all70), 1.0);
}

TEST(ValidityIndicator, OneHotAgainstUniformFourSkills) {
    QuestionBank bank;
    for (int i = 0; i < 4; ++i) bank.add_skill("s" + std::to_string(i));
    // uniform course weights: one question per skill
    for (int i = 0; i < 4; ++i) bank.add_question({"u" + std::to_string(i), {i}, 1.0});
    // paper covering only skill 0
    bank.add_question({"extra", {0}, 1.0});
    const Eigen::VectorXd c = course_skill_weights(bank);  // not uniform due to extra; build uniform directly
    Eigen::VectorXd uniform = Eigen::VectorXd::Constant(4, 0.25);
    const std::vector<int> paper = {0, 4};  // both cover skill 0 only
    EXPECT_NEAR(validity_indicator(bank, paper, uniform), 0.5, 1e-12);
    (void)c;
}

TEST(Discrimination, DisjointAndIdenticalAndPartialOverlap) {
    std::vector<int> a(100), b(100), c(100);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), 100);
    std::iota(c.begin(), c.end(), 200);
    EXPECT_DOUBLE_EQ(discrimination({a, b, c}), 1.0);

    EXPECT_DOUBLE_EQ(discrimination({a, a}), 0.5);

    std::vector<int> d(100);
    std::iota(d.begin(), d.end(), 90);  // shares 10 questions with a
    EXPECT_DOUBLE_EQ(discrimination({a, d}), 0.95);

    EXPECT_THROW(discrimination({a}), DomainError);
}

TEST(Discrimination, PermutationInvariant) {
    Rng rng(8);
    std::vector<std::vector<int>> papers;
    for (int k = 0; k < 4; ++k) {
        papers.push_back(rng.sample_distinct(60, 20));
    }
    const double base = discrimination(papers);
    std::vector<std::vector<int>> shuffled = {papers[2], papers[0], papers[3], papers[1]};
    EXPECT_DOUBLE_EQ(discrimination(shuffled), base);
}
