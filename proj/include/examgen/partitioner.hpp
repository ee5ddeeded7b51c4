#pragma once

#include <algorithm>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "examgen/corpus.hpp"
#include "examgen/csv.hpp"
#include "examgen/errors.hpp"
#include "examgen/rng.hpp"
#include "examgen/tracer.hpp"

namespace examgen {

// Additive question embedding: sum of the covered skills' embeddings.
inline Eigen::VectorXd question_embedding(const DktModel& model, const Question& q) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(model.d_q);
    for (int s : q.skills) out += skill_embedding(model, s);
    return out;
}

// One column per question, d_q rows.
inline Eigen::MatrixXd question_embedding_matrix(const DktModel& model, const QuestionBank& bank) {
    Eigen::MatrixXd out(model.d_q, bank.question_count());
    for (int j = 0; j < bank.question_count(); ++j) out.col(j) = question_embedding(model, bank.question(j));
    return out;
}

struct Partition {
    std::vector<int> assignment;  // question index -> cluster id in [0, f)
    Eigen::MatrixXd centroids;    // d x f
    int f = 0;

    std::vector<std::vector<int>> clusters() const {
        std::vector<std::vector<int>> out(static_cast<std::size_t>(f));
        for (std::size_t q = 0; q < assignment.size(); ++q) {
            out[static_cast<std::size_t>(assignment[q])].push_back(static_cast<int>(q));
        }
        return out;
    }
};

namespace detail {

inline double sq_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).squaredNorm(); }

// Nearest centroid, ties broken by lowest cluster id.
inline int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::VectorXd& point) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < centroids.cols(); ++k) {
        const double d = (centroids.col(k) - point).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

}  // namespace detail

inline double partition_sse(const Eigen::MatrixXd& points, const Partition& p) {
    double sse = 0.0;
    for (int q = 0; q < points.cols(); ++q) {
        sse += (points.col(q) - p.centroids.col(p.assignment[static_cast<std::size_t>(q)])).squaredNorm();
    }
    return sse;
}

// Lloyd's algorithm with k-means++ seeding. Converges when assignments
// stabilize or after max_iters sweeps. Empty clusters are repaired by
// stealing the farthest point from the largest cluster.
inline Partition kmeans_partition(const Eigen::MatrixXd& points, int f, std::uint64_t seed, int max_iters = 300) {
    const int n = static_cast<int>(points.cols());
    if (f < 2) throw ConfigError("kmeans requires f >= 2");
    if (n < f) throw ConfigError("kmeans requires at least f points, got " + std::to_string(n));

    Rng rng(mix_seed(seed, 0));
    Partition part;
    part.f = f;
    part.centroids.resize(points.rows(), f);

    // k-means++ seeding
    std::vector<double> d2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    int first = rng.uniform_int(n);
    part.centroids.col(0) = points.col(first);
    for (int k = 1; k < f; ++k) {
        double total = 0.0;
        for (int q = 0; q < n; ++q) {
            const double d = (points.col(q) - part.centroids.col(k - 1)).squaredNorm();
            d2[static_cast<std::size_t>(q)] = std::min(d2[static_cast<std::size_t>(q)], d);
            total += d2[static_cast<std::size_t>(q)];
        }
        int pick;
        if (total <= 0.0) {
            pick = rng.uniform_int(n);  // all points coincide with chosen centroids
        } else {
            const double u = rng.uniform01() * total;
            double acc = 0.0;
            pick = n - 1;
            for (int q = 0; q < n; ++q) {
                acc += d2[static_cast<std::size_t>(q)];
                if (u < acc) {
                    pick = q;
                    break;
                }
            }
        }
        part.centroids.col(k) = points.col(pick);
    }

    part.assignment.assign(static_cast<std::size_t>(n), -1);
    double prev_sse = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (int q = 0; q < n; ++q) {
            const int k = detail::nearest_centroid(part.centroids, points.col(q));
            if (k != part.assignment[static_cast<std::size_t>(q)]) {
                part.assignment[static_cast<std::size_t>(q)] = k;
                changed = true;
            }
        }

        // repair empty clusters before the update step
        std::vector<int> sizes(static_cast<std::size_t>(f), 0);
        for (int a : part.assignment) ++sizes[static_cast<std::size_t>(a)];
        for (int k = 0; k < f; ++k) {
            while (sizes[static_cast<std::size_t>(k)] == 0) {
                const int largest = static_cast<int>(
                    std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
                int farthest = -1;
                double far_d = -1.0;
                for (int q = 0; q < n; ++q) {
                    if (part.assignment[static_cast<std::size_t>(q)] != largest) continue;
                    const double d = (points.col(q) - part.centroids.col(largest)).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        farthest = q;
                    }
                }
                part.assignment[static_cast<std::size_t>(farthest)] = k;
                --sizes[static_cast<std::size_t>(largest)];
                ++sizes[static_cast<std::size_t>(k)];
                changed = true;
            }
        }

        for (int k = 0; k < f; ++k) {
            Eigen::VectorXd mean = Eigen::VectorXd::Zero(points.rows());
            int count = 0;
            for (int q = 0; q < n; ++q) {
                if (part.assignment[static_cast<std::size_t>(q)] == k) {
                    mean += points.col(q);
                    ++count;
                }
            }
            part.centroids.col(k) = mean / static_cast<double>(count);
        }

        const double sse = partition_sse(points, part);
        if (sse > prev_sse + 1e-9) {
            throw InternalError("kmeans SSE increased across a Lloyd iteration");
        }
        prev_sse = sse;
        if (!changed) break;
    }
    return part;
}

// ---------------------------------------------------------------------------
// I/O
// ---------------------------------------------------------------------------

inline void save_partition(const Partition& part, const QuestionBank& bank, const std::string& path) {
    nlohmann::json j;
    j["format"] = "examgen-partition";
    j["version"] = 1;
    j["f"] = part.f;
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(bank.question_count()));
    for (const auto& q : bank.questions()) ids.push_back(q.id);
    j["question_ids"] = ids;
    j["assignment"] = part.assignment;
    std::vector<std::vector<double>> cents;
    for (int k = 0; k < part.f; ++k) {
        std::vector<double> c(static_cast<std::size_t>(part.centroids.rows()));
        for (Eigen::Index r = 0; r < part.centroids.rows(); ++r) c[static_cast<std::size_t>(r)] = part.centroids(r, k);
        cents.push_back(std::move(c));
    }
    j["centroids"] = cents;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write partition " + path);
    out << j.dump() << '\n';
    if (!out) throw IoError("failed writing partition " + path);
}

inline Partition load_partition(const std::string& path, const QuestionBank& bank) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open partition " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, 0, std::string("invalid partition JSON: ") + e.what());
    }
    if (j.value("format", "") != "examgen-partition") throw ParseError(path, 0, "not a partition file");
    Partition part;
    part.f = j.at("f").get<int>();
    part.assignment = j.at("assignment").get<std::vector<int>>();
    const auto ids = j.at("question_ids").get<std::vector<std::string>>();
    if (static_cast<int>(ids.size()) != bank.question_count() ||
        ids.size() != part.assignment.size()) {
        throw ReferenceError("partition file does not match the bank's question count");
    }
    for (int q = 0; q < bank.question_count(); ++q) {
        if (ids[static_cast<std::size_t>(q)] != bank.question(q).id) {
            throw ReferenceError("partition file question order does not match the bank");
        }
        const int a = part.assignment[static_cast<std::size_t>(q)];
        if (a < 0 || a >= part.f) throw ParseError(path, 0, "cluster id out of range");
    }
    const auto cents = j.at("centroids").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(cents.size()) != part.f || cents.empty()) throw ParseError(path, 0, "bad centroid count");
    part.centroids.resize(static_cast<Eigen::Index>(cents.front().size()), part.f);
    for (int k = 0; k < part.f; ++k) {
        if (cents[static_cast<std::size_t>(k)].size() != static_cast<std::size_t>(part.centroids.rows())) {
            throw ParseError(path, 0, "centroid dimension mismatch");
        }
        for (Eigen::Index r = 0; r < part.centroids.rows(); ++r) {
            part.centroids(r, k) = cents[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)];
        }
    }
    return part;
}

// CSV export of skill and question embeddings for external projection.
// Columns: id, kind, cluster_id (blank for skills), v_0..v_{d_q-1}.
inline void export_embeddings(const DktModel& model, const QuestionBank& bank, const std::string& path,
                              const Partition* partition = nullptr) {
    std::vector<std::string> header = {"id", "kind", "cluster_id"};
    for (int d = 0; d < model.d_q; ++d) header.push_back("v_" + std::to_string(d));
    csv::Writer w(path, header);
    for (const auto& s : bank.skills()) {
        std::vector<std::string> row = {s.id, "skill", ""};
        const Eigen::VectorXd emb = skill_embedding(model, s.index);
        for (int d = 0; d < model.d_q; ++d) row.push_back(csv::format_double(emb(d)));
        w.write_row(row);
    }
    for (int j = 0; j < bank.question_count(); ++j) {
        const auto& q = bank.question(j);
        std::string cluster;
        if (partition) cluster = std::to_string(partition->assignment[static_cast<std::size_t>(j)]);
        std::vector<std::string> row = {q.id, "question", cluster};
        const Eigen::VectorXd emb = question_embedding(model, q);
        for (int d = 0; d < model.d_q; ++d) row.push_back(csv::format_double(emb(d)));
        w.write_row(row);
    }
    w.close();
}

}  // namespace examgen
