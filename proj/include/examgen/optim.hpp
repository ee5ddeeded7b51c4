#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

namespace examgen {

// Adam over any parameter set exposing tensors() -> vector of
// (name, Eigen::MatrixXd*) in a stable order.
template <typename Params>
struct Adam {
    std::vector<Eigen::MatrixXd> m, v;
    long t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    void init(Params& params) {
        m.clear();
        v.clear();
        t = 0;
        for (auto& [name, tensor] : params.tensors()) {
            m.push_back(Eigen::MatrixXd::Zero(tensor->rows(), tensor->cols()));
            v.push_back(Eigen::MatrixXd::Zero(tensor->rows(), tensor->cols()));
        }
    }

    void step(Params& params, Params& grads, double lr) {
        ++t;
        auto ps = params.tensors();
        auto gs = grads.tensors();
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t k = 0; k < ps.size(); ++k) {
            const Eigen::MatrixXd& g = *gs[k].second;
            m[k] = beta1 * m[k] + (1.0 - beta1) * g;
            v[k] = beta2 * v[k] + (1.0 - beta2) * g.cwiseProduct(g);
            const Eigen::ArrayXXd mhat = m[k].array() / bc1;
            const Eigen::ArrayXXd vhat = v[k].array() / bc2;
            ps[k].second->array() -= lr * mhat / (vhat.sqrt() + eps);
        }
    }
};

// Scales gradients in place so the global norm does not exceed max_norm.
template <typename Params>
void clip_gradient_norm(Params& grads, double max_norm) {
    double sq = 0.0;
    for (auto& [name, tensor] : grads.tensors()) sq += tensor->squaredNorm();
    const double norm = std::sqrt(sq);
    if (norm > max_norm && norm > 0.0) {
        const double scale = max_norm / norm;
        for (auto& [name, tensor] : grads.tensors()) *tensor *= scale;
    }
}

}  // namespace examgen
