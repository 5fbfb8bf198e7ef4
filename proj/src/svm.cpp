#include <numeric>

#include "pacdisp/baselines.hpp"
#include "pacdisp/detail/rng.hpp"

namespace pacdisp {

SvmModel fit_linear_svm(const FeatureMatrix& train, SvmParams params)
{
    const Eigen::Index n = train.x.rows();
    if (params.lambda <= 0.0)
        throw ModelError("InvalidParams", "svm: lambda must be > 0");
    if (params.epochs < 0)
        throw ModelError("InvalidParams", "svm: epochs must be >= 0");
    if (n == 0 || (train.y.array() > 0.0).all() || (train.y.array() < 0.0).all())
        throw ModelError("OneClassOnly", "svm needs both classes in the training data");

    SvmModel m;
    m.params = params;
    m.encoder = train.encoder;
    m.weights = Eigen::VectorXd::Zero(train.x.cols());

    detail::Engine eng(params.seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        detail::shuffle(order, eng);
        for (auto i : order) {
            ++t;
            const double eta = 1.0 / (params.lambda * static_cast<double>(t));
            const double y = train.y(i);
            const double margin = y * (m.weights.dot(train.x.row(i)) + m.bias);
            m.weights *= 1.0 - eta * params.lambda;
            if (margin < 1.0) {
                m.weights.noalias() += (eta * y) * train.x.row(i).transpose();
                m.bias += eta * y;
            }
        }
    }
    return m;
}

double svm_objective(const Eigen::VectorXd& w, double b, const FeatureMatrix& data, double lambda)
{
    const Eigen::ArrayXd margins = data.y.array() * ((data.x * w).array() + b);
    const double hinge = (1.0 - margins).max(0.0).mean();
    return 0.5 * lambda * w.squaredNorm() + hinge;
}

} // namespace pacdisp
