#include <Eigen/Cholesky>

#include <cmath>

#include "pacdisp/baselines.hpp"

namespace pacdisp {

LdaModel fit_lda(const FeatureMatrix& train, double shrinkage)
{
    const Eigen::Index n = train.x.rows();
    const Eigen::Index p = train.x.cols();
    if (train.y.size() != n)
        throw ModelError("InvalidInput", "lda: label count differs from row count");

    Eigen::Array<bool, Eigen::Dynamic, 1> pos = train.y.array() > 0.0;
    const Eigen::Index n_pos = pos.count();
    const Eigen::Index n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw ModelError("OneClassOnly", "lda needs both classes in the training data");
    if (shrinkage < 0.0)
        throw ModelError("InvalidParams", "lda: shrinkage must be >= 0");

    LdaModel m;
    m.shrinkage = shrinkage;
    m.encoder = train.encoder;
    m.means = Eigen::MatrixXd::Zero(2, p);
    for (Eigen::Index i = 0; i < n; ++i)
        m.means.row(pos(i) ? 1 : 0) += train.x.row(i);
    m.means.row(0) /= static_cast<double>(n_neg);
    m.means.row(1) /= static_cast<double>(n_pos);

    Eigen::MatrixXd centered(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        centered.row(i) = train.x.row(i) - m.means.row(pos(i) ? 1 : 0);
    m.covariance = (centered.transpose() * centered) / static_cast<double>(n);
    if (p > 0 && shrinkage > 0.0)
        m.covariance.diagonal().array() += shrinkage * m.covariance.trace() / static_cast<double>(p);

    m.log_priors << std::log(static_cast<double>(n_neg) / static_cast<double>(n)),
        std::log(static_cast<double>(n_pos) / static_cast<double>(n));

    Eigen::LLT<Eigen::MatrixXd> llt(m.covariance);
    if (llt.info() != Eigen::Success)
        throw ModelError("SingularCovariance", "lda: pooled covariance is not positive definite");

    const Eigen::VectorXd mu_neg = m.means.row(0).transpose();
    const Eigen::VectorXd mu_pos = m.means.row(1).transpose();
    const Eigen::VectorXd a_neg = llt.solve(mu_neg);
    const Eigen::VectorXd a_pos = llt.solve(mu_pos);
    m.coef = a_pos - a_neg;
    m.intercept = -0.5 * (mu_pos.dot(a_pos) - mu_neg.dot(a_neg)) + m.log_priors(1) - m.log_priors(0);
    return m;
}

} // namespace pacdisp
