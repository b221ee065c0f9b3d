#include "bnshap/gaussian_sem.hpp"

#include "bnshap/error.hpp"

#include <cmath>

namespace bnshap {

namespace {
constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-9;
}  // namespace

LinearGaussianSem::LinearGaussianSem(Dag graph, std::map<Edge, double> coefficients,
                                     std::vector<double> noiseVariance)
    : graph_(std::move(graph)), coefficients_(std::move(coefficients)), noise_(std::move(noiseVariance)) {
    for (const auto& [edge, weight] : coefficients_) {
        if (edge.first >= graph_.size() || edge.second >= graph_.size() || !graph_.hasEdge(edge.first, edge.second)) {
            throwInput("coefficient given for a pair that is not an edge");
        }
        if (!std::isfinite(weight)) throwInput("edge coefficients must be finite");
    }
    for (const auto& edge : graph_.edges()) {
        if (!coefficients_.contains(edge)) {
            throwInput("missing coefficient for edge " + graph_.name(edge.first) + " -> " + graph_.name(edge.second));
        }
    }
    if (noise_.size() != graph_.size()) throwInput("a noise variance is needed for every variable");
    for (VariableId v = 0; v < noise_.size(); ++v) {
        if (!(noise_[v] > 0.0) || !std::isfinite(noise_[v])) {
            throwInput("noise variance of '" + graph_.name(v) + "' must be strictly positive");
        }
    }
}

double LinearGaussianSem::coefficient(VariableId from, VariableId to) const {
    auto it = coefficients_.find({from, to});
    return it == coefficients_.end() ? 0.0 : it->second;
}

CovarianceModel::CovarianceModel(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
    if (sigma_.rows() != sigma_.cols()) throwInput("covariance matrix must be square");
    if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * std::max(1.0, sigma_.cwiseAbs().maxCoeff())) {
        throwInput("covariance matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kPsdTol) throwInput("covariance matrix is not positive semi-definite");
}

CovarianceModel impliedCovariance(const LinearGaussianSem& sem) {
    const auto n = static_cast<Eigen::Index>(sem.graph().size());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [edge, weight] : sem.coefficients()) {
        b(static_cast<Eigen::Index>(edge.second), static_cast<Eigen::Index>(edge.first)) = weight;
    }
    Eigen::VectorXd d(n);
    for (Eigen::Index v = 0; v < n; ++v) d(v) = sem.noiseVariance(static_cast<VariableId>(v));

    // I - B is unit triangular under a topological permutation, hence invertible.
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - b;
    const Eigen::MatrixXd inv = a.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd sigma = inv * d.asDiagonal() * inv.transpose();
    sigma = 0.5 * (sigma + sigma.transpose());
    return CovarianceModel(std::move(sigma));
}

double rSquaredM(const CovarianceModel& cov, VariableId target, SubsetMask s) {
    if (target >= cov.size()) throwInput("unknown target variable");
    if (s.contains(target)) throwInput("characteristic-function subsets must exclude the target");
    if (!s.isSubsetOf(SubsetMask::full(cov.size()))) throwInput("subset references unknown variables");
    if (s.empty()) return 0.0;

    const auto members = s.members();
    const auto k = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd sss(k, k);
    Eigen::VectorXd sst(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        sst(i) = cov(members[static_cast<std::size_t>(i)], target);
        for (Eigen::Index j = 0; j < k; ++j) {
            sss(i, j) = cov(members[static_cast<std::size_t>(i)], members[static_cast<std::size_t>(j)]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sss, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kConditionLimit) {
        throw Error(ErrorKind::Numerical, "predictor covariance is singular or ill-conditioned");
    }
    const Eigen::VectorXd beta = sss.ldlt().solve(sst);
    return sst.dot(beta) / cov(target, target);
}

}  // namespace bnshap
