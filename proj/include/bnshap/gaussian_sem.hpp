#pragma once

#include "bnshap/graph.hpp"

#include <Eigen/Dense>

#include <map>
#include <utility>
#include <vector>

namespace bnshap {

/// Condition number of the predictor covariance above which R^2 is refused.
inline constexpr double kConditionLimit = 1e12;

/// Zero-mean linear-Gaussian SEM: each variable is the weighted sum of its
/// parents plus independent Gaussian noise.
class LinearGaussianSem {
public:
    using Edge = std::pair<VariableId, VariableId>;

    LinearGaussianSem(Dag graph, std::map<Edge, double> coefficients, std::vector<double> noiseVariance);

    const Dag& graph() const { return graph_; }
    double coefficient(VariableId from, VariableId to) const;
    const std::map<Edge, double>& coefficients() const { return coefficients_; }
    double noiseVariance(VariableId v) const { return noise_.at(v); }
    const std::vector<double>& noiseVariances() const { return noise_; }

private:
    Dag graph_;
    std::map<Edge, double> coefficients_;
    std::vector<double> noise_;
};

/// Symmetric covariance matrix over every variable (target included).
class CovarianceModel {
public:
    explicit CovarianceModel(Eigen::MatrixXd sigma);

    const Eigen::MatrixXd& sigma() const { return sigma_; }
    double operator()(VariableId a, VariableId b) const { return sigma_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)); }
    std::size_t size() const { return static_cast<std::size_t>(sigma_.rows()); }

private:
    Eigen::MatrixXd sigma_;
};

/// Sigma = (I - B)^-1 D (I - B)^-T, where B[child, parent] holds edge weights.
CovarianceModel impliedCovariance(const LinearGaussianSem& sem);

/// Population R^2 of the best linear predictor of `target` from `s`:
/// sigma_TS Sigma_SS^-1 sigma_ST / sigma_TT. R^2(empty) = 0.
double rSquaredM(const CovarianceModel& cov, VariableId target, SubsetMask s);

}  // namespace bnshap
