#pragma once

#include "bnshap/discrete_bn.hpp"
#include "bnshap/gaussian_sem.hpp"
#include "bnshap/shapley.hpp"

#include <memory>
#include <string>
#include <vector>

namespace bnshap {

/// Characteristic function used for discrete networks.
enum class DiscreteScore {
    Accuracy,           // Bayes-optimal expected accuracy (unshifted)
    MutualInformation,  // I(T; S) in nats
};

const char* toString(DiscreteScore s);
DiscreteScore discreteScoreFromString(const std::string& s);

/// A network together with the predictive game it induces. Players are the
/// non-target variables in increasing index order.
class Model {
public:
    static Model discrete(DiscreteBayesNet net, DiscreteScore score = DiscreteScore::Accuracy);
    static Model gaussian(LinearGaussianSem sem);

    bool isDiscrete() const { return discrete_ != nullptr; }
    const Dag& graph() const;
    const DiscreteBayesNet& discreteNet() const;
    const LinearGaussianSem& sem() const;
    const CovarianceModel& covariance() const;
    DiscreteScore score() const { return score_; }
    /// "accuracy", "mutual_information" or "r_squared".
    std::string scoreName() const;

    const Game& game() const { return game_; }
    const std::vector<VariableId>& playerVariables() const { return players_; }
    SubsetMask toPlayerMask(SubsetMask variables) const;
    SubsetMask toVariableMask(SubsetMask players) const;
    /// m over a set of graph variables (target excluded).
    double characteristic(SubsetMask variables) const;

    std::string description;

private:
    Model() = default;
    void buildGame();

    std::shared_ptr<const DiscreteBayesNet> discrete_;
    std::shared_ptr<const LinearGaussianSem> sem_;
    std::shared_ptr<const CovarianceModel> cov_;
    DiscreteScore score_ = DiscreteScore::Accuracy;
    std::vector<VariableId> players_;
    std::vector<int> playerOfVariable_;
    Game game_{{"_"}, [](SubsetMask) { return 0.0; }};
};

}  // namespace bnshap
