#include "bnshap/model.hpp"

#include "bnshap/error.hpp"

namespace bnshap {

const char* toString(DiscreteScore s) {
    return s == DiscreteScore::Accuracy ? "accuracy" : "mutual_information";
}

DiscreteScore discreteScoreFromString(const std::string& s) {
    if (s == "accuracy") return DiscreteScore::Accuracy;
    if (s == "mutual_information") return DiscreteScore::MutualInformation;
    throwInput("unknown discrete score '" + s + "' (expected accuracy or mutual_information)");
}

Model Model::discrete(DiscreteBayesNet net, DiscreteScore score) {
    Model m;
    m.discrete_ = std::make_shared<const DiscreteBayesNet>(std::move(net));
    m.score_ = score;
    m.buildGame();
    return m;
}

Model Model::gaussian(LinearGaussianSem sem) {
    Model m;
    m.sem_ = std::make_shared<const LinearGaussianSem>(std::move(sem));
    m.cov_ = std::make_shared<const CovarianceModel>(impliedCovariance(*m.sem_));
    m.buildGame();
    return m;
}

const Dag& Model::graph() const { return discrete_ ? discrete_->graph() : sem_->graph(); }

const DiscreteBayesNet& Model::discreteNet() const {
    if (!discrete_) throwInput("model is not discrete");
    return *discrete_;
}

const LinearGaussianSem& Model::sem() const {
    if (!sem_) throwInput("model is not linear-Gaussian");
    return *sem_;
}

const CovarianceModel& Model::covariance() const {
    if (!cov_) throwInput("model is not linear-Gaussian");
    return *cov_;
}

std::string Model::scoreName() const { return discrete_ ? toString(score_) : "r_squared"; }

SubsetMask Model::toPlayerMask(SubsetMask variables) const {
    SubsetMask out;
    for (VariableId v : variables.members()) {
        if (v >= playerOfVariable_.size() || playerOfVariable_[v] < 0) {
            throwInput("variable set contains the target or an unknown variable");
        }
        out = out.with(static_cast<VariableId>(playerOfVariable_[v]));
    }
    return out;
}

SubsetMask Model::toVariableMask(SubsetMask players) const {
    SubsetMask out;
    for (VariableId p : players.members()) {
        if (p >= players_.size()) throwInput("unknown player");
        out = out.with(players_[p]);
    }
    return out;
}

double Model::characteristic(SubsetMask variables) const { return game_.value(toPlayerMask(variables)); }

void Model::buildGame() {
    const Dag& g = graph();
    if (g.size() < 2) throwInput("model needs at least one variable besides the target");
    if (g.size() - 1 > kEnumerationCap) {
        throwCapacity("model has " + std::to_string(g.size() - 1) + " predictors; the enumeration cap is " +
                      std::to_string(kEnumerationCap));
    }
    playerOfVariable_.assign(g.size(), -1);
    std::vector<std::string> names;
    for (VariableId v = 0; v < g.size(); ++v) {
        if (v == g.target()) continue;
        playerOfVariable_[v] = static_cast<int>(players_.size());
        players_.push_back(v);
        names.push_back(g.name(v));
    }
    const std::vector<VariableId> players = players_;
    auto toVars = [players](SubsetMask s) {
        SubsetMask out;
        for (VariableId p : s.members()) out = out.with(players[p]);
        return out;
    };
    if (discrete_) {
        auto net = discrete_;
        if (score_ == DiscreteScore::Accuracy) {
            game_ = Game(std::move(names), [net, toVars](SubsetMask s) { return bayesAccuracyM(*net, toVars(s)); });
        } else {
            game_ = Game(std::move(names), [net, toVars](SubsetMask s) { return mutualInformationM(*net, toVars(s)); });
        }
    } else {
        auto cov = cov_;
        const VariableId t = g.target();
        game_ = Game(std::move(names), [cov, t, toVars](SubsetMask s) { return rSquaredM(*cov, t, toVars(s)); });
    }
}

}  // namespace bnshap
