#pragma once

#include "bnshap/graph.hpp"

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace bnshap {

/// Default cap on the number of entries of an enumerated joint distribution.
inline constexpr std::size_t kJointStateCap = std::size_t{1} << 20;

/// Conditional probability table. Rows are indexed by the parent-state tuple
/// in mixed radix with the LAST parent varying fastest; each row holds one
/// probability per state of `variable`.
struct Cpt {
    VariableId variable = 0;
    std::vector<VariableId> parentOrder;
    std::vector<std::vector<double>> rows;
};

/// Dense joint distribution. Assignment index is mixed radix with variable 0
/// varying fastest.
class JointDistribution {
public:
    JointDistribution(std::vector<std::size_t> cardinalities, std::vector<double> probabilities);

    std::size_t numVariables() const { return cards_.size(); }
    std::size_t numAssignments() const { return prob_.size(); }
    double probability(std::size_t index) const { return prob_[index]; }
    double probability(std::span<const std::size_t> assignment) const;
    std::vector<std::size_t> assignment(std::size_t index) const;
    std::size_t stateOf(std::size_t index, VariableId v) const { return (index / strides_[v]) % cards_[v]; }
    const std::vector<double>& probabilities() const { return prob_; }
    const std::vector<std::size_t>& cardinalities() const { return cards_; }

    /// Marginal over `vars`, dense over their states with the lowest-index
    /// member varying fastest.
    std::vector<double> marginal(SubsetMask vars) const;

private:
    std::vector<std::size_t> cards_;
    std::vector<std::size_t> strides_;
    std::vector<double> prob_;
};

/// CPT-parameterized Bayesian network. Immutable after construction; the
/// joint table is enumerated once on first use.
class DiscreteBayesNet {
public:
    DiscreteBayesNet(Dag graph, std::vector<std::vector<std::string>> stateLabels, std::vector<Cpt> cpts,
                     std::size_t jointCap = kJointStateCap);

    const Dag& graph() const { return graph_; }
    std::size_t cardinality(VariableId v) const { return labels_.at(v).size(); }
    const std::vector<std::string>& stateLabels(VariableId v) const { return labels_.at(v); }
    const Cpt& cpt(VariableId v) const { return cpts_.at(v); }
    std::size_t stateIndex(VariableId v, const std::string& label) const;

    /// Throws Capacity when the state space exceeds the cap given at construction.
    const JointDistribution& joint() const;

private:
    Dag graph_;
    std::vector<std::vector<std::string>> labels_;
    std::vector<Cpt> cpts_;  // indexed by variable
    std::size_t jointCap_;
    struct JointCache {
        std::once_flag once;
        std::shared_ptr<const JointDistribution> joint;
    };
    std::shared_ptr<JointCache> jointCache_ = std::make_shared<JointCache>();
};

const JointDistribution& jointEnumerate(const DiscreteBayesNet& net);

/// p(target | given = givenValues). `givenValues` lists one state index per
/// member of `given`, in increasing variable order.
std::vector<double> conditional(const DiscreteBayesNet& net, VariableId target, SubsetMask given,
                                std::span<const std::size_t> givenValues);

/// Expected accuracy of the Bayes-optimal classifier of the target from s:
/// sum_s P(S=s) max_t P(T=t | S=s). Unshifted, so m(empty) = max_t P(T=t).
double bayesAccuracyM(const DiscreteBayesNet& net, SubsetMask s);

/// Mutual information I(T; S) in nats, i.e. the expected log-score gain of
/// the Bayes predictor over the marginal. Strictly increases whenever the
/// added variable is conditionally dependent on the target.
double mutualInformationM(const DiscreteBayesNet& net, SubsetMask s);

/// True iff max |p(t | x, z) - p(t | z)| <= tol over all positive-probability
/// assignments of (x, z).
bool conditionalIndependent(const DiscreteBayesNet& net, VariableId x, VariableId t, SubsetMask z, double tol);

enum class FaithfulnessScope {
    TargetPairs,  // pairs (X, T) only
    AllPairs,
};

struct FaithfulnessViolation {
    VariableId x = 0;
    VariableId y = 0;
    SubsetMask z;
    /// true: independent in p although d-connected in the graph;
    /// false: dependent in p although d-separated.
    bool independentButConnected = false;
};

/// Cap on the non-target variable count for exhaustive faithfulness checks.
inline constexpr std::size_t kFaithfulnessCap = 7;

std::vector<FaithfulnessViolation> verifyFaithfulness(const DiscreteBayesNet& net, double tol,
                                                      FaithfulnessScope scope = FaithfulnessScope::TargetPairs);

}  // namespace bnshap
