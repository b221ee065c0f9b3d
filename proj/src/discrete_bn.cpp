#include "bnshap/discrete_bn.hpp"

#include "bnshap/error.hpp"

#include <algorithm>
#include <cmath>

namespace bnshap {

namespace {

constexpr double kRowSumTol = 1e-12;

// Dense marginal over `vars` with lowest-index member fastest.
std::vector<std::size_t> marginalCards(const std::vector<std::size_t>& cards, SubsetMask vars) {
    std::vector<std::size_t> out;
    for (VariableId v : vars.members()) out.push_back(cards[v]);
    return out;
}

std::size_t product(const std::vector<std::size_t>& xs) {
    std::size_t p = 1;
    for (std::size_t x : xs) p *= x;
    return p;
}

}  // namespace

JointDistribution::JointDistribution(std::vector<std::size_t> cardinalities, std::vector<double> probabilities)
    : cards_(std::move(cardinalities)), prob_(std::move(probabilities)) {
    strides_.resize(cards_.size());
    std::size_t stride = 1;
    for (std::size_t v = 0; v < cards_.size(); ++v) {
        strides_[v] = stride;
        stride *= cards_[v];
    }
    if (stride != prob_.size()) throwInput("joint table size does not match cardinalities");
}

double JointDistribution::probability(std::span<const std::size_t> assignment) const {
    if (assignment.size() != cards_.size()) throwInput("assignment has wrong length");
    std::size_t index = 0;
    for (std::size_t v = 0; v < cards_.size(); ++v) {
        if (assignment[v] >= cards_[v]) throwInput("assignment state out of range");
        index += assignment[v] * strides_[v];
    }
    return prob_[index];
}

std::vector<std::size_t> JointDistribution::assignment(std::size_t index) const {
    std::vector<std::size_t> out(cards_.size());
    for (std::size_t v = 0; v < cards_.size(); ++v) out[v] = stateOf(index, v);
    return out;
}

std::vector<double> JointDistribution::marginal(SubsetMask vars) const {
    const auto members = vars.members();
    for (VariableId v : members) {
        if (v >= cards_.size()) throwInput("marginal over unknown variable");
    }
    std::vector<double> out(product(marginalCards(cards_, vars)), 0.0);
    for (std::size_t idx = 0; idx < prob_.size(); ++idx) {
        const double p = prob_[idx];
        if (p == 0.0) continue;
        std::size_t m = 0;
        std::size_t stride = 1;
        for (VariableId v : members) {
            m += stateOf(idx, v) * stride;
            stride *= cards_[v];
        }
        out[m] += p;
    }
    return out;
}

DiscreteBayesNet::DiscreteBayesNet(Dag graph, std::vector<std::vector<std::string>> stateLabels,
                                   std::vector<Cpt> cpts, std::size_t jointCap)
    : graph_(std::move(graph)), labels_(std::move(stateLabels)), jointCap_(jointCap) {
    const std::size_t n = graph_.size();
    if (labels_.size() != n) throwInput("state labels must be given for every variable");
    for (VariableId v = 0; v < n; ++v) {
        if (labels_[v].size() < 2) throwInput("variable '" + graph_.name(v) + "' needs at least two states");
        std::vector<std::string> sorted = labels_[v];
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throwInput("variable '" + graph_.name(v) + "' has duplicate state labels");
        }
    }

    cpts_.resize(n);
    std::vector<bool> have(n, false);
    for (auto& cpt : cpts) {
        if (cpt.variable >= n) throwInput("CPT for unknown variable");
        const std::string& name = graph_.name(cpt.variable);
        if (have[cpt.variable]) throwInput("duplicate CPT for '" + name + "'");
        have[cpt.variable] = true;

        SubsetMask declared;
        for (VariableId p : cpt.parentOrder) {
            if (p >= n || declared.contains(p)) throwInput("CPT for '" + name + "' has an invalid parent list");
            declared = declared.with(p);
        }
        if (declared != graph_.parents(cpt.variable)) {
            throwInput("CPT parents for '" + name + "' do not match the graph");
        }
        std::size_t expectedRows = 1;
        for (VariableId p : cpt.parentOrder) expectedRows *= labels_[p].size();
        if (cpt.rows.size() != expectedRows) {
            throwInput("CPT for '" + name + "' has " + std::to_string(cpt.rows.size()) + " rows, expected " +
                       std::to_string(expectedRows));
        }
        for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
            const auto& row = cpt.rows[r];
            if (row.size() != labels_[cpt.variable].size()) {
                throwInput("CPT row " + std::to_string(r) + " for '" + name + "' has the wrong number of entries");
            }
            double sum = 0.0;
            for (double p : row) {
                if (!(p >= 0.0) || !std::isfinite(p)) {
                    throwInput("CPT row " + std::to_string(r) + " for '" + name + "' has a negative entry");
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTol) {
                throwInput("CPT row " + std::to_string(r) + " for '" + name + "' does not sum to 1");
            }
        }
        cpts_[cpt.variable] = std::move(cpt);
    }
    for (VariableId v = 0; v < n; ++v) {
        if (!have[v]) throwInput("missing CPT for '" + graph_.name(v) + "'");
    }
}

std::size_t DiscreteBayesNet::stateIndex(VariableId v, const std::string& label) const {
    const auto& states = labels_.at(v);
    auto it = std::find(states.begin(), states.end(), label);
    if (it == states.end()) throwInput("unknown state '" + label + "' for variable '" + graph_.name(v) + "'");
    return static_cast<std::size_t>(it - states.begin());
}

const JointDistribution& DiscreteBayesNet::joint() const {
    std::call_once(jointCache_->once, [this] {
        const std::size_t n = graph_.size();
        std::vector<std::size_t> cards(n);
        std::size_t total = 1;
        for (VariableId v = 0; v < n; ++v) {
            cards[v] = labels_[v].size();
            if (total > jointCap_ / cards[v]) return;  // cache stays empty
            total *= cards[v];
        }
        std::vector<double> prob(total, 1.0);
        std::vector<std::size_t> strides(n);
        std::size_t stride = 1;
        for (VariableId v = 0; v < n; ++v) {
            strides[v] = stride;
            stride *= cards[v];
        }
        for (std::size_t idx = 0; idx < total; ++idx) {
            double p = 1.0;
            for (VariableId v = 0; v < n && p != 0.0; ++v) {
                const Cpt& cpt = cpts_[v];
                std::size_t row = 0;
                for (VariableId parent : cpt.parentOrder) {
                    row = row * cards[parent] + (idx / strides[parent]) % cards[parent];
                }
                p *= cpt.rows[row][(idx / strides[v]) % cards[v]];
            }
            prob[idx] = p;
        }
        jointCache_->joint = std::make_shared<const JointDistribution>(std::move(cards), std::move(prob));
    });
    if (!jointCache_->joint) {
        throwCapacity("joint state space exceeds the cap of " + std::to_string(jointCap_) + " entries");
    }
    return *jointCache_->joint;
}

const JointDistribution& jointEnumerate(const DiscreteBayesNet& net) { return net.joint(); }

std::vector<double> conditional(const DiscreteBayesNet& net, VariableId target, SubsetMask given,
                                std::span<const std::size_t> givenValues) {
    const Dag& g = net.graph();
    g.checkId(target);
    if (given.contains(target)) throwInput("target must not be in the conditioning set");
    if (!given.isSubsetOf(SubsetMask::full(g.size()))) throwInput("conditioning set references unknown variables");
    const auto members = given.members();
    if (givenValues.size() != members.size()) throwInput("one value is needed per conditioning variable");

    const JointDistribution& joint = net.joint();
    const std::size_t tCard = net.cardinality(target);
    std::vector<double> out(tCard, 0.0);
    for (std::size_t idx = 0; idx < joint.numAssignments(); ++idx) {
        const double p = joint.probability(idx);
        if (p == 0.0) continue;
        bool match = true;
        for (std::size_t k = 0; k < members.size() && match; ++k) {
            match = joint.stateOf(idx, members[k]) == givenValues[k];
        }
        if (match) out[joint.stateOf(idx, target)] += p;
    }
    double total = 0.0;
    for (double p : out) total += p;
    if (total <= 0.0) throw Error(ErrorKind::Domain, "conditioning event has probability zero");
    for (double& p : out) p /= total;
    return out;
}

namespace {

// Joint of (S, T) laid out as [s-index * tCard + t].
struct StratifiedTarget {
    std::vector<double> table;
    std::size_t tCard = 0;
    std::size_t sCount = 0;
};

StratifiedTarget stratify(const DiscreteBayesNet& net, SubsetMask s) {
    const Dag& g = net.graph();
    const VariableId t = g.target();
    if (s.contains(t)) throwInput("characteristic-function subsets must exclude the target");
    if (!s.isSubsetOf(SubsetMask::full(g.size()))) throwInput("subset references unknown variables");
    const JointDistribution& joint = net.joint();
    const auto members = s.members();
    StratifiedTarget out;
    out.tCard = net.cardinality(t);
    out.sCount = 1;
    for (VariableId v : members) out.sCount *= net.cardinality(v);
    out.table.assign(out.sCount * out.tCard, 0.0);
    for (std::size_t idx = 0; idx < joint.numAssignments(); ++idx) {
        const double p = joint.probability(idx);
        if (p == 0.0) continue;
        std::size_t sIndex = 0;
        std::size_t stride = 1;
        for (VariableId v : members) {
            sIndex += joint.stateOf(idx, v) * stride;
            stride *= net.cardinality(v);
        }
        out.table[sIndex * out.tCard + joint.stateOf(idx, t)] += p;
    }
    return out;
}

}  // namespace

double bayesAccuracyM(const DiscreteBayesNet& net, SubsetMask s) {
    const StratifiedTarget st = stratify(net, s);
    // sum_s P(s) max_t P(t|s) = sum_s max_t P(s,t); empty strata contribute 0.
    double m = 0.0;
    for (std::size_t si = 0; si < st.sCount; ++si) {
        const auto first = st.table.begin() + static_cast<std::ptrdiff_t>(si * st.tCard);
        m += *std::max_element(first, first + static_cast<std::ptrdiff_t>(st.tCard));
    }
    return m;
}

double mutualInformationM(const DiscreteBayesNet& net, SubsetMask s) {
    const StratifiedTarget st = stratify(net, s);
    std::vector<double> pt(st.tCard, 0.0);
    for (std::size_t si = 0; si < st.sCount; ++si) {
        for (std::size_t t = 0; t < st.tCard; ++t) pt[t] += st.table[si * st.tCard + t];
    }
    double mi = 0.0;
    for (std::size_t si = 0; si < st.sCount; ++si) {
        double ps = 0.0;
        for (std::size_t t = 0; t < st.tCard; ++t) ps += st.table[si * st.tCard + t];
        if (ps == 0.0) continue;
        for (std::size_t t = 0; t < st.tCard; ++t) {
            const double pst = st.table[si * st.tCard + t];
            if (pst > 0.0) mi += pst * std::log(pst / (ps * pt[t]));
        }
    }
    return mi;
}

bool conditionalIndependent(const DiscreteBayesNet& net, VariableId x, VariableId t, SubsetMask z, double tol) {
    const Dag& g = net.graph();
    g.checkId(x);
    g.checkId(t);
    if (x == t) throwInput("independence query needs two distinct variables");
    if (z.contains(x) || z.contains(t)) throwInput("query variables must not be in the conditioning set");
    if (!z.isSubsetOf(SubsetMask::full(g.size()))) throwInput("conditioning set references unknown variables");

    const JointDistribution& joint = net.joint();
    const std::size_t xCard = net.cardinality(x);
    const std::size_t tCard = net.cardinality(t);
    const auto members = z.members();
    std::size_t zCount = 1;
    for (VariableId v : members) zCount *= net.cardinality(v);

    // table[(z * xCard + x) * tCard + t] = P(z, x, t)
    std::vector<double> table(zCount * xCard * tCard, 0.0);
    for (std::size_t idx = 0; idx < joint.numAssignments(); ++idx) {
        const double p = joint.probability(idx);
        if (p == 0.0) continue;
        std::size_t zi = 0;
        std::size_t stride = 1;
        for (VariableId v : members) {
            zi += joint.stateOf(idx, v) * stride;
            stride *= net.cardinality(v);
        }
        table[(zi * xCard + joint.stateOf(idx, x)) * tCard + joint.stateOf(idx, t)] += p;
    }

    std::vector<double> ptz(tCard);
    for (std::size_t zi = 0; zi < zCount; ++zi) {
        std::fill(ptz.begin(), ptz.end(), 0.0);
        double pz = 0.0;
        for (std::size_t xi = 0; xi < xCard; ++xi) {
            for (std::size_t ti = 0; ti < tCard; ++ti) {
                const double p = table[(zi * xCard + xi) * tCard + ti];
                ptz[ti] += p;
                pz += p;
            }
        }
        if (pz == 0.0) continue;
        for (std::size_t xi = 0; xi < xCard; ++xi) {
            double pxz = 0.0;
            for (std::size_t ti = 0; ti < tCard; ++ti) pxz += table[(zi * xCard + xi) * tCard + ti];
            if (pxz == 0.0) continue;
            for (std::size_t ti = 0; ti < tCard; ++ti) {
                const double lhs = table[(zi * xCard + xi) * tCard + ti] / pxz;
                if (std::abs(lhs - ptz[ti] / pz) > tol) return false;
            }
        }
    }
    return true;
}

std::vector<FaithfulnessViolation> verifyFaithfulness(const DiscreteBayesNet& net, double tol,
                                                      FaithfulnessScope scope) {
    const Dag& g = net.graph();
    const std::size_t n = g.size();
    if (n - 1 > kFaithfulnessCap) {
        throwCapacity("exhaustive faithfulness check supports at most " + std::to_string(kFaithfulnessCap) +
                      " non-target variables");
    }
    std::vector<FaithfulnessViolation> out;
    auto checkPair = [&](VariableId x, VariableId y) {
        const SubsetMask rest = SubsetMask::full(n).without(x).without(y);
        // Enumerate every subset of `rest` in increasing mask order.
        std::uint32_t sub = 0;
        while (true) {
            const SubsetMask z(sub);
            const bool separated = dSeparated(g, x, y, z);
            const bool independent = conditionalIndependent(net, x, y, z, tol);
            if (separated != independent) out.push_back({x, y, z, independent});
            if (sub == rest.bits()) break;
            sub = (sub - rest.bits()) & rest.bits();
        }
    };
    if (scope == FaithfulnessScope::TargetPairs) {
        for (VariableId x = 0; x < n; ++x) {
            if (x != g.target()) checkPair(x, g.target());
        }
    } else {
        for (VariableId x = 0; x < n; ++x) {
            for (VariableId y = x + 1; y < n; ++y) checkPair(x, y);
        }
    }
    return out;
}

}  // namespace bnshap
