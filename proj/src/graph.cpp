#include "bnshap/graph.hpp"

#include "bnshap/error.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <set>
#include <unordered_set>

namespace bnshap {

std::vector<VariableId> SubsetMask::members() const {
    std::vector<VariableId> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) {
        out.push_back(static_cast<VariableId>(std::countr_zero(b)));
    }
    return out;
}

const char* toString(RelevanceClass c) {
    switch (c) {
        case RelevanceClass::StronglyRelevant: return "strong";
        case RelevanceClass::WeaklyRelevant: return "weak";
        case RelevanceClass::Irrelevant: return "irrelevant";
    }
    return "?";
}

Dag::Dag(std::vector<std::string> names, const std::vector<std::pair<VariableId, VariableId>>& edges,
         VariableId target)
    : names_(std::move(names)), target_(target) {
    const std::size_t n = names_.size();
    if (n == 0) throwInput("graph has no variables");
    if (n > kMaxVariables) {
        throwCapacity("graph has " + std::to_string(n) + " variables; at most " +
                      std::to_string(kMaxVariables) + " are supported");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : names_) {
        if (name.empty()) throwInput("variable names must be non-empty");
        if (!seen.insert(name).second) throwInput("duplicate variable name '" + name + "'");
    }
    if (target_ >= n) throwInput("target index out of range");

    parents_.assign(n, SubsetMask{});
    children_.assign(n, SubsetMask{});
    std::set<std::pair<VariableId, VariableId>> unique;
    for (const auto& [from, to] : edges) {
        if (from >= n || to >= n) throwInput("edge references unknown variable index");
        if (from == to) throwInput("self-loop on '" + names_[from] + "'");
        if (!unique.insert({from, to}).second) {
            throwInput("duplicate edge " + names_[from] + " -> " + names_[to]);
        }
        parents_[to] = parents_[to].with(from);
        children_[from] = children_[from].with(to);
    }
    edges_.assign(unique.begin(), unique.end());

    // Kahn's algorithm; smallest index first keeps the order deterministic.
    std::vector<int> indegree(n);
    for (std::size_t v = 0; v < n; ++v) indegree[v] = parents_[v].size();
    std::set<VariableId> ready;
    for (std::size_t v = 0; v < n; ++v) {
        if (indegree[v] == 0) ready.insert(v);
    }
    while (!ready.empty()) {
        const VariableId v = *ready.begin();
        ready.erase(ready.begin());
        topo_.push_back(v);
        for (VariableId c : children_[v].members()) {
            if (--indegree[c] == 0) ready.insert(c);
        }
    }
    if (topo_.size() != n) throwInput("graph contains a directed cycle");
}

Dag Dag::fromNames(std::vector<std::string> names,
                   const std::vector<std::pair<std::string, std::string>>& edges,
                   const std::string& target) {
    auto lookup = [&](const std::string& name) -> VariableId {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throwInput("unknown variable '" + name + "'");
        return static_cast<VariableId>(it - names.begin());
    };
    std::vector<std::pair<VariableId, VariableId>> ids;
    ids.reserve(edges.size());
    for (const auto& [from, to] : edges) ids.emplace_back(lookup(from), lookup(to));
    const VariableId t = lookup(target);
    return Dag(std::move(names), ids, t);
}

const std::string& Dag::name(VariableId v) const {
    checkId(v);
    return names_[v];
}

VariableId Dag::idOf(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throwInput("unknown variable '" + name + "'");
    return static_cast<VariableId>(it - names_.begin());
}

void Dag::checkId(VariableId v) const {
    if (v >= names_.size()) throwInput("unknown variable id " + std::to_string(v));
}

SubsetMask Dag::parents(VariableId v) const {
    checkId(v);
    return parents_[v];
}

SubsetMask Dag::children(VariableId v) const {
    checkId(v);
    return children_[v];
}

bool Dag::hasEdge(VariableId from, VariableId to) const {
    checkId(from);
    checkId(to);
    return children_[from].contains(to);
}

SubsetMask Dag::descendants(VariableId v) const {
    checkId(v);
    SubsetMask out;
    std::vector<VariableId> stack{v};
    while (!stack.empty()) {
        const VariableId u = stack.back();
        stack.pop_back();
        for (VariableId c : children_[u].members()) {
            if (!out.contains(c)) {
                out = out.with(c);
                stack.push_back(c);
            }
        }
    }
    return out;
}

bool dSeparated(const Dag& g, VariableId x, VariableId y, SubsetMask z) {
    g.checkId(x);
    g.checkId(y);
    if (x == y) throwInput("d-separation query needs two distinct variables");
    if (!z.isSubsetOf(SubsetMask::full(g.size()))) throwInput("conditioning set references unknown variables");
    if (z.contains(x) || z.contains(y)) throwInput("query variables must not be in the conditioning set");

    // Ancestors of z (z included): a collider is open iff it is in this set.
    SubsetMask ancestorsOfZ = z;
    std::vector<VariableId> stack = z.members();
    while (!stack.empty()) {
        const VariableId u = stack.back();
        stack.pop_back();
        for (VariableId p : g.parents(u).members()) {
            if (!ancestorsOfZ.contains(p)) {
                ancestorsOfZ = ancestorsOfZ.with(p);
                stack.push_back(p);
            }
        }
    }

    // Reachability over (node, direction). "Up" means the trail arrived from a
    // child, "down" means it arrived from a parent.
    enum Dir : int { Up = 0, Down = 1 };
    std::vector<std::array<bool, 2>> visited(g.size(), {false, false});
    std::deque<std::pair<VariableId, Dir>> queue{{x, Up}};
    while (!queue.empty()) {
        const auto [v, dir] = queue.front();
        queue.pop_front();
        if (visited[v][dir]) continue;
        visited[v][dir] = true;
        if (v == y) return false;

        const bool observed = z.contains(v);
        if (dir == Up && !observed) {
            for (VariableId p : g.parents(v).members()) queue.emplace_back(p, Up);
            for (VariableId c : g.children(v).members()) queue.emplace_back(c, Down);
        } else if (dir == Down) {
            if (!observed) {
                for (VariableId c : g.children(v).members()) queue.emplace_back(c, Down);
            }
            if (ancestorsOfZ.contains(v)) {
                for (VariableId p : g.parents(v).members()) queue.emplace_back(p, Up);
            }
        }
    }
    return true;
}

SubsetMask parentsChildren(const Dag& g, VariableId x) { return g.parents(x) | g.children(x); }

SubsetMask markovBoundary(const Dag& g) {
    const VariableId t = g.target();
    SubsetMask mb = parentsChildren(g, t);
    for (VariableId c : g.children(t).members()) mb = mb | g.parents(c);
    return mb.without(t);
}

SubsetMask connectedComponent(const Dag& g, VariableId v) {
    g.checkId(v);
    SubsetMask seen = SubsetMask::single(v);
    std::vector<VariableId> stack{v};
    while (!stack.empty()) {
        const VariableId u = stack.back();
        stack.pop_back();
        for (VariableId w : parentsChildren(g, u).members()) {
            if (!seen.contains(w)) {
                seen = seen.with(w);
                stack.push_back(w);
            }
        }
    }
    return seen;
}

bool undirectedPathExists(const Dag& g, VariableId x, VariableId y) {
    g.checkId(y);
    if (x == y) throwInput("path query needs two distinct variables");
    return connectedComponent(g, x).contains(y);
}

std::vector<RelevanceClass> classifyRelevance(const Dag& g) {
    const SubsetMask mb = markovBoundary(g);
    const SubsetMask component = connectedComponent(g, g.target());
    std::vector<RelevanceClass> out(g.size(), RelevanceClass::Irrelevant);
    for (VariableId v = 0; v < g.size(); ++v) {
        if (v == g.target()) continue;
        if (mb.contains(v)) {
            out[v] = RelevanceClass::StronglyRelevant;
        } else if (component.contains(v)) {
            out[v] = RelevanceClass::WeaklyRelevant;
        }
    }
    return out;
}

}  // namespace bnshap
