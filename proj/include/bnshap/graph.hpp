#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bnshap {

/// Hard cap on variables for anything that enumerates subsets (2^n work).
inline constexpr std::size_t kEnumerationCap = 25;
/// Width of SubsetMask; graphs larger than this are rejected outright.
inline constexpr std::size_t kMaxVariables = 32;

using VariableId = std::size_t;

/// Fixed-width set of variable indices; bit i set means variable i is a member.
class SubsetMask {
public:
    constexpr SubsetMask() = default;
    constexpr explicit SubsetMask(std::uint32_t bits) : bits_(bits) {}

    static constexpr SubsetMask single(VariableId i) { return SubsetMask(std::uint32_t{1} << i); }
    static constexpr SubsetMask full(std::size_t n) {
        return SubsetMask(n >= 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << n) - 1));
    }

    constexpr std::uint32_t bits() const { return bits_; }
    constexpr bool contains(VariableId i) const { return (bits_ >> i) & 1U; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr int size() const { return std::popcount(bits_); }

    constexpr SubsetMask with(VariableId i) const { return SubsetMask(bits_ | (std::uint32_t{1} << i)); }
    constexpr SubsetMask without(VariableId i) const { return SubsetMask(bits_ & ~(std::uint32_t{1} << i)); }
    constexpr bool isSubsetOf(SubsetMask other) const { return (bits_ & ~other.bits_) == 0; }

    constexpr SubsetMask operator|(SubsetMask o) const { return SubsetMask(bits_ | o.bits_); }
    constexpr SubsetMask operator&(SubsetMask o) const { return SubsetMask(bits_ & o.bits_); }
    constexpr SubsetMask operator-(SubsetMask o) const { return SubsetMask(bits_ & ~o.bits_); }
    constexpr bool operator==(const SubsetMask&) const = default;
    constexpr auto operator<=>(const SubsetMask&) const = default;

    /// Member indices in increasing order.
    std::vector<VariableId> members() const;

private:
    std::uint32_t bits_ = 0;
};

enum class RelevanceClass { StronglyRelevant, WeaklyRelevant, Irrelevant };

const char* toString(RelevanceClass c);

/// Directed acyclic graph over named variables with a designated target.
///
/// Construction validates every structural invariant: unique non-empty names,
/// no self-loops, no duplicate edges, acyclicity and a target that exists.
/// After construction the graph is immutable.
class Dag {
public:
    Dag(std::vector<std::string> names, const std::vector<std::pair<VariableId, VariableId>>& edges,
        VariableId target);

    /// Convenience form taking variable names for edges and the target.
    static Dag fromNames(std::vector<std::string> names,
                         const std::vector<std::pair<std::string, std::string>>& edges,
                         const std::string& target);

    std::size_t size() const { return names_.size(); }
    VariableId target() const { return target_; }
    const std::string& name(VariableId v) const;
    const std::vector<std::string>& names() const { return names_; }
    VariableId idOf(const std::string& name) const;  // throws Input on unknown names

    SubsetMask parents(VariableId v) const;
    SubsetMask children(VariableId v) const;
    bool hasEdge(VariableId from, VariableId to) const;
    bool adjacent(VariableId a, VariableId b) const { return hasEdge(a, b) || hasEdge(b, a); }
    const std::vector<std::pair<VariableId, VariableId>>& edges() const { return edges_; }
    const std::vector<VariableId>& topologicalOrder() const { return topo_; }

    /// Proper descendants of v.
    SubsetMask descendants(VariableId v) const;
    /// Every variable except the target.
    SubsetMask nonTargetMask() const { return SubsetMask::full(size()).without(target_); }

    void checkId(VariableId v) const;

private:
    std::vector<std::string> names_;
    std::vector<std::pair<VariableId, VariableId>> edges_;
    std::vector<SubsetMask> parents_;
    std::vector<SubsetMask> children_;
    std::vector<VariableId> topo_;
    VariableId target_;
};

/// True iff every path between x and y is blocked by z.
bool dSeparated(const Dag& g, VariableId x, VariableId y, SubsetMask z);

/// Parents, children and spouses of the target.
SubsetMask markovBoundary(const Dag& g);

SubsetMask parentsChildren(const Dag& g, VariableId x);

/// Strong iff in the Markov boundary; weak iff connected to the target but not
/// strong; irrelevant iff no undirected path to the target. Faithfulness is
/// assumed, not checked. The entry for the target itself is Irrelevant and
/// should be ignored.
std::vector<RelevanceClass> classifyRelevance(const Dag& g);

bool undirectedPathExists(const Dag& g, VariableId x, VariableId y);

/// Variables in the same skeleton component as v (v included).
SubsetMask connectedComponent(const Dag& g, VariableId v);

}  // namespace bnshap
