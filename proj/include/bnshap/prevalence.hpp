#pragma once

#include "bnshap/model.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace bnshap {

enum class Parameterization { DiscreteDirichlet, LinearGaussian };

const char* toString(Parameterization p);
Parameterization parameterizationFromString(const std::string& s);

struct SimConfig {
    std::size_t nVars = 6;  // all variables, target included
    double edgeProbability = 0.4;
    Parameterization parameterization = Parameterization::LinearGaussian;
    double minCptProb = 0.05;
    std::pair<double, double> coefficientRange{-2.0, 2.0};
    std::pair<double, double> noiseVarianceRange{0.5, 2.0};
    DiscreteScore score = DiscreteScore::Accuracy;
    std::size_t nNetworks = 200;
    std::uint64_t seed = 0;
    /// Extra fixed networks analysed after the random ones.
    std::vector<Model> replay;

    void validate() const;
};

/// Half-width of the zero-neighbourhood excluded from random coefficients.
inline constexpr double kCoefficientGap = 0.05;
/// Tolerance used for event comparisons between Shapley values.
inline constexpr double kEventTol = 1e-9;

/// Deterministic in (config.seed, index). Variables are named V0..V{n-1} in a
/// uniformly shuffled causal order; the target is drawn among variables with
/// at least one parent when any exist. Discrete networks are binary.
Model generateRandomNetwork(const SimConfig& config, std::uint64_t index);

struct NetworkRecord {
    std::uint64_t index = 0;
    bool replayed = false;
    std::size_t mbSize = 0;
    double maxNonMbPhi = 0.0;  // 0 when every player is in the boundary
    double minMbPhi = 0.0;     // 0 when the boundary is empty
    double sumMbPhi = 0.0;
    bool e1 = false;  // a non-member outranks a member
    bool e2 = false;  // boundary total below the best non-member
    bool e3 = false;  // top-|MB| Shapley set differs from the boundary
    double efficiencyResidual = 0.0;
    bool axiomsHold = true;

    bool operator==(const NetworkRecord&) const = default;
};

struct Frequency {
    std::size_t count = 0;
    double rate = 0.0;
    double ciLow = 0.0;  // 95% Wilson interval
    double ciHigh = 0.0;

    bool operator==(const Frequency&) const = default;
};

struct PrevalenceReport {
    std::vector<NetworkRecord> records;  // sorted by index
    Frequency e1, e2, e3;
    std::size_t networks() const { return records.size(); }
    bool operator==(const PrevalenceReport&) const = default;
};

Frequency wilsonFrequency(std::size_t count, std::size_t total);

/// Exact Shapley, Markov boundary and event flags for one network.
NetworkRecord analyzeNetwork(const Model& model, std::uint64_t index);

PrevalenceReport runPrevalence(const SimConfig& config);

}  // namespace bnshap
