#include "bnshap/prevalence.hpp"

#include "bnshap/error.hpp"
#include "bnshap/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace bnshap {

const char* toString(Parameterization p) {
    return p == Parameterization::DiscreteDirichlet ? "discrete_dirichlet" : "linear_gaussian";
}

Parameterization parameterizationFromString(const std::string& s) {
    if (s == "discrete_dirichlet" || s == "discrete") return Parameterization::DiscreteDirichlet;
    if (s == "linear_gaussian" || s == "gaussian") return Parameterization::LinearGaussian;
    throwInput("unknown parameterization '" + s + "'");
}

void SimConfig::validate() const {
    if (nVars < 2) throwInput("n_vars must be at least 2");
    if (nVars - 1 > kEnumerationCap) throwCapacity("n_vars exceeds the exact-enumeration cap");
    if (!(edgeProbability >= 0.0 && edgeProbability <= 1.0)) throwInput("edge_probability must lie in [0, 1]");
    if (!(minCptProb > 0.0 && minCptProb < 0.5)) throwInput("min_cpt_prob must lie in (0, 0.5)");
    if (!(coefficientRange.first < coefficientRange.second)) throwInput("coefficient_range must be increasing");
    if (coefficientRange.second <= -kCoefficientGap && coefficientRange.first >= kCoefficientGap) {
        throwInput("coefficient_range is empty");
    }
    if (std::max(std::abs(coefficientRange.first), std::abs(coefficientRange.second)) <= kCoefficientGap) {
        throwInput("coefficient_range lies inside the excluded zero neighbourhood");
    }
    if (!(noiseVarianceRange.first > 0.0 && noiseVarianceRange.first <= noiseVarianceRange.second)) {
        throwInput("noise_variance_range must be positive and increasing");
    }
    if (nNetworks == 0 && replay.empty()) throwInput("n_networks must be at least 1");
}

namespace {

// Uniform on [lo, hi] minus (-gap, gap), by rejection.
double sampleCoefficient(std::mt19937_64& rng, std::pair<double, double> range) {
    std::uniform_real_distribution<double> dist(range.first, range.second);
    while (true) {
        const double c = dist(rng);
        if (std::abs(c) >= kCoefficientGap) return c;
    }
}

}  // namespace

Model generateRandomNetwork(const SimConfig& config, std::uint64_t index) {
    config.validate();
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    const std::size_t n = config.nVars;

    std::vector<VariableId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::bernoulli_distribution edge(config.edgeProbability);
    std::vector<std::pair<VariableId, VariableId>> edges;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (edge(rng)) edges.emplace_back(order[a], order[b]);
        }
    }
    std::vector<bool> hasParent(n, false);
    for (const auto& e : edges) hasParent[e.second] = true;
    std::vector<VariableId> candidates;
    for (VariableId v = 0; v < n; ++v) {
        if (hasParent[v]) candidates.push_back(v);
    }
    if (candidates.empty()) {
        candidates.resize(n);
        std::iota(candidates.begin(), candidates.end(), 0);
    }
    const VariableId target = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];

    std::vector<std::string> names;
    for (std::size_t v = 0; v < n; ++v) names.push_back("V" + std::to_string(v));
    Dag g(names, edges, target);

    Model model = [&] {
        if (config.parameterization == Parameterization::LinearGaussian) {
            std::map<LinearGaussianSem::Edge, double> coefficients;
            for (const auto& e : g.edges()) coefficients[e] = sampleCoefficient(rng, config.coefficientRange);
            std::uniform_real_distribution<double> noise(config.noiseVarianceRange.first, config.noiseVarianceRange.second);
            std::vector<double> variances(n);
            for (auto& v : variances) v = noise(rng);
            return Model::gaussian(LinearGaussianSem(g, std::move(coefficients), std::move(variances)));
        }
        std::uniform_real_distribution<double> p1(config.minCptProb, 1.0 - config.minCptProb);
        std::vector<std::vector<std::string>> labels(n, {"0", "1"});
        std::vector<Cpt> cpts;
        for (VariableId v = 0; v < n; ++v) {
            Cpt cpt;
            cpt.variable = v;
            cpt.parentOrder = g.parents(v).members();
            const std::size_t rows = std::size_t{1} << cpt.parentOrder.size();
            for (std::size_t r = 0; r < rows; ++r) {
                const double p = p1(rng);
                cpt.rows.push_back({1.0 - p, p});
            }
            cpts.push_back(std::move(cpt));
        }
        return Model::discrete(DiscreteBayesNet(g, std::move(labels), std::move(cpts)), config.score);
    }();
    model.description = "random network " + std::to_string(index) + " (seed " + std::to_string(config.seed) + ")";
    return model;
}

Frequency wilsonFrequency(std::size_t count, std::size_t total) {
    Frequency f;
    f.count = count;
    if (total == 0) return f;
    constexpr double z = 1.959963984540054;
    const double nn = static_cast<double>(total);
    const double p = static_cast<double>(count) / nn;
    const double denom = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
    f.rate = p;
    // The closed form cancels to rounding noise at the extremes.
    f.ciLow = count == 0 ? 0.0 : std::max(0.0, centre - half);
    f.ciHigh = count == total ? 1.0 : std::min(1.0, centre + half);
    return f;
}

NetworkRecord analyzeNetwork(const Model& model, std::uint64_t index) {
    const Game& game = model.game();
    const ShapleyReport report = exactShapley(game, {.keepSummands = false});
    const SubsetMask mb = model.toPlayerMask(markovBoundary(model.graph()));

    NetworkRecord rec;
    rec.index = index;
    rec.mbSize = static_cast<std::size_t>(mb.size());
    bool anyMb = false;
    bool anyNon = false;
    for (VariableId p = 0; p < game.numPlayers(); ++p) {
        const double phi = report.values[p];
        if (mb.contains(p)) {
            rec.minMbPhi = anyMb ? std::min(rec.minMbPhi, phi) : phi;
            rec.sumMbPhi += phi;
            anyMb = true;
        } else {
            rec.maxNonMbPhi = anyNon ? std::max(rec.maxNonMbPhi, phi) : phi;
            anyNon = true;
        }
    }
    rec.e1 = anyMb && anyNon && rec.maxNonMbPhi > rec.minMbPhi + kEventTol;
    rec.e2 = anyMb && anyNon && rec.sumMbPhi + kEventTol < rec.maxNonMbPhi;

    const auto order = rankPlayers(report.values);
    SubsetMask top;
    for (std::size_t i = 0; i < rec.mbSize; ++i) top = top.with(order[i]);
    rec.e3 = top != mb;

    const AxiomFindings axioms = verifyAxioms(game, report, kEventTol);
    rec.efficiencyResidual = axioms.efficiencyResidual;
    rec.axiomsHold = axioms.allHold();
    return rec;
}

PrevalenceReport runPrevalence(const SimConfig& config) {
    config.validate();
    PrevalenceReport out;
    for (std::uint64_t i = 0; i < config.nNetworks; ++i) {
        out.records.push_back(analyzeNetwork(generateRandomNetwork(config, i), i));
    }
    for (std::size_t r = 0; r < config.replay.size(); ++r) {
        NetworkRecord rec = analyzeNetwork(config.replay[r], config.nNetworks + r);
        rec.replayed = true;
        out.records.push_back(rec);
    }
    std::sort(out.records.begin(), out.records.end(),
              [](const NetworkRecord& a, const NetworkRecord& b) { return a.index < b.index; });
    std::size_t c1 = 0, c2 = 0, c3 = 0;
    for (const auto& rec : out.records) {
        c1 += rec.e1;
        c2 += rec.e2;
        c3 += rec.e3;
    }
    out.e1 = wilsonFrequency(c1, out.records.size());
    out.e2 = wilsonFrequency(c2, out.records.size());
    out.e3 = wilsonFrequency(c3, out.records.size());
    return out;
}

}  // namespace bnshap
