#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xmrsa/errors.hpp"
#include "xmrsa/mat.hpp"

namespace xmrsa {

enum class AffectGroup { Positive, Neutral, Negative };

std::string_view affect_group_name(AffectGroup g);

struct AffectLabel {
    AffectGroup group;
    double valence;
};

inline constexpr std::array<double, 3> kDefaultAffectWeights = {0.55, -0.25,
                                                                -0.20};
inline constexpr double kDefaultValenceThreshold = 0.45;

// a1*z_pitch + a2*z_alpha + a3*z_hammarberg on standardized features.
double valence(const std::array<double, 3>& z,
               const std::array<double, 3>& weights = kDefaultAffectWeights);

// Strict inequalities: positive iff v > tau, negative iff v < -tau,
// neutral otherwise (boundary values are neutral).
AffectGroup classify_valence(double v, double tau_v);

// Z-scores the three affect features across the sentence set (population
// sd), forms the valence proxy and thresholds it. Throws MissingFeatures
// for a sentence without features and ZeroVarianceAcrossSentences when a
// feature is constant over sentences (e.g. a single sentence).
std::map<std::string, AffectLabel> affect_partition(
    const std::vector<std::pair<std::string, std::array<double, 3>>>& sentences,
    double tau_v = kDefaultValenceThreshold,
    const std::array<double, 3>& weights = kDefaultAffectWeights);

struct ProsodyCluster {
    std::size_t cluster_id = 0;
    std::vector<double> centroid;
    std::vector<std::string> members;
};

struct KMeansResult {
    std::vector<std::size_t> assignment;  // per point, in [0, k)
    Mat centroids;                        // k x dims
    double wcss = 0.0;
    std::size_t iterations = 0;
};

// Lloyd iterations from a k-means++ seeding drawn from the shared
// counter RNG; runs to an assignment fixed point or 300 iterations.
// Points should be z-scored by the caller. An emptied cluster is reseeded
// to the point farthest from its assigned centroid, with a warning.
KMeansResult kmeans(const Mat& points, std::size_t k, std::uint64_t seed,
                    Warnings* warnings = nullptr);

// Z-scored prosody descriptors clustered into K groups; members keep the
// manifest sentence order.
std::vector<ProsodyCluster> prosody_partition(
    const std::vector<std::pair<std::string, std::vector<double>>>& sentences,
    std::size_t k, std::uint64_t seed, Warnings* warnings = nullptr);

struct GroupStat {
    std::string group;
    std::string metric;
    std::size_t n = 0;
    std::size_t n_excluded = 0;
    std::optional<double> mean;
    std::optional<double> sd;  // population sd
};

// Per (group, metric) mean / population sd / count over the member
// sentences' scores. Non-finite scores are excluded and counted. Groups
// without any scored member still emit count-0 rows.
std::vector<GroupStat> group_summary(
    const std::map<std::string, std::string>& sentence_to_group,
    const std::vector<std::tuple<std::string, std::string, double>>& scores);

}  // namespace xmrsa
