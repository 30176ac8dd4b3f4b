#include "xmrsa/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "xmrsa/rng.hpp"

namespace xmrsa {

namespace {

constexpr std::uint64_t kKmeansStream = 3;

double sq_dist(const Mat& pts, std::size_t i, const Mat& centroids,
               std::size_t c) {
    double ss = 0.0;
    for (std::size_t j = 0; j < pts.cols; ++j) {
        const double d = pts.at(i, j) - centroids.at(c, j);
        ss += d * d;
    }
    return ss;
}

}  // namespace

std::string_view affect_group_name(AffectGroup g) {
    switch (g) {
        case AffectGroup::Positive: return "positive";
        case AffectGroup::Neutral: return "neutral";
        case AffectGroup::Negative: return "negative";
    }
    return "unknown";
}

double valence(const std::array<double, 3>& z,
               const std::array<double, 3>& weights) {
    return weights[0] * z[0] + weights[1] * z[1] + weights[2] * z[2];
}

AffectGroup classify_valence(double v, double tau_v) {
    if (v > tau_v) return AffectGroup::Positive;
    if (v < -tau_v) return AffectGroup::Negative;
    return AffectGroup::Neutral;
}

std::map<std::string, AffectLabel> affect_partition(
    const std::vector<std::pair<std::string, std::array<double, 3>>>& sentences,
    double tau_v, const std::array<double, 3>& weights) {
    if (sentences.empty()) throw MissingFeatures("<empty sentence set>");

    const double n = static_cast<double>(sentences.size());
    std::array<double, 3> mean{}, sd{};
    for (std::size_t f = 0; f < 3; ++f) {
        double s = 0.0;
        for (const auto& [id, feats] : sentences) s += feats[f];
        mean[f] = s / n;
        double ss = 0.0;
        for (const auto& [id, feats] : sentences)
            ss += (feats[f] - mean[f]) * (feats[f] - mean[f]);
        sd[f] = std::sqrt(ss / n);
        if (sd[f] == 0.0) throw ZeroVarianceAcrossSentences(f);
    }

    std::map<std::string, AffectLabel> out;
    for (const auto& [id, feats] : sentences) {
        const std::array<double, 3> z = {(feats[0] - mean[0]) / sd[0],
                                         (feats[1] - mean[1]) / sd[1],
                                         (feats[2] - mean[2]) / sd[2]};
        const double v = valence(z, weights);
        out[id] = AffectLabel{classify_valence(v, tau_v), v};
    }
    return out;
}

KMeansResult kmeans(const Mat& points, std::size_t k, std::uint64_t seed,
                    Warnings* warnings) {
    const std::size_t n = points.rows;
    if (k < 1) throw OutOfRange("kmeans needs k >= 1");
    if (n < k)
        throw OutOfRange("kmeans needs at least k=" + std::to_string(k) +
                         " points, got " + std::to_string(n));

    CounterRng rng(seed, {kKmeansStream});
    Mat centroids(k, points.cols);

    // k-means++ seeding: first uniform, then proportional to squared
    // distance from the nearest chosen centroid.
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t first = static_cast<std::size_t>(rng.next_below(n));
    for (std::size_t j = 0; j < points.cols; ++j)
        centroids.at(0, j) = points.at(first, j);
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(points, i, centroids, c - 1));
            total += d2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double target = rng.next_double() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng.next_below(n));
        }
        for (std::size_t j = 0; j < points.cols; ++j)
            centroids.at(c, j) = points.at(pick, j);
    }

    std::vector<std::size_t> assignment(n, 0);
    std::vector<std::size_t> counts(k, 0);
    double wcss = 0.0;
    std::size_t iter = 0;
    constexpr std::size_t kMaxIter = 300;

    for (; iter < kMaxIter; ++iter) {
        // assignment step; ties broken toward the lower cluster index
        bool changed = false;
        wcss = 0.0;
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = sq_dist(points, i, centroids, 0);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = sq_dist(points, i, centroids, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
            counts[best]++;
            wcss += best_d;
        }
        if (!changed && iter > 0) break;

        // update step
        Mat next(k, points.cols, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < points.cols; ++j)
                next.at(assignment[i], j) += points.at(i, j);
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // reseed to the point farthest from its assigned centroid
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d =
                        sq_dist(points, i, centroids, assignment[i]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                warn(warnings, "kmeans: cluster " + std::to_string(c) +
                                   " emptied; reseeded to point " +
                                   std::to_string(far));
                for (std::size_t j = 0; j < points.cols; ++j)
                    next.at(c, j) = points.at(far, j);
            } else {
                for (std::size_t j = 0; j < points.cols; ++j)
                    next.at(c, j) /= static_cast<double>(counts[c]);
            }
        }
        centroids = std::move(next);
    }

    return {std::move(assignment), std::move(centroids), wcss, iter};
}

std::vector<ProsodyCluster> prosody_partition(
    const std::vector<std::pair<std::string, std::vector<double>>>& sentences,
    std::size_t k, std::uint64_t seed, Warnings* warnings) {
    if (sentences.empty()) throw MissingFeatures("<empty sentence set>");
    const std::size_t dims = sentences.front().second.size();
    for (const auto& [id, row] : sentences)
        if (row.size() != dims)
            throw MissingFeatures(id + " (descriptor length mismatch)");

    Mat pts(sentences.size(), dims);
    for (std::size_t i = 0; i < sentences.size(); ++i)
        for (std::size_t j = 0; j < dims; ++j)
            pts.at(i, j) = sentences[i].second[j];

    // z-score each descriptor across sentences; constant descriptors are
    // left centered at zero with a warning rather than failing the run
    const double n = static_cast<double>(pts.rows);
    for (std::size_t j = 0; j < dims; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < pts.rows; ++i) mean += pts.at(i, j);
        mean /= n;
        double ss = 0.0;
        for (std::size_t i = 0; i < pts.rows; ++i)
            ss += (pts.at(i, j) - mean) * (pts.at(i, j) - mean);
        const double sd = std::sqrt(ss / n);
        if (sd == 0.0) {
            warn(warnings, "prosody descriptor " + std::to_string(j) +
                               " constant across sentences");
            for (std::size_t i = 0; i < pts.rows; ++i) pts.at(i, j) = 0.0;
        } else {
            for (std::size_t i = 0; i < pts.rows; ++i)
                pts.at(i, j) = (pts.at(i, j) - mean) / sd;
        }
    }

    const KMeansResult km = kmeans(pts, k, seed, warnings);
    std::vector<ProsodyCluster> clusters(k);
    for (std::size_t c = 0; c < k; ++c) {
        clusters[c].cluster_id = c;
        clusters[c].centroid.assign(km.centroids.row(c).begin(),
                                    km.centroids.row(c).end());
    }
    for (std::size_t i = 0; i < sentences.size(); ++i)
        clusters[km.assignment[i]].members.push_back(sentences[i].first);
    return clusters;
}

std::vector<GroupStat> group_summary(
    const std::map<std::string, std::string>& sentence_to_group,
    const std::vector<std::tuple<std::string, std::string, double>>& scores) {
    std::set<std::string> groups;
    for (const auto& [id, g] : sentence_to_group) groups.insert(g);
    std::set<std::string> metrics;
    for (const auto& [id, metric, value] : scores) metrics.insert(metric);

    std::vector<GroupStat> out;
    for (const auto& g : groups) {
        for (const auto& metric : metrics) {
            GroupStat st;
            st.group = g;
            st.metric = metric;
            std::vector<double> vals;
            for (const auto& [id, m, value] : scores) {
                if (m != metric) continue;
                auto it = sentence_to_group.find(id);
                if (it == sentence_to_group.end() || it->second != g) continue;
                if (!std::isfinite(value)) {
                    st.n_excluded++;
                    continue;
                }
                vals.push_back(value);
            }
            st.n = vals.size();
            if (!vals.empty()) {
                double mean = 0.0;
                for (double v : vals) mean += v;
                mean /= static_cast<double>(vals.size());
                double ss = 0.0;
                for (double v : vals) ss += (v - mean) * (v - mean);
                st.mean = mean;
                st.sd = std::sqrt(ss / static_cast<double>(vals.size()));
            }
            out.push_back(std::move(st));
        }
    }
    return out;
}

}  // namespace xmrsa
