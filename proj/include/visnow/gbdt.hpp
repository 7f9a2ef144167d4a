#pragma once

// Gradient-boosted decision trees for binary classification.
//
// Second-order boosting on weighted logistic loss with exact greedy split
// finding. Trees grow level by level; a row goes left when x < threshold,
// and missing values follow the default direction learned at each node.

#include "visnow/features.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace visnow {

struct TrainConfig {
    int n_trees = 100;
    int max_depth = 6;
    double learning_rate = 0.3;
    /// Minimum hessian sum on each side of a split.
    double min_child_weight = 1.0;
    double l2_lambda = 1.0;
    double gamma = 0.0;
    /// Weight applied to positive examples; negatives/positives when unset.
    std::optional<double> scale_pos_weight;
    std::uint64_t seed = 42;

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

/// Splits below this gain are not made.
inline constexpr double kMinSplitGain = 1e-6;

struct TreeNode {
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint16_t feature = 0;
    bool default_left = false;
    double threshold = 0.0;
    /// Leaf output, already scaled by the learning rate.
    double value = 0.0;
    double gain = 0.0;
    /// Hessian sum and row count of the training rows reaching the node.
    double hess = 0.0;
    std::uint64_t count = 0;

    bool is_leaf() const { return left < 0; }
};

/// Nodes in preorder; the root is nodes[0].
struct Tree {
    std::vector<TreeNode> nodes;

    /// Index of the leaf reached by x.
    std::size_t leaf_index(std::span<const double> x) const;
    double predict(std::span<const double> x) const { return nodes[leaf_index(x)].value; }
    /// Number of split levels (a lone leaf has depth 0).
    int depth() const;
};

struct ModelMetadata {
    std::string station;
    int horizon_h = 0;
    std::string train_start;
    std::string train_end;
    std::uint32_t feature_set_version = kFeatureSetVersion;
};

struct Model {
    std::vector<Tree> trees;
    double base_score = 0.0;
    std::vector<std::string> feature_names;
    /// Config used for training, with scale_pos_weight resolved.
    TrainConfig config;
    ModelMetadata metadata;

    std::size_t n_features() const { return feature_names.size(); }
};

struct RoundStats {
    /// Weighted mean logistic loss on the training set after the round.
    double train_loss = 0.0;
    std::optional<double> valid_auc;
};

struct TrainResult {
    Model model;
    /// history[0] describes the base score alone; history[k] the first k trees.
    std::vector<RoundStats> history;
};

/// Throws SingleClass.
double compute_scale_pos_weight(std::span<const int> labels);

/// `feature_names` defaults to the standard names when the matrix has the
/// standard width, otherwise f0, f1, ... An empty validation set disables the
/// per-round AUC. Throws SingleClass, NonFiniteFeature, DimensionMismatch.
TrainResult train(const FeatureMatrix& train_set, const FeatureMatrix& valid_set, const TrainConfig& config,
                  std::vector<std::string> feature_names = {});

/// Throws DimensionMismatch.
double predict_margin(const Model& model, std::span<const double> x);
double predict_proba(const Model& model, std::span<const double> x);
double predict_proba(const Model& model, const FeatureVector& x);
std::vector<double> predict_proba(const Model& model, const FeatureMatrix& data);

double sigmoid(double margin);

/// Weighted mean logistic loss of margins against labels.
double logistic_loss(std::span<const double> margins, std::span<const int> labels, double scale_pos_weight);

/// Mann-Whitney AUC with ties counted half. Throws SingleClass, LengthMismatch.
double auc(std::span<const double> scores, std::span<const int> labels);

/// Binary model container; layout in docs/model_format.md.
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize_model(const Model& model);
/// Throws CorruptModel, FormatVersionMismatch.
Model deserialize_model(std::span<const std::uint8_t> bytes);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

} // namespace visnow
