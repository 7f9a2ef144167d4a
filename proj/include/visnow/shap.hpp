#pragma once

// Exact TreeSHAP attributions (path-dependent perturbation) in margin space.

#include "visnow/gbdt.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace visnow {

struct Attribution {
    std::vector<double> phi;
    /// Expected margin under the explainer's node covers, base score included.
    double base_value = 0.0;
    std::vector<double> x;

    double margin() const;
};

/// Precomputed per-node split fractions for one model. The explainer keeps a
/// reference to the model, which must outlive it.
class TreeExplainer {
public:
    /// Node covers from the training row counts stored in the model.
    explicit TreeExplainer(const Model& model);
    /// Node covers from routing `background` rows through each tree; nodes no
    /// background row reaches fall back to the stored counts.
    /// Throws EmptyBackground, DimensionMismatch.
    TreeExplainer(const Model& model, const FeatureMatrix& background);

    /// Throws DimensionMismatch.
    Attribution explain(std::span<const double> x) const;
    double base_value() const { return base_value_; }
    const Model& model() const { return model_; }
    /// Share of the parent's cover that flows into `node` (1 for roots).
    double fraction(std::size_t tree, std::size_t node) const { return frac_[tree][node]; }

private:
    void init(const std::vector<std::vector<double>>& covers);

    const Model& model_;
    std::vector<std::vector<double>> frac_;
    std::vector<int> depth_;
    double base_value_ = 0.0;
};

/// Throws EmptyBackground, DimensionMismatch.
Attribution tree_shap(const Model& model, std::span<const double> x, const FeatureMatrix& background);

struct Importance {
    std::size_t feature = 0;
    std::string name;
    double mean_abs_shap = 0.0;
};

/// Mean |phi| per feature, sorted descending; ties keep feature order.
/// Throws EmptyDataset, DimensionMismatch.
std::vector<Importance> mean_abs_shap(const TreeExplainer& explainer, const FeatureMatrix& data);
std::vector<Importance> mean_abs_shap(const Model& model, const FeatureMatrix& data);

/// Uniform sample without replacement of at most `max_rows` rows, kept in
/// original order.
FeatureMatrix background_sample(const FeatureMatrix& data, std::size_t max_rows = 1000, std::uint64_t seed = 42);

} // namespace visnow
