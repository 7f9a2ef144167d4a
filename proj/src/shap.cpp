#include "visnow/shap.hpp"

#include "visnow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace visnow {

double Attribution::margin() const {
    double m = base_value;
    for (double p : phi) m += p;
    return m;
}

namespace {

struct PathElement {
    int feature = -1;
    double zero = 0.0;
    double one = 0.0;
    double weight = 0.0;
};

void extend_path(PathElement* path, int depth, double zero, double one, int feature) {
    path[depth] = {feature, zero, one, depth == 0 ? 1.0 : 0.0};
    for (int i = depth - 1; i >= 0; --i) {
        path[i + 1].weight += one * path[i].weight * (i + 1) / (depth + 1);
        path[i].weight = zero * path[i].weight * (depth - i) / (depth + 1);
    }
}

void unwind_path(PathElement* path, int depth, int index) {
    const double one = path[index].one, zero = path[index].zero;
    double next = path[depth].weight;
    for (int i = depth - 1; i >= 0; --i) {
        if (one != 0) {
            double tmp = path[i].weight;
            path[i].weight = next * (depth + 1) / ((i + 1) * one);
            next = tmp - path[i].weight * zero * (depth - i) / (depth + 1);
        } else {
            path[i].weight = path[i].weight * (depth + 1) / (zero * (depth - i));
        }
    }
    for (int i = index; i < depth; ++i) {
        path[i].feature = path[i + 1].feature;
        path[i].zero = path[i + 1].zero;
        path[i].one = path[i + 1].one;
    }
}

double unwound_path_sum(const PathElement* path, int depth, int index) {
    const double one = path[index].one, zero = path[index].zero;
    double next = path[depth].weight, total = 0.0;
    if (one != 0) {
        for (int i = depth - 1; i >= 0; --i) {
            double tmp = next / ((i + 1) * one);
            total += tmp;
            next = path[i].weight - tmp * zero * (depth - i);
        }
    } else {
        for (int i = depth - 1; i >= 0; --i) total += path[i].weight / (zero * (depth - i));
    }
    return total * (depth + 1);
}

struct Recursion {
    const Tree& tree;
    const std::vector<double>& frac;
    std::span<const double> x;
    std::vector<double>& phi;

    void run(std::size_t node, PathElement* parent, int depth, double zero, double one, int feature) {
        PathElement* path = parent + depth + 1;
        std::copy(parent, parent + depth + 1, path);
        extend_path(path, depth, zero, one, feature);
        const TreeNode& n = tree.nodes[node];
        if (n.is_leaf()) {
            for (int i = 1; i <= depth; ++i) {
                double w = unwound_path_sum(path, depth, i);
                phi[std::size_t(path[i].feature)] += w * (path[i].one - path[i].zero) * n.value;
            }
            return;
        }
        double v = x[n.feature];
        bool go_left = std::isnan(v) ? n.default_left : v < n.threshold;
        std::size_t hot = std::size_t(go_left ? n.left : n.right);
        std::size_t cold = std::size_t(go_left ? n.right : n.left);
        double in_zero = 1.0, in_one = 1.0;
        int index = 0;
        for (; index <= depth; ++index)
            if (path[index].feature == int(n.feature)) break;
        if (index != depth + 1) {
            in_zero = path[index].zero;
            in_one = path[index].one;
            unwind_path(path, depth, index);
            --depth;
        }
        double hot_zero = frac[hot] * in_zero, cold_zero = frac[cold] * in_zero;
        if (hot_zero != 0.0 || in_one != 0.0) run(hot, path, depth + 1, hot_zero, in_one, int(n.feature));
        if (cold_zero != 0.0) run(cold, path, depth + 1, cold_zero, 0.0, int(n.feature));
    }
};

double expected_value(const Tree& tree, const std::vector<double>& frac, std::size_t node) {
    const TreeNode& n = tree.nodes[node];
    if (n.is_leaf()) return n.value;
    return frac[std::size_t(n.left)] * expected_value(tree, frac, std::size_t(n.left)) +
           frac[std::size_t(n.right)] * expected_value(tree, frac, std::size_t(n.right));
}

std::vector<std::vector<double>> stored_covers(const Model& model) {
    std::vector<std::vector<double>> covers;
    for (const Tree& t : model.trees) {
        std::vector<double> c(t.nodes.size());
        for (std::size_t i = 0; i < t.nodes.size(); ++i) c[i] = double(t.nodes[i].count);
        covers.push_back(std::move(c));
    }
    return covers;
}

} // namespace

TreeExplainer::TreeExplainer(const Model& model) : model_(model) { init(stored_covers(model)); }

TreeExplainer::TreeExplainer(const Model& model, const FeatureMatrix& background) : model_(model) {
    if (background.rows() == 0) throw EmptyBackground("background dataset has no rows");
    if (background.cols != model.n_features()) throw DimensionMismatch("background width differs from model");
    std::vector<std::vector<double>> covers;
    for (const Tree& t : model.trees) {
        std::vector<double> c(t.nodes.size(), 0.0);
        for (std::size_t r = 0; r < background.rows(); ++r) {
            auto x = background.row(r);
            std::size_t i = 0;
            for (;;) {
                c[i] += 1.0;
                const TreeNode& n = t.nodes[i];
                if (n.is_leaf()) break;
                double v = x[n.feature];
                bool go_left = std::isnan(v) ? n.default_left : v < n.threshold;
                i = std::size_t(go_left ? n.left : n.right);
            }
        }
        covers.push_back(std::move(c));
    }
    init(covers);
}

void TreeExplainer::init(const std::vector<std::vector<double>>& covers) {
    base_value_ = model_.base_score;
    for (std::size_t t = 0; t < model_.trees.size(); ++t) {
        const Tree& tree = model_.trees[t];
        std::vector<double> f(tree.nodes.size(), 1.0);
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const TreeNode& n = tree.nodes[i];
            if (n.is_leaf()) continue;
            std::size_t l = std::size_t(n.left), r = std::size_t(n.right);
            if (covers[t][i] > 0) {
                f[l] = covers[t][l] / covers[t][i];
                f[r] = covers[t][r] / covers[t][i];
            } else if (n.count > 0) {
                f[l] = double(tree.nodes[l].count) / double(n.count);
                f[r] = double(tree.nodes[r].count) / double(n.count);
            } else {
                f[l] = f[r] = 0.5;
            }
        }
        base_value_ += expected_value(tree, f, 0);
        depth_.push_back(tree.depth());
        frac_.push_back(std::move(f));
    }
}

Attribution TreeExplainer::explain(std::span<const double> x) const {
    if (x.size() != model_.n_features())
        throw DimensionMismatch("expected " + std::to_string(model_.n_features()) + " features, got " +
                                std::to_string(x.size()));
    Attribution a;
    a.phi.assign(x.size(), 0.0);
    a.base_value = base_value_;
    a.x.assign(x.begin(), x.end());
    std::vector<PathElement> buffer;
    for (std::size_t t = 0; t < model_.trees.size(); ++t) {
        std::size_t d = std::size_t(depth_[t]) + 2;
        buffer.assign(d * (d + 1) / 2 + d, PathElement{});
        Recursion rec{model_.trees[t], frac_[t], x, a.phi};
        rec.run(0, buffer.data(), 0, 1.0, 1.0, -1);
    }
    return a;
}

Attribution tree_shap(const Model& model, std::span<const double> x, const FeatureMatrix& background) {
    return TreeExplainer(model, background).explain(x);
}

std::vector<Importance> mean_abs_shap(const TreeExplainer& explainer, const FeatureMatrix& data) {
    const Model& model = explainer.model();
    if (data.rows() == 0) throw EmptyDataset("no rows to explain");
    if (data.cols != model.n_features()) throw DimensionMismatch("dataset width differs from model");
    std::vector<double> total(data.cols, 0.0);
    for (std::size_t r = 0; r < data.rows(); ++r) {
        Attribution a = explainer.explain(data.row(r));
        for (std::size_t f = 0; f < data.cols; ++f) total[f] += std::abs(a.phi[f]);
    }
    std::vector<Importance> out;
    for (std::size_t f = 0; f < data.cols; ++f)
        out.push_back({f, model.feature_names[f], total[f] / double(data.rows())});
    std::stable_sort(out.begin(), out.end(),
                     [](const Importance& a, const Importance& b) { return a.mean_abs_shap > b.mean_abs_shap; });
    return out;
}

std::vector<Importance> mean_abs_shap(const Model& model, const FeatureMatrix& data) {
    return mean_abs_shap(TreeExplainer(model), data);
}

FeatureMatrix background_sample(const FeatureMatrix& data, std::size_t max_rows, std::uint64_t seed) {
    std::size_t n = data.rows();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (n > max_rows) {
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < max_rows; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(idx[i], idx[pick(rng)]);
        }
        idx.resize(max_rows);
        std::sort(idx.begin(), idx.end());
    }
    FeatureMatrix out;
    out.cols = data.cols;
    for (std::size_t i : idx) out.push_back(data.row(i), data.labels.empty() ? 0 : data.labels[i]);
    return out;
}

} // namespace visnow
