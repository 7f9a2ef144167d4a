#include "visnow/gbdt.hpp"

#include "visnow/errors.hpp"
#include "visnow/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace visnow {

void TrainConfig::validate() const {
    if (n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
    if (max_depth < 1 || max_depth > 30) throw std::invalid_argument("max_depth must be in [1, 30]");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw std::invalid_argument("learning_rate must be in (0, 1]");
    if (!(min_child_weight >= 0.0)) throw std::invalid_argument("min_child_weight must be >= 0");
    if (!(l2_lambda >= 0.0)) throw std::invalid_argument("l2_lambda must be >= 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
    if (scale_pos_weight && !(*scale_pos_weight > 0.0 && std::isfinite(*scale_pos_weight)))
        throw std::invalid_argument("scale_pos_weight must be > 0");
}

std::size_t Tree::leaf_index(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const TreeNode& n = nodes[i];
        double v = x[n.feature];
        bool go_left = std::isnan(v) ? n.default_left : v < n.threshold;
        i = std::size_t(go_left ? n.left : n.right);
    }
    return i;
}

int Tree::depth() const {
    std::function<int(std::size_t)> rec = [&](std::size_t i) -> int {
        const TreeNode& n = nodes[i];
        if (n.is_leaf()) return 0;
        return 1 + std::max(rec(std::size_t(n.left)), rec(std::size_t(n.right)));
    };
    return nodes.empty() ? 0 : rec(0);
}

double compute_scale_pos_weight(std::span<const int> labels) {
    std::size_t pos = 0;
    for (int y : labels) pos += y != 0;
    std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw SingleClass("labels must contain both classes");
    return double(neg) / double(pos);
}

double sigmoid(double m) {
    if (m >= 0) return 1.0 / (1.0 + std::exp(-m));
    double e = std::exp(m);
    return e / (1.0 + e);
}

double logistic_loss(std::span<const double> margins, std::span<const int> labels, double scale_pos_weight) {
    if (margins.size() != labels.size()) throw LengthMismatch("margins and labels differ in length");
    double total = 0.0, weight = 0.0;
    for (std::size_t i = 0; i < margins.size(); ++i) {
        double m = margins[i];
        double w = labels[i] ? scale_pos_weight : 1.0;
        double softplus = std::max(m, 0.0) + std::log1p(std::exp(-std::abs(m)));
        total += w * (softplus - (labels[i] ? m : 0.0));
        weight += w;
    }
    return weight > 0 ? total / weight : 0.0;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw LengthMismatch("scores and labels differ in length");
    std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double pos_rank_sum = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        double avg_rank = (double(i + 1) + double(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]]) {
                pos_rank_sum += avg_rank;
                ++pos;
            }
        i = j;
    }
    std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw SingleClass("AUC needs both classes");
    double u = pos_rank_sum - double(pos) * double(pos + 1) / 2.0;
    return u / (double(pos) * double(neg));
}

namespace {

struct NodeStats {
    double g = 0.0, h = 0.0;
    std::uint64_t count = 0;
};

struct Candidate {
    double gain = -std::numeric_limits<double>::infinity();
    std::uint16_t feature = 0;
    double threshold = 0.0;
    bool default_left = false;

    bool valid() const { return gain > kMinSplitGain; }
    void offer(double g, std::uint16_t f, double thr, bool dleft) {
        bool first = std::isinf(gain);
        if (first || g > gain + 1e-10 * std::max(1.0, std::abs(gain))) {
            gain = g;
            feature = f;
            threshold = thr;
            default_left = dleft;
        }
    }
};

double split_threshold(double lo, double hi) {
    double mid = lo + (hi - lo) / 2.0;
    return mid > lo ? mid : hi;
}

class TreeBuilder {
public:
    TreeBuilder(const FeatureMatrix& data, const std::vector<std::vector<std::int32_t>>& sorted,
                const std::vector<std::vector<std::int32_t>>& missing, const TrainConfig& cfg)
        : data_(data), sorted_(sorted), missing_(missing), cfg_(cfg) {}

    /// Builds one tree; afterwards position()[i] is the BFS leaf index of row i
    /// and leaf_values() maps BFS indices to outputs.
    Tree build(std::span<const double> g, std::span<const double> h) {
        std::size_t n = data_.rows();
        pos_.assign(n, 0);
        nodes_.assign(1, TreeNode{});
        std::vector<std::int32_t> level{0};
        for (int depth = 0; !level.empty(); ++depth) {
            std::vector<NodeStats> stats = node_stats(level, g, h);
            std::vector<Candidate> best(level.size());
            if (depth < cfg_.max_depth) best = find_splits(level, stats, g, h);
            std::vector<std::int32_t> next;
            for (std::size_t s = 0; s < level.size(); ++s) {
                TreeNode& node = nodes_[std::size_t(level[s])];
                node.hess = stats[s].h;
                node.count = stats[s].count;
                if (best[s].valid()) {
                    node.feature = best[s].feature;
                    node.threshold = best[s].threshold;
                    node.default_left = best[s].default_left;
                    node.gain = best[s].gain;
                    node.left = std::int32_t(nodes_.size());
                    node.right = node.left + 1;
                    next.push_back(node.left);
                    next.push_back(node.right);
                    nodes_.emplace_back();
                    nodes_.emplace_back();
                } else {
                    nodes_[std::size_t(level[s])].value =
                        -cfg_.learning_rate * stats[s].g / (stats[s].h + cfg_.l2_lambda);
                }
            }
            if (!next.empty()) route(level);
            level = std::move(next);
        }
        leaf_values_.assign(nodes_.size(), 0.0);
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].is_leaf()) leaf_values_[i] = nodes_[i].value;
        return to_preorder();
    }

    const std::vector<std::int32_t>& position() const { return pos_; }
    const std::vector<double>& leaf_values() const { return leaf_values_; }

private:
    std::vector<NodeStats> node_stats(const std::vector<std::int32_t>& level, std::span<const double> g,
                                      std::span<const double> h) {
        slot_of_.assign(nodes_.size(), -1);
        for (std::size_t s = 0; s < level.size(); ++s) slot_of_[std::size_t(level[s])] = std::int32_t(s);
        std::vector<std::vector<double>> gb(level.size()), hb(level.size());
        for (std::size_t i = 0; i < pos_.size(); ++i) {
            std::int32_t s = slot_of_[std::size_t(pos_[i])];
            if (s < 0) continue;
            gb[std::size_t(s)].push_back(g[i]);
            hb[std::size_t(s)].push_back(h[i]);
        }
        std::vector<NodeStats> out(level.size());
        for (std::size_t s = 0; s < level.size(); ++s)
            out[s] = {simd::sum(gb[s]), simd::sum(hb[s]), gb[s].size()};
        return out;
    }

    std::vector<Candidate> find_splits(const std::vector<std::int32_t>& level, const std::vector<NodeStats>& stats,
                                       std::span<const double> g, std::span<const double> h) {
        const std::size_t k = level.size();
        const double lambda = cfg_.l2_lambda, mcw = cfg_.min_child_weight;
        std::vector<Candidate> best(k);
        std::vector<double> parent_score(k);
        for (std::size_t s = 0; s < k; ++s) parent_score[s] = stats[s].g * stats[s].g / (stats[s].h + lambda);
        std::vector<double> gm(k), hm(k), gl(k), hl(k), last(k);
        std::vector<char> has_missing(k), seen(k);

        auto score = [&](double gs, double hs) { return gs * gs / (hs + lambda); };
        auto evaluate = [&](std::size_t s, std::uint16_t f, double thr) {
            const double G = stats[s].g, H = stats[s].h;
            if (!has_missing[s]) {
                double gr = G - gl[s], hr = H - hl[s];
                if (hl[s] < mcw || hr < mcw) return;
                double gain = 0.5 * (score(gl[s], hl[s]) + score(gr, hr) - parent_score[s]) - cfg_.gamma;
                best[s].offer(gain, f, thr, hl[s] >= hr);
                return;
            }
            {
                double gr = G - gl[s], hr = H - hl[s];
                if (hl[s] >= mcw && hr >= mcw) {
                    double gain = 0.5 * (score(gl[s], hl[s]) + score(gr, hr) - parent_score[s]) - cfg_.gamma;
                    best[s].offer(gain, f, thr, false);
                }
            }
            {
                double gL = gl[s] + gm[s], hL = hl[s] + hm[s];
                double gr = G - gL, hr = H - hL;
                if (hL >= mcw && hr >= mcw) {
                    double gain = 0.5 * (score(gL, hL) + score(gr, hr) - parent_score[s]) - cfg_.gamma;
                    best[s].offer(gain, f, thr, true);
                }
            }
        };

        const std::size_t cols = data_.cols;
        for (std::size_t f = 0; f < cols; ++f) {
            std::fill(gm.begin(), gm.end(), 0.0);
            std::fill(hm.begin(), hm.end(), 0.0);
            std::fill(gl.begin(), gl.end(), 0.0);
            std::fill(hl.begin(), hl.end(), 0.0);
            std::fill(has_missing.begin(), has_missing.end(), 0);
            std::fill(seen.begin(), seen.end(), 0);
            for (std::int32_t r : missing_[f]) {
                std::int32_t s = slot_of_[std::size_t(pos_[std::size_t(r)])];
                if (s < 0) continue;
                gm[std::size_t(s)] += g[std::size_t(r)];
                hm[std::size_t(s)] += h[std::size_t(r)];
                has_missing[std::size_t(s)] = 1;
            }
            for (std::int32_t r : sorted_[f]) {
                std::int32_t si = slot_of_[std::size_t(pos_[std::size_t(r)])];
                if (si < 0) continue;
                std::size_t s = std::size_t(si);
                double v = data_.values[std::size_t(r) * cols + f];
                if (seen[s] && v > last[s]) evaluate(s, std::uint16_t(f), split_threshold(last[s], v));
                gl[s] += g[std::size_t(r)];
                hl[s] += h[std::size_t(r)];
                last[s] = v;
                seen[s] = 1;
            }
        }
        return best;
    }

    void route(const std::vector<std::int32_t>& level) {
        const std::size_t cols = data_.cols;
        for (std::size_t i = 0; i < pos_.size(); ++i) {
            std::int32_t s = slot_of_[std::size_t(pos_[i])];
            if (s < 0) continue;
            const TreeNode& node = nodes_[std::size_t(level[std::size_t(s)])];
            if (node.is_leaf()) continue;
            double v = data_.values[i * cols + node.feature];
            bool go_left = std::isnan(v) ? node.default_left : v < node.threshold;
            pos_[i] = go_left ? node.left : node.right;
        }
    }

    Tree to_preorder() const {
        Tree tree;
        tree.nodes.reserve(nodes_.size());
        std::function<std::int32_t(std::int32_t)> emit = [&](std::int32_t bfs) -> std::int32_t {
            std::int32_t idx = std::int32_t(tree.nodes.size());
            tree.nodes.push_back(nodes_[std::size_t(bfs)]);
            const TreeNode& src = nodes_[std::size_t(bfs)];
            if (!src.is_leaf()) {
                std::int32_t l = emit(src.left);
                std::int32_t r = emit(src.right);
                tree.nodes[std::size_t(idx)].left = l;
                tree.nodes[std::size_t(idx)].right = r;
            }
            return idx;
        };
        emit(0);
        return tree;
    }

    const FeatureMatrix& data_;
    const std::vector<std::vector<std::int32_t>>& sorted_;
    const std::vector<std::vector<std::int32_t>>& missing_;
    const TrainConfig& cfg_;
    std::vector<TreeNode> nodes_;
    std::vector<std::int32_t> pos_;
    std::vector<std::int32_t> slot_of_;
    std::vector<double> leaf_values_;
};

void check_matrix(const FeatureMatrix& m, const char* what) {
    if (m.labels.size() != m.rows() || (m.cols && m.values.size() % m.cols != 0))
        throw DimensionMismatch(std::string(what) + ": values and labels disagree in shape");
    for (std::size_t i = 0; i < m.values.size(); ++i)
        if (std::isinf(m.values[i]))
            throw NonFiniteFeature(std::string(what) + ": infinite value at row " + std::to_string(i / m.cols) +
                                   ", column " + std::to_string(i % m.cols));
}

} // namespace

TrainResult train(const FeatureMatrix& train_set, const FeatureMatrix& valid_set, const TrainConfig& config,
                  std::vector<std::string> feature_names) {
    config.validate();
    const std::size_t n = train_set.rows(), cols = train_set.cols;
    if (cols == 0 || cols > std::numeric_limits<std::uint16_t>::max())
        throw DimensionMismatch("unsupported feature count " + std::to_string(cols));
    check_matrix(train_set, "training set");
    if (valid_set.rows() > 0) {
        if (valid_set.cols != cols) throw DimensionMismatch("validation set width differs from training set");
        check_matrix(valid_set, "validation set");
    }
    if (feature_names.empty()) {
        if (cols == kFeatureCount)
            for (auto name : visnow::feature_names()) feature_names.emplace_back(name);
        else
            for (std::size_t f = 0; f < cols; ++f) feature_names.push_back("f" + std::to_string(f));
    }
    if (feature_names.size() != cols) throw DimensionMismatch("feature name count differs from matrix width");

    std::span<const int> labels(train_set.labels);
    double spw_auto = compute_scale_pos_weight(labels);
    double spw = config.scale_pos_weight.value_or(spw_auto);

    TrainResult result;
    Model& model = result.model;
    model.feature_names = std::move(feature_names);
    model.config = config;
    model.config.scale_pos_weight = spw;

    std::vector<double> y(n), w(n);
    double wpos = 0.0, wneg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = labels[i] ? 1.0 : 0.0;
        w[i] = labels[i] ? spw : 1.0;
        (labels[i] ? wpos : wneg) += w[i];
    }
    model.base_score = std::log(wpos / wneg);

    std::vector<std::vector<std::int32_t>> sorted(cols), missing(cols);
    for (std::size_t f = 0; f < cols; ++f) {
        for (std::size_t i = 0; i < n; ++i)
            (std::isnan(train_set.values[i * cols + f]) ? missing[f] : sorted[f]).push_back(std::int32_t(i));
        std::stable_sort(sorted[f].begin(), sorted[f].end(), [&](std::int32_t a, std::int32_t b) {
            return train_set.values[std::size_t(a) * cols + f] < train_set.values[std::size_t(b) * cols + f];
        });
    }

    const std::size_t nv = valid_set.rows();
    std::vector<double> margin(n, model.base_score), vmargin(nv, model.base_score);
    bool track_auc = nv > 0;
    if (track_auc) {
        std::size_t vpos = 0;
        for (int l : valid_set.labels) vpos += l != 0;
        track_auc = vpos > 0 && vpos < nv;
    }
    auto record = [&] {
        RoundStats rs;
        rs.train_loss = logistic_loss(margin, labels, spw);
        if (track_auc) rs.valid_auc = auc(vmargin, valid_set.labels);
        result.history.push_back(rs);
    };
    record();

    std::vector<double> p(n), g(n), h(n);
    TreeBuilder builder(train_set, sorted, missing, model.config);
    for (int round = 0; round < config.n_trees; ++round) {
        for (std::size_t i = 0; i < n; ++i) p[i] = sigmoid(margin[i]);
        simd::grad_hess(p, y, w, g, h);
        Tree tree = builder.build(g, h);
        simd::gather_add(margin, builder.leaf_values(), builder.position());
        for (std::size_t i = 0; i < nv; ++i) vmargin[i] += tree.predict(valid_set.row(i));
        model.trees.push_back(std::move(tree));
        record();
    }
    return result;
}

double predict_margin(const Model& model, std::span<const double> x) {
    if (x.size() != model.n_features())
        throw DimensionMismatch("expected " + std::to_string(model.n_features()) + " features, got " +
                                std::to_string(x.size()));
    double m = model.base_score;
    for (const Tree& t : model.trees) m += t.predict(x);
    return m;
}

double predict_proba(const Model& model, std::span<const double> x) { return sigmoid(predict_margin(model, x)); }

double predict_proba(const Model& model, const FeatureVector& x) { return predict_proba(model, x.values()); }

std::vector<double> predict_proba(const Model& model, const FeatureMatrix& data) {
    if (data.cols != model.n_features()) throw DimensionMismatch("matrix width differs from model");
    std::vector<double> out(data.rows());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = predict_proba(model, data.row(i));
    return out;
}

} // namespace visnow
