#pragma once

#include "vibroad/detectors.hpp"

namespace vibroad {

// Isolation forest with explicit tree storage. The node layout is public so
// path-based explainers can walk the trees.
class IsolationForestDetector : public FittedDetector {
public:
    struct Node {
        int feature = -1;      // -1 marks an external node
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int size = 0;          // training points that reached this node
    };
    struct Tree {
        std::vector<Node> nodes; // nodes[0] is the root
    };

    IsolationForestDetector(const DetectorConfig& config, const FeatureTable& train);

    const std::vector<Tree>& trees() const { return trees_; }
    int height_limit() const { return height_limit_; }
    int subsample_size() const { return subsample_size_; }

    // Adjusted path length; optionally records the split features on the
    // path and the raw edge depth of the leaf reached.
    double path_length(const Tree& tree, const Eigen::RowVectorXd& x,
                       std::vector<int>* path_features = nullptr,
                       int* raw_depth = nullptr) const;

protected:
    double score_impl(const Eigen::RowVectorXd& x) const override;

private:
    std::vector<Tree> trees_;
    int height_limit_ = 0;
    int subsample_size_ = 0;
};

} // namespace vibroad
