#pragma once

#include <Eigen/Dense>

#include "csigan/errors.hpp"

namespace csigan {

// A feature map is a width x slices matrix: rows index the spatial position
// along the CSI vector, columns index the channel slice. Column-major Eigen
// storage therefore matches the stacked-per-slice vector layout
// [slice_0 | slice_1 | ...] used by the model equations.
using FeatureMap = Eigen::MatrixXd;

// Batched feature maps stack samples along the rows: a batch of B maps of
// width W is a (B*W) x slices matrix whose row block [n*W, (n+1)*W) is
// sample n. A batch of plain vectors (dense-layer activations) is instead a
// dim x B matrix, one sample per column. The two layouts share memory for
// single-slice maps, which is what makes the generator/discriminator
// boundary (120-channel samples) a free reinterpretation.

inline int conv_output_width(int in_width, int taps, int stride = 1) {
    require(stride >= 1, "conv: stride must be >= 1");
    require(in_width >= taps, "conv: input width smaller than kernel");
    require((in_width - taps) % stride == 0, "conv: width/stride mismatch");
    return (in_width - taps) / stride + 1;
}

inline int deconv_output_width(int in_width, int taps, int stride = 1, int crop = 0) {
    require(stride >= 1, "deconv: stride must be >= 1");
    require(in_width >= 1, "deconv: input width must be >= 1");
    require(crop >= 0, "deconv: crop must be >= 0");
    const int full = stride * (in_width - 1) + taps;
    require(full - 2 * crop >= 1, "deconv: crop larger than output");
    return full - 2 * crop;
}

// Columns-of-samples (dim x B) <-> batched single-slice map ((B*dim) x 1).
// Both views address the same column-major memory; these helpers copy
// explicitly to keep ownership simple.
inline Eigen::MatrixXd columns_to_map(const Eigen::MatrixXd& cols) {
    return Eigen::Map<const Eigen::MatrixXd>(cols.data(), cols.size(), 1);
}

inline Eigen::MatrixXd map_to_columns(const Eigen::MatrixXd& map, Eigen::Index width) {
    require(map.cols() == 1 && map.rows() % width == 0,
            "map_to_columns: not a single-slice batched map");
    return Eigen::Map<const Eigen::MatrixXd>(map.data(), width, map.rows() / width);
}

inline bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace csigan
