#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rshock/panel.hpp"

namespace rshock {

// Immutable per-horizon inputs of one sampler chain, with cached row
// quadratic forms so the hot loops stay O(J) per day.
struct ChainData {
    Eigen::MatrixXd values;                // rows x M
    Eigen::VectorXd col_var;               // scaling diagonal (M)
    std::vector<Eigen::Index> event_rows;  // sorted rows that are ruling days
    std::vector<char> is_event;            // rows flags

    Eigen::VectorXd qform_scaled;  // y_t' Omega^{-1} y_t per row
    Eigen::VectorXd qform_raw;     // y_t' y_t per row

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index series() const { return values.cols(); }
    Eigen::Index n_events() const { return static_cast<Eigen::Index>(event_rows.size()); }
};

ChainData make_chain_data(const HorizonPanel& hpanel, const ScaleMatrix& scale,
                          std::vector<Eigen::Index> event_rows);

}  // namespace rshock
