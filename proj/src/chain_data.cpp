#include "rshock/chain_data.hpp"

#include <algorithm>

#include "rshock/common.hpp"

namespace rshock {

ChainData make_chain_data(const HorizonPanel& hpanel, const ScaleMatrix& scale,
                          std::vector<Eigen::Index> event_rows) {
    if (scale.col_var.size() != hpanel.cols()) {
        throw ValidationError("chain data: scale dimension mismatch");
    }
    std::sort(event_rows.begin(), event_rows.end());
    ChainData data;
    data.values = hpanel.values;
    data.col_var = scale.col_var;
    data.is_event.assign(static_cast<std::size_t>(hpanel.rows()), 0);
    for (Eigen::Index row : event_rows) {
        if (row < 0 || row >= hpanel.rows()) {
            throw ValidationError("chain data: event row out of range");
        }
        data.is_event[static_cast<std::size_t>(row)] = 1;
    }
    data.event_rows = std::move(event_rows);

    const Eigen::VectorXd inv_var = scale.col_var.cwiseInverse();
    data.qform_scaled.resize(hpanel.rows());
    data.qform_raw.resize(hpanel.rows());
    for (Eigen::Index r = 0; r < hpanel.rows(); ++r) {
        const auto row = data.values.row(r).transpose().array();
        data.qform_scaled[r] = (row.square() * inv_var.array()).sum();
        data.qform_raw[r] = row.square().sum();
    }
    return data;
}

}  // namespace rshock
