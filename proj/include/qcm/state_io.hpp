#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qcm/sphere.hpp"
#include "qcm/types.hpp"

namespace qcm {

/// Parses the state-file payload: a JSON array of [re, im] pairs, one per
/// level. Inputs whose norm differs from 1 by more than 1e-6 are rejected
/// unless `renormalize` is set; accepted states are returned exactly
/// normalized either way.
inline PureState state_from_json(const nlohmann::json& doc, bool renormalize = false) {
    if (!doc.is_array() || doc.empty())
        throw std::invalid_argument("state file: expected a non-empty JSON array");
    Vector amp(static_cast<Eigen::Index>(doc.size()));
    Eigen::Index idx = 0;
    for (const auto& entry : doc) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
            !entry[1].is_number())
            throw std::invalid_argument("state file: each amplitude must be a [re, im] pair");
        const double re = entry[0].get<double>();
        const double im = entry[1].get<double>();
        if (!std::isfinite(re) || !std::isfinite(im))
            throw std::invalid_argument("state file: non-finite amplitude");
        amp(idx++) = Complex(re, im);
    }
    const double norm = amp.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("state file: zero state");
    if (!renormalize && std::abs(norm - 1.0) > 1e-6)
        throw std::invalid_argument("state file: state is not normalized (|norm-1| > 1e-6)");
    return PureState::normalized(amp);
}

inline PureState load_state(const std::string& path, bool renormalize = false) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("state file: cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("state file: invalid JSON: ") + e.what());
    }
    return state_from_json(doc, renormalize);
}

/// Serializes amplitudes back to the state-file form.
inline nlohmann::json amplitudes_to_json(const Vector& amp) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index j = 0; j < amp.size(); ++j)
        out.push_back({amp(j).real(), amp(j).imag()});
    return out;
}

}  // namespace qcm
