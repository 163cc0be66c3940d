#pragma once

#include <string>

#include <json.hpp>

#include "lft.hpp"
#include "linalg.hpp"
#include "network.hpp"
#include "ssv.hpp"
#include "synthesis.hpp"

namespace spinmu {

using json = nlohmann::json;

// complex matrices as nested arrays of [re, im] pairs
json mat_to_json(const Mat& m);
Mat mat_from_json(const json& j);

json spec_to_json(const SpinNetworkSpec& spec);
SpinNetworkSpec spec_from_json(const json& j);

json ensemble_to_json(const ControllerEnsemble& ens);
ControllerEnsemble ensemble_from_json(const json& j);

json synth_options_to_json(const SynthOptions& opts);
SynthOptions synth_options_from_json(const json& j);

json gmatrix_to_json(const GMatrix& g);
GMatrix gmatrix_from_json(const json& j);

json plant_to_json(const PlantMatrix& p);

json block_structure_to_json(const BlockStructure& s);
BlockStructure block_structure_from_json(const json& j);

json mu_result_to_json(const MuResult& r);

// file helpers; ConfigError on unreadable/unparsable input
json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

}  // namespace spinmu
