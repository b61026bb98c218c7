#pragma once

#include "homqst/experiment.hpp"
#include "homqst/hom.hpp"
#include "homqst/quantum.hpp"
#include "homqst/tomography.hpp"

#include <json.hpp>

#include <string>

namespace homqst {

using Json = nlohmann::json;

// Matrix/vector schema: {dim, re: row-major array, im: row-major array}.
Json to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const Json& j);

Json to_json(const StateVector& sv);
StateVector state_from_json(const Json& j);

Json to_json(const HermitianMatrix& h);

Json to_json(const DipObservables& obs);

Json to_json(const SourceModel& s);
SourceModel source_from_json(const Json& j);

Json to_json(const ExperimentParams& p);
ExperimentParams params_from_json(const Json& j);

Json to_json(const AcquisitionConfig& c);
AcquisitionConfig acquisition_from_json(const Json& j);

Json to_json(const MeasurementRecord& r);
MeasurementRecord record_from_json(const Json& j);

Json to_json(const Dataset& ds);
Dataset dataset_from_json(const Json& j);

Json to_json(const ReconstructionResult& r);

/// Flat record table: setting,c_zero,c_far_1,c_far_2,depth,time
std::string dataset_to_csv(const Dataset& ds);

/// Dip scan table: delay_ps,expected_probability,sampled_counts
std::string dip_scan_csv(const std::vector<double>& delays,
                         const std::vector<double>& probabilities,
                         const std::vector<long long>& counts);

}  // namespace homqst
