#pragma once

// JSON literals. Complex numbers are [re, im] pairs; matrices are arrays of
// rows. Element literals are {"descriptor": ..., "data": ...}.

#include "json.hpp"

#include "csip/module.hpp"

namespace csip {

using Json = nlohmann::json;

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json to_json(const AlgebraDescriptor& d);
AlgebraDescriptor algebra_descriptor_from_json(const Json& j);
Json to_json(const AlgebraElement& a);
AlgebraElement algebra_element_from_json(const Json& j);

Json to_json(const SipSpace& s);
SipSpace sip_space_from_json(const Json& j);

Json to_json(const IsoDescriptor& iso);
IsoDescriptor iso_from_json(const Json& j);

Json to_json(const ModuleDescriptor& d);
ModuleDescriptor module_descriptor_from_json(const Json& j);
Json to_json(const ModuleElement& x);
ModuleElement module_element_from_json(const Json& j);

Json to_json(const NumericPolicy& p);
NumericPolicy policy_from_json(const Json& j, NumericPolicy defaults = {});

const char* fault_name(FaultMode f);
FaultMode fault_from_name(const std::string& name);

}  // namespace csip
