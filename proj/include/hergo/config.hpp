#pragma once

// JSON descriptors for systems, observables, subgroups and reports.
// Scalars: integers, ["sqrt", n], ["rat", p, q], ["quad", a, b, d], or a string in the expression
// grammar ("sqrt(2)/2", "1/3", "~0.123"); complex numbers: a number or [re, im].

#include <initializer_list>
#include <string>

#include "json.hpp"

#include "hergo/averages.hpp"
#include "hergo/seminorms.hpp"

namespace hergo {

using json = nlohmann::json;

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// throws ConfigError naming the first key outside `allowed`
void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where);

TaggedReal scalar_from_json(const json& j);
cplx complex_from_json(const json& j);
json complex_to_json(cplx z);
HardyExpr expr_from_json(const json& j);

System system_from_json(const json& j);
Observable observable_from_json(const json& j, const SpaceCPtr& sp);
SubgroupSpec subgroup_from_json(const json& j, int ell);
std::vector<SubgroupSpec> groups_from_json(const json& j, int ell);

json to_json(const SeminormValue& v);
json to_json(const AverageReport& r);  // without wall time
std::string report_csv(const AverageReport& r);

}  // namespace hergo
