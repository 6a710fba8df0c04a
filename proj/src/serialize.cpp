#include "migrationlab/serialize.hpp"

namespace migrationlab {

nlohmann::ordered_json opt_result_json(const OptResult& opt) {
  nlohmann::ordered_json j;
  j["cost"] = opt.cost;
  j["trajectory"] = opt.trajectory;
  return j;
}

}  // namespace migrationlab
