#include "mata/blackboard.hpp"

namespace mata {

std::vector<std::string> Blackboard::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [key, _] : entries_) out.push_back(key);
  return out;
}

std::string availability_key(const WorkerId& worker) { return "availability/" + worker; }

const std::string& PortMap::key(const std::string& port) const {
  auto it = bindings_.find(port);
  if (it == bindings_.end()) throw EngineFault("port '" + port + "' is not bound");
  return it->second;
}

}  // namespace mata
