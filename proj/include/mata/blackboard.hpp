#pragma once

#include <any>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mata/alloc.hpp"
#include "mata/core.hpp"

namespace mata {

/// Raised by the engine on contract breaks (unbound ports, allocator misuse).
/// It halts the run; it is never turned into a node status.
class EngineFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Shared key-value store behind the node ports. Writes create or overwrite
/// exactly one entry; reading a missing entry or the wrong type is a fault.
class Blackboard {
 public:
  template <typename T>
  void set(const std::string& key, T value) {
    entries_[key] = std::move(value);
  }

  template <typename T>
  const T& get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw EngineFault("blackboard has no entry '" + key + "'");
    const T* value = std::any_cast<T>(&it->second);
    if (!value) throw EngineFault("blackboard entry '" + key + "' has an unexpected type");
    return *value;
  }

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  std::vector<std::string> keys() const;

 private:
  std::map<std::string, std::any> entries_;
};

/// Key of the availability entry owned by `worker`.
std::string availability_key(const WorkerId& worker);

/// Value written to a RoleAllocator output port: every action allocated by
/// that node so far, with its worker.
struct StageAllocation {
  std::map<ActionId, WorkerId> worker_of;
};

/// Named port -> blackboard key remapping of a node.
class PortMap {
 public:
  PortMap() = default;
  PortMap(std::initializer_list<std::pair<const std::string, std::string>> bindings) : bindings_(bindings) {}

  void bind(const std::string& port, std::string key) { bindings_[port] = std::move(key); }
  /// Throws EngineFault when the port is unbound.
  const std::string& key(const std::string& port) const;
  bool bound(const std::string& port) const { return bindings_.count(port) != 0; }

 private:
  std::map<std::string, std::string> bindings_;
};

}  // namespace mata
