#pragma once

#include <string>

#include <json.hpp>

#include "cogsense/timeline.hpp"

namespace cogsense::detail {

/// Overlays `user` onto `base`, rejecting keys that `base` does not define.
inline void merge_checked(nlohmann::json& base, const nlohmann::json& user, const std::string& path) {
  if (!user.is_object()) {
    throw Error("section '" + (path.empty() ? std::string("<root>") : path) + "' must be an object");
  }
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw Error("unknown key '" + key + "'");
    nlohmann::json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_checked(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

}  // namespace cogsense::detail
