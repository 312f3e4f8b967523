// Copyright 2026 The apkscan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef APKSCAN_MANIFEST_HPP_
#define APKSCAN_MANIFEST_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "apkscan/axml.hpp"

namespace apkscan {

enum class TriState { kUnset, kFalse, kTrue };

std::string_view to_string(TriState value);

enum class ComponentKind { kActivity, kService, kReceiver, kProvider };

std::string_view to_string(ComponentKind kind);

enum class ProtectionLevel {
  kNormal,
  kDangerous,
  kSignature,
  kSignatureOrSystem,
  kUnset,
};

std::string_view to_string(ProtectionLevel level);

struct IntentFilterDecl {
  std::vector<std::string> actions;
  std::vector<std::string> categories;
  // One entry per <data> element, rendered as "key=value;key=value".
  std::vector<std::string> data_specs;
};

struct ComponentDecl {
  ComponentKind kind = ComponentKind::kActivity;
  std::string name;
  TriState exported = TriState::kUnset;
  std::optional<std::string> permission;
  std::vector<IntentFilterDecl> intent_filters;
};

struct PermissionDecl {
  std::string name;
  ProtectionLevel protection_level = ProtectionLevel::kUnset;
};

struct ApplicationAttrs {
  TriState allow_backup = TriState::kUnset;
  TriState debuggable = TriState::kUnset;
};

struct ManifestModel {
  std::string package_name;
  std::optional<int> min_sdk;
  std::optional<int> target_sdk;
  ApplicationAttrs application;
  std::vector<ComponentDecl> components;
  std::vector<PermissionDecl> declared_permissions;
  // Non-fatal decode oddities (e.g. a boolean given as a resource reference).
  std::vector<std::string> warnings;
};

// Android's export defaulting: an explicit android:exported wins; otherwise
// activities, services and receivers are exported iff they declare an
// intent filter, and providers are exported when targeting API < 17. An
// unknown target SDK is treated as < 17.
bool effective_exported(const ComponentDecl& component,
                        std::optional<int> target_sdk);

ManifestModel build_manifest_model(const AxmlDocument& doc);

// decode_axml followed by build_manifest_model.
ManifestModel decode_manifest(std::span<const std::uint8_t> bytes);

}  // namespace apkscan

#endif  // APKSCAN_MANIFEST_HPP_
