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

#include "apkscan/manifest.hpp"

#include <charconv>

#include "apkscan/error.hpp"

namespace apkscan {
namespace {

constexpr int kProviderExportDefaultFlipSdk = 17;

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

class ModelBuilder {
 public:
  ManifestModel build(const AxmlDocument& doc) {
    const AxmlElement& root = doc.root;
    if (root.name != "manifest") {
      throw Error(ErrorCode::kNotAManifest,
                  "root element is <" + root.name + ">, expected <manifest>");
    }
    const AxmlAttribute* package = root.attribute("", "package");
    if (!package || string_value(*package).empty()) {
      throw Error(ErrorCode::kMissingPackageName,
                  "<manifest> has no package attribute");
    }
    model_.package_name = string_value(*package);

    for (const AxmlElement& child : root.children) {
      if (child.name == "uses-sdk") {
        model_.min_sdk = sdk_level(child, "minSdkVersion");
        model_.target_sdk = sdk_level(child, "targetSdkVersion");
      } else if (child.name == "permission") {
        add_permission(child);
      } else if (child.name == "application") {
        add_application(child);
      }
    }
    return std::move(model_);
  }

 private:
  static std::string string_value(const AxmlAttribute& attr) {
    if (attr.value.type() == ValueType::kString) return attr.value.string;
    if (attr.raw_value) return *attr.raw_value;
    if (attr.value.is_int()) return std::to_string(attr.value.data);
    return {};
  }

  void warn(std::string message) { model_.warnings.push_back(std::move(message)); }

  TriState tri_state(const AxmlElement& element, std::string_view name,
                     std::string_view where) {
    const AxmlAttribute* attr = element.android_attribute(name);
    if (!attr) return TriState::kUnset;
    switch (attr->value.type()) {
      case ValueType::kBoolean:
      case ValueType::kIntDec:
      case ValueType::kIntHex:
        return attr->value.data != 0 ? TriState::kTrue : TriState::kFalse;
      case ValueType::kString:
        if (attr->value.string == "true") return TriState::kTrue;
        if (attr->value.string == "false") return TriState::kFalse;
        break;
      default:
        break;
    }
    warn(std::string(where) + "@android:" + std::string(name) +
         " is not a literal boolean (type 0x" +
         std::to_string(attr->value.data_type) + "); treated as unset");
    return TriState::kUnset;
  }

  std::optional<int> sdk_level(const AxmlElement& uses_sdk,
                               std::string_view name) {
    const AxmlAttribute* attr = uses_sdk.android_attribute(name);
    if (!attr) return std::nullopt;
    if (attr->value.is_int()) return static_cast<int>(attr->value.data);
    if (auto parsed = parse_int(string_value(*attr))) return parsed;
    warn("uses-sdk@android:" + std::string(name) + " is not numeric; ignored");
    return std::nullopt;
  }

  void add_permission(const AxmlElement& element) {
    PermissionDecl decl;
    if (const auto* name = element.android_attribute("name")) {
      decl.name = string_value(*name);
    }
    if (const auto* level = element.android_attribute("protectionLevel")) {
      decl.protection_level = protection_level(*level, decl.name);
    }
    model_.declared_permissions.push_back(std::move(decl));
  }

  ProtectionLevel protection_level(const AxmlAttribute& attr,
                                   std::string_view permission) {
    if (attr.value.is_int()) {
      // Low nibble is the base level; higher bits are modifier flags.
      switch (attr.value.data & 0xf) {
        case 0: return ProtectionLevel::kNormal;
        case 1: return ProtectionLevel::kDangerous;
        case 2: return ProtectionLevel::kSignature;
        case 3: return ProtectionLevel::kSignatureOrSystem;
        default: break;
      }
    } else {
      const std::string text = string_value(attr);
      const std::string_view base =
          std::string_view(text).substr(0, text.find('|'));
      if (base == "normal") return ProtectionLevel::kNormal;
      if (base == "dangerous") return ProtectionLevel::kDangerous;
      if (base == "signature") return ProtectionLevel::kSignature;
      if (base == "signatureOrSystem") return ProtectionLevel::kSignatureOrSystem;
    }
    warn("permission '" + std::string(permission) +
         "' has an unrecognised protectionLevel; treated as unset");
    return ProtectionLevel::kUnset;
  }

  void add_application(const AxmlElement& app) {
    model_.application.allow_backup = tri_state(app, "allowBackup", "application");
    model_.application.debuggable = tri_state(app, "debuggable", "application");
    for (const AxmlElement& child : app.children) {
      std::optional<ComponentKind> kind;
      if (child.name == "activity" || child.name == "activity-alias") {
        kind = ComponentKind::kActivity;
      } else if (child.name == "service") {
        kind = ComponentKind::kService;
      } else if (child.name == "receiver") {
        kind = ComponentKind::kReceiver;
      } else if (child.name == "provider") {
        kind = ComponentKind::kProvider;
      }
      if (kind) add_component(*kind, child);
    }
  }

  void add_component(ComponentKind kind, const AxmlElement& element) {
    ComponentDecl decl;
    decl.kind = kind;
    if (const auto* name = element.android_attribute("name")) {
      decl.name = string_value(*name);
    }
    if (decl.name.empty()) {
      warn("<" + element.name + "> without android:name skipped");
      return;
    }
    decl.exported = tri_state(element, "exported", element.name + "[" + decl.name + "]");
    if (const auto* permission = element.android_attribute("permission")) {
      decl.permission = string_value(*permission);
    }
    for (const AxmlElement& child : element.children) {
      if (child.name != "intent-filter") continue;
      IntentFilterDecl filter;
      for (const AxmlElement& item : child.children) {
        if (item.name == "action" || item.name == "category") {
          const auto* name = item.android_attribute("name");
          auto& list = item.name == "action" ? filter.actions : filter.categories;
          list.push_back(name ? string_value(*name) : std::string());
        } else if (item.name == "data") {
          std::string spec;
          for (const AxmlAttribute& attr : item.attributes) {
            if (!spec.empty()) spec += ';';
            spec += attr.name + "=" + string_value(attr);
          }
          filter.data_specs.push_back(std::move(spec));
        }
      }
      decl.intent_filters.push_back(std::move(filter));
    }
    model_.components.push_back(std::move(decl));
  }

  ManifestModel model_;
};

}  // namespace

std::string_view to_string(TriState value) {
  switch (value) {
    case TriState::kTrue: return "true";
    case TriState::kFalse: return "false";
    case TriState::kUnset: return "unset";
  }
  return "unset";
}

std::string_view to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::kActivity: return "activity";
    case ComponentKind::kService: return "service";
    case ComponentKind::kReceiver: return "receiver";
    case ComponentKind::kProvider: return "provider";
  }
  return "activity";
}

std::string_view to_string(ProtectionLevel level) {
  switch (level) {
    case ProtectionLevel::kNormal: return "normal";
    case ProtectionLevel::kDangerous: return "dangerous";
    case ProtectionLevel::kSignature: return "signature";
    case ProtectionLevel::kSignatureOrSystem: return "signatureOrSystem";
    case ProtectionLevel::kUnset: return "unset";
  }
  return "unset";
}

bool effective_exported(const ComponentDecl& component,
                        std::optional<int> target_sdk) {
  if (component.exported != TriState::kUnset) {
    return component.exported == TriState::kTrue;
  }
  if (component.kind == ComponentKind::kProvider) {
    return !target_sdk || *target_sdk < kProviderExportDefaultFlipSdk;
  }
  return !component.intent_filters.empty();
}

ManifestModel build_manifest_model(const AxmlDocument& doc) {
  return ModelBuilder().build(doc);
}

ManifestModel decode_manifest(std::span<const std::uint8_t> bytes) {
  return build_manifest_model(decode_axml(bytes));
}

}  // namespace apkscan
