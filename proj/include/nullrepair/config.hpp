#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nullrepair/core.hpp"

namespace nullrepair {

/// Project configuration, loaded from a JSON file. All keys are optional.
struct ProjectConfig {
  std::vector<std::string> nullableAnnotations = {
      "Nullable", "javax.annotation.Nullable", "org.jspecify.annotations.Nullable"};
  /// External methods whose return is treated as @Nullable. Entries match by
  /// simple method name ("get"), by "Type.method" ("Map.get"), or by longer
  /// dotted suffixes ("java.util.Map.get" matches receiver type "Map").
  std::vector<std::string> externalNullableMethods;
  /// Name the suppression-cast helper is invoked by, as it should appear in
  /// edited source.
  std::string castHelper = "NullRepairCasts.castToNonNull";
  /// Annotation spelling used when inserting @Nullable.
  std::string annotationSpelling = "Nullable";
  std::string sourceExtension = ".java";
  int exampleCount = 3;

  struct BackendConfig {
    std::string endpoint;  // e.g. http://localhost:8080/v1
    std::string model;
    std::string apiKeyEnv = "NULLREPAIR_API_KEY";
  } backend;

  /// Shell command for the external unit-test hook; empty means skipped.
  std::string testCommand;
  /// Optional strict-compile hook; empty means the built-in parse+resolve
  /// criterion is used.
  std::string compileCommand;

  bool isNullableAnnotation(const std::string& name) const {
    for (const auto& a : nullableAnnotations) {
      if (a == name) return true;
    }
    return false;
  }

  std::string castHelperSimpleName() const {
    auto dot = castHelper.rfind('.');
    return dot == std::string::npos ? castHelper : castHelper.substr(dot + 1);
  }

  bool externalMethodIsNullable(const std::string& methodName,
                                const std::string& receiverTypeName) const {
    for (const auto& entry : externalNullableMethods) {
      auto dot = entry.rfind('.');
      if (dot == std::string::npos) {
        if (entry == methodName) return true;
        continue;
      }
      std::string entryMethod = entry.substr(dot + 1);
      if (entryMethod != methodName) continue;
      std::string typePart = entry.substr(0, dot);
      auto tdot = typePart.rfind('.');
      std::string entryType = tdot == std::string::npos ? typePart : typePart.substr(tdot + 1);
      if (entryType == receiverTypeName) return true;
    }
    return false;
  }

  static ProjectConfig fromJson(const nlohmann::json& j) {
    ProjectConfig cfg;
    if (j.contains("nullable_annotations")) {
      cfg.nullableAnnotations = j["nullable_annotations"].get<std::vector<std::string>>();
    }
    if (j.contains("external_nullable_methods")) {
      cfg.externalNullableMethods = j["external_nullable_methods"].get<std::vector<std::string>>();
    }
    if (j.contains("cast_helper")) cfg.castHelper = j["cast_helper"].get<std::string>();
    if (j.contains("annotation_spelling")) {
      cfg.annotationSpelling = j["annotation_spelling"].get<std::string>();
    }
    if (j.contains("source_extension")) cfg.sourceExtension = j["source_extension"].get<std::string>();
    if (j.contains("example_count")) cfg.exampleCount = j["example_count"].get<int>();
    if (j.contains("backend")) {
      const auto& b = j["backend"];
      if (b.contains("endpoint")) cfg.backend.endpoint = b["endpoint"].get<std::string>();
      if (b.contains("model")) cfg.backend.model = b["model"].get<std::string>();
      if (b.contains("api_key_env")) cfg.backend.apiKeyEnv = b["api_key_env"].get<std::string>();
    }
    if (j.contains("test_command")) cfg.testCommand = j["test_command"].get<std::string>();
    if (j.contains("compile_command")) cfg.compileCommand = j["compile_command"].get<std::string>();
    return cfg;
  }

  static ProjectConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw ConfigError("invalid config file " + path + ": " + e.what());
    }
    return fromJson(j);
  }
};

}  // namespace nullrepair
