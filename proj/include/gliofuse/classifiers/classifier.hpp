#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "gliofuse/classifiers/gbt.hpp"
#include "gliofuse/classifiers/random_forest.hpp"
#include "gliofuse/classifiers/svc.hpp"

namespace gliofuse::classifiers {

enum class ClassifierKind { Gbt, Svc, Rf };

inline std::string_view to_string(ClassifierKind k) noexcept
{
    switch (k) {
    case ClassifierKind::Gbt: return "gbt";
    case ClassifierKind::Svc: return "svc";
    case ClassifierKind::Rf: return "rf";
    }
    return "?";
}

inline ClassifierKind parse_classifier_kind(std::string_view s)
{
    if (s == "gbt") {
        return ClassifierKind::Gbt;
    }
    if (s == "svc") {
        return ClassifierKind::Svc;
    }
    if (s == "rf") {
        return ClassifierKind::Rf;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown classifier '" + std::string(s) + "'");
}

inline constexpr ClassifierKind kAllClassifiers[] = {ClassifierKind::Gbt, ClassifierKind::Svc, ClassifierKind::Rf};

using ClassifierConfig = std::variant<GbtConfig, SvcConfig, RfConfig>;
using Model = std::variant<GbtModel, SvcModel, RfModel>;

inline ClassifierKind kind_of(const ClassifierConfig& c) noexcept { return static_cast<ClassifierKind>(c.index()); }
inline ClassifierKind kind_of(const Model& m) noexcept { return static_cast<ClassifierKind>(m.index()); }

inline ClassifierConfig default_config(ClassifierKind k)
{
    switch (k) {
    case ClassifierKind::Gbt: return GbtConfig{};
    case ClassifierKind::Svc: return SvcConfig{};
    case ClassifierKind::Rf: return RfConfig{};
    }
    return GbtConfig{};
}

inline Model train(const ClassifierConfig& cfg, const TrainSet& data)
{
    return std::visit(
        [&](const auto& c) -> Model {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, GbtConfig>) {
                return train_gbt(data, c);
            } else if constexpr (std::is_same_v<C, SvcConfig>) {
                return train_svc(data, c);
            } else {
                return train_rf(data, c);
            }
        },
        cfg);
}

inline double predict_proba(const Model& m, std::span<const double> x)
{
    return std::visit([&](const auto& model) { return model.predict_proba(x); }, m);
}

inline int predict(const Model& m, std::span<const double> x)
{
    return label_from_proba(predict_proba(m, x));
}

inline nlohmann::json model_to_json(const Model& m)
{
    return std::visit([](const auto& model) { return to_json(model); }, m);
}

inline Model model_from_json(const nlohmann::json& j)
{
    const auto type = j.at("type").get<std::string>();
    switch (parse_classifier_kind(type)) {
    case ClassifierKind::Gbt: return gbt_from_json(j);
    case ClassifierKind::Svc: return svc_from_json(j);
    case ClassifierKind::Rf: return rf_from_json(j);
    }
    throw Error(ErrorCode::SchemaMismatch, "unknown model type " + type);
}

} // namespace gliofuse::classifiers
