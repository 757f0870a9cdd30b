#pragma once

#include <json.hpp>

#include "intentdisc/corpus.hpp"

namespace intentdisc {

void to_json(nlohmann::json& j, const Utterance& u);
void from_json(const nlohmann::json& j, Utterance& u);
void to_json(nlohmann::json& j, const FixedLabels& f);
void from_json(const nlohmann::json& j, FixedLabels& f);
void to_json(nlohmann::json& j, const SplitConfig& c);
/// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, SplitConfig& c);

}  // namespace intentdisc
