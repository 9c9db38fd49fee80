#include "qoi/config.hpp"

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "qoi/error.hpp"
#include "qoi/text.hpp"

namespace qoi {

using nlohmann::json;

namespace {

double number_field(const json& j, const std::string& context) {
    if (!j.is_number()) raise(ErrorCode::config_error, context + " must be a number");
    return j.get<double>();
}

std::string string_field(const json& j, const std::string& context) {
    if (!j.is_string()) raise(ErrorCode::config_error, context + " must be a string");
    return j.get<std::string>();
}

std::map<std::string, double> weight_map(const json& j, const std::string& context) {
    if (!j.is_object()) raise(ErrorCode::config_error, context + " must be an object");
    std::map<std::string, double> weights;
    for (const auto& [key, value] : j.items())
        weights[fold_case(key)] = number_field(value, context + "." + key);
    return weights;
}

}  // namespace

AssessorConfig load_config(std::istream& in) {
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) raise(ErrorCode::parse_error, "config: invalid document");
    if (!j.is_object()) raise(ErrorCode::parse_error, "config: top level must be an object");

    AssessorConfig config = AssessorConfig::defaults();
    if (j.contains("classifier")) {
        const json& c = j["classifier"];
        if (!c.is_object()) raise(ErrorCode::config_error, "config: classifier must be an object");
        if (c.contains("mode"))
            config.mode = classifier_mode_from(string_field(c["mode"], "classifier.mode"));
        if (c.contains("ridge")) config.ridge = number_field(c["ridge"], "classifier.ridge");
    }
    if (j.contains("assessors")) {
        if (!j["assessors"].is_number_integer())
            raise(ErrorCode::config_error, "config: assessors must be an integer");
        config.assessors = j["assessors"].get<int>();
    }
    if (j.contains("relevance")) {
        const json& r = j["relevance"];
        if (!r.is_object()) raise(ErrorCode::config_error, "config: relevance must be an object");
        if (r.contains("mode"))
            config.relevance.mode = relevance_mode_from(string_field(r["mode"], "relevance.mode"));
        if (r.contains("gating"))
            config.relevance.gating =
                relevance_gating_from(string_field(r["gating"], "relevance.gating"));
        if (r.contains("weights"))
            config.relevance.weights = weight_map(r["weights"], "relevance.weights");
    }
    if (j.contains("utility")) {
        const json& u = j["utility"];
        if (!u.is_object()) raise(ErrorCode::config_error, "config: utility must be an object");
        if (u.contains("weights"))
            config.utility.type_weights = weight_map(u["weights"], "utility.weights");
        if (u.contains("fallback"))
            config.utility.fallback_type = string_field(u["fallback"], "utility.fallback");
        if (u.contains("rules")) {
            if (!u["rules"].is_array())
                raise(ErrorCode::config_error, "config: utility.rules must be an array");
            config.utility.rules.clear();
            for (const auto& entry : u["rules"]) {
                if (!entry.is_object() || !entry.contains("type") || !entry.contains("keywords"))
                    raise(ErrorCode::config_error,
                          "config: utility.rules entries need 'type' and 'keywords'");
                UtilityWeights::Rule rule;
                rule.type = string_field(entry["type"], "utility.rules.type");
                if (!entry["keywords"].is_array())
                    raise(ErrorCode::config_error, "config: utility.rules.keywords must be an array");
                for (const auto& keyword : entry["keywords"])
                    rule.keywords.push_back(string_field(keyword, "utility.rules.keywords"));
                config.utility.rules.push_back(std::move(rule));
            }
        }
    }
    if (j.contains("qoi_weights")) {
        const json& q = j["qoi_weights"];
        if (!q.is_object()) raise(ErrorCode::config_error, "config: qoi_weights must be an object");
        if (q.contains("correctness"))
            config.qoi.correctness = number_field(q["correctness"], "qoi_weights.correctness");
        if (q.contains("relevance"))
            config.qoi.relevance = number_field(q["relevance"], "qoi_weights.relevance");
        if (q.contains("utility"))
            config.qoi.utility = number_field(q["utility"], "qoi_weights.utility");
        if (q.contains("uniqueness"))
            config.qoi.uniqueness = number_field(q["uniqueness"], "qoi_weights.uniqueness");
    }
    if (j.contains("free_rider")) {
        const json& f = j["free_rider"];
        if (!f.is_object()) raise(ErrorCode::config_error, "config: free_rider must be an object");
        if (f.contains("volume_percentile"))
            config.thresholds.volume_percentile =
                number_field(f["volume_percentile"], "free_rider.volume_percentile");
        if (f.contains("qoi_percentile"))
            config.thresholds.qoi_percentile =
                number_field(f["qoi_percentile"], "free_rider.qoi_percentile");
    }
    config.validate();
    return config;
}

void save_config(std::ostream& out, const AssessorConfig& config) {
    config.validate();
    json j;
    j["classifier"] = {{"mode", to_string(config.mode)}, {"ridge", config.ridge}};
    j["assessors"] = config.assessors;
    json relevance_weights = json::object();
    for (const auto& [label, weight] : config.relevance.weights) relevance_weights[label] = weight;
    j["relevance"] = {{"mode", to_string(config.relevance.mode)},
                      {"gating", to_string(config.relevance.gating)},
                      {"weights", std::move(relevance_weights)}};
    json utility_weights = json::object();
    for (const auto& [type, weight] : config.utility.type_weights) utility_weights[type] = weight;
    json rules = json::array();
    for (const auto& rule : config.utility.rules)
        rules.push_back({{"type", rule.type}, {"keywords", rule.keywords}});
    j["utility"] = {{"weights", std::move(utility_weights)},
                    {"fallback", config.utility.fallback_type},
                    {"rules", std::move(rules)}};
    j["qoi_weights"] = {{"correctness", config.qoi.correctness},
                        {"relevance", config.qoi.relevance},
                        {"utility", config.qoi.utility},
                        {"uniqueness", config.qoi.uniqueness}};
    j["free_rider"] = {{"volume_percentile", config.thresholds.volume_percentile},
                       {"qoi_percentile", config.thresholds.qoi_percentile}};
    out << j.dump(2) << '\n';
}

void apply_env_overrides(AssessorConfig& config) {
    apply_env_overrides(config, [](const char* name) { return std::getenv(name); });
}

void apply_env_overrides(AssessorConfig& config, const EnvGetter& getenv_fn) {
    auto lookup = [&](const char* name) -> const char* { return getenv_fn(name); };
    auto number = [&](const char* name, double& target) {
        if (const char* value = lookup(name)) {
            try {
                target = parse_double(value);
            } catch (const QoiError&) {
                raise(ErrorCode::config_error, std::string(name) + ": not a number: " + value);
            }
        }
    };
    if (const char* value = lookup("QOI_MODE")) config.mode = classifier_mode_from(value);
    number("QOI_RIDGE", config.ridge);
    if (const char* value = lookup("QOI_ASSESSORS")) {
        double parsed = 0.0;
        number("QOI_ASSESSORS", parsed);
        config.assessors = static_cast<int>(parsed);
        if (parsed != config.assessors)
            raise(ErrorCode::config_error, std::string("QOI_ASSESSORS: not an integer: ") + value);
    }
    if (const char* value = lookup("QOI_RELEVANCE_MODE"))
        config.relevance.mode = relevance_mode_from(value);
    if (const char* value = lookup("QOI_RELEVANCE_GATING"))
        config.relevance.gating = relevance_gating_from(value);
    number("QOI_WEIGHT_CORRECTNESS", config.qoi.correctness);
    number("QOI_WEIGHT_RELEVANCE", config.qoi.relevance);
    number("QOI_WEIGHT_UTILITY", config.qoi.utility);
    number("QOI_WEIGHT_UNIQUENESS", config.qoi.uniqueness);
    number("QOI_FLAG_VOLUME_PCT", config.thresholds.volume_percentile);
    number("QOI_FLAG_QOI_PCT", config.thresholds.qoi_percentile);
    config.validate();
}

}  // namespace qoi
