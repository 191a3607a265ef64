#include "kml/config.hpp"

#include <charconv>
#include <cstdlib>

#include "kml/errors.hpp"

namespace kml {

std::string config_hash(const json& config) {
    // nlohmann objects are ordered maps, so dump() is canonical.
    const std::string text = config.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    for (int i = 15; i >= 0; --i) {
        buf[i] = "0123456789abcdef"[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

namespace {

bool type_matches(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer();
    if (type == "boolean") return value.is_boolean();
    throw config_error("schema: unknown type '" + type + "'");
}

void validate_node(const json& value, const json& schema, const std::string& path) {
    if (schema.contains("type")) {
        const std::string type = schema.at("type").get<std::string>();
        if (!type_matches(value, type))
            throw config_error("config: '" + path + "' must be of type " + type);
    }
    if (schema.contains("enum")) {
        bool found = false;
        for (const auto& candidate : schema.at("enum"))
            if (candidate == value) found = true;
        if (!found) throw config_error("config: '" + path + "' not among allowed values");
    }
    if (value.is_number()) {
        if (schema.contains("minimum") && value.get<double>() < schema.at("minimum").get<double>())
            throw config_error("config: '" + path + "' below minimum");
        if (schema.contains("maximum") && value.get<double>() > schema.at("maximum").get<double>())
            throw config_error("config: '" + path + "' above maximum");
    }
    if (value.is_object()) {
        const json props = schema.value("properties", json::object());
        const bool allow_extra = schema.value("additionalProperties", false);
        for (const auto& [key, sub] : value.items()) {
            if (props.contains(key)) {
                validate_node(sub, props.at(key), path.empty() ? key : path + "." + key);
            } else if (!allow_extra) {
                throw config_error("config: unknown key '" +
                                   (path.empty() ? key : path + "." + key) + "'");
            }
        }
        if (schema.contains("required"))
            for (const auto& req : schema.at("required")) {
                const std::string key = req.get<std::string>();
                if (!value.contains(key))
                    throw config_error("config: missing required key '" +
                                       (path.empty() ? key : path + "." + key) + "'");
            }
        if (schema.contains("minProperties") &&
            value.size() < schema.at("minProperties").get<std::size_t>())
            throw config_error("config: '" + path + "' has too few entries");
    }
    if (value.is_array()) {
        if (schema.contains("minItems") && value.size() < schema.at("minItems").get<std::size_t>())
            throw config_error("config: '" + path + "' must be non-empty");
        if (schema.contains("items"))
            for (std::size_t i = 0; i < value.size(); ++i)
                validate_node(value[i], schema.at("items"), path + "[" + std::to_string(i) + "]");
    }
}

} // namespace

void validate_config(const json& config, const json& schema) {
    validate_node(config, schema, "");
}

Tolerances Tolerances::from_config(const json& config) {
    Tolerances tol;
    if (config.contains("tolerances")) {
        const json& t = config.at("tolerances");
        tol.exact_mirror = t.value("exact_mirror", tol.exact_mirror);
        tol.quadrature = t.value("quadrature", tol.quadrature);
        tol.mc_sigmas = t.value("mc_sigmas", tol.mc_sigmas);
    }
    tol.scale = env_scale();
    return tol;
}

double Tolerances::env_scale() {
    const char* raw = std::getenv("KML_TOLERANCE_SCALE");
    if (raw == nullptr || *raw == '\0') return 1.0;
    const std::string s(raw);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !(value > 0.0))
        throw config_error("KML_TOLERANCE_SCALE: not a positive number: '" + s + "'");
    return value;
}

} // namespace kml
