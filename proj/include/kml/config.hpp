#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace kml {

using json = nlohmann::json;

/// FNV-1a over the canonical (sorted-key) serialization; stable under key
/// reordering of the source document.
std::string config_hash(const json& config);

/// Structural validation against the embedded schema subset: type, required,
/// properties, additionalProperties, items, enum, minimum/maximum. Unknown
/// keys are rejected (strict mode). Throws config_error with a path message.
void validate_config(const json& config, const json& schema);

/// Central tolerance block. Defaults: 1e-12 exact-mirror comparisons, 1e-8
/// quadrature slack, 3-sigma Monte Carlo margins. `scale` multiplies every
/// tolerance; KML_TOLERANCE_SCALE overrides it for stress runs.
struct Tolerances {
    double exact_mirror = 1e-12;
    double quadrature = 1e-8;
    double mc_sigmas = 3.0;
    double scale = 1.0;

    double exact() const { return exact_mirror * scale; }
    double quad() const { return quadrature * scale; }
    double mc() const { return mc_sigmas; }

    static Tolerances from_config(const json& config);   // reads optional "tolerances"
    static double env_scale();                            // parses KML_TOLERANCE_SCALE
};

} // namespace kml
