#pragma once

#include <stdexcept>
#include <string>

namespace kml {

// Error taxonomy shared by all modules. Each category maps onto the closest
// standard exception so generic catch sites keep working.

struct size_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct shape_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct constraint_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct index_error : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct series_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct density_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace kml
