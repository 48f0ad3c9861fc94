#pragma once

#include <stdexcept>
#include <string>

namespace ipp {

/// Invalid or inconsistent parameters. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failed linear algebra (non positive-definite Gram or innovation matrix).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raster or file ingestion problems: unreadable files, ragged rows, bad headers.
class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A metric is undefined for its inputs, e.g. an empty area of interest.
class MetricError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ipp
