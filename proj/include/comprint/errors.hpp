#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace comprint {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Tensor/layer dimension disagreement.
class ShapeError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

// Operation called out of order (e.g. backward without a cached forward).
class StateError : public Error {
public:
    using Error::Error;
};

class NotAJpeg : public Error {
public:
    using Error::Error;
};

class MalformedStream : public Error {
public:
    MalformedStream(const std::string& what, std::size_t byte_offset)
        : Error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    std::size_t offset;
};

// Constant or otherwise information-free input where variation is required.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

// Siamese batch without a single same-history pair.
class DegenerateBatch : public Error {
public:
    using Error::Error;
};

// EM covariance collapse that regularization could not rescue.
class DegenerateClustering : public Error {
public:
    using Error::Error;
};

class TrainingDivergence : public Error {
public:
    using Error::Error;
};

}  // namespace comprint
