/*
 * Copyright 2026 The archsel Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ARCHSEL_CORE_ERRORS_HPP
#define ARCHSEL_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace archsel {

/// Base of every archsel exception. The CLI maps the hierarchy to exit
/// codes: ConfigError -> 2, DataError -> 3, anything else -> 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

// nn
class ShapeMismatchError : public Error {
public:
    explicit ShapeMismatchError(const std::string& what) : Error(what) {}
};

class LabelOutOfRangeError : public Error {
public:
    explicit LabelOutOfRangeError(const std::string& what) : Error(what) {}
};

// datasets
class BadMagicError : public DataError {
public:
    explicit BadMagicError(const std::string& what) : DataError(what) {}
};

class TruncatedFileError : public DataError {
public:
    explicit TruncatedFileError(const std::string& what) : DataError(what) {}
};

class DimensionMismatchError : public DataError {
public:
    explicit DimensionMismatchError(const std::string& what) : DataError(what) {}
};

class ParseError : public DataError {
public:
    ParseError(const std::string& what, long line)
        : DataError(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
    long line_number;
};

// archspace
class InfeasibleArchitectureError : public Error {
public:
    InfeasibleArchitectureError(const std::string& what, int block, std::vector<int> spatial_trace)
        : Error(what), block_index(block), trace(std::move(spatial_trace)) {}
    int block_index;          // offending conv block (0-based)
    std::vector<int> trace;   // spatial extents computed before the failure
};

class NotRepresentableError : public Error {
public:
    explicit NotRepresentableError(const std::string& what) : Error(what) {}
};

// bayesopt / harness
class SingularCovarianceError : public Error {
public:
    explicit SingularCovarianceError(const std::string& what) : Error(what) {}
};

class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& what) : Error(what) {}
};

} // namespace archsel

#endif
