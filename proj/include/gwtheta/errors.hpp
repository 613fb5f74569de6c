/*
   Copyright 2026 The gwtheta Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gwtheta {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model parameter (theta, r, or an environment value) violates its admissible row.
class RejectedParameter : public Error {
public:
    RejectedParameter(const std::string& constraint, std::size_t index, const std::string& detail)
        : Error(format(constraint, index, detail)), constraint_(constraint), index_(index) {}

    const std::string& constraint() const noexcept { return constraint_; }
    /// Generation index of the offending value; 0 for global parameters.
    std::size_t index() const noexcept { return index_; }

private:
    static std::string format(const std::string& constraint, std::size_t index,
                              const std::string& detail) {
        std::string msg = "rejected parameter: " + constraint;
        if (index > 0) msg += " (violated at n=" + std::to_string(index) + ")";
        if (!detail.empty()) msg += ": " + detail;
        return msg;
    }

    std::string constraint_;
    std::size_t index_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ConditioningOnNull : public Error {
public:
    using Error::Error;
};

class UndeterminedLimit : public Error {
public:
    using Error::Error;
};

class NoLimitLaw : public Error {
public:
    using Error::Error;
};

class ScenarioInfeasible : public Error {
public:
    using Error::Error;
};

/// A series coefficient came out negative beyond round-off.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace gwtheta
