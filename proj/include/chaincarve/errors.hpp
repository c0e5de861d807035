/*
   Copyright 2026 The chaincarve Authors

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

namespace chaincarve {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// transport / RPC

class TransportError : public Error {
  public:
    using Error::Error;
};

// HTTP 401/403; range fetches abort instead of retrying.
class AuthError : public TransportError {
  public:
    using TransportError::TransportError;
};

class RpcError : public Error {
  public:
    RpcError(int code, const std::string& message)
        : Error("rpc error " + std::to_string(code) + ": " + message), code_(code) {}
    int code() const noexcept { return code_; }

  private:
    int code_;
};

// Node returned null for the requested block (beyond head or pruned).
class MissingBlockError : public Error {
  public:
    using Error::Error;
};

// parsing / files

class FormatError : public Error {
  public:
    explicit FormatError(const std::string& msg) : Error(msg) {}
    FormatError(const std::string& msg, std::size_t line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    /// 1-based line number, 0 when the error is not line-addressed.
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_{0};
};

class IoError : public Error {
  public:
    using Error::Error;
};

class RegistryFormatError : public FormatError {
  public:
    using FormatError::FormatError;
};

// hex codec

class OddLengthError : public FormatError {
  public:
    OddLengthError() : FormatError("hex string has odd length") {}
};

class NonHexCharacterError : public FormatError {
  public:
    explicit NonHexCharacterError(std::size_t offset)
        : FormatError("non-hex character at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_;
};

// classifier

class EmptyTextError : public Error {
  public:
    EmptyTextError() : Error("text is empty") {}
};

class EmptyCorpusError : public Error {
  public:
    EmptyCorpusError() : Error("training corpus is empty") {}
};

class EmptySetError : public Error {
  public:
    EmptySetError() : Error("evaluation set is empty") {}
};

class MissingLabelError : public Error {
  public:
    using Error::Error;
};

class VersionMismatchError : public Error {
  public:
    using Error::Error;
};

class CorruptModelError : public Error {
  public:
    using Error::Error;
};

// reporting

class MissingTimestampError : public Error {
  public:
    using Error::Error;
};

}  // namespace chaincarve
