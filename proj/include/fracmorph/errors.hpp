#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracmorph {

/// Base for every recoverable input error raised by the library.
/// The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an internal consistency check fails (exit code 2).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class MalformedCode : public Error {
public:
    MalformedCode(std::string text, std::size_t position, const std::string& reason)
        : Error("malformed AO code '" + text + "' at offset " + std::to_string(position) + ": " + reason),
          text_(std::move(text)), position_(position) {}

    const std::string& text() const noexcept { return text_; }
    std::size_t position() const noexcept { return position_; }

private:
    std::string text_;
    std::size_t position_;
};

class UnmappedCode : public Error {
public:
    explicit UnmappedCode(const std::string& code)
        : Error("AO code '" + code + "' has no morphology mapping"), code_(code) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class MappingConflict : public Error {
public:
    using Error::Error;
};

class MalformedLabelLine : public Error {
public:
    MalformedLabelLine(std::size_t line_no, const std::string& reason)
        : Error("malformed label line " + std::to_string(line_no) + ": " + reason), line_no_(line_no) {}
    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::size_t line_no_;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class MissingFile : public Error {
public:
    explicit MissingFile(const std::string& path) : Error("missing file: " + path), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class MetadataSchemaError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class ZeroCount : public Error {
public:
    using Error::Error;
};

class NoBonePixels : public Error {
public:
    using Error::Error;
};

class EmptyCrop : public Error {
public:
    using Error::Error;
};

class UnknownImageId : public Error {
public:
    explicit UnknownImageId(const std::string& id) : Error("unknown image id: " + id), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class UnknownClass : public Error {
public:
    explicit UnknownClass(const std::string& name) : Error("unknown class: " + name) {}
};

class ImageError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fracmorph
