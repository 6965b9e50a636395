#ifndef BISECT_SERIALIZATION_HPP
#define BISECT_SERIALIZATION_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bisect/transitivity.hpp"

namespace bisect {

using Json = nlohmann::ordered_json;

/// Malformed document; the message starts with the JSON pointer of the field.
class SchemaError : public std::runtime_error
{
public:
  SchemaError(const std::string& path, const std::string& what)
    : std::runtime_error(path + ": " + what), path_(path)
  {
  }
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Doubles are written in shortest round-trip form, so every parameter
// survives a write/read cycle bit for bit.

Json to_json(const GroupoidInstance& g);
GroupoidInstance instance_from_json(const Json& j, const std::string& path = "/instance");

Json to_json(const Point& x);
Point point_from_json(const Json& j, const Chart& chart, const std::string& path);

/// {"kind": groupoid kind, "payload": flattened payload coordinates}
Json to_json(const Arrow& g);
Arrow arrow_from_json(const Json& j, const GroupoidInstance& g, const std::string& path);

Json to_json(const Section& s);
Section section_from_json(const Json& j, const GroupoidInstance& g, const std::string& path);

/// List of {"section", "time"}.
Json to_json(const Bisection& sigma);
Bisection chain_from_json(const Json& j, const GroupoidInstance& g, const std::string& path = "/chain");

Json to_json(const Region& r);
Region region_from_json(const Json& j, const Chart& chart, const std::string& path);

enum class SolveMode { general, symplectic };

std::string to_string(SolveMode m);

struct ProblemFile
{
  TransitivityProblem problem;
  SolveMode mode = SolveMode::general;
};

Json to_json(const ProblemFile& p);
ProblemFile problem_from_json(const Json& j);

/// runtime_ms is written as null unless given, so that certificates of the
/// same problem and seed are byte-identical.
Json to_json(const Certificate& c, std::optional<double> runtime_ms = std::nullopt);
/// The chain is read against `g`; a recorded instance that differs is an error.
Certificate certificate_from_json(const Json& j, const GroupoidInstance& g);

/// Parse errors carry the line and column of the offending byte.
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string dump(const Json& j);

} // namespace bisect

#endif // BISECT_SERIALIZATION_HPP
