// JSON Lines serialization of examples, model outputs and compliance
// records, plus the dataset manifest. Field order is fixed so identical
// inputs give byte-identical files.

#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "infill/compliance.h"
#include "infill/example_gen.h"

namespace infill {

class JsonlError : public std::runtime_error {
 public:
  JsonlError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  /// 1-based line number.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// One line without the trailing newline.
std::string exampleToJson(const InfillExample& example);
/// Throws JsonlError (line 1) on malformed input.
InfillExample exampleFromJson(const std::string& line);

void writeExamples(std::ostream& out, const std::vector<InfillExample>& examples);
/// Blank lines are skipped; errors carry the 1-based line number.
std::vector<InfillExample> readExamples(std::istream& in);

/// A target token-id sequence produced for an example.
struct ModelOutput {
  std::string id;
  std::vector<int> target_ids;
  friend bool operator==(const ModelOutput&, const ModelOutput&) = default;
};

void writeOutputs(std::ostream& out, const std::vector<ModelOutput>& outputs);
std::vector<ModelOutput> readOutputs(std::istream& in);

/// A generated output with the prompt it answers and, optionally, explicit
/// probes to check.
struct ComplyRecord {
  std::string id;
  std::vector<int> prompt_ids;
  std::vector<int> target_ids;
  std::optional<std::vector<ComplianceProbe>> probes;
};

std::string complyRecordToJson(const ComplyRecord& record);
std::vector<ComplyRecord> readComplyRecords(std::istream& in);

/// Pretty-printed JSON object, trailing newline included.
std::string manifestToJson(const DatasetManifest& manifest);

}  // namespace infill
