#include "infill/jsonl.h"

#include <istream>
#include <ostream>

#include <json.hpp>

namespace infill {

namespace {

using Json = nlohmann::ordered_json;

Json cellsToJson(const std::vector<Cell>& cells) {
  Json out = Json::array();
  for (const auto& [t, m] : cells) out.push_back({t, m});
  return out;
}

std::vector<Cell> readCells(const Json& j, const char* field) {
  std::vector<Cell> out;
  for (const Json& c : j.at(field)) {
    if (!c.is_array() || c.size() != 2) {
      throw std::invalid_argument(std::string(field) + " entries must be [track, measure]");
    }
    out.push_back({c[0].get<int>(), c[1].get<int>()});
  }
  return out;
}

std::vector<int> readIds(const Json& j, const char* field) {
  const Json& arr = j.at(field);
  if (!arr.is_array()) throw std::invalid_argument(std::string(field) + " must be an array");
  std::vector<int> out;
  out.reserve(arr.size());
  for (const Json& v : arr) {
    if (!v.is_number_integer()) throw std::invalid_argument(std::string(field) + " must hold integers");
    out.push_back(v.get<int>());
  }
  return out;
}

Json parseLine(const std::string& line, std::size_t line_no) {
  try {
    Json j = Json::parse(line);
    if (!j.is_object()) throw JsonlError("expected a JSON object", line_no);
    return j;
  } catch (const Json::exception& e) {
    throw JsonlError(e.what(), line_no);
  }
}

template <typename T, typename Fn>
std::vector<T> readLines(std::istream& in, Fn&& parse) {
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = parseLine(line, line_no);
    try {
      out.push_back(parse(j));
    } catch (const JsonlError&) {
      throw;
    } catch (const std::exception& e) {
      throw JsonlError(e.what(), line_no);
    }
  }
  return out;
}

Json exampleJson(const InfillExample& ex) {
  Json j;
  j["id"] = ex.id;
  j["task"] = std::string(taskName(ex.task));
  j["source"] = ex.source;
  j["slice"] = {{"start", ex.slice_start}, {"measures", ex.slice_measures}};
  j["seed"] = ex.seed;
  j["prompt_ids"] = ex.prompt_ids;
  j["target_ids"] = ex.target_ids;
  j["prompt_text"] = ex.promptText();
  Json truth = Json::array();
  for (const auto& n : ex.ground_truth) truth.push_back({n.track, n.measure, n.pitch, n.onset, n.duration});
  j["ground_truth"] = std::move(truth);
  j["masked"] = cellsToJson(ex.masked);
  j["auto_credited"] = cellsToJson(ex.auto_credited);
  return j;
}

InfillExample parseExample(const Json& j) {
  InfillExample ex;
  ex.id = j.at("id").get<std::string>();
  const auto task = parseTask(j.at("task").get<std::string>());
  if (!task) throw std::invalid_argument("unknown task " + j.at("task").dump());
  ex.task = *task;
  ex.source = j.at("source").get<std::string>();
  ex.slice_start = j.at("slice").at("start").get<int>();
  ex.slice_measures = j.at("slice").at("measures").get<int>();
  ex.seed = j.at("seed").get<std::uint64_t>();
  ex.prompt_ids = readIds(j, "prompt_ids");
  ex.target_ids = readIds(j, "target_ids");
  for (const Json& n : j.at("ground_truth")) {
    if (!n.is_array() || n.size() != 5) {
      throw std::invalid_argument("ground_truth entries must be [track, measure, pitch, onset, duration]");
    }
    ex.ground_truth.push_back({n[0].get<int>(), n[1].get<int>(), n[2].get<int>(), n[3].get<Tick>(), n[4].get<int>()});
  }
  ex.masked = readCells(j, "masked");
  ex.auto_credited = readCells(j, "auto_credited");
  if (j.contains("prompt_text") && j.at("prompt_text").get<std::string>() != ex.promptText()) {
    throw std::invalid_argument("prompt_text does not match prompt_ids");
  }
  return ex;
}

}  // namespace

std::string exampleToJson(const InfillExample& example) { return exampleJson(example).dump(); }

InfillExample exampleFromJson(const std::string& line) {
  const Json j = parseLine(line, 1);
  try {
    return parseExample(j);
  } catch (const JsonlError&) {
    throw;
  } catch (const std::exception& e) {
    throw JsonlError(e.what(), 1);
  }
}

void writeExamples(std::ostream& out, const std::vector<InfillExample>& examples) {
  for (const auto& ex : examples) out << exampleToJson(ex) << '\n';
}

std::vector<InfillExample> readExamples(std::istream& in) { return readLines<InfillExample>(in, parseExample); }

void writeOutputs(std::ostream& out, const std::vector<ModelOutput>& outputs) {
  for (const auto& o : outputs) {
    Json j;
    j["id"] = o.id;
    j["target_ids"] = o.target_ids;
    out << j.dump() << '\n';
  }
}

std::vector<ModelOutput> readOutputs(std::istream& in) {
  return readLines<ModelOutput>(in, [](const Json& j) {
    return ModelOutput{j.at("id").get<std::string>(), readIds(j, "target_ids")};
  });
}

std::string complyRecordToJson(const ComplyRecord& record) {
  Json j;
  j["id"] = record.id;
  j["prompt_ids"] = record.prompt_ids;
  j["target_ids"] = record.target_ids;
  if (record.probes) {
    Json probes = Json::array();
    for (const auto& p : *record.probes) {
      Json pj;
      pj["control"] = p.control.text();
      pj["track"] = p.track;
      pj["measure"] = p.measure ? Json(*p.measure) : Json(nullptr);
      pj["supplied"] = p.supplied;
      probes.push_back(std::move(pj));
    }
    j["probes"] = std::move(probes);
  }
  return j.dump();
}

std::vector<ComplyRecord> readComplyRecords(std::istream& in) {
  return readLines<ComplyRecord>(in, [](const Json& j) {
    ComplyRecord r;
    r.id = j.at("id").get<std::string>();
    r.prompt_ids = readIds(j, "prompt_ids");
    r.target_ids = readIds(j, "target_ids");
    if (j.contains("probes") && !j.at("probes").is_null()) {
      std::vector<ComplianceProbe> probes;
      for (const Json& pj : j.at("probes")) {
        ComplianceProbe p;
        p.control = parseControl(pj.at("control").get<std::string>());
        p.track = pj.at("track").get<int>();
        if (pj.contains("measure") && !pj.at("measure").is_null()) p.measure = pj.at("measure").get<int>();
        p.supplied = pj.value("supplied", true);
        probes.push_back(p);
      }
      r.probes = std::move(probes);
    }
    return r;
  });
}

std::string manifestToJson(const DatasetManifest& m) {
  Json j;
  j["task"] = std::string(taskName(m.task));
  j["seed"] = m.seed;
  j["requested"] = m.requested;
  j["examples"] = m.examples;
  j["files_total"] = m.files_total;
  j["files_used"] = m.files_used;
  j["masked_cells"] = m.masked_cells;
  j["auto_credited_cells"] = m.auto_credited_cells;
  j["auto_credited_fraction"] = m.autoCreditedFraction();
  j["corpus_fingerprint"] = m.corpus_fingerprint;
  j["vocabulary_size"] = vocabularySize();
  j["vocabulary_hash"] = vocabularyHash();
  Json skips = Json::object();
  for (const auto& [reason, count] : m.skip_reasons) skips[reason] = count;
  j["skip_reasons"] = std::move(skips);
  return j.dump(2) + "\n";
}

}  // namespace infill
