#include "infill/report.h"

#include <json.hpp>

#include "infill/measurements.h"

namespace infill {

namespace {

using Json = nlohmann::ordered_json;

Json measurementsJson(const TrackExcerpt& ex) {
  Json out = Json::object();
  for (MeasureKind kind : kAllMeasureKinds) {
    Json m;
    try {
      const Measurement v = measure(kind, ex);
      m["value"] = v.value;
      m["bin"] = v.bin;
      m["label"] = std::string(binLabel(kind, v.bin));
    } catch (const UndefinedMeasurement& e) {
      m["value"] = nullptr;
      m["bin"] = nullptr;
      m["label"] = nullptr;
      m["undefined"] = e.what();
    }
    out[std::string(kindName(kind))] = std::move(m);
  }
  return out;
}

Json rangeJson(const std::vector<Note>& notes) {
  if (notes.empty()) return nullptr;
  const PitchRange r = pitchRange(notes);
  return {{"low", r.low}, {"high", r.high}};
}

}  // namespace

std::string analyzeReport(const MeasureSlice& slice, bool per_measure, int indent) {
  const auto flags = dnocFlags(slice);
  Json root;
  root["measures"] = slice.numMeasures();
  root["measure_lengths"] = slice.measureLengths();
  Json tracks = Json::array();
  for (int t = 0; t < slice.numTracks(); ++t) {
    const TrackExcerpt ex = excerptOfTrack(slice, t);
    Json tj;
    tj["track"] = t;
    tj["instrument"] = slice.track(t).instrument;
    tj["name"] = slice.track(t).name;
    tj["notes"] = ex.notes.size();
    tj["measurements"] = measurementsJson(ex);
    tj["dnoc"] = flags[static_cast<std::size_t>(t)];
    tj["range"] = rangeJson(ex.notes);
    if (per_measure) {
      Json cells = Json::array();
      for (int m = 0; m < slice.numMeasures(); ++m) {
        const TrackExcerpt cell = excerptOfCell(slice, t, m);
        Json cj;
        cj["measure"] = m;
        cj["notes"] = cell.notes.size();
        cj["measurements"] = measurementsJson(cell);
        cj["dnoc"] = static_cast<bool>(flags[static_cast<std::size_t>(t)][static_cast<std::size_t>(m)]);
        cj["range"] = rangeJson(cell.notes);
        cells.push_back(std::move(cj));
      }
      tj["per_measure"] = std::move(cells);
    }
    tracks.push_back(std::move(tj));
  }
  root["tracks"] = std::move(tracks);
  return root.dump(indent) + "\n";
}

}  // namespace infill
