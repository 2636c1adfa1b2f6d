#include "infill/compliance.h"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "infill/measurements.h"

namespace infill {

ComplianceResult checkCompliance(const MeasureSlice& output, const ControlScope& scope, const Control& control) {
  ComplianceResult r;
  r.control = control.text();
  const TrackExcerpt ex = excerptOfCells(output, scope.track, scope.measures);

  if (control.isBinned()) {
    r.target_bin = control.bin;
    try {
      const Measurement m = measure(control.measureKind(), ex);
      r.observed = m.value;
      r.observed_bin = m.bin;
      r.satisfied = m.bin == control.bin;
      r.satisfied_within_one_bin = std::abs(m.bin - control.bin) <= 1;
    } catch (const UndefinedMeasurement&) {
      r.reason = "undefined";
    }
    return r;
  }

  switch (control.kind) {
    case ControlKind::kDnoc: {
      bool all = !scope.measures.empty();
      for (int m : scope.measures) all = all && dnocFlag(output, scope.track, m);
      r.satisfied = all;
      break;
    }
    case ControlKind::kStrictRange:
    case ControlKind::kLooseRange:
      if (ex.notes.empty()) {
        r.reason = "undefined";
        break;
      }
      r.satisfied = control.kind == ControlKind::kStrictRange ? satisfiesStrictRange(ex.notes, control.range)
                                                              : satisfiesLooseRange(ex.notes, control.range);
      break;
    default: break;
  }
  r.satisfied_within_one_bin = r.satisfied;
  return r;
}

double SuccessRateRow::rate(bool supplied, int tolerance) const {
  const int n = supplied ? supplied_n : unconditioned_n;
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  const int hits = supplied ? (tolerance == 0 ? supplied_exact : supplied_within_one)
                            : (tolerance == 0 ? unconditioned_exact : unconditioned_within_one);
  return static_cast<double>(hits) / n;
}

std::vector<SuccessRateRow> successRateReport(const std::vector<ComplianceSample>& samples) {
  std::map<std::vector<int>, SuccessRateRow> rows;
  for (const auto& s : samples) {
    SuccessRateRow& row = rows[toIds(s.control.tokens())];
    row.control = s.control.text();
    const int exact = s.result.satisfied ? 1 : 0;
    const int within = s.result.satisfied_within_one_bin ? 1 : 0;
    if (s.supplied) {
      ++row.supplied_n;
      row.supplied_exact += exact;
      row.supplied_within_one += within;
    } else {
      ++row.unconditioned_n;
      row.unconditioned_exact += exact;
      row.unconditioned_within_one += within;
    }
  }
  std::vector<SuccessRateRow> out;
  out.reserve(rows.size());
  for (auto& [key, row] : rows) out.push_back(std::move(row));
  return out;
}

namespace {

// Empty field for an undefined rate.
std::string formatRate(double v) {
  if (std::isnan(v)) return "";
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

}  // namespace

std::string successRateCsv(const std::vector<SuccessRateRow>& rows, int tolerance) {
  std::string out = std::string(kSuccessRateCsvHeader) + "\n";
  for (const auto& r : rows) {
    out += r.control + "," + std::to_string(tolerance) + "," + std::to_string(r.supplied_n) + "," +
           formatRate(r.rate(true, tolerance)) + "," + std::to_string(r.unconditioned_n) + "," +
           formatRate(r.rate(false, tolerance)) + "," + formatRate(r.rate(true, 0)) + "," +
           formatRate(r.rate(true, 1)) + "," + formatRate(r.rate(false, 0)) + "," + formatRate(r.rate(false, 1)) +
           "\n";
  }
  return out;
}

MeasureSlice assembleOutput(const PromptLayout& layout, const DecodeResult& decoded) {
  MeasureSlice out = layout.context;
  for (std::size_t k = 0; k < decoded.cells.size() && k < layout.masked.size(); ++k) {
    const MaskedCellLayout& cell = layout.masked[k];
    for (const Note& n : decoded.cells[k]) out.addNote(cell.track, cell.measure, n);
  }
  return out;
}

namespace {

bool hasKind(const std::vector<Control>& controls, ControlKind kind) {
  for (const Control& c : controls) {
    if (c.kind == kind) return true;
  }
  return false;
}

void addUnconditioned(std::vector<ComplianceProbe>& out, const std::vector<Control>& supplied, ControlKind kind,
                      int track, std::optional<int> measure) {
  if (hasKind(supplied, kind)) return;
  if (kind == ControlKind::kDnoc) {
    out.push_back({{kind, 0, {}}, track, measure, false});
    return;
  }
  const Control probe{kind, 0, {}};
  for (int b = 0; b < binCount(probe.measureKind()); ++b) out.push_back({{kind, b, {}}, track, measure, false});
}

}  // namespace

std::vector<ComplianceProbe> derivedProbes(const PromptLayout& layout) {
  static constexpr ControlKind kCellKinds[] = {ControlKind::kHoriz, ControlKind::kVert, ControlKind::kPitchClasses,
                                               ControlKind::kDnoc};
  static constexpr ControlKind kTrackKinds[] = {ControlKind::kHoriz, ControlKind::kInterest,
                                                ControlKind::kVert,  ControlKind::kPitchClasses,
                                                ControlKind::kStep,  ControlKind::kLeap};
  std::vector<ComplianceProbe> out;
  std::set<int> masked_tracks;
  for (const MaskedCellLayout& cell : layout.masked) {
    masked_tracks.insert(cell.track);
    for (const Control& c : cell.controls) out.push_back({c, cell.track, cell.measure, true});
    for (ControlKind kind : kCellKinds) addUnconditioned(out, cell.controls, kind, cell.track, cell.measure);
  }
  static const std::vector<Control> kNone;
  for (int t : masked_tracks) {
    const auto it = layout.track_controls.find(t);
    const std::vector<Control>& controls = it == layout.track_controls.end() ? kNone : it->second;
    for (const Control& c : controls) out.push_back({c, t, std::nullopt, true});
    for (ControlKind kind : kTrackKinds) addUnconditioned(out, controls, kind, t, std::nullopt);
  }
  return out;
}

std::vector<ComplianceSample> checkOutput(const TokenSequence& prompt, const TokenSequence& target,
                                          const std::optional<std::vector<ComplianceProbe>>& probes) {
  const PromptLayout layout = parsePrompt(prompt);
  const MeasureSlice output = assembleOutput(layout, salvageTarget(target, layout.geometry()));
  const std::vector<ComplianceProbe> list = probes ? *probes : derivedProbes(layout);
  std::vector<ComplianceSample> out;
  out.reserve(list.size());
  for (const ComplianceProbe& p : list) {
    ControlScope scope{p.track, {}};
    if (p.measure) {
      scope.measures.push_back(*p.measure);
    } else {
      for (const MaskedCellLayout& cell : layout.masked) {
        if (cell.track == p.track) scope.measures.push_back(cell.measure);
      }
    }
    if (p.track < 0 || p.track >= output.numTracks()) {
      throw std::invalid_argument("probe track " + std::to_string(p.track) + " is not in the prompt");
    }
    for (int m : scope.measures) {
      if (m < 0 || m >= output.numMeasures()) {
        throw std::invalid_argument("probe measure " + std::to_string(m) + " is not in the prompt");
      }
    }
    out.push_back({p.control, p.supplied, checkCompliance(output, scope, p.control)});
  }
  return out;
}

}  // namespace infill
