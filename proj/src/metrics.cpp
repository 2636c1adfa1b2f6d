#include "infill/metrics.h"

#include <array>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace infill {

namespace {

using NoteKey = std::tuple<int, int, int, Tick, int>;

NoteKey keyOf(const GroundTruthNote& n, DurationPolicy policy) {
  return {n.track, n.measure, n.pitch, n.onset, policy == DurationPolicy::kMatch ? n.duration : 0};
}

double ratio(int num, int den) { return den == 0 ? 1.0 : static_cast<double>(num) / den; }

std::string formatDouble(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

// CSV field quoting for ids that may contain separators.
std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

NoteMatchReport notePrf(const std::vector<GroundTruthNote>& truth, const std::vector<GroundTruthNote>& predicted,
                        const std::vector<Cell>& auto_credited, DurationPolicy policy) {
  const std::set<Cell> credited(auto_credited.begin(), auto_credited.end());
  std::vector<GroundTruthNote> pred;
  for (const auto& n : predicted) {
    if (!credited.count({n.track, n.measure})) pred.push_back(n);
  }
  for (const auto& n : truth) {
    if (credited.count({n.track, n.measure})) pred.push_back(n);
  }

  std::map<NoteKey, int> available;
  for (const auto& n : truth) ++available[keyOf(n, policy)];
  NoteMatchReport r;
  r.truth_count = static_cast<int>(truth.size());
  r.predicted_count = static_cast<int>(pred.size());
  for (const auto& n : pred) {
    auto it = available.find(keyOf(n, policy));
    if (it != available.end() && it->second > 0) {
      --it->second;
      ++r.true_positives;
    }
  }
  r.precision = ratio(r.true_positives, r.predicted_count);
  r.recall = ratio(r.true_positives, r.truth_count);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

double pitchClassEntropy(const std::vector<GroundTruthNote>& notes) {
  if (notes.empty()) return 0.0;
  std::array<int, 12> hist{};
  for (const auto& n : notes) ++hist[static_cast<std::size_t>(n.pitch % 12)];
  double h = 0.0;
  const double total = static_cast<double>(notes.size());
  for (int count : hist) {
    if (count == 0) continue;
    const double p = count / total;
    h -= p * std::log2(p);
  }
  return h;
}

double pchEntropyDifference(const std::vector<GroundTruthNote>& truth, const std::vector<GroundTruthNote>& predicted) {
  return std::fabs(pitchClassEntropy(truth) - pitchClassEntropy(predicted)) / std::log2(12.0) * 100.0;
}

double grooveSimilarity(const std::vector<GroundTruthNote>& truth, const std::vector<GroundTruthNote>& predicted,
                        const std::vector<MaskedCellGeometry>& cells) {
  if (cells.empty()) return 100.0;
  auto onsets = [](const std::vector<GroundTruthNote>& notes) {
    std::map<Cell, std::set<Tick>> out;
    for (const auto& n : notes) out[{n.track, n.measure}].insert(n.onset);
    return out;
  };
  const auto a = onsets(truth);
  const auto b = onsets(predicted);
  static const std::set<Tick> kNone;
  double sum = 0.0;
  for (const auto& cell : cells) {
    const Cell key{cell.track, cell.measure};
    const auto ia = a.find(key);
    const auto ib = b.find(key);
    const std::set<Tick>& sa = ia == a.end() ? kNone : ia->second;
    const std::set<Tick>& sb = ib == b.end() ? kNone : ib->second;
    int hamming = 0;
    for (Tick t : sa) hamming += sb.count(t) ? 0 : 1;
    for (Tick t : sb) hamming += sa.count(t) ? 0 : 1;
    sum += 1.0 - static_cast<double>(hamming) / cell.length;
  }
  return sum / static_cast<double>(cells.size()) * 100.0;
}

std::vector<GroundTruthNote> predictedNotes(const InfillExample& example, const DecodeResult& decoded) {
  std::vector<GroundTruthNote> out;
  for (std::size_t k = 0; k < decoded.cells.size() && k < example.masked.size(); ++k) {
    const auto [t, m] = example.masked[k];
    for (const Note& n : decoded.cells[k]) out.push_back({t, m, n.pitch, n.onset, n.duration});
  }
  return out;
}

ExampleScore scoreOutput(const InfillExample& example, const std::vector<int>& output_ids, DurationPolicy policy) {
  ExampleScore s;
  s.id = example.id;
  s.task = std::string(taskName(example.task));
  const PromptLayout layout = parsePrompt(fromIds(example.prompt_ids));
  const MaskGeometry geometry = layout.geometry();

  std::vector<int> valid_ids;
  for (int id : output_ids) {
    if (id < 0 || id >= vocabularySize()) {
      s.salvaged = true;
      break;
    }
    valid_ids.push_back(id);
  }
  const DecodeResult decoded = salvageTarget(fromIds(valid_ids), geometry);
  s.complete = decoded.complete && !s.salvaged;
  s.salvaged = s.salvaged || decoded.error.has_value();

  std::vector<GroundTruthNote> predicted = predictedNotes(example, decoded);
  s.notes = notePrf(example.ground_truth, predicted, example.auto_credited, policy);

  std::vector<MaskedCellGeometry> cells = geometry.cells;
  const std::set<Cell> credited(example.auto_credited.begin(), example.auto_credited.end());
  for (const auto& [t, m] : example.auto_credited) {
    cells.push_back({t, m, layout.measure_lengths.at(static_cast<std::size_t>(m))});
  }
  for (const auto& n : example.ground_truth) {
    if (credited.count({n.track, n.measure})) predicted.push_back(n);
  }
  s.entropy_difference = pchEntropyDifference(example.ground_truth, predicted);
  s.groove_similarity = grooveSimilarity(example.ground_truth, predicted, cells);
  return s;
}

EvalReport EvalReport::of(std::vector<ExampleScore> scores) {
  EvalReport r;
  r.examples = std::move(scores);
  if (r.examples.empty()) return r;
  for (const auto& s : r.examples) {
    r.mean_precision += s.notes.precision * 100.0;
    r.mean_recall += s.notes.recall * 100.0;
    r.mean_f1 += s.notes.f1 * 100.0;
    r.mean_entropy_difference += s.entropy_difference;
    r.mean_groove_similarity += s.groove_similarity;
    r.incomplete_outputs += s.complete ? 0 : 1;
    r.salvaged_outputs += s.salvaged ? 1 : 0;
  }
  const double n = static_cast<double>(r.examples.size());
  r.mean_precision /= n;
  r.mean_recall /= n;
  r.mean_f1 /= n;
  r.mean_entropy_difference /= n;
  r.mean_groove_similarity /= n;
  return r;
}

std::string EvalReport::perExampleCsv() const {
  std::string out = std::string(kPerExampleCsvHeader) + "\n";
  for (const auto& s : examples) {
    out += csvField(s.id) + "," + s.task + "," + std::to_string(s.notes.true_positives) + "," +
           std::to_string(s.notes.predicted_count) + "," + std::to_string(s.notes.truth_count) + "," +
           formatDouble(s.notes.precision * 100.0) + "," + formatDouble(s.notes.recall * 100.0) + "," +
           formatDouble(s.notes.f1 * 100.0) + "," + formatDouble(s.entropy_difference) + "," +
           formatDouble(s.groove_similarity) + "," + (s.complete ? "1" : "0") + "," + (s.salvaged ? "1" : "0") +
           "\n";
  }
  return out;
}

std::string EvalReport::aggregateCsv() const {
  const std::string n = std::to_string(examples.size());
  std::string out = std::string(kAggregateCsvHeader) + "\n";
  out += "precision," + formatDouble(mean_precision) + "," + n + "\n";
  out += "recall," + formatDouble(mean_recall) + "," + n + "\n";
  out += "f1," + formatDouble(mean_f1) + "," + n + "\n";
  out += "entropy_difference," + formatDouble(mean_entropy_difference) + "," + n + "\n";
  out += "groove_similarity," + formatDouble(mean_groove_similarity) + "," + n + "\n";
  out += "incomplete_outputs," + std::to_string(incomplete_outputs) + "," + n + "\n";
  out += "salvaged_outputs," + std::to_string(salvaged_outputs) + "," + n + "\n";
  return out;
}

}  // namespace infill
