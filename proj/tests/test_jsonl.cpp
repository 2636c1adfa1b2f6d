#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "infill/jsonl.h"
#include "support/generators.h"

namespace infill {
namespace {

const std::string kFixture = std::string(INFILL_TEST_DATA_DIR) + "/golden_examples.jsonl";

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MeasureSlice fixtureSlice() {
  MeasureSlice s({{0, "piano"}, {33, "bass"}}, {96, 72});
  s.addNote(0, 0, {60, 0, 24});
  s.addNote(0, 0, {64, 0, 12});
  s.addNote(0, 0, {67, 48, 48});
  s.addNote(0, 1, {72, 3, 6});
  s.addNote(1, 0, {36, 0, 96});
  s.addNote(1, 1, {43, 0, 36});
  s.addNote(1, 1, {41, 36, 36});
  return s;
}

std::vector<InfillExample> fixtureExamples() {
  const auto s = fixtureSlice();
  MaskSpec mask;
  mask.add(0, 1, Conditioning::k1D);
  mask.add(1, 0);
  ControlSpec controls;
  controls.cells[{1, 0}].strict_range = true;
  controls.tracks[0].horiz = true;
  MaskSpec last;
  last.add(1, 1, Conditioning::k2D);
  return {makeExample(s, mask, controls, Task::kRandom, {"songs/a.mid", 2, 12345}),
          makeExample(s, last, {}, Task::kLastBar, {"b.mid", 0, 7}, {{0, 1}})};
}

TEST(Jsonl, GoldenFixtureParsesToKnownExamples) {
  std::ifstream in(kFixture);
  ASSERT_TRUE(in) << kFixture;
  const auto examples = readExamples(in);
  ASSERT_EQ(examples.size(), 2u);

  const auto& a = examples[0];
  EXPECT_EQ(a.id, "songs/a.mid#2");
  EXPECT_EQ(a.task, Task::kRandom);
  EXPECT_EQ(a.source, "songs/a.mid");
  EXPECT_EQ(a.slice_measures, 2);
  EXPECT_EQ(a.seed, 12345u);
  EXPECT_EQ(a.promptText(),
            "<inst:0> <mlen:96> <pos:0> <non:64> <dur:12> <non:60> <dur:24> <pos:48> <non:67> <dur:48> "
            "<sep> <mlen:72> <mask:0> <pos:3> <mp1d> <dur:6> "
            "<inst:33> <mlen:96> <mask:1> <hi_strict> <non:36> <lo_strict> <non:36> "
            "<sep> <mlen:72> <pos:0> <non:43> <dur:36> <pos:36> <non:41> <dur:36> "
            "<track:0> <horiz:0>");
  EXPECT_EQ(renderText(fromIds(a.target_ids)),
            "<fill:0> <pos:3> <non:72> <dur:6> <fill:1> <pos:0> <non:36> <dur:96> <eot>");
  EXPECT_EQ(a.ground_truth, (std::vector<GroundTruthNote>{{0, 1, 72, 3, 6}, {1, 0, 36, 0, 96}}));
  EXPECT_EQ(a.masked, (std::vector<Cell>{{0, 1}, {1, 0}}));
  EXPECT_TRUE(a.auto_credited.empty());
  // Hand-checked ids: <inst:0> is 0, <mlen:96> is 130 + 95, <eot> is 1922.
  EXPECT_EQ(a.prompt_ids.front(), 0);
  EXPECT_EQ(a.prompt_ids[1], 225);
  EXPECT_EQ(a.target_ids.back(), 1922);

  const auto& b = examples[1];
  EXPECT_EQ(b.task, Task::kLastBar);
  EXPECT_EQ(b.auto_credited, (std::vector<Cell>{{0, 1}}));
  EXPECT_EQ(b.ground_truth.size(), 3u);
}

TEST(Jsonl, WriterReproducesFixtureBytes) {
  std::ostringstream out;
  writeExamples(out, fixtureExamples());
  EXPECT_EQ(out.str(), readFile(kFixture));
}

TEST(Jsonl, RoundTripIsLossless) {
  Rng rng(3);
  std::vector<InfillExample> examples;
  for (int i = 0; i < 200; ++i) {
    test::SliceShape shape;
    shape.min_measures = shape.max_measures = 8;
    const auto s = test::randomSlice(rng, shape);
    auto r = buildRandomInfill(s, {"dir/file " + std::to_string(i) + ".mid", i, rng.next()}, i % 2 == 0);
    if (r.example) examples.push_back(*r.example);
  }
  std::ostringstream out;
  writeExamples(out, examples);
  const std::string text = out.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), examples.size());
  std::istringstream in(text);
  EXPECT_EQ(readExamples(in), examples);
}

TEST(Jsonl, FieldOrderIsFixed) {
  const auto line = exampleToJson(fixtureExamples()[0]);
  const auto j = nlohmann::ordered_json::parse(line);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"id", "task", "source", "slice", "seed", "prompt_ids", "target_ids",
                                            "prompt_text", "ground_truth", "masked", "auto_credited"}));
}

TEST(Jsonl, MalformedLinesReportLineNumbers) {
  const std::string good = exampleToJson(fixtureExamples()[0]);
  auto lineOf = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      readExamples(in);
    } catch (const JsonlError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(lineOf(good + "\n" + good + "\n{not json\n"), 3u);
  EXPECT_EQ(lineOf(good + "\n\n[1, 2]\n"), 3u);
  EXPECT_EQ(lineOf("{\"id\": \"x\"}\n"), 1u);

  auto j = nlohmann::ordered_json::parse(good);
  j["prompt_ids"][0] = "zero";
  EXPECT_EQ(lineOf(good + "\n" + j.dump() + "\n"), 2u);
  j = nlohmann::ordered_json::parse(good);
  j["task"] = "bogus";
  EXPECT_EQ(lineOf(j.dump()), 1u);
  j = nlohmann::ordered_json::parse(good);
  j["prompt_text"] = "<eot>";
  EXPECT_EQ(lineOf(j.dump()), 1u);
  j = nlohmann::ordered_json::parse(good);
  j["ground_truth"][0] = {1, 2, 3};
  EXPECT_EQ(lineOf(j.dump()), 1u);
}

TEST(Jsonl, OutputsRoundTrip) {
  const std::vector<ModelOutput> outputs = {{"a#0", {1666, 1922}}, {"b#1", {}}};
  std::ostringstream out;
  writeOutputs(out, outputs);
  EXPECT_EQ(out.str(), "{\"id\":\"a#0\",\"target_ids\":[1666,1922]}\n{\"id\":\"b#1\",\"target_ids\":[]}\n");
  std::istringstream in(out.str());
  EXPECT_EQ(readOutputs(in), outputs);
}

TEST(Jsonl, ComplyRecordsWithAndWithoutProbes) {
  const auto ex = fixtureExamples()[0];
  ComplyRecord with{"a", ex.prompt_ids, ex.target_ids,
                    std::vector<ComplianceProbe>{{{ControlKind::kHoriz, 2, {}}, 0, std::nullopt, true},
                                                 {{ControlKind::kStrictRange, 0, {36, 40}}, 1, 0, false}}};
  ComplyRecord without{"b", ex.prompt_ids, ex.target_ids, std::nullopt};
  std::istringstream in(complyRecordToJson(with) + "\n" + complyRecordToJson(without) + "\n");
  const auto records = readComplyRecords(in);
  ASSERT_EQ(records.size(), 2u);
  ASSERT_TRUE(records[0].probes);
  ASSERT_EQ(records[0].probes->size(), 2u);
  EXPECT_EQ((*records[0].probes)[0].control, (Control{ControlKind::kHoriz, 2, {}}));
  EXPECT_FALSE((*records[0].probes)[0].measure);
  EXPECT_EQ((*records[0].probes)[1].control.range, (PitchRange{36, 40}));
  EXPECT_EQ((*records[0].probes)[1].measure, 0);
  EXPECT_FALSE((*records[0].probes)[1].supplied);
  EXPECT_FALSE(records[1].probes);
  EXPECT_EQ(records[1].prompt_ids, ex.prompt_ids);
}

TEST(Jsonl, ExampleFileIsAValidComplyFile) {
  std::ifstream in(kFixture);
  const auto records = readComplyRecords(in);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].id, "songs/a.mid#2");
  EXPECT_FALSE(records[0].probes);
}

TEST(Jsonl, ManifestFields) {
  DatasetManifest m;
  m.task = Task::kTrack;
  m.examples = 3;
  m.masked_cells = 6;
  m.auto_credited_cells = 2;
  m.skip_reasons["single_track"] = 4;
  const auto j = nlohmann::json::parse(manifestToJson(m));
  EXPECT_EQ(j.at("task"), "track");
  EXPECT_EQ(j.at("examples"), 3);
  EXPECT_DOUBLE_EQ(j.at("auto_credited_fraction").get<double>(), 0.25);
  EXPECT_EQ(j.at("skip_reasons").at("single_track"), 4);
  EXPECT_EQ(j.at("vocabulary_size"), 2062);
}

}  // namespace
}  // namespace infill
