// Builds SMF byte streams event by event, independently of the library's
// writer, for parser tests.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace infill::test {

class SmfTrackBuilder {
 public:
  SmfTrackBuilder& event(std::uint32_t delta, std::initializer_list<std::uint8_t> bytes) {
    vlq(delta);
    body_.insert(body_.end(), bytes);
    return *this;
  }
  SmfTrackBuilder& noteOn(std::uint32_t delta, int channel, int pitch, int velocity = 100) {
    return event(delta, {static_cast<std::uint8_t>(0x90 | channel), static_cast<std::uint8_t>(pitch),
                         static_cast<std::uint8_t>(velocity)});
  }
  SmfTrackBuilder& noteOff(std::uint32_t delta, int channel, int pitch) {
    return event(delta, {static_cast<std::uint8_t>(0x80 | channel), static_cast<std::uint8_t>(pitch), 0});
  }
  SmfTrackBuilder& program(std::uint32_t delta, int channel, int program) {
    return event(delta, {static_cast<std::uint8_t>(0xC0 | channel), static_cast<std::uint8_t>(program)});
  }
  SmfTrackBuilder& timeSignature(std::uint32_t delta, int numerator, int denominator_exp) {
    return event(delta, {0xFF, 0x58, 0x04, static_cast<std::uint8_t>(numerator),
                         static_cast<std::uint8_t>(denominator_exp), 24, 8});
  }
  SmfTrackBuilder& name(const std::string& text) {
    vlq(0);
    body_.insert(body_.end(), {0xFF, 0x03, static_cast<std::uint8_t>(text.size())});
    body_.insert(body_.end(), text.begin(), text.end());
    return *this;
  }
  SmfTrackBuilder& raw(std::initializer_list<std::uint8_t> bytes) {
    body_.insert(body_.end(), bytes);
    return *this;
  }
  SmfTrackBuilder& end(std::uint32_t delta = 0) { return event(delta, {0xFF, 0x2F, 0x00}); }

  const std::vector<std::uint8_t>& body() const { return body_; }

 private:
  void vlq(std::uint32_t v) {
    std::uint8_t buf[5];
    int n = 0;
    buf[n++] = v & 0x7F;
    while (v >>= 7) buf[n++] = static_cast<std::uint8_t>((v & 0x7F) | 0x80);
    while (n > 0) body_.push_back(buf[--n]);
  }

  std::vector<std::uint8_t> body_;
};

inline std::vector<std::uint8_t> buildSmf(int format, int ppq, const std::vector<SmfTrackBuilder>& tracks) {
  std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd', 0, 0, 0, 6};
  auto u16 = [&](int v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
  };
  u16(format);
  u16(static_cast<int>(tracks.size()));
  u16(ppq);
  for (const auto& t : tracks) {
    out.insert(out.end(), {'M', 'T', 'r', 'k'});
    const auto size = static_cast<std::uint32_t>(t.body().size());
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(size >> shift));
    out.insert(out.end(), t.body().begin(), t.body().end());
  }
  return out;
}

}  // namespace infill::test
