#include <boxworld/errors.hpp>
#include <boxworld/label_text.hpp>

#include <algorithm>
#include <cctype>
#include <optional>

namespace boxworld {

std::string format_local(const LocalEffectLabel& label, int system) {
  const std::string at = "@" + std::to_string(system + 1);
  if (label.is_unit()) return "U" + at;
  return "X[" + std::to_string(label.outcome + 1) + "|" + std::to_string(label.measurement + 1) + "]" + at;
}

std::string format_label(const JointEffectLabel& label) {
  std::string out;
  for (std::size_t i = 0; i < label.components.size(); ++i) {
    if (i) out += ' ';
    out += format_local(label.components[i], static_cast<int>(i));
  }
  return out;
}

std::string format_assignment(const Assignment& assignment) {
  std::string out;
  for (std::size_t i = 0; i < assignment.outcomes.size(); ++i) {
    if (i) out += ' ';
    out += "s@" + std::to_string(i + 1) + "=(";
    for (std::size_t x = 0; x < assignment.outcomes[i].size(); ++x) {
      if (x) out += ',';
      out += std::to_string(assignment.outcomes[i][x] + 1);
    }
    out += ')';
  }
  return out;
}

namespace {

class Cursor {
 public:
  Cursor(std::string_view text, std::size_t base) : text_(text), base_(base) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  std::size_t column() const { return base_ + pos_ + 1; }

  void skip_separators() {
    while (!done()) {
      if (std::isspace(static_cast<unsigned char>(peek())) || peek() == '*') {
        ++pos_;
      } else if (text_.substr(pos_, 3) == "(x)") {
        pos_ += 3;
      } else if (text_.substr(pos_, 3) == "\xE2\x8A\x97") {  // U+2297
        pos_ += 3;
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  int number() {
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a number");
    long v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      v = v * 10 + (peek() - '0');
      if (v > 1'000'000) fail("number too large");
      ++pos_;
    }
    if (v < 1) fail("indices are 1-based");
    return static_cast<int>(v);
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, 1, column()); }

  char take() { return text_[pos_++]; }

 private:
  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

JointEffectLabel parse_label_at(std::string_view text, std::size_t base, int systems) {
  Cursor cur(text, base);
  std::vector<std::optional<LocalEffectLabel>> comps(systems);
  cur.skip_separators();
  if (cur.done()) cur.fail("empty label");
  while (!cur.done()) {
    LocalEffectLabel local;
    const char head = cur.peek();
    if (head == 'U') {
      cur.take();
    } else if (head == 'X') {
      cur.take();
      cur.expect('[');
      const int a = cur.number();
      cur.expect('|');
      const int x = cur.number();
      cur.expect(']');
      local = LocalEffectLabel::fiducial(x - 1, a - 1);
    } else {
      cur.fail("expected 'X[a|x]@i' or 'U@i'");
    }
    cur.expect('@');
    const std::size_t col = cur.column();
    const int sys = cur.number();
    if (sys > systems) throw ParseError("system index " + std::to_string(sys) + " out of range", 1, col);
    if (comps[sys - 1]) throw ParseError("system " + std::to_string(sys) + " appears twice", 1, col);
    comps[sys - 1] = local;
    cur.skip_separators();
  }
  JointEffectLabel out;
  for (int i = 0; i < systems; ++i) {
    if (!comps[i]) cur.fail("missing component for system " + std::to_string(i + 1));
    out.components.push_back(*comps[i]);
  }
  return out;
}

}  // namespace

JointEffectLabel parse_label(std::string_view text, int systems) { return parse_label_at(text, 0, systems); }

std::vector<JointEffectLabel> parse_label_list(std::string_view text, int systems) {
  std::vector<JointEffectLabel> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(';', start), text.size());
    const auto piece = text.substr(start, end - start);
    if (piece.find_first_not_of(" \t\r\n") != std::string_view::npos)
      out.push_back(parse_label_at(piece, start, systems));
    start = end + 1;
  }
  return out;
}

}  // namespace boxworld
