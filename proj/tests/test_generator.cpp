#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "partlab/errors.hpp"
#include "partlab/generator.hpp"
#include "partlab/oracle.hpp"

using namespace partlab;

namespace {

std::string read_golden(const std::string& name) {
  const std::string path = std::string(PARTLAB_GOLDEN_DIR) + "/" + name;
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "missing golden file ", path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Minimal evaluator for the rendered trace text, proving the display is
// honest arithmetic: terms are leaves p(k), bracketed cells, or closed tail
// labels ("1", "10/2", "(11-1)/2"), joined by + and -.
class RenderedTraceParser {
 public:
  RenderedTraceParser(const std::string& text, const PartitionTable& table)
      : table_(table) {
    // Undo the 80-column wrapping: continuation lines are indented.
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      size_t start = line.find_first_not_of(' ');
      if (start == std::string::npos) continue;
      if (!text_.empty()) text_ += " ";
      text_ += line.substr(start);
    }
  }

  // Evaluates "p(N) = <expr> = <total>" and checks internal consistency;
  // returns the evaluated expression (which must equal the printed total).
  Int evaluate() {
    expect("p(");
    parse_integer();  // the n being decomposed
    expect(")");
    skip_spaces();
    expect("=");
    skip_spaces();
    Int value = parse_term();
    skip_spaces();
    while (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char op = text_[pos_++];
      skip_spaces();
      // A trailing "= total" follows the last term; "-"/"+" always precede
      // a term.
      const Int term = parse_term();
      if (op == '+') {
        value += term;
      } else {
        value -= term;
      }
      skip_spaces();
    }
    // The degenerate "p(0) = 1" display has no separate total line.
    if (pos_ >= text_.size()) return value;
    expect("=");
    skip_spaces();
    const Int printed = parse_integer();
    CHECK(value == printed);
    return value;
  }

 private:
  void skip_spaces() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }

  void expect(const std::string& token) {
    REQUIRE_MESSAGE(text_.compare(pos_, token.size(), token) == 0,
                    "expected '", token, "' at position ", pos_, " in '",
                    text_.substr(pos_, 40), "'");
    pos_ += token.size();
  }

  Int parse_integer() {
    size_t end = pos_;
    if (end < text_.size() && text_[end] == '-') ++end;
    while (end < text_.size() && std::isdigit(text_[end])) ++end;
    REQUIRE(end > pos_);
    const Int value(text_.substr(pos_, end - pos_), 10);
    pos_ = end;
    return value;
  }

  // term := p(K) | [p(K) - term - ...] | N | N/2 | (N-1)/2
  Int parse_term() {
    if (text_.compare(pos_, 2, "p(") == 0) {
      expect("p(");
      const Int tab = parse_integer();
      expect(")");
      return table_.at(tab.get_si());
    }
    if (text_[pos_] == '[') {
      expect("[");
      expect("p(");
      const Int head = table_.at(parse_integer().get_si());
      expect(")");
      Int value = head;
      skip_spaces();
      while (text_[pos_] == '-') {
        expect("-");
        skip_spaces();
        value -= parse_term();
        skip_spaces();
      }
      expect("]");
      return value;
    }
    if (text_[pos_] == '(') {
      expect("(");
      const Int a = parse_integer();
      expect("-");
      const Int b = parse_integer();
      expect(")/");
      const Int d = parse_integer();
      Int numerator = a - b;
      REQUIRE(numerator % d == 0);
      return numerator / d;
    }
    Int value = parse_integer();
    if (pos_ < text_.size() && text_[pos_] == '/') {
      expect("/");
      const Int d = parse_integer();
      REQUIRE(value % d == 0);
      value /= d;
    }
    return value;
  }

  std::string text_;
  size_t pos_ = 0;
  const PartitionTable& table_;
};

}  // namespace

TEST_CASE("child counts follow the doubling rule") {
  CHECK(child_count(6, 10) == 2);
  CHECK(child_count(7, 10) == 4);
  CHECK(child_count(8, 10) == 6);
  CHECK(child_count(9, 10) == 8);
  CHECK(child_count(5, 10) == 0);
  CHECK(child_count(0, 1) == 0);
  CHECK(child_count(3, 7) == 0);
  CHECK(child_count(4, 7) == 1);
  // The self-test's corruption knob shifts the rule by one.
  CHECK(child_count(5, 10, 1) == 1);
  CHECK(child_count(4, 10, 1) == 0);
}

TEST_CASE("parcel values equal restricted counts") {
  const PartitionTable table = build_table(40);
  ParcelEvaluator evaluator(table);
  for (long head = 1; head <= 40; ++head) {
    for (long tab = 0; tab < head; ++tab) {
      CHECK(evaluator.value(tab, head) == restricted_count(tab, head - tab));
    }
  }
}

TEST_CASE("a parcel with no children is a plain partition count") {
  const PartitionTable table = build_table(50);
  ParcelEvaluator evaluator(table);
  // head >= 2 * tab means no repeats are generated, for any head size.
  CHECK(evaluator.value(10, 20) == table.at(10));
  CHECK(evaluator.value(10, 1000000) == table.at(10));
  CHECK(evaluator.value(0, 1) == 1);
  CHECK(evaluator.value(50, 100) == table.at(50));
}

TEST_CASE("worked parcel examples") {
  const PartitionTable table = build_table(20);
  CHECK(parcel_value(6, 10, table) == 9);   // p(6) - p(0) - p(1)
  CHECK(parcel_value(5, 9, table) == 6);    // p(5) - p(0)
  CHECK(parcel_value(5, 11, table) == 7);   // childless: 2*5 < 11
}

TEST_CASE("parcel evaluator argument guards") {
  const PartitionTable table = build_table(10);
  ParcelEvaluator evaluator(table);
  CHECK_THROWS_AS(evaluator.value(5, 5), std::invalid_argument);
  CHECK_THROWS_AS(evaluator.value(-1, 3), std::invalid_argument);
  CHECK_THROWS_AS(evaluator.value(11, 12), std::invalid_argument);
}

TEST_CASE("fractal evaluation agrees with the oracle") {
  const PartitionTable table = build_table(60);
  const std::vector<Int> values = fractal_values(60);
  REQUIRE(values.size() == 61);
  for (long n = 0; n <= 60; ++n) {
    CHECK(values[static_cast<size_t>(n)] == table.at(n));
  }
  CHECK(fractal_p(10) == 42);
  CHECK(fractal_p(11) == 56);
  CHECK(fractal_p(12) == 77);
}

TEST_CASE("the fractal step is the parcel decomposition") {
  // p(4) = {p(0)} + {p(1)} + {p(2)} + {p(3)} evaluated under head 4.
  const PartitionTable table = build_table(4);
  ParcelEvaluator evaluator(table);
  Int total(0);
  for (long tab = 0; tab <= 3; ++tab) {
    total += evaluator.value(tab, 4);
  }
  CHECK(total == 5);
  CHECK(fractal_p(4) == 5);
}

TEST_CASE("fractal evaluation guards") {
  CHECK_THROWS_AS(fractal_p(-1), std::invalid_argument);
  Limits tight;
  tight.max_fractal = 50;
  CHECK_THROWS_AS(fractal_p(51, tight), ResourceLimitError);
  CHECK(fractal_p(50, tight) == build_table(50).at(50));
}

TEST_CASE("the corruption knob is observable") {
  // With the child rule shifted by one the method stops counting p(n).
  CHECK(fractal_p(2, Limits{}, 1) == 1);
  CHECK(fractal_p(2) == 2);
}

TEST_CASE("trace structure of p(10), no substitution") {
  const TraceDocument doc = build_trace(10, TailVariant::Full);
  REQUIRE(doc.roots.size() == 10);
  CHECK(doc.tail_terms.empty());
  CHECK(doc.total == 42);
  CHECK(doc.steps == 5);
  CHECK(doc.node_count == 42);
  const long expected_children[] = {0, 0, 0, 0, 0, 0, 2, 4, 6, 8};
  for (size_t i = 0; i < 10; ++i) {
    CHECK(doc.roots[i].tab == static_cast<long>(i));
    CHECK(static_cast<long>(doc.roots[i].children.size()) ==
          expected_children[i]);
    CHECK((doc.roots[i].kind == ExpansionNode::Kind::Cell) ==
          (expected_children[i] > 0));
  }
}

TEST_CASE("trace variants substitute the top terms") {
  const TraceDocument one = build_trace(10, TailVariant::OneSub);
  CHECK(one.roots.size() == 9);
  REQUIRE(one.tail_terms.size() == 1);
  CHECK(one.tail_terms[0].first == "1");
  CHECK(one.tail_terms[0].second == 1);
  CHECK(one.total == 42);
  CHECK(one.steps == 4);
  CHECK(one.node_count == 23);

  const TraceDocument two = build_trace(10, TailVariant::TwoSub);
  CHECK(two.roots.size() == 8);
  REQUIRE(two.tail_terms.size() == 2);
  CHECK(two.tail_terms[0].first == "10/2");
  CHECK(two.tail_terms[0].second == 5);
  CHECK(two.tail_terms[1].first == "1");
  CHECK(two.total == 42);
  CHECK(two.steps == 3);
  CHECK(two.node_count == 14);

  const TraceDocument odd = build_trace(11, TailVariant::TwoSub);
  REQUIRE(odd.tail_terms.size() == 2);
  CHECK(odd.tail_terms[0].first == "(11-1)/2");
  CHECK(odd.tail_terms[0].second == 5);
}

TEST_CASE("trace totals equal p(n) for every variant") {
  const PartitionTable table = build_table(30);
  for (long n = 2; n <= 30; ++n) {
    for (TailVariant variant :
         {TailVariant::Full, TailVariant::OneSub, TailVariant::TwoSub}) {
      CHECK(build_trace(n, variant).total == table.at(n));
    }
  }
  CHECK(build_trace(0, TailVariant::Full).total == 1);
  CHECK(build_trace(1, TailVariant::Full).total == 1);
}

TEST_CASE("trace guards") {
  CHECK_THROWS_AS(build_trace(-1, TailVariant::Full), std::invalid_argument);
  CHECK_THROWS_AS(build_trace(1, TailVariant::OneSub), std::invalid_argument);
  CHECK_THROWS_AS(build_trace(1, TailVariant::TwoSub), std::invalid_argument);
  Limits tight;
  tight.max_trace_nodes = 10;
  CHECK_THROWS_AS(build_trace(10, TailVariant::Full, tight),
                  ResourceLimitError);
}

TEST_CASE("rendered traces match the goldens") {
  const struct {
    long n;
    TailVariant variant;
    const char* file;
  } cases[] = {
      {10, TailVariant::Full, "trace_p10_full.txt"},
      {10, TailVariant::OneSub, "trace_p10_one.txt"},
      {10, TailVariant::TwoSub, "trace_p10_two.txt"},
      {11, TailVariant::OneSub, "trace_p11_one.txt"},
      {12, TailVariant::OneSub, "trace_p12_one.txt"},
      {11, TailVariant::TwoSub, "trace_p11_two.txt"},
      {12, TailVariant::TwoSub, "trace_p12_two.txt"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.file);
    CHECK(render_trace(build_trace(c.n, c.variant)) == read_golden(c.file));
  }
}

TEST_CASE("rendered traces re-evaluate to their totals") {
  const PartitionTable table = build_table(25);
  for (long n : {0L, 1L, 2L, 5L, 10L, 11L, 12L, 19L, 24L}) {
    for (TailVariant variant :
         {TailVariant::Full, TailVariant::OneSub, TailVariant::TwoSub}) {
      if (n < 2 && variant != TailVariant::Full) continue;
      const TraceDocument doc = build_trace(n, variant);
      const std::string text = render_trace(doc);
      CAPTURE(text);
      RenderedTraceParser parser(text, table);
      CHECK(parser.evaluate() == doc.total);
    }
  }
}

TEST_CASE("rendered lines stay within the wrap width") {
  for (long n : {10L, 20L, 30L}) {
    const std::string text = render_trace(build_trace(n, TailVariant::Full));
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      CHECK(line.size() <= 80);
    }
  }
}

TEST_CASE("machine trace dump is stable json") {
  const TraceDocument doc = build_trace(10, TailVariant::TwoSub);
  const nlohmann::json j = nlohmann::json::parse(trace_to_json(doc));
  CHECK(j.at("n") == 10);
  CHECK(j.at("variant") == "two");
  CHECK(j.at("steps") == 3);
  CHECK(j.at("nodes") == 14);
  CHECK(j.at("total") == "42");
  CHECK(j.at("tree").size() == 8);
  CHECK(j.at("tail").size() == 2);
  // Kinds and tabs survive the round trip.
  CHECK(j.at("tree").at(7).at("kind") == "cell");
  CHECK(j.at("tree").at(7).at("children").size() == 4);
}
