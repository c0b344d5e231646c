#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "abm/config.hpp"
#include "abm/rng.hpp"
#include "abm/table.hpp"

using namespace abm;

TEST_CASE("literals parse to the narrowest type") {
  CHECK(parse_literal("true") == Value{true});
  CHECK(parse_literal("false") == Value{false});
  CHECK(parse_literal("42") == Value{std::int64_t{42}});
  CHECK(parse_literal("-7") == Value{std::int64_t{-7}});
  CHECK(parse_literal("0.5") == Value{0.5});
  CHECK(parse_literal("1e3") == Value{1000.0});
  CHECK(parse_literal("euclidean") == Value{std::string("euclidean")});
  CHECK(parse_literal("") == Value{std::string()});
}

TEST_CASE("reals print shortest round-trip and always look real") {
  CHECK(format_real(1.0) == "1.0");
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(-2.5) == "-2.5");
  CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_real(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_real(std::nan("")) == "nan");
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double x = std::ldexp(rng.next_float() - 0.5, static_cast<int>(rng.next_below(200)) - 100);
    const Value back = parse_literal(format_real(x));
    REQUIRE(std::holds_alternative<double>(back));
    CHECK(std::get<double>(back) == x);
  }
}

TEST_CASE("numeric views") {
  CHECK(to_double(Value{true}) == 1.0);
  CHECK(to_double(Value{std::int64_t{3}}) == 3.0);
  CHECK(to_int(Value{2.9}) == 2);
  CHECK(to_int(Value{-2.9}) == -2);
  CHECK_THROWS_AS(to_double(Value{std::string("x")}), ContractViolation);
  CHECK_THROWS_AS(to_double(Value{}), ContractViolation);
}

TEST_CASE("value_less orders numbers across kinds") {
  CHECK(value_less(Value{std::int64_t{1}}, Value{1.5}));
  CHECK(value_less(Value{false}, Value{std::int64_t{1}}));
  CHECK_FALSE(value_less(Value{2.0}, Value{std::int64_t{2}}));
  CHECK_FALSE(value_less(Value{std::int64_t{2}}, Value{2.0}));
  CHECK(value_less(Value{std::string("a")}, Value{std::string("b")}));
}

TEST_CASE("csv round trip keeps types") {
  DataTable t({"step", "name", "x", "flag", "gap"});
  t.append_row({std::int64_t{0}, std::string("plain"), 1.0, true, Value{}});
  t.append_row({std::int64_t{1}, std::string("with, comma"), -0.25, false, 3.5});
  t.append_row({std::int64_t{2}, std::string("say \"hi\"\nnext"), 1e-300, true, std::int64_t{4}});
  t.append_row({std::int64_t{3}, std::string(""), std::numeric_limits<double>::infinity(), false, Value{}});
  const std::string text = to_csv(t, {"provenance line"});
  CHECK(text.rfind("# provenance line\nstep,name,x,flag,gap\n0,\"plain\",1.0,true,\n", 0) == 0);
  std::istringstream in(text);
  const DataTable back = read_csv(in);
  CHECK(back == t);
  CHECK(to_csv(back, {"provenance line"}) == text);
}

TEST_CASE("table rows must match the header") {
  DataTable t({"a", "b"});
  CHECK_THROWS(t.append_row({std::int64_t{1}}));
  CHECK_THROWS(t.column("c"));
  std::istringstream bad("a,b\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(bad), Error);
}

TEST_CASE("config assignments") {
  const Config c = parse_assignments({"width=30", "density=0.7", "metric=chebyshev", "open=true"});
  CHECK(config_int(c, "width", 0) == 30);
  CHECK(config_real(c, "density", 0) == 0.7);
  CHECK(config_real(c, "width", 0) == 30.0);
  CHECK(config_string(c, "metric", "") == "chebyshev");
  CHECK(config_bool(c, "open", false));
  CHECK(config_int(c, "height", 12) == 12);
  CHECK_THROWS_AS(config_int(c, "density", 0), ConfigError);
  CHECK_THROWS_AS(config_string(c, "width", ""), ConfigError);
  CHECK_THROWS_AS(parse_assignments({"novalue"}), ConfigError);
  CHECK_THROWS_AS(require_known_keys(c, {"width", "density"}), ConfigError);
  CHECK_NOTHROW(require_known_keys(c, {"width", "density", "metric", "open"}));
  CHECK(format_config(c) == "density=0.7 metric=chebyshev open=true width=30");
  CHECK(parse_assignments({"density=0.7", "metric=chebyshev", "open=true", "width=30"}) == c);
}
