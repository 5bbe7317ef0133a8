#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "invar/canonical.hpp"
#include "invar/parser.hpp"
#include "invar/serialize.hpp"
#include "invar/term.hpp"

using namespace invar;

TEST_CASE("parse basic contractions") {
  LinearCombination lc = parse("R[i,j,k,l]*R[i,j,k,l]");
  REQUIRE(lc.terms.size() == 1);
  CHECK(lc.terms[0].coeff == 1);
  CHECK(lc.terms[0].factors.size() == 2);
  CHECK(weight(lc.terms[0]) == -4);

  LinearCombination p2 = parse("P[a,a]*P[b,b]");
  CHECK(census(p2.terms[0]).internal_contractions == 2);
}

TEST_CASE("explicit metrics are normalized away on ingest") {
  LinearCombination lc = parse("W[i,j,k,l]*P[i,k]*g[j,l]");
  REQUIRE(lc.terms.size() == 1);
  CHECK(lc.terms[0].factors.size() == 2);  // metric eliminated
  CHECK(reduce(lc, 4).terms.empty());     // traced Weyl dies
}

TEST_CASE("derivatives, flavors, scalars") {
  LinearCombination lc = parse("-1/12 * D[a,a](Scal) + 1/24 * Scal*Scal");
  CHECK(lc.terms.size() == 2);
  LinearCombination fl = parse("phi2[a,b]*phi1[a,b]");
  CHECK(fl.terms[0].factors[0].flavor != fl.terms[0].factors[1].flavor);
  LinearCombination nested = parse("D[a](D[b](phi[c]))*phi[a,b,c]");
  CHECK(nested.terms[0].factors[0].deriv_order == 3);
}

TEST_CASE("parse errors carry position and category") {
  CHECK_THROWS_AS(parse("R[i,j,k]*R[i,j,k]"), ParseError);      // arity
  CHECK_THROWS_AS(parse("R[i,j,k,l]*R[i,j,m,l]"), ParseError);  // unbalanced
  CHECK_THROWS_AS(parse("R[i,j,k,l"), ParseError);              // syntax
  CHECK_THROWS_AS(parse("Q[i,j]"), ParseError);                 // unknown token
  CHECK_THROWS_AS(parse(""), ParseError);
  try {
    parse("P[a,a] @ P[b,b]");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
    CHECK(e.column == 8);
  }
}

TEST_CASE("print: zero, signs, determinism") {
  LinearCombination empty;
  CHECK(print(empty) == "0");

  LinearCombination neg = parse("-3/2 * P[a,a]*P[b,b]");
  std::string s = print(neg);
  CHECK(s.substr(0, 5) == "-3/2 ");

  LinearCombination canon = reduce(parse("R[j,i,k,l]*R[i,j,k,l]"), 4);
  CHECK(print(canon) == "-1 * R[i,j,k,l]*R[i,j,k,l]");

  // determinism: same value printed twice is byte-identical
  CHECK(print(canon) == print(canon));
}

TEST_CASE("round trip: parse(print(lc)) equals canonical lc term-for-term") {
  auto cases = {
      "R[i,j,k,l]*R[i,j,k,l] - 2 * R[i,j,k,l]*R[i,k,j,l]",
      "P[a,a]*P[b,b] + P[a,b]*P[a,b]",
      "D[a,a](Scal) + Scal*Scal",
      "Sphi[a,b,c]*phi[a,b,c] - 5/7 * phi[a,a]*phi[b,b]",
  };
  for (const char* src : cases) {
    LinearCombination lc = reduce(parse(src), 4);
    LinearCombination back = parse(print(lc));
    LinearCombination diff = reduce(lc - back, 4);
    CHECK(diff.terms.empty());
    CHECK(print(back) == print(lc));
  }
}

TEST_CASE("serialization round trip and schema guards") {
  LinearCombination lc = reduce(parse("P[a,a]*P[b,b] - 1/3 * P[a,b]*P[a,b]"), 4);
  std::string doc = serialize(lc);
  LinearCombination back = deserialize(doc);
  CHECK(print(back) == print(lc));

  LinearCombination empty;
  LinearCombination e2 = deserialize(serialize(empty));
  CHECK(e2.terms.empty());

  CHECK_THROWS_AS(deserialize("{\"schema_version\": 99, \"type\": "
                              "\"linear_combination\", \"terms\": []}"),
                  SerializeError);
  std::string bad = doc;
  auto pos = bad.find("\"P\"");
  bad.replace(pos, 3, "\"Q\"");
  CHECK_THROWS_AS(deserialize(bad), SerializeError);
  CHECK_THROWS_AS(deserialize("not json"), SerializeError);
}
