#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "xshop/errors.hpp"
#include "xshop/page.hpp"

using namespace xshop;

TEST_CASE("classify extracts the page type and query variables") {
  const PageInfo info = classify("/ct/?c=148");
  CHECK(info.page_type == PageType::Ct);
  REQUIRE(info.variables.count("c") == 1);
  CHECK(info.variables.at("c") == "148");
  CHECK(info.category_id == 148);
  CHECK(!info.product_id.has_value());
}

TEST_CASE("classify handles root and unknown segments") {
  CHECK(classify("/").page_type == PageType::Home);
  CHECK(classify("/?x=1").page_type == PageType::Home);
  const PageInfo other = classify("/unknownseg/x?y=1");
  CHECK(other.page_type == PageType::Other);
  CHECK(other.variables.at("y") == "1");
}

TEST_CASE("the named tokens classify to pairwise distinct types") {
  std::set<PageType> seen;
  for (const auto& [token, type] : kPageTokens) {
    const PageInfo info = classify(std::string("/") + token + "/");
    CHECK(info.page_type == type);
    seen.insert(info.page_type);
    CHECK(page_type_name(type) == token);
  }
  CHECK(seen.size() == kPageTokens.size());
  CHECK(seen.count(PageType::Home) == 0);
  CHECK(seen.count(PageType::Other) == 0);
}

TEST_CASE("query parsing unescapes and tolerates malformed pairs") {
  const PageInfo info = classify("/ls/?p=9&name=a%20b+c&&flag&=orphan&z=07");
  CHECK(info.variables.at("p") == "9");
  CHECK(info.variables.at("name") == "a b c");
  CHECK(info.variables.at("flag") == "");
  CHECK(info.variables.count("") == 0);  // nameless pairs are dropped
  CHECK(info.product_id == 9);
  // "07" does not render back verbatim, so no brand id is extracted
  CHECK(info.variables.at("z") == "07");
  CHECK(!info.brand_id.has_value());
}

TEST_CASE("malformed percent escapes pass through untouched") {
  CHECK(url_unescape("a%2") == "a%2");
  CHECK(url_unescape("a%zz") == "a%zz");
  CHECK(url_unescape("%41%zz%20") == "A%zz ");
  const PageInfo info = classify("/ls/?q=%gg");
  CHECK(info.variables.at("q") == "%gg");
}

TEST_CASE("variable-to-id mapping is configurable") {
  VariableMap vars;
  vars.product = "prod";
  const PageInfo info = classify("/ls/?prod=12&p=9", vars);
  CHECK(info.product_id == 12);
}

TEST_CASE("load_catalog reads the four tables") {
  std::stringstream kategorie("148,Earphones\n2,Fridges\n");
  std::stringstream list("44,Free standing combi refrigerators,extra,cols\n");
  std::stringstream znacka("");
  std::stringstream tema("5,Kitchen\n");
  const Catalog cat = load_catalog(kategorie, list, znacka, tema);
  CHECK(cat.kategorie.at(148) == "Earphones");
  CHECK(cat.list.at(44) == "Free standing combi refrigerators");
  CHECK(cat.znacka.empty());
  CHECK(cat.tema.at(5) == "Kitchen");
}

TEST_CASE("load_catalog rejects duplicates and malformed rows") {
  {
    std::stringstream kategorie("5,a\n5,b\n"), list(""), znacka(""), tema("");
    CHECK_THROWS_AS(load_catalog(kategorie, list, znacka, tema), DuplicateId);
  }
  {
    std::stringstream kategorie("notanumber,a\n"), list(""), znacka(""), tema("");
    CHECK_THROWS_AS(load_catalog(kategorie, list, znacka, tema), MalformedCatalogRow);
  }
  {
    std::stringstream kategorie("nodelimiter\n"), list(""), znacka(""), tema("");
    CHECK_THROWS_AS(load_catalog(kategorie, list, znacka, tema), MalformedCatalogRow);
  }
}

TEST_CASE("resolve attaches labels and counts unresolved ids") {
  std::stringstream kategorie("148,Earphones\n"), list("7,Hobs\n"), znacka(""),
      tema("");
  const Catalog cat = load_catalog(kategorie, list, znacka, tema);

  ResolveStats stats;
  PageInfo info = classify("/ct/?c=148");
  const PageInfo resolved = resolve(info, cat, stats);
  CHECK(resolved.category_label == "Earphones");
  CHECK(stats.unresolved == 0);
  // only labels may change
  CHECK(resolved.page_type == info.page_type);
  CHECK(resolved.variables == info.variables);

  PageInfo missing = classify("/ls/?p=1000000000");
  const PageInfo unresolved = resolve(missing, cat, stats);
  CHECK(!unresolved.product_label.has_value());
  CHECK(stats.unresolved == 1);

  PageInfo absent = classify("/akce/");
  resolve(absent, cat, stats);
  CHECK(stats.unresolved == 1);  // nothing to resolve, nothing counted
}
