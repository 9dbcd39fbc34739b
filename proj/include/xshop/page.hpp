#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace xshop {

// First-level syntactic page types of the dataset, plus the root page and a
// catch-all for anything unforeseen. Classification is total.
enum class PageType {
  Home,
  Other,
  Ct,
  Ls,
  Dt,
  Znacka,
  Akce,
  Df,
  Findf,
  Findp,
  Setp,
  Poradna,
  Kosik,
  ObchodyElektro,
  Kontakt,
  Faq,
  Onakupu,
  Splatky,
  Mailc,
  Mailp,
  Mailf,
  Mailr,
};

// the named first-segment tokens (everything except Home/Other)
extern const std::array<std::pair<const char*, PageType>, 20> kPageTokens;

std::string page_type_name(PageType t);

struct PageInfo {
  PageType page_type = PageType::Other;
  std::map<std::string, std::string> variables;  // query params, URL-unescaped
  std::optional<std::int64_t> category_id;
  std::optional<std::int64_t> product_id;
  std::optional<std::int64_t> brand_id;
  std::optional<std::int64_t> theme_id;
  // labels attached by resolve()
  std::optional<std::string> category_label;
  std::optional<std::string> product_label;
  std::optional<std::string> brand_label;
  std::optional<std::string> theme_label;
};

// Which query variable feeds which id field. Only "c" (category) is attested
// in the dataset description; the rest is configurable guesswork.
struct VariableMap {
  std::string category = "c";
  std::string product = "p";
  std::string brand = "z";
  std::string theme = "t";
};

struct Catalog {
  std::map<std::int64_t, std::string> kategorie;  // categories
  std::map<std::int64_t, std::string> list;       // products
  std::map<std::int64_t, std::string> znacka;     // brands
  std::map<std::int64_t, std::string> tema;       // themes
};

// Total over syntactically valid paths (must start with "/").
PageInfo classify(const std::string& path_and_query,
                  const VariableMap& vars = VariableMap{});

Catalog load_catalog(std::istream& kategorie, std::istream& list, std::istream& znacka,
                     std::istream& tema, char delimiter = ',');

struct ResolveStats {
  std::size_t unresolved = 0;
};

// Attaches catalog labels to extracted ids; never touches page_type/variables.
PageInfo resolve(PageInfo info, const Catalog& catalog, ResolveStats& stats);

std::string url_unescape(const std::string& s);

}  // namespace xshop
