#include "xshop/page.hpp"

#include <cctype>
#include <cstdlib>
#include <istream>

#include "xshop/errors.hpp"

namespace xshop {

const std::array<std::pair<const char*, PageType>, 20> kPageTokens = {{
    {"ct", PageType::Ct},
    {"ls", PageType::Ls},
    {"dt", PageType::Dt},
    {"znacka", PageType::Znacka},
    {"akce", PageType::Akce},
    {"df", PageType::Df},
    {"findf", PageType::Findf},
    {"findp", PageType::Findp},
    {"setp", PageType::Setp},
    {"poradna", PageType::Poradna},
    {"kosik", PageType::Kosik},
    {"obchody-elektro", PageType::ObchodyElektro},
    {"kontakt", PageType::Kontakt},
    {"faq", PageType::Faq},
    {"onakupu", PageType::Onakupu},
    {"splatky", PageType::Splatky},
    {"mailc", PageType::Mailc},
    {"mailp", PageType::Mailp},
    {"mailf", PageType::Mailf},
    {"mailr", PageType::Mailr},
}};

std::string page_type_name(PageType t) {
  if (t == PageType::Home) return "HOME";
  if (t == PageType::Other) return "OTHER";
  for (const auto& [token, type] : kPageTokens)
    if (type == t) return token;
  return "OTHER";
}

std::string url_unescape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '+') {
      out += ' ';
    } else if (s[i] == '%' && i + 2 < s.size() && std::isxdigit((unsigned char)s[i + 1]) &&
               std::isxdigit((unsigned char)s[i + 2])) {
      const char hex[3] = {s[i + 1], s[i + 2], 0};
      out += static_cast<char>(std::strtol(hex, nullptr, 16));
      i += 2;
    } else {
      out += s[i];  // malformed escapes pass through
    }
  }
  return out;
}

namespace {

// a value is an extractable id only if it renders back verbatim
std::optional<std::int64_t> as_id(const std::string& value) {
  if (value.empty() || value.size() > 18) return std::nullopt;
  if (value.size() > 1 && value[0] == '0') return std::nullopt;
  for (char c : value)
    if (c < '0' || c > '9') return std::nullopt;
  return std::strtoll(value.c_str(), nullptr, 10);
}

}  // namespace

PageInfo classify(const std::string& path_and_query, const VariableMap& vars) {
  PageInfo info;
  std::size_t q = path_and_query.find('?');
  const std::string path =
      q == std::string::npos ? path_and_query : path_and_query.substr(0, q);

  // first path segment decides the type
  std::string segment;
  if (path.size() > 1) {
    std::size_t end = path.find('/', 1);
    segment = path.substr(1, end == std::string::npos ? std::string::npos : end - 1);
  }
  if (segment.empty()) {
    info.page_type = PageType::Home;
  } else {
    info.page_type = PageType::Other;
    for (const auto& [token, type] : kPageTokens) {
      if (segment == token) {
        info.page_type = type;
        break;
      }
    }
  }

  if (q != std::string::npos) {
    std::size_t pos = q + 1;
    while (pos <= path_and_query.size()) {
      std::size_t amp = path_and_query.find('&', pos);
      if (amp == std::string::npos) amp = path_and_query.size();
      const std::string pair = path_and_query.substr(pos, amp - pos);
      if (!pair.empty()) {
        std::size_t eq = pair.find('=');
        std::string name = eq == std::string::npos ? pair : pair.substr(0, eq);
        std::string value = eq == std::string::npos ? "" : pair.substr(eq + 1);
        if (!name.empty())
          info.variables[url_unescape(name)] = url_unescape(value);
      }
      pos = amp + 1;
    }
  }

  auto lookup = [&](const std::string& name) -> std::optional<std::int64_t> {
    auto it = info.variables.find(name);
    if (it == info.variables.end()) return std::nullopt;
    return as_id(it->second);
  };
  info.category_id = lookup(vars.category);
  info.product_id = lookup(vars.product);
  info.brand_id = lookup(vars.brand);
  info.theme_id = lookup(vars.theme);
  return info;
}

namespace {

std::map<std::int64_t, std::string> load_table(std::istream& in, const char* name,
                                               char delim) {
  std::map<std::int64_t, std::string> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t d = line.find(delim);
    if (d == std::string::npos)
      throw MalformedCatalogRow(std::string(name) + ":" + std::to_string(line_no) +
                                ": need at least id and label");
    const std::string id_text = line.substr(0, d);
    std::size_t d2 = line.find(delim, d + 1);
    const std::string label =
        line.substr(d + 1, d2 == std::string::npos ? std::string::npos : d2 - d - 1);
    char* end = nullptr;
    const std::int64_t id = std::strtoll(id_text.c_str(), &end, 10);
    if (id_text.empty() || end != id_text.c_str() + id_text.size())
      throw MalformedCatalogRow(std::string(name) + ":" + std::to_string(line_no) +
                                ": bad id '" + id_text + "'");
    if (!table.emplace(id, label).second)
      throw DuplicateId(std::string(name) + ": duplicate id " + std::to_string(id));
  }
  return table;
}

}  // namespace

Catalog load_catalog(std::istream& kategorie, std::istream& list, std::istream& znacka,
                     std::istream& tema, char delimiter) {
  Catalog c;
  c.kategorie = load_table(kategorie, "kategorie", delimiter);
  c.list = load_table(list, "list", delimiter);
  c.znacka = load_table(znacka, "znacka", delimiter);
  c.tema = load_table(tema, "tema", delimiter);
  return c;
}

PageInfo resolve(PageInfo info, const Catalog& catalog, ResolveStats& stats) {
  auto attach = [&](const std::optional<std::int64_t>& id,
                    const std::map<std::int64_t, std::string>& table,
                    std::optional<std::string>& label) {
    if (!id) return;
    auto it = table.find(*id);
    if (it == table.end())
      ++stats.unresolved;
    else
      label = it->second;
  };
  attach(info.category_id, catalog.kategorie, info.category_label);
  attach(info.product_id, catalog.list, info.product_label);
  attach(info.brand_id, catalog.znacka, info.brand_label);
  attach(info.theme_id, catalog.tema, info.theme_label);
  return info;
}

}  // namespace xshop
