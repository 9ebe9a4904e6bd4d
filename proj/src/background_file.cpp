#include "sugra/background_file.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sugra {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s + ",") {
    if (ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char ch : s) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) return false;
  }
  return true;
}

struct Line {
  std::size_t number;
  std::string key;
  std::string value;
  std::size_t value_column;  // 0-based column of value in the raw line
};

struct PieceInfo {
  int degree;
  bool lorentz;
  KForm FluxSpec::*member;
};

const std::map<std::string, PieceInfo>& piece_table() {
  static const std::map<std::string, PieceInfo> t = {
      {"alpha", {4, true, &FluxSpec::alpha}},  {"beta", {3, true, &FluxSpec::beta}},
      {"nu", {1, false, &FluxSpec::nu}},       {"gamma", {2, true, &FluxSpec::gamma}},
      {"delta", {2, false, &FluxSpec::delta}}, {"varpi", {1, true, &FluxSpec::varpi}},
      {"epsilon", {3, false, &FluxSpec::epsilon}}, {"theta", {4, false, &FluxSpec::theta}},
  };
  return t;
}

class FileParser {
 public:
  BackgroundFile parse(const std::string& text) {
    collect(text);
    if (sections_.empty()) throw BackgroundFileError(1, "empty background file");
    for (const char* required : {"background", "chart", "metric.lorentz", "metric.riemann"}) {
      if (!sections_.count(required)) throw BackgroundFileError(last_line_, std::string("missing section [") + required + "]");
    }
    parse_background();
    parse_chart();
    Metric lorentz = parse_metric("metric.lorentz", lorentz_block_);
    Metric riemann = parse_metric("metric.riemann", riemann_block_);
    ProductStructure ps{std::move(lorentz), std::move(riemann)};
    try {
      product_metric(ps);
    } catch (const Error& e) {
      throw BackgroundFileError(sections_.at("metric.riemann").header, e.what());
    }
    FluxSpec fs = parse_flux(ps);
    Background bg{id_, description_, chart_, std::move(ps), std::move(fs), {}, {}};
    bg.box.assign(chart_.dim(), {-1.0, 1.0});
    BackgroundFile out{std::move(bg), {}, {}, {}};
    parse_sample(out);
    return out;
  }

 private:
  struct Section {
    std::size_t header = 0;
    std::vector<Line> lines;
  };

  void collect(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::size_t number = 0;
    Section* current = nullptr;
    while (std::getline(in, raw)) {
      ++number;
      last_line_ = number;
      std::string body = raw.substr(0, raw.find('#'));
      std::string t = trim(body);
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']') throw BackgroundFileError(number, "unterminated section header");
        std::string name = trim(std::string_view(t).substr(1, t.size() - 2));
        static const std::set<std::string> known{"background", "chart", "metric.lorentz", "metric.riemann", "flux",
                                                 "sample"};
        if (!known.count(name)) throw BackgroundFileError(number, "unknown section [" + name + "]");
        if (sections_.count(name)) throw BackgroundFileError(number, "duplicate section [" + name + "]");
        current = &sections_[name];
        current->header = number;
        continue;
      }
      if (!current) throw BackgroundFileError(number, "assignment outside of a section");
      auto eq = body.find('=');
      if (eq == std::string::npos) throw BackgroundFileError(number, "expected 'key = value'");
      std::string key = trim(std::string_view(body).substr(0, eq));
      std::size_t col = eq + 1;
      while (col < body.size() && std::isspace(static_cast<unsigned char>(body[col]))) ++col;
      std::string value = trim(std::string_view(body).substr(eq + 1));
      if (key.empty()) throw BackgroundFileError(number, "missing key");
      if (value.empty()) throw BackgroundFileError(number, "missing value for '" + key + "'");
      current->lines.push_back({number, key, value, col});
    }
  }

  Expr expr(const Line& l, std::string_view text, std::size_t offset = 0) const {
    try {
      return parse_expr(text, chart_);
    } catch (const ParseError& e) {
      throw BackgroundFileError(l.number, std::string(e.what()).substr(0, std::string(e.what()).rfind(" at position")) +
                                              " at column " + std::to_string(l.value_column + offset + e.position() + 1));
    }
  }

  double number(const Line& l) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(l.value.data(), l.value.data() + l.value.size(), v);
    if (ec != std::errc() || ptr != l.value.data() + l.value.size()) {
      throw BackgroundFileError(l.number, "expected a number for '" + l.key + "'");
    }
    return v;
  }

  std::uint64_t integer(const Line& l) const {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(l.value.data(), l.value.data() + l.value.size(), v);
    if (ec != std::errc() || ptr != l.value.data() + l.value.size()) {
      throw BackgroundFileError(l.number, "expected a non-negative integer for '" + l.key + "'");
    }
    return v;
  }

  void parse_background() {
    for (const auto& l : sections_.at("background").lines) {
      if (l.key == "id") {
        id_ = l.value;
      } else if (l.key == "description") {
        description_ = l.value;
      } else {
        throw BackgroundFileError(l.number, "unknown key '" + l.key + "' in [background]");
      }
    }
    if (id_.empty()) throw BackgroundFileError(sections_.at("background").header, "missing id");
  }

  void parse_chart() {
    std::vector<std::string> lorentz, riemann;
    const auto& sec = sections_.at("chart");
    for (const auto& l : sec.lines) {
      auto names = split_list(l.value);
      if (l.key == "lorentz") {
        lorentz = names;
      } else if (l.key == "riemann") {
        riemann = names;
      } else {
        throw BackgroundFileError(l.number, "unknown key '" + l.key + "' in [chart]");
      }
    }
    if (lorentz.empty() || riemann.empty()) {
      throw BackgroundFileError(sec.header, "[chart] needs both lorentz and riemann coordinates");
    }
    std::vector<std::string> all = lorentz;
    all.insert(all.end(), riemann.begin(), riemann.end());
    try {
      chart_ = Chart(all);
    } catch (const Error& e) {
      throw BackgroundFileError(sec.header, e.what());
    }
    for (std::size_t i = 0; i < all.size(); ++i) (i < lorentz.size() ? lorentz_block_ : riemann_block_).push_back(i);
  }

  std::size_t coordinate(const Line& l, const std::string& name) const {
    auto i = chart_.index_of(name);
    if (!i) throw BackgroundFileError(l.number, "unknown coordinate '" + name + "'");
    return *i;
  }

  Metric parse_metric(const std::string& section, const std::vector<std::size_t>& block) {
    const auto& sec = sections_.at(section);
    const std::size_t n = block.size();
    ExprMatrix g(n);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::optional<Signature> sig;
    std::vector<Expr> singular;
    for (const auto& l : sec.lines) {
      if (l.key == "signature") {
        auto parts = split_list(l.value);
        int p = 0, q = 0;
        bool ok = parts.size() == 2;
        if (ok) {
          auto r1 = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), p);
          auto r2 = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), q);
          ok = r1.ec == std::errc() && r2.ec == std::errc() && r1.ptr == parts[0].data() + parts[0].size() &&
               r2.ptr == parts[1].data() + parts[1].size() && p >= 0 && q >= 0;
        }
        if (!ok) throw BackgroundFileError(l.number, "signature must be 'p, q'");
        if (static_cast<std::size_t>(p + q) != n) {
          throw BackgroundFileError(l.number, "signature does not match the block dimension");
        }
        sig = Signature{p, q};
      } else if (l.key == "singular") {
        singular.push_back(expr(l, l.value));
      } else if (l.key.size() > 3 && l.key.compare(0, 2, "g(") == 0 && l.key.back() == ')') {
        auto names = split_list(l.key.substr(2, l.key.size() - 3));
        if (names.size() != 2) throw BackgroundFileError(l.number, "metric entries are written g(a, b)");
        std::size_t a = coordinate(l, names[0]), b = coordinate(l, names[1]);
        auto ia = std::find(block.begin(), block.end(), a), ib = std::find(block.begin(), block.end(), b);
        if (ia == block.end() || ib == block.end()) {
          throw BackgroundFileError(l.number, "block violation: entry outside the [" + section + "] coordinates");
        }
        std::size_t i = ia - block.begin(), j = ib - block.begin();
        if (!seen.insert({std::min(i, j), std::max(i, j)}).second) {
          throw BackgroundFileError(l.number, "duplicate metric entry");
        }
        Expr e = expr(l, l.value);
        IndexMask own = 0;
        for (auto k : block) own |= 1u << k;
        if (e.deps() & ~own) {
          throw BackgroundFileError(l.number, "block violation: metric entry depends on the other factor");
        }
        g(i, j) = e;
        g(j, i) = e;
      } else {
        throw BackgroundFileError(l.number, "unknown key '" + l.key + "' in [" + section + "]");
      }
    }
    if (!sig) throw BackgroundFileError(sec.header, "missing signature in [" + section + "]");
    try {
      return Metric(chart_, block, std::move(g), *sig, std::move(singular));
    } catch (const Error& e) {
      throw BackgroundFileError(sec.header, e.what());
    }
  }

  // Splits "coeff ^ a b c" at the last top-level '^' whose right side is a
  // list of coordinate names.
  KForm form(const Line& l) const {
    int depth = 0;
    std::optional<std::size_t> split;
    for (std::size_t i = 0; i < l.value.size(); ++i) {
      char ch = l.value[i];
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch == '^' && depth == 0) {
        auto names = split_list(l.value.substr(i + 1));
        bool all_ids = !names.empty();
        for (const auto& s : names) all_ids = all_ids && is_identifier(s);
        if (all_ids) split = i;
      }
    }
    if (!split) throw BackgroundFileError(l.number, "expected '<coefficient> ^ <coordinates>'");
    std::vector<std::size_t> idx;
    for (const auto& s : split_list(l.value.substr(*split + 1))) idx.push_back(coordinate(l, s));
    Expr coeff = expr(l, std::string_view(l.value).substr(0, *split));
    std::set<std::size_t> distinct(idx.begin(), idx.end());
    if (distinct.size() != idx.size()) throw BackgroundFileError(l.number, "repeated coordinate in wedge monomial");
    return KForm::monomial(chart_, coeff, idx);
  }

  FluxSpec parse_flux(const ProductStructure& ps) {
    FluxSpec fs(chart_);
    auto it = sections_.find("flux");
    if (it == sections_.end()) return fs;
    const IndexMask L = ps.lorentz.block_mask(), R = ps.riemann.block_mask();
    std::set<std::string> scalars_seen;
    for (const auto& l : it->second.lines) {
      if (l.key == "phi" || l.key == "psi") {
        if (!scalars_seen.insert(l.key).second) throw BackgroundFileError(l.number, "duplicate '" + l.key + "'");
        Expr e = expr(l, l.value);
        const IndexMask own = l.key == "phi" ? R : L;
        if (e.deps() & ~own) {
          throw BackgroundFileError(l.number, "block violation: " + l.key + " depends on the other factor");
        }
        (l.key == "phi" ? fs.phi : fs.psi) = e;
        continue;
      }
      auto p = piece_table().find(l.key);
      if (p == piece_table().end()) throw BackgroundFileError(l.number, "unknown flux piece '" + l.key + "'");
      KForm f = form(l);
      if (f.degree() != p->second.degree) {
        throw BackgroundFileError(l.number, l.key + " must have degree " + std::to_string(p->second.degree));
      }
      const IndexMask own = p->second.lorentz ? L : R;
      if ((f.support() & ~own) || (f.coefficient_deps() & ~own)) {
        throw BackgroundFileError(l.number, std::string("block violation: ") + l.key + " belongs to the " +
                                                (p->second.lorentz ? "Lorentzian" : "Riemannian") + " factor");
      }
      fs.*(p->second.member) = fs.*(p->second.member) + f;
    }
    return fs;
  }

  void parse_sample(BackgroundFile& out) {
    auto it = sections_.find("sample");
    if (it == sections_.end()) return;
    Background& bg = out.background;
    for (const auto& l : it->second.lines) {
      if (l.key == "points") {
        out.points = integer(l);
        if (*out.points == 0) throw BackgroundFileError(l.number, "points must be positive");
      } else if (l.key == "seed") {
        out.seed = integer(l);
      } else if (l.key == "tolerance") {
        out.tolerance = number(l);
        if (!(*out.tolerance > 0.0)) throw BackgroundFileError(l.number, "tolerance must be positive");
      } else if (l.key == "margin") {
        bg.margin = number(l);
        if (!(bg.margin >= 0.0)) throw BackgroundFileError(l.number, "margin must be non-negative");
      } else if (l.key == "avoid") {
        bg.singular.push_back(expr(l, l.value));
      } else if (l.key.size() > 5 && l.key.compare(0, 4, "box(") == 0 && l.key.back() == ')') {
        std::size_t i = coordinate(l, trim(l.key.substr(4, l.key.size() - 5)));
        auto parts = split_list(l.value);
        if (parts.size() != 2) throw BackgroundFileError(l.number, "box is written 'lo, hi'");
        double lo = 0.0, hi = 0.0;
        auto r1 = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), lo);
        auto r2 = std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), hi);
        if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != parts[0].data() + parts[0].size() ||
            r2.ptr != parts[1].data() + parts[1].size() || !(lo < hi)) {
          throw BackgroundFileError(l.number, "box bounds must be numbers with lo < hi");
        }
        bg.box[i] = {lo, hi};
      } else {
        throw BackgroundFileError(l.number, "unknown key '" + l.key + "' in [sample]");
      }
    }
  }

  std::map<std::string, Section> sections_;
  std::size_t last_line_ = 1;
  std::string id_, description_;
  Chart chart_;
  std::vector<std::size_t> lorentz_block_, riemann_block_;
};

}  // namespace

BackgroundFile parse_background_text(const std::string& text) { return FileParser().parse(text); }

BackgroundFile parse_background_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open background file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_background_text(ss.str());
}

}  // namespace sugra
