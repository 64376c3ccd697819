#pragma once

#include "lielab/grading.hpp"

#include <fstream>
#include <sstream>

namespace lielab {

enum class NormKind { euclidean, l1, linf, form, polytope };

/// Norm on the distribution. `form` holds a symmetric positive matrix acting on
/// distribution coordinates; `polytope` holds vertices of the unit ball (ambient vectors
/// in the distribution; their negatives are implied).
struct NormSpec {
  NormKind kind = NormKind::euclidean;
  std::vector<std::vector<Rational>> form;
  std::vector<Vec> vertices;
};

struct AlgebraFile {
  std::string name;
  StructureTensor tensor;
  std::optional<Subspace> distribution;
  std::vector<Subspace> grading;
  NormSpec norm;
  std::vector<std::pair<std::string, std::string>> expectations;
};

struct ParseError : Error {
  int line;
  ParseError(int l, const std::string& msg) : Error("line " + std::to_string(l) + ": " + msg), line(l) {}
};

inline const std::vector<std::string>& expectation_keys() {
  static const std::vector<std::string> keys{"step",  "alpha1_inf", "alpha2_inf", "alpha_inf",
                                             "beta",  "alpha0",     "beta0",      "carnot",
                                             "exhaustive"};
  return keys;
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct LineParser {
  int line;
  const std::vector<std::string>& names;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, msg); }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    fail("unknown basis element '" + name + "'");
  }

  Rational rational(const std::string& s) const {
    try {
      return parse_rational(s);
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  /// "c1*a + b - 1/2*c" as a coordinate vector.
  Vec combination(std::string_view text) const {
    std::string s;
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) fail("empty linear combination");
    Vec v = zero_vec(names.size());
    std::size_t i = 0;
    while (i < s.size()) {
      bool neg = false;
      if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
      } else if (i != 0) {
        fail("expected '+' or '-' in '" + s + "'");
      }
      std::size_t j = i;
      while (j < s.size() && s[j] != '+' && s[j] != '-') ++j;
      const std::string term = s.substr(i, j - i);
      if (term.empty()) fail("dangling sign in '" + s + "'");
      Rational c = 1;
      std::string name = term;
      if (auto star = term.find('*'); star != std::string::npos) {
        c = rational(term.substr(0, star));
        name = term.substr(star + 1);
      }
      const std::size_t k = index_of(name);
      v[k] += neg ? Rational(-c) : c;
      i = j;
    }
    return v;
  }

  /// Contents of "span(...)" split on commas.
  std::vector<Vec> span_list(const std::string& text) const {
    const std::string t = trim(text);
    if (t.rfind("span(", 0) != 0 || t.back() != ')') fail("expected span(...), got '" + t + "'");
    const std::string inner = t.substr(5, t.size() - 6);
    std::vector<Vec> out;
    if (trim(inner).empty()) return out;
    for (const auto& part : split(inner, ',')) out.push_back(combination(part));
    return out;
  }
};

inline std::string combination_text(const Vec& v, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    const Rational a = abs(v[i]);
    if (out.empty())
      out += v[i] < 0 ? "-" : "";
    else
      out += v[i] < 0 ? " - " : " + ";
    if (a != 1) out += to_string(a) + "*";
    out += names[i];
  }
  return out.empty() ? "0" : out;
}

}  // namespace detail

inline AlgebraFile parse_algebra(std::string_view text) {
  AlgebraFile f;
  std::optional<std::size_t> dim;
  std::vector<std::string> names;
  std::vector<std::tuple<int, std::string, std::string, std::string>> brackets;
  std::vector<std::pair<int, std::string>> grading_lines;
  std::optional<std::pair<int, std::string>> distribution_line, norm_line;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string l = detail::trim(raw);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
    const std::string lhs = detail::trim(l.substr(0, eq));
    const std::string rhs = detail::trim(l.substr(eq + 1));
    std::istringstream words(lhs);
    std::vector<std::string> key;
    for (std::string w; words >> w;) key.push_back(w);
    if (key.empty()) throw ParseError(line, "missing key");
    const std::string& k0 = key[0];
    if (k0 == "name" && key.size() == 1) {
      f.name = rhs;
    } else if (k0 == "dim" && key.size() == 1) {
      try {
        std::size_t used = 0;
        const long d = std::stol(rhs, &used);
        if (used != rhs.size() || d <= 0) throw std::invalid_argument("");
        dim = static_cast<std::size_t>(d);
      } catch (const std::exception&) {
        throw ParseError(line, "dim must be a positive integer");
      }
    } else if (k0 == "basis" && key.size() == 1) {
      std::string r = rhs;
      std::replace(r.begin(), r.end(), ',', ' ');
      std::istringstream ns(r);
      names.clear();
      for (std::string nm; ns >> nm;) {
        if (std::find(names.begin(), names.end(), nm) != names.end())
          throw ParseError(line, "duplicate basis name '" + nm + "'");
        names.push_back(nm);
      }
    } else if (k0 == "bracket" && key.size() == 3) {
      brackets.emplace_back(line, key[1], key[2], rhs);
    } else if (k0 == "distribution" && key.size() == 1) {
      distribution_line = {line, rhs};
    } else if (k0 == "grading" && key.size() == 2) {
      grading_lines.emplace_back(line, key[1] + "=" + rhs);
    } else if (k0 == "norm" && key.size() == 1) {
      norm_line = {line, rhs};
    } else if (k0 == "expect" && key.size() == 2) {
      const auto& ks = expectation_keys();
      if (std::find(ks.begin(), ks.end(), key[1]) == ks.end())
        throw ParseError(line, "unknown expectation '" + key[1] + "'");
      f.expectations.emplace_back(key[1], rhs);
    } else {
      throw ParseError(line, "unknown key '" + lhs + "'");
    }
  }
  if (!dim) throw ParseError(line, "missing 'dim'");
  if (names.empty())
    for (std::size_t i = 0; i < *dim; ++i) names.push_back("e" + std::to_string(i + 1));
  if (names.size() != *dim) throw ParseError(line, "basis has " + std::to_string(names.size()) +
                                                       " names but dim is " + std::to_string(*dim));
  f.tensor = StructureTensor(*dim, names);
  for (const auto& [ln, a, b, rhs] : brackets) {
    detail::LineParser p{ln, names};
    const std::size_t i = p.index_of(a), j = p.index_of(b);
    if (i == j) p.fail("bracket " + a + " " + a + " must vanish and cannot be given");
    const Vec v = p.combination(rhs);
    for (std::size_t k = 0; k < *dim; ++k)
      if (v[k] != 0) f.tensor.add(i, j, k, v[k]);
  }
  if (const auto bad = jacobi_failures(f.tensor); !bad.empty()) {
    const auto& b = bad.front();
    throw ParseError(brackets.empty() ? line : std::get<0>(brackets.back()),
                     "brackets violate the Jacobi identity on (" + names[b[0]] + ", " + names[b[1]] + ", " +
                         names[b[2]] + ")");
  }
  if (distribution_line) {
    detail::LineParser p{distribution_line->first, names};
    if (distribution_line->second == "all")
      f.distribution = Subspace::full(*dim);
    else
      f.distribution = Subspace::span(*dim, p.span_list(distribution_line->second));
  }
  if (!grading_lines.empty()) {
    std::map<int, std::pair<int, std::vector<Vec>>> layers;
    for (const auto& [ln, body] : grading_lines) {
      detail::LineParser p{ln, names};
      const auto eq = body.find('=');
      const std::string label = body.substr(0, eq);
      if (label.size() < 2 || (label[0] != 'V' && label[0] != 'W') ||
          !std::all_of(label.begin() + 1, label.end(), [](char c) { return std::isdigit(c); }))
        p.fail("grading layers are named V1, V2, ...");
      const int j = std::stoi(label.substr(1));
      if (j < 1 || layers.count(j)) p.fail("bad or repeated layer " + label);
      layers[j] = {ln, p.span_list(body.substr(eq + 1))};
    }
    int expect = 1;
    for (const auto& [j, entry] : layers) {
      if (j != expect) throw ParseError(entry.first, "grading layers must be numbered 1..s");
      f.grading.push_back(Subspace::span(*dim, entry.second));
      ++expect;
    }
  }
  if (norm_line) {
    detail::LineParser p{norm_line->first, names};
    const std::string& s = norm_line->second;
    if (s == "euclidean") {
      f.norm.kind = NormKind::euclidean;
    } else if (s == "l1") {
      f.norm.kind = NormKind::l1;
    } else if (s == "linf") {
      f.norm.kind = NormKind::linf;
    } else if (s.rfind("form(", 0) == 0 && s.back() == ')') {
      f.norm.kind = NormKind::form;
      for (const auto& row : detail::split(s.substr(5, s.size() - 6), ';')) {
        std::vector<Rational> r;
        std::string rr = row;
        std::replace(rr.begin(), rr.end(), ',', ' ');
        std::istringstream rs(rr);
        for (std::string x; rs >> x;) r.push_back(p.rational(x));
        f.norm.form.push_back(std::move(r));
      }
      for (const auto& r : f.norm.form)
        if (r.size() != f.norm.form.size()) p.fail("form(...) must be a square matrix");
    } else if (s.rfind("polytope(", 0) == 0 && s.back() == ')') {
      f.norm.kind = NormKind::polytope;
      for (const auto& v : detail::split(s.substr(9, s.size() - 10), ';'))
        f.norm.vertices.push_back(p.combination(v));
      if (f.norm.vertices.empty()) p.fail("polytope needs vertices");
    } else {
      p.fail("unknown norm '" + s + "'");
    }
  }
  return f;
}

inline AlgebraFile load_algebra(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_algebra(ss.str());
}

inline std::string serialize_algebra(const AlgebraFile& f) {
  const auto& names = f.tensor.names();
  std::ostringstream out;
  if (!f.name.empty()) out << "name = " << f.name << "\n";
  out << "dim = " << f.tensor.dim() << "\n";
  out << "basis =";
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : " ") << names[i];
  out << "\n";
  const std::size_t n = f.tensor.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec v = basis_bracket(f.tensor, i, j);
      if (!is_zero(v))
        out << "bracket " << names[i] << " " << names[j] << " = "
            << detail::combination_text(v, names) << "\n";
    }
  auto span_text = [&](const Subspace& s) {
    std::string t = "span(";
    for (std::size_t i = 0; i < s.basis().size(); ++i)
      t += (i ? ", " : "") + detail::combination_text(s.basis()[i], names);
    return t + ")";
  };
  if (f.distribution) out << "distribution = " << span_text(*f.distribution) << "\n";
  for (std::size_t j = 0; j < f.grading.size(); ++j)
    out << "grading V" << j + 1 << " = " << span_text(f.grading[j]) << "\n";
  switch (f.norm.kind) {
    case NormKind::euclidean: out << "norm = euclidean\n"; break;
    case NormKind::l1: out << "norm = l1\n"; break;
    case NormKind::linf: out << "norm = linf\n"; break;
    case NormKind::form: {
      out << "norm = form(";
      for (std::size_t r = 0; r < f.norm.form.size(); ++r) {
        out << (r ? "; " : "");
        for (std::size_t c = 0; c < f.norm.form[r].size(); ++c)
          out << (c ? " " : "") << to_string(f.norm.form[r][c]);
      }
      out << ")\n";
      break;
    }
    case NormKind::polytope: {
      out << "norm = polytope(";
      for (std::size_t r = 0; r < f.norm.vertices.size(); ++r)
        out << (r ? "; " : "") << detail::combination_text(f.norm.vertices[r], names);
      out << ")\n";
      break;
    }
  }
  for (const auto& [k, v] : f.expectations) out << "expect " << k << " = " << v << "\n";
  return out.str();
}

}  // namespace lielab
