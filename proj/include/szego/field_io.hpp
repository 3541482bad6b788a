#pragma once

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "config.hpp"
#include "core.hpp"

// Field file: a text header of "key value" lines terminated by "end", then the
// payload. Binary payload: little-endian f64 (Re, Im) pairs, components in header
// order, each component in row-major grid order (spatial axes, then x').
// CSV payload: one row per value, "component,i_1,...,i_2n,k,re,im".

namespace szego {

enum class FieldFormat { binary, csv };

inline FieldFormat field_format_from_string(const std::string& s) {
  if (s == "binary") return FieldFormat::binary;
  if (s == "csv") return FieldFormat::csv;
  throw UsageError("unknown format '" + s + "' (expected csv or binary)");
}

inline constexpr const char* field_magic = "SZEGO-FIELD 1";

namespace detail {

inline std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_real(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw UsageError("field file: bad number '" + s + "' in " + what);
  return v;
}

inline void put_f64le(std::ostream& os, double v) {
  static_assert(sizeof(double) == 8);
  unsigned char b[8];
  std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(u >> (8 * k));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_f64le(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw UsageError("field file: truncated binary payload");
  std::uint64_t u = 0;
  for (int k = 0; k < 8; ++k) u |= static_cast<std::uint64_t>(b[k]) << (8 * k);
  return std::bit_cast<double>(u);
}

}  // namespace detail

inline void write_form(std::ostream& os, const FormField& u, FieldFormat fmt) {
  const GridSpec& g = u.grid;
  os << field_magic << "\n";
  os << "n " << g.n << "\n";
  os << "q " << u.q << "\n";
  os << "spatial_radius " << detail::fmt_real(g.spatial_radius) << "\n";
  os << "spatial_points " << g.spatial_points << "\n";
  os << "vertical_radius " << detail::fmt_real(g.vertical_radius) << "\n";
  os << "vertical_points " << g.vertical_points << "\n";
  os << "freq_max " << detail::fmt_real(g.freq_max) << "\n";
  os << "quadrature_rule " << to_string(g.rule) << "\n";
  os << "components " << u.components.size() << "\n";
  for (const auto& [J, f] : u.components) os << "component " << J.str() << "\n";
  os << "encoding " << (fmt == FieldFormat::binary ? "f64le" : "csv") << "\n";
  os << "end\n";
  if (fmt == FieldFormat::binary) {
    for (const auto& [J, f] : u.components)
      for (const cplx& v : f.values) {
        detail::put_f64le(os, v.real());
        detail::put_f64le(os, v.imag());
      }
    return;
  }
  os << "component";
  for (int a = 0; a < g.spatial_dims(); ++a) os << ",i" << (a + 1);
  os << ",k,re,im\n";
  const int N = g.vertical_points;
  for (const auto& [J, f] : u.components) {
    std::string label = J.str();
    for (char& ch : label)
      if (ch == ',') ch = ' ';
    for (std::size_t s = 0; s < g.spatial_size(); ++s) {
      std::string idx;
      for (int i : g.spatial_multi(s)) idx += "," + std::to_string(i);
      for (int k = 0; k < N; ++k) {
        const cplx v = f.values[s * N + k];
        os << label << idx << "," << k << "," << detail::fmt_real(v.real()) << "," << detail::fmt_real(v.imag()) << "\n";
      }
    }
  }
}

inline FormField read_form(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != field_magic) throw UsageError("field file: missing header '" + std::string(field_magic) + "'");
  GridSpec g;
  int q = -1, ncomp = -1;
  std::vector<MultiIndex> comps;
  std::string encoding;
  bool ended = false;
  while (std::getline(is, line)) {
    if (line == "end") {
      ended = true;
      break;
    }
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw UsageError("field file: bad header line '" + line + "'");
    const std::string key = line.substr(0, sp), val = line.substr(sp + 1);
    if (key == "n") g.n = static_cast<int>(detail::parse_real(val, key));
    else if (key == "q") q = static_cast<int>(detail::parse_real(val, key));
    else if (key == "spatial_radius") g.spatial_radius = detail::parse_real(val, key);
    else if (key == "spatial_points") g.spatial_points = static_cast<int>(detail::parse_real(val, key));
    else if (key == "vertical_radius") g.vertical_radius = detail::parse_real(val, key);
    else if (key == "vertical_points") g.vertical_points = static_cast<int>(detail::parse_real(val, key));
    else if (key == "freq_max") g.freq_max = detail::parse_real(val, key);
    else if (key == "quadrature_rule") g.rule = quadrature_rule_from_string(val);
    else if (key == "components") ncomp = static_cast<int>(detail::parse_real(val, key));
    else if (key == "component") comps.push_back(detail::parse_multiindex(val));
    else if (key == "encoding") encoding = val;
    else throw UsageError("field file: unknown header key '" + key + "'");
  }
  if (!ended) throw UsageError("field file: header not terminated by 'end'");
  if (q < 0 || q > g.n) throw UsageError("field file: bad degree q");
  if (ncomp != static_cast<int>(comps.size())) throw UsageError("field file: component count mismatch");
  g.validate();
  FormField u(q, g);
  const std::size_t total = g.size();
  if (encoding == "f64le") {
    for (const auto& J : comps) {
      ScalarField f(g);
      for (std::size_t i = 0; i < total; ++i) {
        const double re = detail::get_f64le(is);
        const double im = detail::get_f64le(is);
        f.values[i] = cplx(re, im);
      }
      u.set(J, std::move(f));
    }
    if (is.peek() != std::char_traits<char>::eof()) throw UsageError("field file: trailing bytes after payload");
    return u;
  }
  if (encoding != "csv") throw UsageError("field file: unknown encoding '" + encoding + "'");
  if (!std::getline(is, line)) throw UsageError("field file: missing CSV column header");
  const int dims = g.spatial_dims();
  const int N = g.vertical_points;
  for (const auto& J : comps) {
    ScalarField f(g);
    for (std::size_t i = 0; i < total; ++i) {
      if (!std::getline(is, line)) throw UsageError("field file: truncated CSV payload");
      const auto cells = KeyValueText::split(line, ',');
      if (static_cast<int>(cells.size()) != dims + 4) throw UsageError("field file: bad CSV row '" + line + "'");
      std::string label = cells[0];
      for (char& ch : label)
        if (ch == ' ') ch = ',';
      if (detail::parse_multiindex(label) != J) throw UsageError("field file: CSV rows out of component order");
      std::size_t s = 0;
      for (int a = 0; a < dims; ++a) s = s * g.spatial_points + static_cast<std::size_t>(std::stoul(cells[1 + a]));
      const int k = std::stoi(cells[1 + dims]);
      if (s * N + k != i) throw UsageError("field file: CSV rows out of order");
      f.values[i] = cplx(detail::parse_real(cells[2 + dims], "re"), detail::parse_real(cells[3 + dims], "im"));
    }
    u.set(J, std::move(f));
  }
  return u;
}

inline void write_form_file(const std::string& path, const FormField& u, FieldFormat fmt) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  write_form(f, u, fmt);
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline FormField read_form_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open field file '" + path + "'");
  return read_form(f);
}

}  // namespace szego
