#pragma once
// Immutable filtered-complex container and serialization.
//
// Entries are simplices over input vertex ids (dim ≤ 3) with exact rational
// births in squared-scale units, sorted by (birth, dim, lexicographic ids).
// The text format is line-based and canonical, so read(write(x)) is
// byte-identical:
//
//   sdf v1 d=2 n=<count> eps=<num>/<den>
//   <birth num>/<den> <id> [<id> ...]
//   ...

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sdf/rational.hpp"

namespace sdf {

struct FiltrationEntry {
  std::vector<int> verts;  // strictly increasing ids, 1..4 of them
  Q birth;                 // squared scale
  int dim() const { return static_cast<int>(verts.size()) - 1; }
};

inline bool entry_less(const FiltrationEntry& a, const FiltrationEntry& b) {
  int c = cmp(a.birth, b.birth);
  if (c != 0) return c < 0;
  if (a.verts.size() != b.verts.size()) return a.verts.size() < b.verts.size();
  return a.verts < b.verts;
}

struct FiltrationStore {
  int n = 0;        // number of input points
  Q eps = Q(0);     // schedule epsilon; 0 marks schedule-free (oracle) stores
  std::vector<FiltrationEntry> entries;
  std::map<std::vector<int>, size_t> index;  // simplex -> entry position

  // Sort entries canonically and rebuild the index. Builders call this once.
  void finalize() {
    std::sort(entries.begin(), entries.end(), entry_less);
    index.clear();
    for (size_t i = 0; i < entries.size(); ++i) index[entries[i].verts] = i;
  }

  const FiltrationEntry* find(const std::vector<int>& verts) const {
    auto it = index.find(verts);
    return it == index.end() ? nullptr : &entries[it->second];
  }

  // Checks the mathematical invariants: well-formed simplices, nondecreasing
  // births, no duplicates, face closure with every face at an earlier
  // position. Any face-before-coface order within equal births is accepted;
  // finalize() additionally imposes the canonical (birth, dim, lex) order.
  std::vector<std::string> validate() const {
    std::vector<std::string> bad;
    auto name = [](const std::vector<int>& v) {
      std::string s = "{";
      for (size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
      return s + "}";
    };
    std::set<std::vector<int>> seen;
    for (size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      if (e.verts.empty() || e.verts.size() > 4)
        bad.push_back("bad dimension: " + name(e.verts));
      for (int v : e.verts)
        if (v < 0 || v >= n) bad.push_back("id out of range: " + name(e.verts));
      for (size_t j = 1; j < e.verts.size(); ++j)
        if (e.verts[j - 1] >= e.verts[j])
          bad.push_back("ids not strictly increasing: " + name(e.verts));
      if (sgn(e.birth) < 0) bad.push_back("negative birth: " + name(e.verts));
      if (!seen.insert(e.verts).second)
        bad.push_back("duplicate entry: " + name(e.verts));
      if (i + 1 < entries.size() && entries[i + 1].birth < e.birth)
        bad.push_back("entries out of order at position " + std::to_string(i));
      auto self = index.find(e.verts);
      if (self == index.end() || self->second != i)
        bad.push_back("index inconsistent: " + name(e.verts));
      // Face closure and monotone births over codim-1 faces (transitively
      // covers all faces).
      if (e.verts.size() > 1) {
        for (size_t skip = 0; skip < e.verts.size(); ++skip) {
          std::vector<int> f;
          for (size_t j = 0; j < e.verts.size(); ++j)
            if (j != skip) f.push_back(e.verts[j]);
          auto it = index.find(f);
          if (it == index.end()) {
            bad.push_back("face absent: " + name(f) + " of " + name(e.verts));
          } else if (entries[it->second].birth > e.birth || it->second >= i) {
            bad.push_back("face after coface: " + name(f) + " of " +
                          name(e.verts));
          }
        }
      }
    }
    return bad;
  }
};

inline std::string write_store(const FiltrationStore& st) {
  std::string out = "sdf v1 d=2 n=" + std::to_string(st.n) + " eps=" +
                    q_str(st.eps) + "\n";
  for (const auto& e : st.entries) {
    out += q_str(e.birth);
    for (int v : e.verts) out += " " + std::to_string(v);
    out += "\n";
  }
  return out;
}

inline FiltrationStore read_store(std::istream& in) {
  FiltrationStore st;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) -> std::runtime_error {
    return std::runtime_error("line " + std::to_string(lineno) + ": " + msg);
  };
  if (!std::getline(in, line)) throw std::runtime_error("empty filtration file");
  lineno = 1;
  {
    std::istringstream hs(line);
    std::string magic, ver, dtok, ntok, etok;
    hs >> magic >> ver >> dtok >> ntok >> etok;
    if (magic != "sdf" || ver != "v1" || dtok != "d=2" ||
        ntok.rfind("n=", 0) != 0 || etok.rfind("eps=", 0) != 0)
      throw fail("bad header");
    try {
      st.n = std::stoi(ntok.substr(2));
      st.eps = parse_q(etok.substr(4));
    } catch (const std::exception&) {
      throw fail("bad header");
    }
    std::string rest;
    if (hs >> rest) throw fail("bad header");
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string btok;
    ls >> btok;
    FiltrationEntry e;
    try {
      e.birth = parse_q(btok);
    } catch (const std::exception& ex) {
      throw fail(ex.what());
    }
    long id;
    while (ls >> id) e.verts.push_back(static_cast<int>(id));
    if (!ls.eof()) throw fail("malformed vertex id");
    if (e.verts.empty()) throw fail("entry has no vertex ids");
    if (e.verts.size() > 4) throw fail("entry has more than 4 vertex ids");
    for (size_t j = 1; j < e.verts.size(); ++j)
      if (e.verts[j - 1] >= e.verts[j])
        throw fail("vertex ids not strictly increasing");
    st.entries.push_back(std::move(e));
  }
  for (size_t i = 0; i < st.entries.size(); ++i)
    st.index[st.entries[i].verts] = i;
  return st;
}

inline FiltrationStore read_store_text(const std::string& text) {
  std::istringstream in(text);
  return read_store(in);
}

}  // namespace sdf
