#pragma once
// Brute-force exterior algebra used as an independent check of the library:
// forms are maps from sorted index lists to coefficients, signs come from
// counting inversions.

#include <map>
#include <random>
#include <vector>

#include "g2flow/exterior.hpp"

namespace oracle {

using Form = std::map<std::vector<int>, double>;

// lexicographic p-subsets of {0..6}
inline std::vector<std::vector<int>> subsets(int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == p) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < 7; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// sorts in place, returns the permutation sign (0 on a repeated index)
inline int sort_sign(std::vector<int>& idx) {
  int inversions = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) ++inversions;
    }
  std::sort(idx.begin(), idx.end());
  return inversions % 2 ? -1 : 1;
}

inline Form from(const g2flow::PForm& a) {
  Form f;
  const auto sets = subsets(a.degree());
  for (std::size_t k = 0; k < sets.size(); ++k)
    if (a[k] != 0.0) f[sets[k]] = a[k];
  return f;
}

inline g2flow::PForm to(const Form& f, int degree) {
  g2flow::PForm a(degree);
  const auto sets = subsets(degree);
  for (std::size_t k = 0; k < sets.size(); ++k) {
    auto it = f.find(sets[k]);
    if (it != f.end()) a[k] = it->second;
  }
  return a;
}

inline Form wedge(const Form& a, const Form& b) {
  Form out;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b) {
      std::vector<int> idx = i;
      idx.insert(idx.end(), j.begin(), j.end());
      const int s = sort_sign(idx);
      if (s != 0) out[idx] += s * x * y;
    }
  return out;
}

inline Form interior(const std::vector<double>& v, const Form& a) {
  Form out;
  for (const auto& [idx, x] : a)
    for (std::size_t p = 0; p < idx.size(); ++p) {
      std::vector<int> rest = idx;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(p));
      out[rest] += (p % 2 ? -1.0 : 1.0) * v[static_cast<std::size_t>(idx[p])] * x;
    }
  return out;
}

// flat star: e^I -> sign(I, I^c) e^{I^c}
inline Form star(const Form& a) {
  Form out;
  for (const auto& [idx, x] : a) {
    std::vector<int> comp;
    for (int i = 0; i < 7; ++i)
      if (std::find(idx.begin(), idx.end(), i) == idx.end()) comp.push_back(i);
    std::vector<int> all = idx;
    all.insert(all.end(), comp.begin(), comp.end());
    out[comp] += sort_sign(all) * x;
  }
  return out;
}

// M^* e^i = sum_j M(i, j) e^j, extended multiplicatively
inline Form pullback(const g2flow::Mat7& m, const Form& a) {
  Form out;
  for (const auto& [idx, x] : a) {
    Form prod{{{}, x}};
    for (int i : idx) {
      Form row;
      for (int j = 0; j < 7; ++j)
        if (m(i, j) != 0.0) row[{j}] = m(i, j);
      prod = wedge(prod, row);
    }
    for (const auto& [k, y] : prod) out[k] += y;
  }
  return out;
}

inline g2flow::PForm random_form(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  g2flow::PForm a(degree);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = u(rng);
  return a;
}

}  // namespace oracle
