#pragma once

// Independent recomputation of the per-(day, k) collection scores of the
// synthetic mini-run fixture. Shares no code with the library: it reads
// the fixture key (expected stories and their raw text) and works on
// dense vectors with the literal masked-Frobenius formula.

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace oracle {

struct day_k_score {
  std::string date;
  std::size_t k = 0;
  std::size_t n = 0;
  std::optional<double> s;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("oracle: cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ASCII only: the fixture text is ASCII.
inline std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text + " ") {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else {
      if (cur.size() >= 2) out.push_back(cur);
      cur.clear();
    }
  }
  return out;
}

inline double score(const std::vector<std::string>& texts) {
  const std::size_t n = texts.size();
  std::vector<std::map<std::string, double>> tf(n);
  std::map<std::string, double> df;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& w : words(texts[i])) tf[i][w] += 1.0;
    for (const auto& [w, _] : tf[i]) df[w] += 1.0;
  }
  std::vector<std::string> vocab;
  for (const auto& [w, _] : df) vocab.push_back(w);
  std::vector<std::vector<double>> x(n, std::vector<double>(vocab.size(), 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < vocab.size(); ++t) {
      auto it = tf[i].find(vocab[t]);
      if (it != tf[i].end()) x[i][t] = it->second * std::log(double(n) / df[vocab[t]]);
    }
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0, ni = 0, nj = 0;
      for (std::size_t t = 0; t < vocab.size(); ++t) {
        dot += x[i][t] * x[j][t];
        ni += x[i][t] * x[i][t];
        nj += x[j][t] * x[j][t];
      }
      d[i][j] = (ni == 0 || nj == 0) ? 0.0 : dot / (std::sqrt(ni) * std::sqrt(nj));
    }
  double nd = 0, no = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double mask = i == j ? 0.0 : 1.0;
      nd += (mask * d[i][j]) * (mask * d[i][j]);
      no += mask * mask;
    }
  return std::sqrt(nd) / std::sqrt(no);
}

/// Scores for every (day, k) in the fixture key; s is empty when fewer than
/// two documents qualify.
inline std::vector<day_k_score> brute_force_scores(const std::filesystem::path& fixture_dir) {
  const auto key = nlohmann::json::parse(slurp(fixture_dir / "key.json"));
  std::vector<day_k_score> out;
  for (const auto& day : key.at("days")) {
    for (const auto& kj : key.at("k")) {
      const auto k = kj.get<std::size_t>();
      std::vector<std::string> texts;
      for (const auto& site : day.at("sites")) {
        if (site.at("status") != "ok") continue;
        for (const auto& st : site.at("stories"))
          if (st.at("rank").get<std::size_t>() <= k && st.at("expect") == "ok")
            texts.push_back(slurp(fixture_dir / st.at("text").get<std::string>()));
      }
      day_k_score r{day.at("date").get<std::string>(), k, texts.size(), std::nullopt};
      if (texts.size() >= 2) r.s = score(texts);
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace oracle
