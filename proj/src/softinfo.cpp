#include "shmbs/softinfo.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shmbs/csv.hpp"

namespace shmbs {

namespace {

const std::set<std::string>& abbreviations() {
  static const std::set<std::string> abbr = {
      "u.s.", "u.k.", "e.u.", "inc.", "corp.", "co.",  "ltd.", "mr.",  "mrs.", "ms.",
      "dr.",  "st.",  "vs.",  "etc.", "e.g.",  "i.e.", "jr.",  "sr.",  "no.",  "fig.",
      "est.", "avg.", "dept.", "gov.", "sen.",  "rep.", "prof.", "jan.", "feb.", "mar.",
      "apr.", "jun.", "jul.", "aug.", "sep.",  "sept.", "oct.", "nov.", "dec."};
  return abbr;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_negation(const std::string& tok) {
  if (tok == "not" || tok == "no" || tok == "never") return true;
  return tok.size() >= 3 && tok.compare(tok.size() - 3, 3, "n't") == 0;
}

std::string trim_ws(const std::string& s) {
  auto b = s.find_first_not_of(" \t\n\r");
  auto e = s.find_last_not_of(" \t\n\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    cur += ch;
    if (ch != '.' && ch != '?' && ch != '!') continue;
    const bool at_end = i + 1 >= text.size();
    const bool followed_by_space = !at_end && std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (!at_end && !followed_by_space) continue;
    if (ch == '.') {
      // token ending at this period, e.g. "U.S."
      auto start = cur.find_last_of(" \t\n\r");
      const std::string tok = lower(start == std::string::npos ? cur : cur.substr(start + 1));
      if (abbreviations().count(tok)) continue;
    }
    const std::string sentence = trim_ws(cur);
    if (!sentence.empty()) out.push_back(sentence);
    cur.clear();
  }
  const std::string tail = trim_ws(cur);
  if (!tail.empty()) out.push_back(tail);
  return out;
}

std::vector<std::string> tokenize(const std::string& sentence) {
  std::vector<std::string> out;
  std::string cur;
  const auto flush = [&] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(sentence[i]);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (c == '\'' && !cur.empty() && i + 1 < sentence.size() &&
               std::isalnum(static_cast<unsigned char>(sentence[i + 1]))) {
      cur += '\'';  // intra-word apostrophe
    } else {
      flush();
    }
  }
  flush();
  return out;
}

bool relevant(const std::string& sentence, const std::vector<std::string>& watchlist) {
  const auto toks = tokenize(sentence);
  if (toks.empty()) return false;
  for (const auto& item : watchlist) {
    const auto want = tokenize(item);
    if (want.empty()) continue;
    if (want.size() > toks.size()) continue;
    for (std::size_t i = 0; i + want.size() <= toks.size(); ++i) {
      if (std::equal(want.begin(), want.end(), toks.begin() + static_cast<std::ptrdiff_t>(i))) return true;
    }
  }
  return false;
}

void Lexicon::add(const std::string& token_or_phrase, double score, PosClass pos) {
  const auto toks = tokenize(token_or_phrase);
  if (toks.empty()) return;
  if (toks.size() == 1) {
    unigrams[toks[0]] = Entry{score, pos};
  } else {
    phrases.emplace_back(toks, Entry{score, pos});
    std::stable_sort(phrases.begin(), phrases.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  }
}

PosClass parse_pos_class(const std::string& s) {
  const std::string t = lower(trim_ws(s));
  if (t == "adverb") return PosClass::adverb;
  if (t == "verb") return PosClass::verb;
  if (t == "adjective") return PosClass::adjective;
  if (t == "other" || t == "noun" || t.empty()) return PosClass::other;
  raise(Errc::config_error, "unknown pos-class '" + s + "'");
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open lexicon '" + path + "'");
  Lexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim_ws(line).empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 3)
      raise(Errc::io_error, "lexicon line " + std::to_string(lineno) +
                                ": expected token<TAB>score<TAB>pos-class");
    char* end = nullptr;
    const double score = std::strtod(fields[1].c_str(), &end);
    if (end == fields[1].c_str() || score < -1.0 || score > 1.0)
      raise(Errc::io_error, "lexicon line " + std::to_string(lineno) + ": score must lie in [-1, 1]");
    lex.add(fields[0], score, parse_pos_class(fields[2]));
  }
  return lex;
}

double score_sentence(const std::string& sentence, const Lexicon& lexicon) {
  const auto toks = tokenize(sentence);
  if (toks.empty()) return 0.0;

  double weighted = 0.0;
  int negations = 0;
  for (const auto& t : toks)
    if (is_negation(t)) ++negations;

  std::size_t i = 0;
  while (i < toks.size()) {
    std::size_t advance = 1;
    const Lexicon::Entry* hit = nullptr;
    for (const auto& [phrase, entry] : lexicon.phrases) {
      if (phrase.size() > toks.size() - i) continue;
      if (std::equal(phrase.begin(), phrase.end(), toks.begin() + static_cast<std::ptrdiff_t>(i))) {
        hit = &entry;
        advance = phrase.size();
        break;
      }
    }
    if (!hit) {
      auto it = lexicon.unigrams.find(toks[i]);
      if (it != lexicon.unigrams.end()) hit = &it->second;
    }
    if (hit) {
      const double w = hit->pos == PosClass::other ? 1.0 : 1.5;
      weighted += hit->score * w;
    }
    i += advance;
  }

  double pol = weighted / static_cast<double>(toks.size());
  if (negations % 2 == 1) pol = -pol;
  return pol;
}

ScoredDocument score_document(const std::string& text, const std::vector<std::string>& watchlist,
                              const Lexicon& lexicon) {
  ScoredDocument doc;
  for (const auto& s : split_sentences(text)) {
    ScoredSentence sc;
    sc.text = s;
    sc.is_relevant = relevant(s, watchlist);
    sc.polarity = sc.is_relevant ? score_sentence(s, lexicon) : 0.0;
    if (sc.is_relevant) doc.pol += sc.polarity;
    doc.sentences.push_back(std::move(sc));
  }
  return doc;
}

double daily_score(const std::vector<std::string>& documents,
                   const std::vector<std::string>& watchlist, const Lexicon& lexicon) {
  if (documents.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& d : documents) sum += score_document(d, watchlist, lexicon).pol;
  return sum / static_cast<double>(documents.size());
}

std::vector<CorpusDoc> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io_error, "cannot open corpus '" + path + "'");
  std::vector<CorpusDoc> docs;
  std::string line;
  const bool jsonl = path.size() > 6 && (path.ends_with(".jsonl") || path.ends_with(".ndjson"));
  bool first = true;
  while (std::getline(in, line)) {
    if (trim_ws(line).empty()) continue;
    if (jsonl) {
      const auto j = nlohmann::json::parse(line);
      docs.push_back({parse_date(j.at("date").get<std::string>()), j.at("text").get<std::string>()});
    } else {
      if (first) {  // header row: date,text
        first = false;
        continue;
      }
      const auto cells = split_csv_line(line);
      if (cells.size() < 2) raise(Errc::io_error, "corpus row needs date,text");
      docs.push_back({parse_date(cells[0]), cells[1]});
    }
  }
  return docs;
}

SoftScoreSeries score_corpus(const std::vector<CorpusDoc>& docs,
                             const std::vector<std::vector<std::string>>& watchlists,
                             const Lexicon& lexicon, bool serial) {
  const int m = static_cast<int>(watchlists.size());
  const int nd = static_cast<int>(docs.size());

  // per-document, per-asset polarity; NaN marks "no relevant sentence"
  MatrixXd pol(nd, m);
  const auto score_one = [&](int k) {
    for (int i = 0; i < m; ++i) {
      const ScoredDocument sd = score_document(docs[static_cast<std::size_t>(k)].text,
                                               watchlists[static_cast<std::size_t>(i)], lexicon);
      const bool any = std::any_of(sd.sentences.begin(), sd.sentences.end(),
                                   [](const ScoredSentence& s) { return s.is_relevant; });
      pol(k, i) = any ? sd.pol : std::numeric_limits<double>::quiet_NaN();
    }
  };
  if (serial) {
    for (int k = 0; k < nd; ++k) score_one(k);
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (int k = 0; k < nd; ++k) score_one(k);
  }

  // group by date, mean over attributed documents
  std::map<Date, std::pair<VectorXd, VectorXd>> byday;  // sum, count
  for (int k = 0; k < nd; ++k) {
    auto& [sum, cnt] = byday.try_emplace(docs[static_cast<std::size_t>(k)].date,
                                         std::make_pair(VectorXd::Zero(m), VectorXd::Zero(m)))
                           .first->second;
    for (int i = 0; i < m; ++i) {
      if (std::isfinite(pol(k, i))) {
        sum[i] += pol(k, i);
        cnt[i] += 1.0;
      }
    }
  }

  SoftScoreSeries out;
  for (const auto& [date, sc] : byday) {
    if ((sc.second.array() > 0.0).all()) out.index.push_back(date);
  }
  const auto n = static_cast<Eigen::Index>(out.index.size());
  out.d1 = VectorXd::Zero(n);
  out.d2.resize(n, m);
  Eigen::Index row = 0;
  for (const auto& [date, sc] : byday) {
    if (!(sc.second.array() > 0.0).all()) continue;  // gap: some asset had no news
    out.d2.row(row) = (sc.first.array() / sc.second.array()).transpose();
    ++row;
  }
  return out;
}

}  // namespace shmbs
