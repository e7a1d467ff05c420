#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "shmbs/common.hpp"
#include "shmbs/dates.hpp"
#include "shmbs/series.hpp"

namespace shmbs {

enum class PosClass { adverb, verb, adjective, other };

// Polarity lexicon, loaded from a tab-separated file with one
// `token<TAB>score<TAB>pos-class` entry per line. Multi-word phrases
// are allowed and matched greedily longest-first.
struct Lexicon {
  struct Entry {
    double score = 0.0;  // in [-1, 1]
    PosClass pos = PosClass::other;
  };

  std::unordered_map<std::string, Entry> unigrams;
  std::vector<std::pair<std::vector<std::string>, Entry>> phrases;  // sorted longest-first

  static Lexicon load(const std::string& path);
  void add(const std::string& token_or_phrase, double score, PosClass pos);
};

// Sentence splitting on terminal punctuation with an abbreviation guard.
std::vector<std::string> split_sentences(const std::string& text);

// lowercase tokens, punctuation stripped except intra-word apostrophes
std::vector<std::string> tokenize(const std::string& sentence);

// case-insensitive whole-token match of any watchlist item
bool relevant(const std::string& sentence, const std::vector<std::string>& watchlist);

// Weighted-mean polarity of one sentence; adverbs, verbs and adjectives
// weigh 1.5, everything else 1, divided by the token count. An odd
// number of negation tokens inverts the sign.
double score_sentence(const std::string& sentence, const Lexicon& lexicon);

struct ScoredSentence {
  std::string text;
  bool is_relevant = false;
  double polarity = 0.0;
};

struct ScoredDocument {
  std::vector<ScoredSentence> sentences;
  double pol = 0.0;  // sum of relevant-sentence polarities
};

ScoredDocument score_document(const std::string& text, const std::vector<std::string>& watchlist,
                              const Lexicon& lexicon);

// D2 for one day and one asset: the mean document polarity.
double daily_score(const std::vector<std::string>& documents,
                   const std::vector<std::string>& watchlist, const Lexicon& lexicon);

struct CorpusDoc {
  Date date;
  std::string text;
};

// JSON-lines ({"date": ..., "text": ...}) or CSV (date,text) corpus.
std::vector<CorpusDoc> load_corpus(const std::string& path);

// Full pipeline over a corpus: per-asset daily mean polarity. Days with
// no relevant documents are left out of the returned index (the
// alignment step fills them from neighbors). Document scoring runs in
// parallel; `serial` forces the reference single-threaded path.
SoftScoreSeries score_corpus(const std::vector<CorpusDoc>& docs,
                             const std::vector<std::vector<std::string>>& watchlists,
                             const Lexicon& lexicon, bool serial = false);

PosClass parse_pos_class(const std::string& s);

}  // namespace shmbs
