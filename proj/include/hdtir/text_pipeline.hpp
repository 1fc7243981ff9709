#pragma once

#include "hdtir/dataset.hpp"
#include "hdtir/types.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hdtir {

struct Post {
  std::string id;
  std::string text;
  std::int64_t likes = 0;
};

struct Corpus {
  std::vector<Post> posts;
  void validate() const;  // unique ids, nonnegative likes
};

struct WordStats {
  std::int64_t count = 0;      // total occurrences
  std::int64_t doc_count = 0;  // posts containing the word at least once
};

// Ordered map keeps every export and merge deterministic.
using WordBank = std::map<std::string, WordStats>;

struct FeatureSpec {
  std::vector<std::string> vocabulary;  // ranked, stopword-free, no duplicates
  std::set<std::string> stopwords;
};

// Simple case folding over UTF-8 text. Covers ASCII, Latin-1, Latin
// Extended-A, basic Greek and basic Cyrillic; other codepoints and invalid
// bytes pass through unchanged.
std::string fold_case(std::string_view text);

// Case-folds, then splits on ASCII whitespace. Punctuation inside tokens is
// kept, so '#lgbt', 'lgbt+' and "it's" survive as distinct tokens.
std::vector<std::string> tokenize(std::string_view text);

// count sums all token occurrences, doc_count counts distinct posts. Posts
// may be sharded across workers; the merged bank is shard-count independent.
WordBank build_word_bank(const Corpus& corpus, int threads = 1);

// Removes stopwords, ranks by doc_count descending with ties broken by count
// descending then lexicographic order, truncates to p.
FeatureSpec select_vocabulary(const WordBank& bank, Index p,
                              const std::set<std::string>& stopwords);

// Sparse binary contains-word indicators; y = likes, names = vocabulary.
Dataset build_design(const Corpus& corpus, const FeatureSpec& spec);

// Built-in list: English articles, be-verb forms, and common prepositions.
// The same list ships as data/stopwords.txt for editing.
const std::set<std::string>& default_stopwords();

}  // namespace hdtir
