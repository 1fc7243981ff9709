#include "hdtir/text_pipeline.hpp"

#include "hdtir/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

namespace hdtir {

void Corpus::validate() const {
  std::unordered_set<std::string> seen;
  for (const auto& post : posts) {
    if (post.likes < 0) throw DataError("corpus: negative like count for post " + post.id);
    if (!seen.insert(post.id).second)
      throw DataError("corpus: duplicate post id " + post.id);
  }
}

namespace {

std::uint32_t fold_codepoint(std::uint32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 32;  // Latin-1 capitals
  // Latin Extended-A alternates upper/lower in three runs of pairs.
  if ((c >= 0x0100 && c <= 0x0136 && c % 2 == 0 && c != 0x0130) ||
      (c >= 0x0139 && c <= 0x0147 && c % 2 == 1) ||
      (c >= 0x014A && c <= 0x0176 && c % 2 == 0) ||
      (c >= 0x0179 && c <= 0x017D && c % 2 == 1))
    return c + 1;
  if (c == 0x0178) return 0x00FF;
  if (c == 0x017F) return 0x0073;  // long s folds to s
  if (c >= 0x0391 && c <= 0x03AB && c != 0x03A2) return c + 32;  // Greek capitals
  if (c == 0x03C2) return 0x03C3;  // final sigma
  if (c >= 0x0410 && c <= 0x042F) return c + 32;  // Cyrillic capitals
  if (c >= 0x0400 && c <= 0x040F) return c + 80;
  return c;
}

void append_utf8(std::string& out, std::uint32_t c) {
  if (c < 0x80) {
    out.push_back(static_cast<char>(c));
  } else if (c < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (c >> 6)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else if (c < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (c >> 12)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (c >> 18)));
    out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
  }
}

}  // namespace

std::string fold_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto byte = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (byte < 0x80) {
      len = 1;
      cp = byte;
    } else if ((byte >> 5) == 0x6) {
      len = 2;
      cp = byte & 0x1F;
    } else if ((byte >> 4) == 0xE) {
      len = 3;
      cp = byte & 0x0F;
    } else if ((byte >> 3) == 0x1E) {
      len = 4;
      cp = byte & 0x07;
    }
    bool valid = len > 0 && i + len <= text.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont >> 6) != 0x2)
        valid = false;
      else
        cp = (cp << 6) | (cont & 0x3F);
    }
    if (!valid) {  // pass invalid bytes through untouched
      out.push_back(text[i]);
      ++i;
      continue;
    }
    append_utf8(out, fold_codepoint(cp));
    i += len;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  const std::string folded = fold_case(text);
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < folded.size()) {
    while (i < folded.size() && std::isspace(static_cast<unsigned char>(folded[i]))) ++i;
    std::size_t start = i;
    while (i < folded.size() && !std::isspace(static_cast<unsigned char>(folded[i]))) ++i;
    if (i > start) tokens.emplace_back(folded.substr(start, i - start));
  }
  return tokens;
}

WordBank build_word_bank(const Corpus& corpus, int threads) {
  corpus.validate();
  threads = resolve_threads(threads);
  const std::size_t n = corpus.posts.size();
  const auto shards = static_cast<std::size_t>(std::min<std::size_t>(
      static_cast<std::size_t>(threads), std::max<std::size_t>(n, 1)));

  std::vector<WordBank> partial(shards);
  parallel_for(shards, threads, [&](std::size_t s) {
    WordBank& local = partial[s];
    for (std::size_t i = s; i < n; i += shards) {
      auto tokens = tokenize(corpus.posts[i].text);
      std::sort(tokens.begin(), tokens.end());
      std::size_t t = 0;
      while (t < tokens.size()) {
        std::size_t run = t;
        while (run < tokens.size() && tokens[run] == tokens[t]) ++run;
        WordStats& stats = local[tokens[t]];
        stats.count += static_cast<std::int64_t>(run - t);
        stats.doc_count += 1;
        t = run;
      }
    }
  });

  WordBank bank = std::move(partial.front());
  for (std::size_t s = 1; s < shards; ++s) {
    for (const auto& [word, stats] : partial[s]) {
      WordStats& merged = bank[word];
      merged.count += stats.count;
      merged.doc_count += stats.doc_count;
    }
  }
  return bank;
}

FeatureSpec select_vocabulary(const WordBank& bank, Index p,
                              const std::set<std::string>& stopwords) {
  if (p < 1) throw ConfigError("select_vocabulary: p must be at least 1");
  std::vector<const WordBank::value_type*> entries;
  entries.reserve(bank.size());
  for (const auto& entry : bank)
    if (!stopwords.count(entry.first)) entries.push_back(&entry);
  std::sort(entries.begin(), entries.end(), [](const auto* a, const auto* b) {
    if (a->second.doc_count != b->second.doc_count)
      return a->second.doc_count > b->second.doc_count;
    if (a->second.count != b->second.count) return a->second.count > b->second.count;
    return a->first < b->first;
  });
  if (static_cast<Index>(entries.size()) > p) entries.resize(static_cast<std::size_t>(p));

  FeatureSpec spec;
  spec.stopwords = stopwords;
  spec.vocabulary.reserve(entries.size());
  for (const auto* e : entries) spec.vocabulary.push_back(e->first);
  return spec;
}

Dataset build_design(const Corpus& corpus, const FeatureSpec& spec) {
  if (spec.vocabulary.empty()) throw ConfigError("build_design: empty vocabulary");
  corpus.validate();
  std::map<std::string, Index> position;
  for (std::size_t j = 0; j < spec.vocabulary.size(); ++j)
    position[spec.vocabulary[j]] = static_cast<Index>(j);

  const auto n = static_cast<Index>(corpus.posts.size());
  std::vector<std::vector<Index>> support(corpus.posts.size());
  Vector y(n);
  for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
    y[static_cast<Index>(i)] = static_cast<double>(corpus.posts[i].likes);
    std::set<Index> present;
    for (const auto& token : tokenize(corpus.posts[i].text)) {
      auto it = position.find(token);
      if (it != position.end()) present.insert(it->second);
    }
    support[i].assign(present.begin(), present.end());
  }
  Dataset data;
  data.y = std::move(y);
  data.x = DesignMatrix::sparse_binary(n, static_cast<Index>(spec.vocabulary.size()),
                                       std::move(support));
  data.feature_names = spec.vocabulary;
  return data;
}

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      // articles
      "a", "an", "the",
      // be verbs
      "am", "is", "are", "was", "were", "be", "been", "being",
      // prepositions
      "about", "above", "across", "after", "against", "along", "among", "around",
      "at", "before", "behind", "below", "beneath", "beside", "between", "beyond",
      "by", "down", "during", "except", "for", "from", "in", "inside", "into",
      "near", "of", "off", "on", "onto", "out", "outside", "over", "past",
      "since", "through", "throughout", "to", "toward", "towards", "under",
      "until", "up", "upon", "with", "within", "without"};
  return words;
}

}  // namespace hdtir
