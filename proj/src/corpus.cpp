#include "glmkit/corpus.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "glmkit/util.hpp"

namespace glmkit {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one UTF-8 scalar value; malformed input yields U+FFFD and
// advances by one byte.
char32_t decode_utf8(std::string_view text, std::size_t& i, bool& malformed) {
  malformed = false;
  unsigned char b0 = text[i];
  auto cont = [&](std::size_t k) {
    return i + k < text.size() && (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
  };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    char32_t cp = ((b0 & 0x1Fu) << 6) | (text[i + 1] & 0x3Fu);
    if (cp >= 0x80) {
      i += 2;
      return cp;
    }
  } else if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    char32_t cp = ((b0 & 0x0Fu) << 12) | ((text[i + 1] & 0x3Fu) << 6) |
                  (text[i + 2] & 0x3Fu);
    if (cp >= 0x800 && !(cp >= 0xD800 && cp <= 0xDFFF)) {
      i += 3;
      return cp;
    }
  } else if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    char32_t cp = ((b0 & 0x07u) << 18) | ((text[i + 1] & 0x3Fu) << 12) |
                  ((text[i + 2] & 0x3Fu) << 6) | (text[i + 3] & 0x3Fu);
    if (cp >= 0x10000 && cp <= 0x10FFFF) {
      i += 4;
      return cp;
    }
  }
  ++i;
  malformed = true;
  return kReplacement;
}

void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_ws(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\r' || cp == U'\n' ||
         cp == U'\v' || cp == U'\f' || cp == 0xA0;
}

// Letter/digit approximation over the script blocks the corpora cover.
// Symbols, emoji and U+FFFD are intentionally outside.
bool is_letter_or_digit(char32_t cp) {
  if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') ||
      (cp >= U'0' && cp <= U'9'))
    return true;
  if (cp < 0xC0) return false;
  if (cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;  // Latin-1 sup + ext A/B
  if (cp >= 0x370 && cp <= 0x3FF) return true;       // Greek
  if (cp >= 0x400 && cp <= 0x52F) return true;       // Cyrillic
  if (cp >= 0x590 && cp <= 0x5FF) return true;       // Hebrew
  if (cp >= 0x600 && cp <= 0x6FF) return true;       // Arabic
  if (cp >= 0x3040 && cp <= 0x30FF) return true;     // Kana
  if (cp >= 0x4E00 && cp <= 0x9FFF) return true;     // CJK
  if (cp >= 0xAC00 && cp <= 0xD7A3) return true;     // Hangul
  return false;
}

bool is_terminal(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?'; }

struct Tokenizer {
  const TokenizerConfig& cfg;
  TokenizeStats* stats;
  std::vector<Sentence> sentences;
  Sentence current;
  std::u32string raw;

  bool in_punct_class(char32_t cp) const {
    return cfg.punctuation.find(cp) != std::u32string::npos;
  }

  bool keepable(const std::u32string& tok) const {
    return std::any_of(tok.begin(), tok.end(), [&](char32_t cp) {
      return is_letter_or_digit(cp) || in_punct_class(cp);
    });
  }

  void emit(const std::u32string& tok) {
    if (tok.empty()) return;
    if (!keepable(tok)) {
      if (stats) ++stats->dropped_tokens;
      return;
    }
    std::string utf8;
    for (char32_t cp : tok) encode_utf8(cp, utf8);
    current.push_back(std::move(utf8));
  }

  void flush_token() {
    if (raw.empty()) return;
    std::u32string tok = std::move(raw);
    raw.clear();
    // Split leading and trailing punctuation marks into their own tokens.
    std::size_t begin = 0, end = tok.size();
    while (begin + 1 < end && in_punct_class(tok[begin])) ++begin;
    while (end > begin + 1 && in_punct_class(tok[end - 1])) --end;
    for (std::size_t i = 0; i < begin; ++i) emit(tok.substr(i, 1));
    emit(tok.substr(begin, end - begin));
    for (std::size_t i = end; i < tok.size(); ++i) emit(tok.substr(i, 1));
  }

  void flush_sentence() {
    flush_token();
    if (!current.empty()) sentences.push_back(std::move(current));
    current.clear();
  }
};

}  // namespace

std::vector<Sentence> clean_and_tokenize(std::string_view text,
                                         const TokenizerConfig& cfg,
                                         TokenizeStats* stats) {
  std::u32string cps;
  cps.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    bool malformed;
    cps.push_back(decode_utf8(text, i, malformed));
    if (malformed && stats) ++stats->malformed_byte_sequences;
  }

  Tokenizer tk{cfg, stats, {}, {}, {}};
  for (std::size_t k = 0; k < cps.size(); ++k) {
    char32_t cp = cps[k];
    if (is_ws(cp)) {
      tk.flush_token();
      if (cp == U'\n') tk.flush_sentence();
      continue;
    }
    tk.raw.push_back(cp);
    bool boundary = is_terminal(cp) && k > 0 && is_letter_or_digit(cps[k - 1]) &&
                    (k + 1 == cps.size() || is_ws(cps[k + 1]));
    if (boundary) tk.flush_sentence();
  }
  tk.flush_sentence();
  return std::move(tk.sentences);
}

std::vector<Sentence> clean_and_tokenize(std::istream& in,
                                         const TokenizerConfig& cfg,
                                         TokenizeStats* stats) {
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  return clean_and_tokenize(std::string_view(text), cfg, stats);
}

std::string detokenize(const Sentence& s) { return join(s, ' '); }

CorpusSplit split_corpus(std::span<const Sentence> sentences,
                         double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must lie strictly in (0,1)");
  CorpusSplit out;
  out.seed = seed;
  out.train_fraction = train_fraction;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    std::uint64_t h = fnv1a64_u64(seed);
    h = fnv1a64_u64(i, h);
    for (const std::string& tok : sentences[i]) {
      h = fnv1a64(tok, h);
      h = fnv1a64(std::string_view("\x1f", 1), h);
    }
    double u = static_cast<double>(mix64(h) >> 11) * 0x1.0p-53;
    (u < train_fraction ? out.train : out.test).push_back(sentences[i]);
  }
  return out;
}

TestSet sample_test_sequences(std::span<const Sentence> pool, int length,
                              std::uint64_t count, std::uint64_t seed) {
  if (length < 1) throw std::invalid_argument("sequence length must be >= 1");
  // Window pool: (sentence, offset) pairs in corpus order.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> windows;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    if (pool[s].size() < static_cast<std::size_t>(length)) continue;
    for (std::size_t off = 0; off + length <= pool[s].size(); ++off)
      windows.emplace_back(static_cast<std::uint32_t>(s),
                           static_cast<std::uint32_t>(off));
  }
  if (windows.empty()) throw std::runtime_error("no eligible windows");

  TestSet out;
  out.length = length;
  out.sequences.reserve(count);
  SplitMix rng(mix64(seed ^ 0x73616d706c65ull));  // "sample"
  for (std::uint64_t k = 0; k < count; ++k) {
    auto [s, off] = windows[rng.next_below(windows.size())];
    out.sequences.emplace_back(pool[s].begin() + off,
                               pool[s].begin() + off + length);
  }
  return out;
}

TestSet truncate_test_set(const TestSet& base, int length) {
  if (length < 1 || length > base.length)
    throw std::invalid_argument("truncation length out of range");
  TestSet out;
  out.length = length;
  out.sequences.reserve(base.sequences.size());
  for (const Sentence& s : base.sequences)
    out.sequences.emplace_back(s.end() - length, s.end());
  return out;
}

std::vector<std::span<const std::string>> sliding_windows(const Sentence& s,
                                                          int n) {
  if (n < 1) throw std::invalid_argument("window length must be >= 1");
  std::vector<std::span<const std::string>> out;
  if (s.size() < static_cast<std::size_t>(n)) return out;
  out.reserve(s.size() - n + 1);
  for (std::size_t off = 0; off + n <= s.size(); ++off)
    out.emplace_back(s.data() + off, static_cast<std::size_t>(n));
  return out;
}

void write_token_lines(const std::filesystem::path& path,
                       std::span<const Sentence> lines) {
  std::string out;
  for (const Sentence& s : lines) {
    out += join(s, ' ');
    out.push_back('\n');
  }
  write_file(path, out);
}

std::vector<Sentence> read_token_lines(const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::vector<Sentence> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    if (nl > start) out.push_back(split(std::string_view(text).substr(start, nl - start), ' '));
    start = nl + 1;
  }
  return out;
}

}  // namespace glmkit
