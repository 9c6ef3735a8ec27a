#include "cbstream/pipeline/corpus.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "cbstream/core/random.hpp"

namespace cbstream::pipeline {
namespace {

std::size_t column(const csv::Row& header, std::string_view name, bool required) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    if (required) throw std::invalid_argument("missing column: " + std::string(name));
    return header.size();
  }
  return static_cast<std::size_t>(it - header.begin());
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; });
}

}  // namespace

std::vector<RawPost> posts_from_rows(const std::vector<csv::Row>& rows) {
  if (rows.empty()) throw std::invalid_argument("empty input: expected a text,label header");
  const auto& header = rows.front();
  const auto text_col = column(header, "text", true);
  const auto label_col = column(header, "label", true);
  const auto id_col = column(header, "id", false);
  std::vector<RawPost> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() != header.size())
      throw std::invalid_argument("row " + std::to_string(r + 1) + ": expected " + std::to_string(header.size()) +
                                  " fields, got " + std::to_string(row.size()));
    RawPost p;
    p.id = id_col < header.size() ? row[id_col] : std::to_string(r);
    p.text = row[text_col];
    if (!row[label_col].empty()) {
      p.label = parse_label(row[label_col]);
      if (!p.label) throw std::invalid_argument("row " + std::to_string(r + 1) + ": bad label '" + row[label_col] + "'");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<RawPost> load_posts(const std::string& path) { return posts_from_rows(csv::read_file(path)); }

void write_posts(std::ostream& out, const std::vector<RawPost>& posts) {
  csv::write_row(out, {"id", "text", "label"});
  for (const auto& p : posts)
    csv::write_row(out, {p.id, p.text, p.label ? std::string(to_string(*p.label)) : std::string()});
}

std::vector<RawPost> ingest_tagged(const std::vector<csv::Row>& rows, const IngestOptions& options,
                                   IngestReport* report) {
  if (rows.empty()) throw std::invalid_argument("empty input");
  const auto text_col = column(rows.front(), options.text_column, true);
  const auto label_col = column(rows.front(), options.label_column, true);
  IngestReport rep;
  std::vector<RawPost> posts;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() <= std::max(text_col, label_col))
      throw std::invalid_argument("row " + std::to_string(r + 1) + ": too few fields");
    ++rep.read;
    if (blank(row[text_col])) {
      ++rep.dropped_empty;
      continue;
    }
    RawPost p;
    p.id = std::to_string(r);
    p.text = row[text_col];
    p.label = row[label_col] == options.absent_tag ? Label::absent : Label::present;
    posts.push_back(std::move(p));
  }

  if (options.balance) {
    std::vector<std::size_t> by_class[kNumClasses];
    for (std::size_t i = 0; i < posts.size(); ++i) by_class[index_of(*posts[i].label)].push_back(i);
    const auto keep = std::min(by_class[0].size(), by_class[1].size());
    Rng rng(options.seed);
    std::vector<std::uint8_t> kept(posts.size(), 1);
    for (auto& idx : by_class) {
      // Seeded partial shuffle; the first `keep` survive.
      for (std::size_t i = 0; i < keep && i + 1 < idx.size(); ++i) std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
      for (std::size_t i = keep; i < idx.size(); ++i) kept[idx[i]] = 0;
    }
    std::vector<RawPost> balanced;
    for (std::size_t i = 0; i < posts.size(); ++i)
      if (kept[i]) balanced.push_back(std::move(posts[i]));
    posts = std::move(balanced);
  }
  for (const auto& p : posts) (*p.label == Label::absent ? rep.absent : rep.present) += 1;
  if (report) *report = rep;
  return posts;
}

}  // namespace cbstream::pipeline
