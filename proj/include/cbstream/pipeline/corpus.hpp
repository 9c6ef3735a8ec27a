#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cbstream/core/csv.hpp"
#include "cbstream/core/types.hpp"

namespace cbstream::pipeline {

/// Rows with a `text,label` header (column order free; an optional `id`
/// column supplies post ids, otherwise ids are 1-based row numbers). Labels
/// must be `absent` or `present`; an empty label leaves the post unlabeled.
/// Throws std::invalid_argument with the offending row on malformed input.
std::vector<RawPost> posts_from_rows(const std::vector<csv::Row>& rows);
std::vector<RawPost> load_posts(const std::string& path);

/// Writes `id,text,label`.
void write_posts(std::ostream& out, const std::vector<RawPost>& posts);

struct IngestOptions {
  std::string text_column = "tweet_text";
  std::string label_column = "cyberbullying_type";
  std::string absent_tag = "not_cyberbullying";
  /// Undersample the larger class to the size of the smaller one, keeping
  /// the original order of the survivors.
  bool balance = false;
  std::uint64_t seed = 0;
};

struct IngestReport {
  std::size_t read = 0;
  std::size_t dropped_empty = 0;
  std::size_t absent = 0;
  std::size_t present = 0;
};

/// Maps a multi-class tagged dataset to binary labels: the absent tag maps to
/// `absent`, every other tag to `present`. Rows with blank text are dropped.
std::vector<RawPost> ingest_tagged(const std::vector<csv::Row>& rows, const IngestOptions& options,
                                   IngestReport* report = nullptr);

}  // namespace cbstream::pipeline
