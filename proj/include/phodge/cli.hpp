#pragma once

// The phodge command line: corpus parsing, command dispatch, reports.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phodge/json_io.hpp"

namespace phodge::cli {

using io::Json;

struct CorpusEntry {
  std::string id;
  std::string kind;  // filtered_module, connection_module, period_computation, witt_computation
  Json payload;
  std::optional<Json> expected;
};

struct SchemaIssue {
  std::string location;  // "line L" or a field path
  std::string reason;
};

struct Corpus {
  std::vector<CorpusEntry> entries;
  std::vector<SchemaIssue> issues;  // empty when the file is valid
};

/// Parses and validates a corpus document; `source` names it in messages.
Corpus parse_corpus(const std::string& text, const std::string& source = "<corpus>");
/// IoError when the file cannot be read.
Corpus load_corpus(const std::string& path);

struct Settings {
  long prec = 12;
  long order = 8;      // ξ-adic order
  long t_order = 16;   // t-adic order for solve and d0
  long window_lo = -32, window_hi = 32;
  long twist = 1;
};

/// Per-entry overrides from payload.settings.
Settings entry_settings(const Settings& global, const CorpusEntry& e);

enum class Status { Ok, Fail, Error, Skipped };
const char* status_name(Status s);

struct Outcome {
  std::string id;
  std::string kind;
  std::string command;
  Status status = Status::Ok;
  Json result;          // command output, or {"error", "message"}
  std::string summary;  // one line for the human table
};

/// Commands accepted by run_entry for each kind.
bool command_applies(const std::string& command, const std::string& kind);
Outcome run_entry(const std::string& command, const CorpusEntry& e, const Settings& s);
/// Compares every command named in e.expected; Skipped when there is none.
Outcome regress_entry(const CorpusEntry& e, const Settings& s);

/// 2 if any Error, else 1 if any Fail, else 0.
int exit_code(const std::vector<Outcome>& outcomes);

/// Entry point: args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phodge::cli
