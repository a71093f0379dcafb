#pragma once

#include <string>
#include <vector>

namespace memheat {

/// One row of the notation ledger in docs/symbols.md.
struct SymbolEntry {
  std::string symbol;
  std::string owner;     // owning type or operation
  std::string location;  // where the quantity comes from
  std::string status;    // "implemented" or "out-of-scope: <reason>"
};

/// Parse the pipe-delimited table (header and separator rows are skipped).
std::vector<SymbolEntry> parse_symbol_table(const std::string& text);

struct AuditReport {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Checks: every symbol appears exactly once, statuses are well-formed, and
/// both required lists are present with the expected status.
AuditReport audit_symbols(const std::vector<SymbolEntry>& entries,
                          const std::vector<std::string>& required_implemented,
                          const std::vector<std::string>& required_out_of_scope);

}  // namespace memheat
