#include "memheat/symbols.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace memheat {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

bool separator_row(const std::string& cell) {
  return !cell.empty() &&
         cell.find_first_not_of("-: ") == std::string::npos;
}

}  // namespace

std::vector<SymbolEntry> parse_symbol_table(const std::string& text) {
  std::vector<SymbolEntry> entries;
  std::istringstream is(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line.front() != '|') continue;
    std::vector<std::string> cells;
    std::string cell;
    for (std::size_t i = 1; i < line.size(); ++i) {
      if (line[i] == '|') {
        cells.push_back(trim(cell));
        cell.clear();
      } else {
        cell.push_back(line[i]);
      }
    }
    if (cells.size() < 4) continue;
    if (!header_seen) {
      header_seen = true;  // column names
      continue;
    }
    if (separator_row(cells[0])) continue;
    entries.push_back({cells[0], cells[1], cells[2], cells[3]});
  }
  return entries;
}

AuditReport audit_symbols(const std::vector<SymbolEntry>& entries,
                          const std::vector<std::string>& required_implemented,
                          const std::vector<std::string>& required_out_of_scope) {
  AuditReport rep;
  std::map<std::string, int> seen;
  for (const SymbolEntry& e : entries) {
    ++seen[e.symbol];
    const bool impl = e.status == "implemented";
    const bool oos = e.status.rfind("out-of-scope", 0) == 0;
    if (!impl && !oos)
      rep.problems.push_back("symbol '" + e.symbol + "': bad status '" + e.status + "'");
    if (oos && e.status.size() <= std::string("out-of-scope:").size())
      rep.problems.push_back("symbol '" + e.symbol + "': out-of-scope entry lacks a justification");
  }
  for (const auto& [sym, count] : seen)
    if (count > 1)
      rep.problems.push_back("symbol '" + sym + "' appears " + std::to_string(count) + " times");
  auto find_status = [&](const std::string& sym) -> const SymbolEntry* {
    for (const SymbolEntry& e : entries)
      if (e.symbol == sym) return &e;
    return nullptr;
  };
  for (const std::string& sym : required_implemented) {
    const SymbolEntry* e = find_status(sym);
    if (!e)
      rep.problems.push_back("missing required symbol '" + sym + "'");
    else if (e->status != "implemented")
      rep.problems.push_back("symbol '" + sym + "' should be implemented, is '" + e->status + "'");
  }
  for (const std::string& sym : required_out_of_scope) {
    const SymbolEntry* e = find_status(sym);
    if (!e)
      rep.problems.push_back("missing required out-of-scope symbol '" + sym + "'");
    else if (e->status.rfind("out-of-scope", 0) != 0)
      rep.problems.push_back("symbol '" + sym + "' should be out-of-scope, is '" + e->status + "'");
  }
  rep.ok = rep.problems.empty();
  return rep;
}

}  // namespace memheat
