#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "memheat/symbols.hpp"

using namespace memheat;

namespace {

// Every quantity the library must own, exactly once each.
const std::vector<std::string> kImplemented = {
    "mu(s)", "delta", "alpha", "k(t)", "M_1", "K_mu", "gamma",
    "mu(s) ds measure", "w_j", "lambda_j", "lambda_1", "P_n", "Omega", "b_k",
    "u_n", "f, p", "f_0", "a_0", "d_0", "M", "a(.)", "m", "m_tilde", "l(u)",
    "L_a(R)", "g", "eta^t", "eta_0", "J (history lift)", "L^2_mu(R+;V)",
    "phi", "u_t (segment)", "L_V^2", "z, z_0", "S(t)", "X norm",
    "H-energy norm", "K_0", "K_1", "K_2", "K_5"};

// Analysis-only machinery that must be declared out of scope.
const std::vector<std::string> kOutOfScope = {
    "q = 2p/(2p-1)", "zeta_j", "Q_n", "T (transport generator)", "D(T)",
    "I (regularity lift)", "N (uniqueness bound)", "Omega_1"};

std::string table_text() {
  std::ifstream in(MEMHEAT_SYMBOLS_PATH);
  REQUIRE_MESSAGE(in.good(), "cannot open " MEMHEAT_SYMBOLS_PATH);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("the committed ledger passes the audit") {
  const auto entries = parse_symbol_table(table_text());
  CHECK(entries.size() == kImplemented.size() + kOutOfScope.size());
  const auto rep = audit_symbols(entries, kImplemented, kOutOfScope);
  for (const auto& p : rep.problems) MESSAGE(p);
  CHECK(rep.ok);
}

TEST_CASE("audit flags a removed entry by name") {
  auto entries = parse_symbol_table(table_text());
  std::erase_if(entries, [](const SymbolEntry& e) { return e.symbol == "K_2"; });
  const auto rep = audit_symbols(entries, kImplemented, kOutOfScope);
  CHECK_FALSE(rep.ok);
  bool named = false;
  for (const auto& p : rep.problems)
    if (p.find("K_2") != std::string::npos) named = true;
  CHECK(named);
}

TEST_CASE("audit flags a duplicated entry") {
  auto entries = parse_symbol_table(table_text());
  entries.push_back({"K_2", "diagnostics module", "dup", "implemented"});
  const auto rep = audit_symbols(entries, kImplemented, kOutOfScope);
  CHECK_FALSE(rep.ok);
  bool named = false;
  for (const auto& p : rep.problems)
    if (p.find("K_2") != std::string::npos &&
        p.find("2 times") != std::string::npos)
      named = true;
  CHECK(named);
}

TEST_CASE("audit flags malformed statuses and missing justifications") {
  std::vector<SymbolEntry> entries = {
      {"x", "o", "l", "implemented"},
      {"y", "o", "l", "maybe"},
      {"z", "o", "l", "out-of-scope:"},
  };
  const auto rep = audit_symbols(entries, {"x"}, {});
  CHECK_FALSE(rep.ok);
  CHECK(rep.problems.size() == 2);
}

TEST_CASE("out-of-scope entries cannot be claimed implemented") {
  auto entries = parse_symbol_table(table_text());
  for (auto& e : entries)
    if (e.symbol == "zeta_j") e.status = "implemented";
  const auto rep = audit_symbols(entries, kImplemented, kOutOfScope);
  CHECK_FALSE(rep.ok);
}
