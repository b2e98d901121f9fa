// Copyright 2026 The FSMFlow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "generators.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <tuple>

namespace fsmflow::testing {
namespace {

int Uniform(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool Coin(std::mt19937& rng, double p = 0.5) {
  return std::bernoulli_distribution(p)(rng);
}

const std::vector<std::string>& Words() {
  static const std::vector<std::string> words = {
      "server", "client", "command", "reply",   "state",  "session", "data",
      "control", "transfer", "file",  "the",    "a",      "must",    "may",
      "connection", "user", "argument", "mode", "type",   "is",      "sent",
      "after",  "before", "when",     "protocol", "port", "channel", "of"};
  return words;
}

std::string Pick(std::mt19937& rng, const std::vector<std::string>& pool) {
  return pool[static_cast<std::size_t>(Uniform(rng, 0, static_cast<int>(pool.size()) - 1))];
}

std::string Title(std::mt19937& rng) {
  std::string title;
  int n = Uniform(rng, 1, 4);
  for (int i = 0; i < n; ++i) {
    std::string w = Pick(rng, Words());
    w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    if (i) title += ' ';
    title += w;
  }
  return title;
}

// Paragraph wrapped at 68 columns with a three-space indent.
std::vector<std::string> Paragraph(std::mt19937& rng) {
  std::vector<std::string> lines;
  std::string line = "   ";
  int words = Uniform(rng, 4, 60);
  for (int i = 0; i < words; ++i) {
    std::string w = Pick(rng, Words());
    if (Coin(rng, 0.1)) w += '.';
    if (line.size() + w.size() + 1 > 68) {
      lines.push_back(line);
      line = "   ";
    }
    if (line.size() > 3) line += ' ';
    line += w;
  }
  lines.push_back(line);
  return lines;
}

struct Node {
  std::vector<std::string> components;
  bool lettered = false;
  std::string title;
  std::vector<Node> children;
};

void Grow(std::mt19937& rng, Node& node, int depth) {
  if (depth >= 3) return;
  int n = Coin(rng, 0.5) ? Uniform(rng, 1, 4) : 0;
  for (int i = 0; i < n; ++i) {
    Node child;
    child.components = node.components;
    child.components.push_back(std::to_string(i + 1));
    child.lettered = node.lettered;
    child.title = Title(rng);
    Grow(rng, child, depth + 1);
    node.children.push_back(std::move(child));
  }
}

std::string Dotted(const std::vector<std::string>& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += '.';
    out += c[i];
  }
  return out;
}

void Render(std::mt19937& rng, const Node& node, std::vector<std::string>& lines,
            SyntheticRfc& out) {
  std::string number = Dotted(node.components);
  if (node.components.size() == 1 || Coin(rng, 0.3)) number += '.';
  std::string heading = number + std::string(static_cast<std::size_t>(Uniform(rng, 1, 2)), ' ') +
                        node.title;
  out.heading_lines.push_back(heading);
  out.sections.push_back(
      {(node.lettered ? "APP-" : "") + Dotted(node.components), node.title});
  lines.push_back(heading);
  lines.push_back("");
  int paragraphs = Uniform(rng, 0, 3);
  for (int p = 0; p < paragraphs; ++p) {
    for (std::string& l : Paragraph(rng)) lines.push_back(std::move(l));
    lines.push_back("");
  }
  for (const Node& child : node.children) Render(rng, child, lines, out);
}

}  // namespace

SyntheticRfc GenerateRfc(std::mt19937& rng) {
  SyntheticRfc out;
  std::vector<std::string> lines = {
      "",
      "Network Working Group                                         A. Author",
      "Request for Comments: 9999                                   Example Org",
      "Category: Informational                                        May 2026",
      "",
      "                   A SYNTHETIC PROTOCOL SPECIFICATION",
      "",
      "Status of This Memo",
      ""};
  for (std::string& l : Paragraph(rng)) lines.push_back(std::move(l));
  lines.push_back("");

  int top = Uniform(rng, 1, 6);
  for (int i = 0; i < top; ++i) {
    Node node;
    node.components = {std::to_string(i + 1)};
    node.title = Title(rng);
    Grow(rng, node, 1);
    Render(rng, node, lines, out);
  }
  if (Coin(rng, 0.4)) {
    Node appendix;
    appendix.components = {"A"};
    appendix.lettered = true;
    appendix.title = Title(rng);
    Grow(rng, appendix, 1);
    Render(rng, appendix, lines, out);
  }
  if (Coin(rng, 0.4)) {
    out.heading_lines.push_back("References");
    out.sections.push_back({"U-1", "References"});
    lines.push_back("References");
    lines.push_back("");
    lines.push_back("   [1] A. Author, \"Something\", RFC 1, 1969.");
    lines.push_back("");
  }

  // Paginate: footer, form feed, running header.
  std::ostringstream text;
  int page = 1;
  int budget = Uniform(rng, 15, 45);
  int on_page = 0;
  auto page_break = [&](bool last) {
    text << "\n\nAuthor                       Standards Track                [Page "
         << page++ << "]\n";
    if (!last) {
      text << "\f\nRFC 9999              Synthetic Protocol                   May 2026\n\n";
    }
  };
  bool broke = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    text << lines[i] << '\n';
    if (++on_page >= budget && i + 1 < lines.size()) {
      page_break(false);
      broke = true;
      on_page = 0;
      budget = Uniform(rng, 15, 45);
    }
  }
  if (!broke) page_break(false);
  page_break(true);
  out.text = text.str();
  return out;
}

std::string CheckParseRoundTrip(const SyntheticRfc& rfc) {
  std::string clean = StripArtifacts(RawDocument{rfc.text, "synthetic"});
  if (clean.find('\f') != std::string::npos) return "form feed survived";
  if (clean.find("[Page ") != std::string::npos) return "footer survived";
  if (clean.find("RFC 9999 ") != std::string::npos) return "running header survived";

  SectionTree tree = ParseTree(clean, "Synthetic");
  AppendixListing listing = BuildAppendix(tree);
  if (listing.entries != rfc.sections) {
    std::ostringstream msg;
    msg << "section mismatch: got " << listing.entries.size() << " entries, want "
        << rfc.sections.size() << "\n" << listing.Render();
    return msg.str();
  }

  // Drop the heading lines from the stripped text; what remains must equal
  // the preorder concatenation of bodies.
  std::set<std::string> headings(rfc.heading_lines.begin(), rfc.heading_lines.end());
  std::string expected;
  std::istringstream in(clean);
  std::string line;
  while (std::getline(in, line)) {
    if (headings.count(line)) continue;
    expected += line;
    if (!in.eof()) expected += '\n';
  }
  if (!clean.empty() && clean.back() == '\n' &&
      (expected.empty() || expected.back() != '\n')) {
    expected += '\n';
  }
  std::string rebuilt = tree.body;
  ForEachSection(tree, [&](const SectionNode& n) { rebuilt += n.body; });
  if (rebuilt != expected) {
    std::size_t at = 0;
    while (at < rebuilt.size() && at < expected.size() && rebuilt[at] == expected[at]) ++at;
    return "reconstruction differs at byte " + std::to_string(at);
  }
  return "";
}

Fsm GenerateLooseFsm(std::mt19937& rng, int max_states, int max_transitions) {
  static const std::vector<std::string> states = {"Init", "init ", "READY", "Ready",
                                                  " Playing", "Closed", "x"};
  static const std::vector<std::string> inputs = {"USER", "user", "PASS", " QUIT",
                                                  "PORT", "retr", "Type "};
  Fsm fsm;
  fsm.protocol = "P";
  int n_states = Uniform(rng, 1, max_states);
  std::vector<std::string> chosen;
  for (int i = 0; i < n_states; ++i) chosen.push_back(Pick(rng, states));
  for (const std::string& s : chosen) fsm.states.insert(s);
  fsm.initial = chosen.front();
  int n = Uniform(rng, 0, max_transitions);
  for (int i = 0; i < n; ++i) {
    fsm.transitions.insert({Pick(rng, chosen), Pick(rng, inputs), Pick(rng, chosen)});
  }
  return fsm;
}

Fsm GenerateFsm(std::mt19937& rng) {
  static const std::vector<std::string> states = {
      "Not Connected", "Authorization", "Transaction", "Update", "S \"quoted\"",
      "tab\tstate", "after_USER", "START"};
  static const std::vector<std::string> inputs = {"CONNECT", "USER", "PASS", "PORT",
                                                  "QUIT", "X-1", "A\\B"};
  Fsm fsm;
  fsm.protocol = Coin(rng) ? "FTP" : "proto \"x\"";
  std::vector<std::string> chosen;
  int n_states = Uniform(rng, 1, 6);
  for (int i = 0; i < n_states; ++i) chosen.push_back(Pick(rng, states));
  fsm.states.insert(chosen.begin(), chosen.end());
  fsm.initial = chosen.front();
  int n = Uniform(rng, 0, 12);
  for (int i = 0; i < n; ++i) {
    fsm.transitions.insert({Pick(rng, chosen), Pick(rng, inputs), Pick(rng, chosen)});
  }
  return fsm;
}

Rulebook GenerateRulebook(std::mt19937& rng) {
  static const std::vector<std::string> commands = {"USER", "PASS", "QUIT", "RETR",
                                                    "TYPE", "PORT", "X-TOKEN"};
  static const std::vector<std::string> texts = {
      "", "User must be logged in.", "line one\nline two", "quote \" and \\ backslash",
      "tab\there", "Yes, retrieves a file."};
  Rulebook rb;
  rb.protocol = Coin(rng) ? "FTP" : "RTSP";
  std::vector<std::string> pool = commands;
  std::shuffle(pool.begin(), pool.end(), rng);
  int n = Uniform(rng, 0, static_cast<int>(pool.size()));
  auto edges = [&](std::vector<Edge>& out) {
    std::vector<std::string> counterpart = pool;
    counterpart.push_back("START");
    counterpart.push_back("END");
    std::shuffle(counterpart.begin(), counterpart.end(), rng);
    int m = Uniform(rng, 0, 3);
    for (int i = 0; i < m; ++i) {
      out.push_back({counterpart[static_cast<std::size_t>(i)], Pick(rng, texts), Coin(rng)});
    }
  };
  for (int i = 0; i < n; ++i) {
    CommandRule r;
    r.command = pool[static_cast<std::size_t>(i)];
    r.purpose = Pick(rng, texts);
    edges(r.preceding);
    edges(r.subsequent);
    int p = Uniform(rng, 0, 3);
    for (int k = 0; k < p; ++k) r.provenance.push_back(Uniform(rng, 0, 40));
    rb.rules.push_back(std::move(r));
  }
  if (Coin(rng)) rb.warnings.push_back(Pick(rng, texts));
  return rb;
}

namespace {

std::string OracleState(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string OracleInput(std::string s) {
  s = OracleState(std::move(s));
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

bool HasTriple(const Fsm& fsm, const std::string& from, const std::string& input,
               const std::string& to) {
  for (const Transition& t : fsm.transitions) {
    if (OracleState(t.from) == from && OracleInput(t.input) == input &&
        OracleState(t.to) == to) {
      return true;
    }
  }
  return false;
}

bool HasSuccession(const Fsm& fsm, const std::string& a, const std::string& b) {
  for (const Transition& first : fsm.transitions) {
    if (OracleInput(first.input) != a) continue;
    for (const Transition& second : fsm.transitions) {
      if (OracleInput(second.input) == b &&
          OracleState(first.to) == OracleState(second.from)) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

EvalCounts BruteForceCounts(const Fsm& extracted, const Fsm& gold, EvalMode mode) {
  std::set<std::string> states;
  std::set<std::string> inputs;
  for (const Fsm* fsm : {&extracted, &gold}) {
    for (const Transition& t : fsm->transitions) {
      states.insert(OracleState(t.from));
      states.insert(OracleState(t.to));
      inputs.insert(OracleInput(t.input));
    }
  }
  EvalCounts c;
  auto tally = [&](bool in_extracted, bool in_gold) {
    if (in_extracted && in_gold) ++c.tp;
    if (in_extracted && !in_gold) ++c.fp;
    if (!in_extracted && in_gold) ++c.fn;
  };
  if (mode == EvalMode::kTriple) {
    for (const std::string& from : states) {
      for (const std::string& input : inputs) {
        for (const std::string& to : states) {
          tally(HasTriple(extracted, from, input, to), HasTriple(gold, from, input, to));
        }
      }
    }
  } else {
    for (const std::string& a : inputs) {
      for (const std::string& b : inputs) {
        tally(HasSuccession(extracted, a, b), HasSuccession(gold, a, b));
      }
    }
  }
  return c;
}

}  // namespace fsmflow::testing
