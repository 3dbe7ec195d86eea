#include "qrc/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "qrc/csv.hpp"

namespace qrc {

namespace {

int precedence(Action a) {
  switch (a) {
    case Action::Upload:
      return 0;
    case Action::Download:
      return 1;
    case Action::View:
      return 2;
  }
  return 3;
}

bool earlier(const InteractionEvent& a, const InteractionEvent& b) {
  return std::tie(a.timestamp, a.user, a.paper) < std::tie(b.timestamp, b.user, b.paper);
}

template <typename T>
T parse_number(const std::string& text, std::string_view what, std::size_t line) {
  T value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    std::ostringstream msg;
    msg << "line " << line << ": cannot parse " << what << " '" << text << "'";
    throw DataError(msg.str());
  }
  return value;
}

double parse_optional_double(const std::string& text, std::string_view what, std::size_t line) {
  if (text.empty()) return 0.0;
  return parse_number<double>(text, what, line);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Non-ASCII bytes count as letters so that accented names survive.
bool is_letter_byte(unsigned char c) { return c >= 0x80 || std::isalpha(c); }

bool has_letter(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return is_letter_byte(static_cast<unsigned char>(c)); });
}

// First letter of `token` as a whole UTF-8 code point, ASCII uppercased.
std::string first_initial(std::string_view token) {
  for (std::size_t i = 0; i < token.size(); ++i) {
    const auto c = static_cast<unsigned char>(token[i]);
    if (c < 0x80) {
      if (std::isalpha(c)) return std::string(1, static_cast<char>(std::toupper(c)));
      continue;
    }
    std::size_t len = 1;
    if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    return std::string(token.substr(i, len));
  }
  return {};
}

}  // namespace

std::string_view to_string(Action action) {
  switch (action) {
    case Action::Upload:
      return "upload";
    case Action::Download:
      return "download";
    case Action::View:
      return "view";
  }
  return "unknown";
}

std::optional<Action> parse_action(std::string_view text) {
  if (text == "upload") return Action::Upload;
  if (text == "download") return Action::Download;
  if (text == "view") return Action::View;
  return std::nullopt;
}

double WeightScheme::weight(Action action) const {
  switch (action) {
    case Action::Upload:
      return upload;
    case Action::Download:
      return download;
    case Action::View:
      return view;
  }
  return 0.0;
}

void WeightScheme::validate() const {
  if (!(upload > 0.0 && download > 0.0 && view > 0.0)) {
    throw DataError("all interaction weights must be positive");
  }
}

std::vector<InteractionEvent> dedup_earliest(std::span<const InteractionEvent> events) {
  std::map<std::pair<std::string, std::string>, const InteractionEvent*> best;
  for (const auto& e : events) {
    auto [it, inserted] = best.try_emplace({e.user, e.paper}, &e);
    if (inserted) continue;
    const InteractionEvent& cur = *it->second;
    if (e.timestamp < cur.timestamp ||
        (e.timestamp == cur.timestamp && precedence(e.action) < precedence(cur.action))) {
      it->second = &e;
    }
  }
  std::vector<InteractionEvent> out;
  out.reserve(best.size());
  for (const auto& [key, e] : best) out.push_back(*e);
  std::stable_sort(out.begin(), out.end(), earlier);
  return out;
}

std::vector<InteractionEvent> filter_low_activity(std::span<const InteractionEvent> events) {
  struct Tally {
    std::size_t actions = 0;
    std::size_t uploads = 0;
  };
  std::unordered_map<std::string, Tally> tally;
  for (const auto& e : events) {
    auto& t = tally[e.user];
    ++t.actions;
    if (e.action == Action::Upload) ++t.uploads;
  }
  std::vector<InteractionEvent> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    const auto& t = tally[e.user];
    if (t.uploads == 0 && t.actions <= 1) continue;
    out.push_back(e);
  }
  return out;
}

std::vector<InteractionEvent> remove_users(std::span<const InteractionEvent> events,
                                           const std::unordered_set<std::string>& blocked) {
  std::vector<InteractionEvent> out;
  out.reserve(events.size());
  for (const auto& e : events) {
    if (!blocked.contains(e.user)) out.push_back(e);
  }
  return out;
}

void apply_min_day(std::vector<PaperRecord>& papers, std::vector<InteractionEvent>& events,
                   long min_day) {
  std::unordered_set<std::string> dropped;
  std::erase_if(papers, [&](const PaperRecord& p) {
    if (p.submission_day >= min_day) return false;
    dropped.insert(p.id);
    return true;
  });
  std::erase_if(events, [&](const InteractionEvent& e) { return dropped.contains(e.paper); });
}

std::string normalize_author_name(std::string_view raw) {
  const std::string_view name = trim(raw);
  std::string_view surname;
  std::string_view given;
  if (const auto comma = name.find(','); comma != std::string_view::npos) {
    surname = trim(name.substr(0, comma));
    given = trim(name.substr(comma + 1));
  } else {
    const auto tokens = split_ws(name);
    if (!tokens.empty()) {
      surname = tokens.back();
      if (tokens.size() > 1) {
        given = name.substr(0, static_cast<std::size_t>(tokens.back().data() - name.data()));
      }
    }
  }
  if (surname.empty() || !has_letter(surname)) {
    throw DataError("cannot parse author name '" + std::string(raw) + "'");
  }
  // Multi-word surnames in the comma form keep their internal spacing.
  std::string canonical_surname;
  for (auto part : split_ws(surname)) {
    if (!canonical_surname.empty()) canonical_surname += ' ';
    canonical_surname += part;
  }
  std::string initial;
  for (auto token : split_ws(given)) {
    initial = first_initial(token);
    if (!initial.empty()) break;
  }
  if (initial.empty()) return canonical_surname;
  return initial + " " + canonical_surname;
}

Networks build_networks(std::span<const InteractionEvent> events,
                        std::span<const PaperRecord> papers, const WeightScheme& scheme) {
  scheme.validate();
  LabelIndex items;
  for (const auto& p : papers) {
    if (items.find(p.id)) throw DataError("duplicate paper id " + p.id);
    items.intern(p.id);
  }
  LabelIndex users;
  std::vector<WeightedEdge> edges;
  edges.reserve(events.size());
  for (const auto& e : events) {
    const auto item = items.find(e.paper);
    if (!item) throw DataError("event references unknown paper " + e.paper);
    edges.push_back({users.intern(e.user), *item, scheme.weight(e.action)});
  }
  const auto n_users = static_cast<Index>(users.size());
  const auto n_items = static_cast<Index>(items.size());
  UserItemNetwork user_item(BipartiteGraph::from_edges(n_users, n_items, edges), users, items);

  LabelIndex authors;
  std::vector<WeightedEdge> links;
  for (Index a = 0; a < papers.size(); ++a) {
    std::vector<Index> seen;
    for (const auto& raw : papers[a].authors) {
      if (trim(raw).empty()) continue;
      const Index m = authors.intern(normalize_author_name(raw));
      if (std::find(seen.begin(), seen.end(), m) != seen.end()) continue;
      seen.push_back(m);
      links.push_back({m, a, 1.0});
    }
  }
  AuthorPaperNetwork author_paper(
      BipartiteGraph::from_edges(static_cast<Index>(authors.size()), n_items, links), authors,
      items);
  return {std::move(user_item), std::move(author_paper)};
}

UserItemNetwork build_user_item_network(std::span<const InteractionEvent> events,
                                        const WeightScheme& scheme) {
  scheme.validate();
  LabelIndex users;
  LabelIndex items;
  std::vector<WeightedEdge> edges;
  edges.reserve(events.size());
  for (const auto& e : events) {
    const Index u = users.intern(e.user);
    const Index a = items.intern(e.paper);
    edges.push_back({u, a, scheme.weight(e.action)});
  }
  auto graph = BipartiteGraph::from_edges(static_cast<Index>(users.size()),
                                          static_cast<Index>(items.size()), edges);
  return UserItemNetwork(std::move(graph), std::move(users), std::move(items));
}

std::vector<std::optional<PaperMetadata>> paper_metadata(const UserItemNetwork& net,
                                                         std::span<const PaperRecord> papers,
                                                         std::span<const InteractionEvent> events) {
  std::unordered_map<std::string, double> downloads;
  for (const auto& e : events) {
    if (e.action == Action::Download) downloads[e.paper] += 1.0;
  }
  std::vector<std::optional<PaperMetadata>> out(net.n_items());
  for (const auto& p : papers) {
    const auto idx = net.item_labels().find(p.id);
    if (!idx) continue;
    PaperMetadata m;
    m.id = p.id;
    m.submission_day = p.submission_day;
    m.citations = p.citations;
    m.impact_factor = p.impact_factor;
    if (const auto it = downloads.find(p.id); it != downloads.end()) m.downloads = it->second;
    out[*idx] = std::move(m);
  }
  return out;
}

std::vector<InteractionEvent> read_events(std::istream& in) {
  const auto rows = csv::parse(in);
  if (rows.empty()) throw DataError("events file is empty (missing header)");
  csv::expect_header(rows[0], {"user_id", "paper_id", "action", "timestamp"}, "events file");
  std::vector<InteractionEvent> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = r + 1;
    if (row.size() != 4) {
      throw DataError("events line " + std::to_string(line) + ": expected 4 fields");
    }
    InteractionEvent e;
    e.user = row[0];
    e.paper = row[1];
    const auto action = parse_action(row[2]);
    if (!action) {
      throw DataError("events line " + std::to_string(line) + ": unknown action '" + row[2] + "'");
    }
    e.action = *action;
    e.timestamp = parse_number<std::int64_t>(row[3], "timestamp", line);
    if (e.timestamp < 0) {
      throw DataError("events line " + std::to_string(line) + ": negative timestamp");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<InteractionEvent> read_events_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_events(in);
}

void write_events(std::ostream& out, std::span<const InteractionEvent> events) {
  out << "user_id,paper_id,action,timestamp\n";
  for (const auto& e : events) {
    csv::write_row(out, {e.user, e.paper, std::string(to_string(e.action)),
                         std::to_string(e.timestamp)});
  }
}

std::vector<PaperRecord> read_papers(std::istream& in) {
  const auto rows = csv::parse(in);
  if (rows.empty()) throw DataError("papers file is empty (missing header)");
  csv::expect_header(rows[0],
                     {"paper_id", "submission_day", "title", "authors", "citations", "impact_factor"},
                     "papers file");
  std::vector<PaperRecord> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = r + 1;
    if (row.size() != 6) {
      throw DataError("papers line " + std::to_string(line) + ": expected 6 fields");
    }
    PaperRecord p;
    p.id = row[0];
    p.submission_day = parse_number<long>(row[1], "submission_day", line);
    p.title = row[2];
    std::string_view list = row[3];
    while (!list.empty()) {
      const auto semi = list.find(';');
      const auto name = trim(list.substr(0, semi));
      if (!name.empty()) p.authors.emplace_back(name);
      if (semi == std::string_view::npos) break;
      list.remove_prefix(semi + 1);
    }
    p.citations = parse_optional_double(row[4], "citations", line);
    p.impact_factor = parse_optional_double(row[5], "impact_factor", line);
    if (p.citations < 0 || p.impact_factor < 0) {
      throw DataError("papers line " + std::to_string(line) + ": negative metric");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PaperRecord> read_papers_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_papers(in);
}

void write_papers(std::ostream& out, std::span<const PaperRecord> papers) {
  out << "paper_id,submission_day,title,authors,citations,impact_factor\n";
  for (const auto& p : papers) {
    std::string authors;
    for (std::size_t k = 0; k < p.authors.size(); ++k) {
      if (k) authors += ';';
      authors += p.authors[k];
    }
    csv::write_row(out, {p.id, std::to_string(p.submission_day), p.title, authors,
                         csv::format_double(p.citations), csv::format_double(p.impact_factor)});
  }
}

}  // namespace qrc
