#include "qrc/reports.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "qrc/csv.hpp"

namespace qrc {

namespace {

constexpr std::size_t kMaxReportedIds = 5;

double parse_double(const std::string& text, std::string_view what, std::size_t line) {
  double v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw DataError(std::string(what) + ": bad number '" + text + "' on line " +
                    std::to_string(line));
  }
  return v;
}

std::size_t parse_count(const std::string& text, std::string_view what, std::size_t line) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw DataError(std::string(what) + ": bad integer '" + text + "' on line " +
                    std::to_string(line));
  }
  return v;
}

Side parse_side(const std::string& text, std::size_t line) {
  if (text == "user") return Side::User;
  if (text == "item") return Side::Item;
  if (text == "author") return Side::Author;
  throw DataError("scores: unknown class '" + text + "' on line " + std::to_string(line));
}

void append_side(ScoreTable& out, const ScoreVector& v, const LabelIndex& labels) {
  if (labels.size() != v.size()) {
    throw DataError("label count does not match the " + std::string(to_string(v.side)) +
                    " score vector");
  }
  const auto order = top_k(v.values, std::max<std::size_t>(v.size(), 1)).ids;
  std::vector<std::size_t> rank(v.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;
  for (Index i = 0; i < v.size(); ++i) out.push_back({v.side, labels.label(i), v.values[i], rank[i]});
}

std::vector<csv::Row> data_rows(std::istream& in, const std::vector<std::string_view>& header,
                                std::string_view what) {
  auto rows = csv::parse(in);
  if (rows.empty()) throw DataError(std::string(what) + ": missing header");
  csv::expect_header(rows.front(), header, what);
  rows.erase(rows.begin());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].size() != header.size()) {
      throw DataError(std::string(what) + ": expected " + std::to_string(header.size()) +
                      " fields on line " + std::to_string(k + 2));
    }
  }
  return rows;
}

template <typename Fn>
auto with_file(const std::string& path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return fn(in);
}

std::string list_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t k = 0; k < ids.size() && k < kMaxReportedIds; ++k) {
    if (k) out += ", ";
    out += ids[k];
  }
  if (ids.size() > kMaxReportedIds) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

std::vector<double> item_scores(const ScoreTable& table, std::vector<const ScoreRow*>& rows) {
  std::vector<double> scores;
  for (const auto& r : table) {
    if (r.side != Side::Item) continue;
    rows.push_back(&r);
    scores.push_back(r.score);
  }
  return scores;
}

}  // namespace

ScoreTable make_score_table(const ScoreSet& scores, const LabelIndex& users,
                            const LabelIndex& items, const LabelIndex* authors) {
  ScoreTable out;
  append_side(out, scores.reputation, users);
  append_side(out, scores.quality, items);
  if (scores.credit) {
    if (!authors) throw DataError("credit scores need author labels");
    append_side(out, *scores.credit, *authors);
  }
  return out;
}

void write_scores(std::ostream& out, const ScoreTable& table) {
  csv::write_row(out, {"class", "id", "score", "rank"});
  for (const auto& r : table) {
    csv::write_row(out, {std::string(to_string(r.side)), r.id, csv::format_double(r.score),
                         std::to_string(r.rank)});
  }
}

ScoreTable read_scores(std::istream& in) {
  const auto rows = data_rows(in, {"class", "id", "score", "rank"}, "scores");
  ScoreTable out;
  out.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& f = rows[k];
    out.push_back({parse_side(f[0], k + 2), f[1], parse_double(f[2], "scores", k + 2),
                   parse_count(f[3], "scores", k + 2)});
  }
  return out;
}

ScoreTable read_scores_file(const std::string& path) {
  return with_file(path, [](std::istream& in) { return read_scores(in); });
}

TruthTables truth_tables(const GroundTruth& truth) {
  TruthTables out;
  for (std::size_t i = 0; i < truth.ability.size(); ++i) {
    out.users.push_back({std::to_string(i), truth.ability[i], truth.activity[i]});
  }
  for (std::size_t a = 0; a < truth.fitness.size(); ++a) {
    out.items.push_back(
        {std::to_string(a), truth.fitness[a], static_cast<double>(truth.created_at[a])});
  }
  return out;
}

void write_user_truth(std::ostream& out, std::span<const UserTruth> users) {
  csv::write_row(out, {"user_id", "ability", "activity"});
  for (const auto& u : users) {
    csv::write_row(out, {u.id, csv::format_double(u.ability), csv::format_double(u.activity)});
  }
}

void write_item_truth(std::ostream& out, std::span<const ItemTruth> items) {
  csv::write_row(out, {"item_id", "fitness", "created_at"});
  for (const auto& it : items) {
    csv::write_row(out,
                   {it.id, csv::format_double(it.fitness), csv::format_double(it.created_at)});
  }
}

std::vector<UserTruth> read_user_truth(std::istream& in) {
  const auto rows = data_rows(in, {"user_id", "ability", "activity"}, "user truth");
  std::vector<UserTruth> out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.push_back({rows[k][0], parse_double(rows[k][1], "user truth", k + 2),
                   parse_double(rows[k][2], "user truth", k + 2)});
  }
  return out;
}

std::vector<ItemTruth> read_item_truth(std::istream& in) {
  const auto rows = data_rows(in, {"item_id", "fitness", "created_at"}, "item truth");
  std::vector<ItemTruth> out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.push_back({rows[k][0], parse_double(rows[k][1], "item truth", k + 2),
                   parse_double(rows[k][2], "item truth", k + 2)});
  }
  return out;
}

std::vector<UserTruth> read_user_truth_file(const std::string& path) {
  return with_file(path, [](std::istream& in) { return read_user_truth(in); });
}

std::vector<ItemTruth> read_item_truth_file(const std::string& path) {
  return with_file(path, [](std::istream& in) { return read_item_truth(in); });
}

CorrelationReport correlate(const ScoreTable& table, const TruthTables& truth) {
  std::unordered_map<std::string, const UserTruth*> users;
  for (const auto& u : truth.users) users.emplace(u.id, &u);
  std::unordered_map<std::string, const ItemTruth*> items;
  for (const auto& it : truth.items) items.emplace(it.id, &it);

  std::vector<double> r, ability, activity, q, fitness, created;
  std::vector<std::string> unknown;
  for (const auto& row : table) {
    if (row.side == Side::User && !truth.users.empty()) {
      const auto it = users.find(row.id);
      if (it == users.end()) {
        unknown.push_back("user " + row.id);
        continue;
      }
      r.push_back(row.score);
      ability.push_back(it->second->ability);
      activity.push_back(it->second->activity);
    } else if (row.side == Side::Item && !truth.items.empty()) {
      const auto it = items.find(row.id);
      if (it == items.end()) {
        unknown.push_back("item " + row.id);
        continue;
      }
      q.push_back(row.score);
      fitness.push_back(it->second->fitness);
      created.push_back(it->second->created_at);
    }
  }
  if (!unknown.empty()) {
    throw DataError("scored ids missing from the ground truth: " + list_ids(unknown));
  }
  CorrelationReport out;
  const Estimate no_truth{std::nullopt, "no ground truth for this side"};
  out.quality_fitness = truth.items.empty() ? no_truth : pearson(q, fitness);
  out.quality_age = truth.items.empty() ? no_truth : pearson(q, created);
  out.reputation_ability = truth.users.empty() ? no_truth : pearson(r, ability);
  out.reputation_activity = truth.users.empty() ? no_truth : pearson(r, activity);
  return out;
}

MetadataById metadata_by_id(std::span<const PaperRecord> papers,
                            std::span<const InteractionEvent> events) {
  std::unordered_map<std::string, double> downloads;
  for (const auto& e : events) {
    if (e.action == Action::Download) downloads[e.paper] += 1.0;
  }
  MetadataById out;
  for (const auto& p : papers) {
    PaperMetadata m;
    m.id = p.id;
    m.submission_day = p.submission_day;
    m.citations = p.citations;
    m.impact_factor = p.impact_factor;
    if (const auto it = downloads.find(p.id); it != downloads.end()) m.downloads = it->second;
    out.emplace(p.id, std::move(m));
  }
  return out;
}

std::vector<std::string> top_item_ids(const ScoreTable& table, std::size_t k) {
  std::vector<const ScoreRow*> rows;
  const auto scores = item_scores(table, rows);
  if (scores.empty()) throw DataError("scores contain no items");
  std::vector<std::string> out;
  for (Index idx : top_k(scores, k).ids) out.push_back(rows[idx]->id);
  return out;
}

TopKReport top_k_from_table(const ScoreTable& table, const MetadataById& metadata, std::size_t k) {
  const auto ids = top_item_ids(table, k);
  std::vector<std::optional<PaperMetadata>> meta;
  std::vector<Index> ranking;
  std::vector<std::string> missing;
  for (const auto& id : ids) {
    const auto it = metadata.find(id);
    if (it == metadata.end()) {
      missing.push_back(id);
      continue;
    }
    ranking.push_back(static_cast<Index>(meta.size()));
    meta.emplace_back(it->second);
  }
  if (!missing.empty()) throw DataError("ranked papers without metadata: " + list_ids(missing));
  return top_k_report(ranking, meta);
}

}  // namespace qrc
