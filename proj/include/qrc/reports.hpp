#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qrc/algorithms.hpp"
#include "qrc/evaluation.hpp"
#include "qrc/ingestion.hpp"
#include "qrc/simulator.hpp"

namespace qrc {

// One line of a scores file. `rank` is 1-based within the node class:
// descending score, ties by ascending node index.
struct ScoreRow {
  Side side = Side::Item;
  std::string id;
  double score = 0;
  std::size_t rank = 0;
};

using ScoreTable = std::vector<ScoreRow>;

// Users, then items, then authors (when present), each in node-index order.
ScoreTable make_score_table(const ScoreSet& scores, const LabelIndex& users,
                            const LabelIndex& items, const LabelIndex* authors = nullptr);

void write_scores(std::ostream& out, const ScoreTable& table);
ScoreTable read_scores(std::istream& in);
ScoreTable read_scores_file(const std::string& path);

struct UserTruth {
  std::string id;
  double ability = 0;
  double activity = 0;
};

struct ItemTruth {
  std::string id;
  double fitness = 0;
  double created_at = 0;
};

struct TruthTables {
  std::vector<UserTruth> users;
  std::vector<ItemTruth> items;
};

// Node i of the simulation is labelled std::to_string(i).
TruthTables truth_tables(const GroundTruth& truth);

void write_user_truth(std::ostream& out, std::span<const UserTruth> users);
void write_item_truth(std::ostream& out, std::span<const ItemTruth> items);
std::vector<UserTruth> read_user_truth(std::istream& in);
std::vector<ItemTruth> read_item_truth(std::istream& in);
std::vector<UserTruth> read_user_truth_file(const std::string& path);
std::vector<ItemTruth> read_item_truth_file(const std::string& path);

// Joins the scored nodes with the truth tables by id. Truth rows without a
// score are skipped; a scored id absent from the truth is a DataError that
// names the offending ids. An empty side of `truth` leaves its two
// correlations missing.
CorrelationReport correlate(const ScoreTable& table, const TruthTables& truth);

using MetadataById = std::unordered_map<std::string, PaperMetadata>;

// Downloads counted from download events.
MetadataById metadata_by_id(std::span<const PaperRecord> papers,
                            std::span<const InteractionEvent> events);

// Top-k items of the table by score; every ranked item needs metadata.
TopKReport top_k_from_table(const ScoreTable& table, const MetadataById& metadata, std::size_t k);

// Ids of the top-k items of the table.
std::vector<std::string> top_item_ids(const ScoreTable& table, std::size_t k);

}  // namespace qrc
