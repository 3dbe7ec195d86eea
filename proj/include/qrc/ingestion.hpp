#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "qrc/evaluation.hpp"
#include "qrc/network.hpp"
#include "qrc/simulator.hpp"

namespace qrc {

std::string_view to_string(Action action);
std::optional<Action> parse_action(std::string_view text);

struct InteractionEvent {
  std::string user;
  std::string paper;
  Action action = Action::View;
  std::int64_t timestamp = 0;

  bool operator==(const InteractionEvent&) const = default;
};

struct WeightScheme {
  double upload = 1.0;
  double download = 0.1;
  double view = 0.05;

  double weight(Action action) const;
  void validate() const;
};

struct PaperRecord {
  std::string id;
  long submission_day = 0;
  std::string title;
  std::vector<std::string> authors;  // raw names
  double citations = 0;
  double impact_factor = 0;
};

// One event per (user, paper): the earliest. Equal timestamps prefer upload,
// then download, then view. Output sorted by (timestamp, user, paper).
std::vector<InteractionEvent> dedup_earliest(std::span<const InteractionEvent> events);

// Drops every event of users with no upload and at most one action.
std::vector<InteractionEvent> filter_low_activity(std::span<const InteractionEvent> events);

std::vector<InteractionEvent> remove_users(std::span<const InteractionEvent> events,
                                           const std::unordered_set<std::string>& blocked);

// Keeps papers with submission_day >= min_day and the events that refer to them.
void apply_min_day(std::vector<PaperRecord>& papers, std::vector<InteractionEvent>& events,
                   long min_day);

// "H. Eugene Stanley", "HE Stanley" and "Stanley, H. E." all become
// "H Stanley": first initial of the given names, a space, the surname.
std::string normalize_author_name(std::string_view raw);

struct Networks {
  UserItemNetwork user_item;
  AuthorPaperNetwork author_paper;
};

// Items follow the order of `papers`; users and authors are numbered by first
// appearance. Papers without authors get no author links.
Networks build_networks(std::span<const InteractionEvent> events,
                        std::span<const PaperRecord> papers, const WeightScheme& scheme);

// User-item network only, items numbered by first appearance in `events`.
UserItemNetwork build_user_item_network(std::span<const InteractionEvent> events,
                                        const WeightScheme& scheme);

// Metadata in item order; downloads counted from `events`.
std::vector<std::optional<PaperMetadata>> paper_metadata(const UserItemNetwork& net,
                                                         std::span<const PaperRecord> papers,
                                                         std::span<const InteractionEvent> events);

std::vector<InteractionEvent> read_events(std::istream& in);
std::vector<InteractionEvent> read_events_file(const std::string& path);
void write_events(std::ostream& out, std::span<const InteractionEvent> events);

std::vector<PaperRecord> read_papers(std::istream& in);
std::vector<PaperRecord> read_papers_file(const std::string& path);
void write_papers(std::ostream& out, std::span<const PaperRecord> papers);

}  // namespace qrc
