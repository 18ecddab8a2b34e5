#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltg/analysis.hpp"

namespace ltg::challenge {

using Json = nlohmann::ordered_json;

enum class Phase { Registration, Leaderboard, HumanEval, Complete };

std::string_view to_string(Phase phase) noexcept;
Phase parse_phase(std::string_view text);

struct Prompt {
  std::string id;
  std::string text;
  std::optional<std::string> reference_text;
};

/// Prompt registry file: {"prompts": [{"id", "text", "reference_text"?}, ...]}.
std::vector<Prompt> load_prompts(const std::string& path);

struct ServiceConfig {
  std::size_t min_tokens = 40000;
  std::size_t max_tokens = 2000000;
  std::size_t judges_per_submission = 5;
  std::size_t scoring_workers = 2;
  AnalysisConfig analysis;
};

struct SubmissionRecord {
  std::string id;
  std::string team;
  std::string prompt_id;
  std::shared_ptr<const std::string> text;
  std::size_t token_count = 0;
  std::optional<GapelmaperReport> report;  // empty when scoring failed
  std::string error;                        // "Code: message" when scoring failed
  std::string received_at;

  std::string_view status() const noexcept { return report ? "scored" : "error"; }
};

inline constexpr std::array<std::string_view, 4> kDimensions = {"relevance", "consistency",
                                                                 "fluency", "coherence"};

/// Relevance, consistency, fluency, coherence on a 1..5 scale.
using Scores = std::array<int, 4>;

struct Assignment {
  std::string id;
  std::string judge_id;
  std::string submission_id;
  std::string issued_at;
  bool closed = false;
};

struct RatingRecord {
  std::string id;
  std::string assignment_id;
  std::string submission_id;
  std::string judge_id;
  Scores scores{};
  std::string submitted_at;
};

struct HumanEvalScore {
  std::string submission_id;
  std::array<double, 4> means{};
  std::size_t n_judges = 0;
  bool complete = false;
};

struct LeaderboardEntry {
  std::string team;
  std::string submission_id;
  double gapelmaper = 0.0;
  std::string received_at;
};

struct AssignmentView {
  std::string assignment_id;
  std::string submission_id;
  std::shared_ptr<const std::string> text;
  std::optional<std::string> reference_text;
};

Json to_json(const SubmissionRecord& record, bool include_text);
Json to_json(const RatingRecord& rating);
Json to_json(const HumanEvalScore& score);
Json to_json(const std::vector<LeaderboardEntry>& board);
Json to_json(const AssignmentView& view);
GapelmaperReport report_from_json(const Json& j);

/// Whitespace runs collapsed to one space, leading/trailing whitespace dropped.
std::string normalize_whitespace(std::string_view text);

/// Everything the event log determines. Applying the same events in the same
/// order always yields the same state.
class ChallengeState {
 public:
  /// Applies one logged event. Throws Error(Io) on an event it cannot apply.
  void apply(const Json& event);

  Phase phase() const noexcept { return phase_; }
  std::uint64_t last_seq() const noexcept { return last_seq_; }

  const SubmissionRecord* submission(std::string_view id) const;
  const Assignment* assignment(std::string_view id) const;
  const std::map<std::string, SubmissionRecord, std::less<>>& submissions() const noexcept {
    return submissions_;
  }
  const std::map<std::string, Assignment, std::less<>>& assignments() const noexcept {
    return assignments_;
  }
  const std::vector<RatingRecord>& ratings_for(std::string_view submission_id) const;

  std::vector<LeaderboardEntry> leaderboard() const;

 private:
  Phase phase_ = Phase::Registration;
  std::uint64_t last_seq_ = 0;
  std::map<std::string, SubmissionRecord, std::less<>> submissions_;
  std::map<std::string, Assignment, std::less<>> assignments_;
  std::map<std::string, std::vector<RatingRecord>, std::less<>> ratings_;
};

/// Append-only newline-delimited JSON log. An empty path keeps events in memory.
class EventLog {
 public:
  explicit EventLog(std::string path = {});

  /// Every event currently in the log, in order.
  const std::vector<Json>& events() const noexcept { return events_; }
  /// Writes and flushes one line before returning.
  void append(const Json& event);

 private:
  std::string path_;
  std::ofstream out_;
  std::vector<Json> events_;
};

using Clock = std::function<std::chrono::system_clock::time_point()>;

class ChallengeService {
 public:
  ChallengeService(ServiceConfig config, std::vector<Prompt> prompts,
                   std::shared_ptr<const EmbeddingTable> table, EventLog log,
                   Clock clock = std::chrono::system_clock::now);

  Phase phase() const;
  /// Moves to a strictly later phase.
  void set_phase(Phase next);

  SubmissionRecord submit(const std::string& team, const std::string& prompt_id,
                          const std::string& text);
  std::vector<LeaderboardEntry> leaderboard() const;
  AssignmentView next_assignment(const std::string& judge_id);
  RatingRecord record_rating(const std::string& assignment_id, const Scores& scores);
  HumanEvalScore aggregate_human_scores(const std::string& submission_id) const;

  std::shared_ptr<const ChallengeState> snapshot() const;

 private:
  const Prompt& prompt(const std::string& id) const;
  std::string now() const;
  // Caller holds write_mutex_.
  void commit(Json event);
  void require_phase(Phase expected) const;

  ServiceConfig config_;
  std::map<std::string, Prompt, std::less<>> prompts_;
  std::shared_ptr<const EmbeddingTable> table_;
  Clock clock_;

  std::mutex write_mutex_;
  EventLog log_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const ChallengeState> snapshot_;
  std::counting_semaphore<> scoring_slots_;
};

}  // namespace ltg::challenge
