#include "ltg/challenge.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <ctime>
#include <filesystem>

#include "ltg/cli.hpp"
#include "ltg/error.hpp"

namespace ltg::challenge {

namespace {

std::string format_id(std::string_view prefix, std::uint64_t seq) {
  return fmt::format("{}-{:06}", prefix, seq);
}

std::string iso_utc(std::chrono::system_clock::time_point t) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(t.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms / 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900,
                     tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms % 1000);
}

[[noreturn]] void bad_event(const std::string& what) {
  throw Error(ErrorCode::Io, "event log: " + what);
}

}  // namespace

std::string_view to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::Registration: return "registration";
    case Phase::Leaderboard: return "leaderboard";
    case Phase::HumanEval: return "human_eval";
    case Phase::Complete: return "complete";
  }
  return "registration";
}

Phase parse_phase(std::string_view text) {
  for (auto p : {Phase::Registration, Phase::Leaderboard, Phase::HumanEval, Phase::Complete}) {
    if (to_string(p) == text) return p;
  }
  throw Error(ErrorCode::BadRequest, "unknown phase '" + std::string(text) + "'");
}

std::vector<Prompt> load_prompts(const std::string& path) {
  const auto j = nlohmann::json::parse(cli::read_text_file(path), nullptr, false);
  if (j.is_discarded() || !j.contains("prompts") || !j["prompts"].is_array()) {
    throw Error(ErrorCode::Io, "prompt file '" + path + "' must hold {\"prompts\": [...]}");
  }
  std::vector<Prompt> prompts;
  for (const auto& p : j["prompts"]) {
    Prompt prompt{p.at("id").get<std::string>(), p.at("text").get<std::string>(), std::nullopt};
    if (p.contains("reference_text") && !p["reference_text"].is_null()) {
      prompt.reference_text = p["reference_text"].get<std::string>();
    }
    prompts.push_back(std::move(prompt));
  }
  return prompts;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

// ---------------------------------------------------------------- JSON

Json to_json(const SubmissionRecord& r, bool include_text) {
  Json j{{"id", r.id},
         {"team", r.team},
         {"prompt_id", r.prompt_id},
         {"token_count", r.token_count},
         {"status", r.status()},
         {"received_at", r.received_at}};
  if (include_text) j["text"] = r.text ? *r.text : std::string();
  if (r.report) {
    j["report"] = ltg::to_json(*r.report);
  } else {
    j["report"] = nullptr;
    j["error"] = r.error;
  }
  return j;
}

Json to_json(const RatingRecord& r) {
  Json j{{"id", r.id},
         {"assignment_id", r.assignment_id},
         {"submission_id", r.submission_id},
         {"judge_id", r.judge_id}};
  for (std::size_t k = 0; k < kDimensions.size(); ++k) j[std::string(kDimensions[k])] = r.scores[k];
  j["submitted_at"] = r.submitted_at;
  return j;
}

Json to_json(const HumanEvalScore& s) {
  Json j{{"submission_id", s.submission_id}};
  for (std::size_t k = 0; k < kDimensions.size(); ++k) {
    j[std::string(kDimensions[k]) + "_mean"] = s.means[k];
  }
  j["n_judges"] = s.n_judges;
  j["complete"] = s.complete;
  return j;
}

Json to_json(const std::vector<LeaderboardEntry>& board) {
  auto arr = Json::array();
  for (const auto& e : board) {
    arr.push_back(Json{{"team", e.team},
                       {"submission_id", e.submission_id},
                       {"gapelmaper", e.gapelmaper},
                       {"received_at", e.received_at}});
  }
  return arr;
}

Json to_json(const AssignmentView& v) {
  return Json{{"assignment_id", v.assignment_id},
              {"submission_id", v.submission_id},
              {"text", v.text ? *v.text : std::string()},
              {"reference_text", v.reference_text ? Json(*v.reference_text) : Json(nullptr)}};
}

GapelmaperReport report_from_json(const Json& j) {
  GapelmaperReport r;
  r.mape_power = j.at("mape_power").get<double>();
  r.mape_exp = j.at("mape_exp").get<double>();
  r.gapelmaper = j.at("gapelmaper").get<double>();
  r.degenerate = j.value("degenerate", false);
  r.n_tokens = j.at("n_tokens").get<std::size_t>();
  r.n_vectors = j.at("n_vectors").get<std::size_t>();
  r.tau_min = j.at("tau_min").get<std::size_t>();
  r.tau_max = j.at("tau_max").get<std::size_t>();
  r.grid_mode = parse_grid_mode(j.at("grid_mode").get<std::string>());
  r.dropped_oov_fraction = j.at("dropped_oov_fraction").get<double>();
  r.dropped_nonpositive_fraction = j.at("dropped_nonpositive_fraction").get<double>();
  r.embedding_name = j.at("embedding_name").get<std::string>();
  return r;
}

// ---------------------------------------------------------------- state

void ChallengeState::apply(const Json& event) {
  try {
    const auto seq = event.at("seq").get<std::uint64_t>();
    if (seq != last_seq_ + 1) {
      bad_event(fmt::format("sequence {} follows {}", seq, last_seq_));
    }
    const auto type = event.at("type").get<std::string>();
    if (type == "phase") {
      phase_ = parse_phase(event.at("phase").get<std::string>());
    } else if (type == "submission") {
      SubmissionRecord r;
      r.id = event.at("id").get<std::string>();
      r.team = event.at("team").get<std::string>();
      r.prompt_id = event.at("prompt_id").get<std::string>();
      r.text = std::make_shared<const std::string>(event.at("text").get<std::string>());
      r.token_count = event.at("token_count").get<std::size_t>();
      r.received_at = event.at("received_at").get<std::string>();
      if (event.at("report").is_null()) {
        r.error = event.value("error", std::string());
      } else {
        r.report = report_from_json(event["report"]);
      }
      submissions_[r.id] = std::move(r);
    } else if (type == "assignment") {
      Assignment a{event.at("id").get<std::string>(), event.at("judge_id").get<std::string>(),
                   event.at("submission_id").get<std::string>(),
                   event.at("issued_at").get<std::string>(), false};
      if (!submissions_.contains(a.submission_id)) bad_event("assignment for unknown submission");
      assignments_[a.id] = std::move(a);
    } else if (type == "rating") {
      RatingRecord r;
      r.id = event.at("id").get<std::string>();
      r.assignment_id = event.at("assignment_id").get<std::string>();
      r.submission_id = event.at("submission_id").get<std::string>();
      r.judge_id = event.at("judge_id").get<std::string>();
      for (std::size_t k = 0; k < kDimensions.size(); ++k) {
        r.scores[k] = event.at(std::string(kDimensions[k])).get<int>();
      }
      r.submitted_at = event.at("submitted_at").get<std::string>();
      auto it = assignments_.find(r.assignment_id);
      if (it == assignments_.end()) bad_event("rating for unknown assignment");
      it->second.closed = true;
      ratings_[r.submission_id].push_back(std::move(r));
    } else {
      bad_event("unknown event type '" + type + "'");
    }
    last_seq_ = seq;
  } catch (const nlohmann::json::exception& e) {
    bad_event(e.what());
  }
}

const SubmissionRecord* ChallengeState::submission(std::string_view id) const {
  auto it = submissions_.find(id);
  return it == submissions_.end() ? nullptr : &it->second;
}

const Assignment* ChallengeState::assignment(std::string_view id) const {
  auto it = assignments_.find(id);
  return it == assignments_.end() ? nullptr : &it->second;
}

const std::vector<RatingRecord>& ChallengeState::ratings_for(std::string_view submission_id) const {
  static const std::vector<RatingRecord> kNone;
  auto it = ratings_.find(submission_id);
  return it == ratings_.end() ? kNone : it->second;
}

std::vector<LeaderboardEntry> ChallengeState::leaderboard() const {
  const auto better = [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
    return std::tie(a.gapelmaper, a.received_at, a.submission_id) <
           std::tie(b.gapelmaper, b.received_at, b.submission_id);
  };
  std::map<std::string, LeaderboardEntry> best;
  for (const auto& [id, r] : submissions_) {
    if (!r.report) continue;
    LeaderboardEntry e{r.team, r.id, r.report->gapelmaper, r.received_at};
    auto it = best.find(r.team);
    if (it == best.end() || better(e, it->second)) best[r.team] = std::move(e);
  }
  std::vector<LeaderboardEntry> board;
  for (auto& [team, e] : best) board.push_back(std::move(e));
  std::sort(board.begin(), board.end(), better);
  return board;
}

// ---------------------------------------------------------------- log

EventLog::EventLog(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::error_code ec;
  bool needs_newline = false;
  if (std::filesystem::exists(path_, ec)) {
    const auto content = cli::read_text_file(path_);
    std::size_t pos = 0;
    std::size_t good_end = 0;
    std::size_t line_no = 0;
    while (pos < content.size()) {
      ++line_no;
      const auto nl = content.find('\n', pos);
      const bool complete = nl != std::string::npos;
      const auto line = std::string_view(content).substr(pos, (complete ? nl : content.size()) - pos);
      auto j = Json::parse(line, nullptr, false);
      if (!complete && (line.empty() || j.is_discarded())) break;  // torn final write
      if (!line.empty()) {
        if (j.is_discarded()) {
          throw Error(ErrorCode::Io, fmt::format("{}:{}: unparseable event", path_, line_no));
        }
        events_.push_back(std::move(j));
      }
      pos = complete ? nl + 1 : content.size();
      good_end = pos;
      needs_newline = !complete;
    }
    if (good_end < content.size()) std::filesystem::resize_file(path_, good_end);
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorCode::Io, "cannot open event log '" + path_ + "' for append");
  if (needs_newline) out_ << '\n' << std::flush;
}

void EventLog::append(const Json& event) {
  if (out_.is_open()) {
    out_ << event.dump() << '\n';
    out_.flush();
    if (!out_) throw Error(ErrorCode::Io, "write to event log '" + path_ + "' failed");
  }
  events_.push_back(event);
}

// ---------------------------------------------------------------- service

ChallengeService::ChallengeService(ServiceConfig config, std::vector<Prompt> prompts,
                                   std::shared_ptr<const EmbeddingTable> table, EventLog log,
                                   Clock clock)
    : config_(std::move(config)),
      table_(std::move(table)),
      clock_(std::move(clock)),
      log_(std::move(log)),
      scoring_slots_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, config_.scoring_workers))) {
  config_.analysis.validate();
  for (auto& p : prompts) {
    const auto id = p.id;
    prompts_.emplace(id, std::move(p));
  }
  auto state = std::make_shared<ChallengeState>();
  for (const auto& event : log_.events()) state->apply(event);
  snapshot_ = std::move(state);
}

std::shared_ptr<const ChallengeState> ChallengeService::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

Phase ChallengeService::phase() const { return snapshot()->phase(); }

std::string ChallengeService::now() const { return iso_utc(clock_()); }

void ChallengeService::require_phase(Phase expected) const {
  const auto current = phase();
  if (current != expected) {
    throw Error(ErrorCode::WrongPhase, fmt::format("operation needs phase {}, challenge is in {}",
                                                   to_string(expected), to_string(current)));
  }
}

void ChallengeService::commit(Json event) {
  const auto current = snapshot();
  event["seq"] = current->last_seq() + 1;
  auto next = std::make_shared<ChallengeState>(*current);
  next->apply(event);
  log_.append(event);
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(next);
}

const Prompt& ChallengeService::prompt(const std::string& id) const {
  auto it = prompts_.find(id);
  if (it == prompts_.end()) throw Error(ErrorCode::UnknownPrompt, "unknown prompt '" + id + "'");
  return it->second;
}

void ChallengeService::set_phase(Phase next) {
  std::lock_guard lock(write_mutex_);
  const auto current = snapshot()->phase();
  if (static_cast<int>(next) <= static_cast<int>(current)) {
    throw Error(ErrorCode::InvalidPhaseTransition,
                fmt::format("cannot move from {} to {}", to_string(current), to_string(next)));
  }
  commit(Json{{"seq", 0}, {"type", "phase"}, {"phase", to_string(next)}, {"at", now()}});
}

SubmissionRecord ChallengeService::submit(const std::string& team, const std::string& prompt_id,
                                          const std::string& text) {
  require_phase(Phase::Leaderboard);
  if (team.empty()) throw Error(ErrorCode::BadRequest, "team must not be empty");
  const auto& registered = prompt(prompt_id);
  if (!normalize_whitespace(text).starts_with(normalize_whitespace(registered.text))) {
    throw Error(ErrorCode::PromptPrefixMismatch,
                "submission does not begin with the text of prompt '" + prompt_id + "'");
  }
  const auto token_count = tokenize(text).size();
  if (token_count < config_.min_tokens) {
    throw Error(ErrorCode::TooShort, fmt::format("submission has {} tokens, minimum is {}",
                                                 token_count, config_.min_tokens));
  }
  if (token_count > config_.max_tokens) {
    throw Error(ErrorCode::TooLong, fmt::format("submission has {} tokens, maximum is {}",
                                                token_count, config_.max_tokens));
  }

  std::optional<GapelmaperReport> report;
  std::string error;
  {
    scoring_slots_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{scoring_slots_};
    try {
      report = analyze_text(text, *table_, config_.analysis);
    } catch (const Error& e) {
      if (!e.is_metric_error()) throw;
      error = fmt::format("{}: {}", error_code_name(e.code()), e.what());
    }
  }

  std::lock_guard lock(write_mutex_);
  require_phase(Phase::Leaderboard);
  const auto seq = snapshot()->last_seq() + 1;
  Json event{{"seq", seq},
             {"type", "submission"},
             {"id", format_id("sub", seq)},
             {"team", team},
             {"prompt_id", prompt_id},
             {"text", text},
             {"token_count", token_count},
             {"received_at", now()},
             {"report", report ? ltg::to_json(*report) : Json(nullptr)}};
  if (!report) event["error"] = error;
  commit(event);
  return *snapshot()->submission(event["id"].get<std::string>());
}

std::vector<LeaderboardEntry> ChallengeService::leaderboard() const {
  return snapshot()->leaderboard();
}

AssignmentView ChallengeService::next_assignment(const std::string& judge_id) {
  if (judge_id.empty()) throw Error(ErrorCode::BadRequest, "judge id must not be empty");
  std::lock_guard lock(write_mutex_);
  require_phase(Phase::HumanEval);
  const auto state = snapshot();

  const auto view_of = [&](const Assignment& a) {
    const auto* sub = state->submission(a.submission_id);
    return AssignmentView{a.id, a.submission_id, sub->text, prompt(sub->prompt_id).reference_text};
  };

  // Load counts ratings plus assignments still open, so at most
  // judges_per_submission judges are ever sent to one text.
  std::map<std::string, std::size_t, std::less<>> load;
  std::map<std::string, bool, std::less<>> seen_by_judge;
  for (const auto& [id, a] : state->assignments()) {
    ++load[a.submission_id];
    if (a.judge_id == judge_id) {
      if (!a.closed) return view_of(a);
      seen_by_judge[a.submission_id] = true;
    }
  }

  const SubmissionRecord* pick = nullptr;
  std::size_t pick_load = 0;
  for (const auto& [id, sub] : state->submissions()) {
    if (!sub.report || seen_by_judge.contains(id)) continue;
    const std::size_t l = load.contains(id) ? load.find(id)->second : 0;
    if (l >= config_.judges_per_submission) continue;
    if (!pick || l < pick_load ||
        (l == pick_load && std::tie(sub.received_at, sub.id) < std::tie(pick->received_at, pick->id))) {
      pick = &sub;
      pick_load = l;
    }
  }
  if (!pick) {
    throw Error(ErrorCode::NoWorkAvailable, "no submission is waiting for judge '" + judge_id + "'");
  }

  const auto seq = state->last_seq() + 1;
  const auto id = format_id("asg", seq);
  commit(Json{{"seq", seq},
              {"type", "assignment"},
              {"id", id},
              {"judge_id", judge_id},
              {"submission_id", pick->id},
              {"issued_at", now()}});
  return view_of(*snapshot()->assignment(id));
}

RatingRecord ChallengeService::record_rating(const std::string& assignment_id,
                                             const Scores& scores) {
  std::lock_guard lock(write_mutex_);
  require_phase(Phase::HumanEval);
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (scores[k] < 1 || scores[k] > 5) {
      throw Error(ErrorCode::ScoreOutOfRange,
                  fmt::format("{} score {} is outside 1..5", kDimensions[k], scores[k]));
    }
  }
  const auto state = snapshot();
  const auto* a = state->assignment(assignment_id);
  if (!a) throw Error(ErrorCode::UnknownAssignment, "unknown assignment '" + assignment_id + "'");
  if (a->closed) {
    throw Error(ErrorCode::DuplicateRating, "assignment '" + assignment_id + "' is already rated");
  }

  const auto seq = state->last_seq() + 1;
  Json event{{"seq", seq},
             {"type", "rating"},
             {"id", format_id("rat", seq)},
             {"assignment_id", a->id},
             {"submission_id", a->submission_id},
             {"judge_id", a->judge_id}};
  for (std::size_t k = 0; k < scores.size(); ++k) event[std::string(kDimensions[k])] = scores[k];
  event["submitted_at"] = now();
  const auto submission_id = a->submission_id;
  commit(event);
  return snapshot()->ratings_for(submission_id).back();
}

HumanEvalScore ChallengeService::aggregate_human_scores(const std::string& submission_id) const {
  const auto state = snapshot();
  if (!state->submission(submission_id)) {
    throw Error(ErrorCode::UnknownSubmission, "unknown submission '" + submission_id + "'");
  }
  const auto& ratings = state->ratings_for(submission_id);
  if (ratings.empty()) {
    throw Error(ErrorCode::NoRatings, "submission '" + submission_id + "' has no ratings yet");
  }
  HumanEvalScore score;
  score.submission_id = submission_id;
  for (const auto& r : ratings) {
    for (std::size_t k = 0; k < r.scores.size(); ++k) score.means[k] += r.scores[k];
  }
  for (auto& m : score.means) m /= static_cast<double>(ratings.size());
  score.n_judges = ratings.size();
  score.complete = score.n_judges >= config_.judges_per_submission;
  return score;
}

}  // namespace ltg::challenge
