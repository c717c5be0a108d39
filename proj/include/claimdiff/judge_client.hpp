#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

#include "claimdiff/diagnostic.hpp"
#include "claimdiff/prompts.hpp"
#include "claimdiff/protocol.hpp"

namespace claimdiff::judge {

enum class BackendKind { Http, Mock };

/// Backend description. For Http, `api_key_env` names the environment
/// variable holding the API key (never passed via flags); an empty name
/// means no auth header is attached.
struct JudgeBackendSpec {
  BackendKind kind = BackendKind::Mock;
  std::string endpoint;           // http(s)://host[:port]/path
  std::string model_name = "judge";
  double timeout_s = 60.0;
  int max_retries = 3;
  int parallelism = 1;
  std::string api_key_env;
  double temperature = 0.0;
  std::string cache_dir;          // empty disables the response cache
  std::string mock_fixture_path;  // JSONL fixtures for the Mock backend

  void validate() const;  // Error(InvalidConfig)
};

struct JudgeRequest {
  PromptMode mode = PromptMode::ClaimDiff;
  std::string sample_id;
  SlotMap slots;
  std::string image_ref;  // local path or URL; empty = none
};

enum class QueryStatus {
  Ok,
  MalformedAfterRetries,
  Transport,
  MissingImage,
  AuthMissing,
  MissingFixture,
};

std::string_view query_status_name(QueryStatus status);

using ParsedResult = std::variant<std::monostate, ClaimDiffTranscript,
                                  HolisticVerdict, SampleDiagnosis,
                                  NoRefDiagnosis>;

struct QueryResult {
  QueryStatus status = QueryStatus::Ok;
  std::string raw_text;   // last raw judge reply
  int retry_count = 0;    // re-queries beyond the first request
  bool cache_hit = false;
  ParsedResult parsed;
  std::string error;      // message when status != Ok
};

/// Content hash over (mode, rendered prompt, image bytes digest). A local
/// image path is digested by its bytes (recompressing the file changes the
/// key); a URL image_ref is digested by the URL text.
/// Errors: UnreadableImage, plus render errors for bad slots.
std::string cache_key(const JudgeRequest& request);

/// Pluggable judge backend with retries for malformed output and a
/// content-addressed response cache. Thread-safe; batch runners may call
/// query() from up to `parallelism` workers.
class JudgeClient {
 public:
  explicit JudgeClient(JudgeBackendSpec spec);
  ~JudgeClient();

  JudgeClient(const JudgeClient&) = delete;
  JudgeClient& operator=(const JudgeClient&) = delete;

  const JudgeBackendSpec& spec() const { return spec_; }

  QueryResult query(const JudgeRequest& request);

  /// Backend requests actually issued (cache hits excluded); for
  /// call-count assertions and --dry-run verification.
  int requests_issued() const { return requests_issued_.load(); }

  /// Loads Mock fixtures from a JSONL file: one object per line with
  /// sample_id, mode, and either "response" (string) or "responses"
  /// (array of strings consumed one per attempt, last repeats).
  void load_mock_fixtures(const std::string& path);
  void set_mock_response(const std::string& sample_id, PromptMode mode,
                         std::string response);
  void set_mock_responses(const std::string& sample_id, PromptMode mode,
                          std::vector<std::string> responses);

 private:
  struct MockEntry {
    std::vector<std::string> responses;
    size_t next = 0;
  };

  std::string transport_send(const std::string& rendered_prompt,
                             const std::string& image_ref);
  std::string mock_lookup(const JudgeRequest& request);

  JudgeBackendSpec spec_;
  std::atomic<int> requests_issued_{0};
  std::mutex mock_mutex_;
  std::map<std::pair<std::string, PromptMode>, MockEntry> mock_;
};

/// Parses a raw judge reply with the parser matching `mode`.
/// CaptionGen has no parser; the result holds monostate.
ParsedResult parse_for_mode(PromptMode mode, const std::string& raw,
                            const std::string& sample_id);

}  // namespace claimdiff::judge
