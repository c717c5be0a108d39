#include "claimdiff/judge_client.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "claimdiff/errors.hpp"

namespace claimdiff::judge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

bool is_url(std::string_view ref) {
  return ref.rfind("http://", 0) == 0 || ref.rfind("https://", 0) == 0;
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::UnreadableImage, "cannot read image " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string base64_encode(std::string_view data) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  size_t i = 0;
  while (i + 3 <= data.size()) {
    unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                 (static_cast<unsigned char>(data[i + 1]) << 8) |
                 static_cast<unsigned char>(data[i + 2]);
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out.push_back(alphabet[v & 63]);
    i += 3;
  }
  if (i + 1 == data.size()) {
    unsigned v = static_cast<unsigned char>(data[i]) << 16;
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out += "==";
  } else if (i + 2 == data.size()) {
    unsigned v = (static_cast<unsigned char>(data[i]) << 16) |
                 (static_cast<unsigned char>(data[i + 1]) << 8);
    out.push_back(alphabet[(v >> 18) & 63]);
    out.push_back(alphabet[(v >> 12) & 63]);
    out.push_back(alphabet[(v >> 6) & 63]);
    out += "=";
  }
  return out;
}

std::string image_mime(const std::string& path) {
  auto ext = fs::path(path).extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".png") return "image/png";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  return "image/png";
}

bool mode_requires_image(PromptMode mode) {
  switch (mode) {
    case PromptMode::ClaimDiff:
    case PromptMode::DiagnosticWithRef:
    case PromptMode::DiagnosticNoRef:
      return true;
    default:
      return false;
  }
}

struct SplitUrl {
  std::string host;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::InvalidConfig, "endpoint missing scheme: " + endpoint);
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

std::string_view query_status_name(QueryStatus status) {
  switch (status) {
    case QueryStatus::Ok: return "ok";
    case QueryStatus::MalformedAfterRetries: return "malformed_after_retries";
    case QueryStatus::Transport: return "transport_error";
    case QueryStatus::MissingImage: return "missing_image";
    case QueryStatus::AuthMissing: return "auth_missing";
    case QueryStatus::MissingFixture: return "missing_fixture";
  }
  return "unknown";
}

void JudgeBackendSpec::validate() const {
  if (max_retries < 0)
    throw Error(ErrorCode::InvalidConfig, "max_retries must be >= 0");
  if (parallelism < 1)
    throw Error(ErrorCode::InvalidConfig, "parallelism must be >= 1");
  if (kind == BackendKind::Http && endpoint.empty())
    throw Error(ErrorCode::InvalidConfig, "http backend needs an endpoint");
}

std::string cache_key(const JudgeRequest& request) {
  std::string image_digest;
  if (!request.image_ref.empty()) {
    image_digest = is_url(request.image_ref)
                       ? "url:" + request.image_ref
                       : sha256_hex(read_file_bytes(request.image_ref));
  }
  std::string material;
  material += prompt_mode_name(request.mode);
  material += '\n';
  material += render_prompt(request.mode, request.slots);
  material += '\n';
  material += image_digest;
  return sha256_hex(material);
}

ParsedResult parse_for_mode(PromptMode mode, const std::string& raw,
                            const std::string& sample_id) {
  switch (mode) {
    case PromptMode::ClaimDiff:
      return parse_claimdiff(raw);
    case PromptMode::HolisticWithRef:
    case PromptMode::HolisticNoRef:
      return parse_holistic(raw);
    case PromptMode::DiagnosticWithRef:
      return parse_diagnosis_with_ref(raw, sample_id);
    case PromptMode::DiagnosticNoRef:
      return parse_diagnosis_no_ref(raw, sample_id);
    case PromptMode::CaptionGen:
      return std::monostate{};
  }
  return std::monostate{};
}

JudgeClient::JudgeClient(JudgeBackendSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (!spec_.cache_dir.empty()) fs::create_directories(spec_.cache_dir);
  if (spec_.kind == BackendKind::Mock && !spec_.mock_fixture_path.empty())
    load_mock_fixtures(spec_.mock_fixture_path);
}

JudgeClient::~JudgeClient() = default;

void JudgeClient::load_mock_fixtures(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::InvalidConfig, "cannot open mock fixtures " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
      throw Error(ErrorCode::InvalidConfig,
                  path + ":" + std::to_string(line_no) + " is not a JSON object");
    const std::string sample_id = obj.value("sample_id", "");
    const PromptMode mode = parse_prompt_mode(obj.value("mode", ""));
    std::vector<std::string> responses;
    if (obj.contains("responses")) {
      for (const auto& r : obj["responses"]) responses.push_back(r.get<std::string>());
    } else if (obj.contains("response")) {
      responses.push_back(obj["response"].get<std::string>());
    }
    if (responses.empty())
      throw Error(ErrorCode::InvalidConfig,
                  path + ":" + std::to_string(line_no) + " has no response");
    set_mock_responses(sample_id, mode, std::move(responses));
  }
}

void JudgeClient::set_mock_response(const std::string& sample_id,
                                    PromptMode mode, std::string response) {
  set_mock_responses(sample_id, mode, {std::move(response)});
}

void JudgeClient::set_mock_responses(const std::string& sample_id,
                                     PromptMode mode,
                                     std::vector<std::string> responses) {
  std::lock_guard lock(mock_mutex_);
  mock_[{sample_id, mode}] = MockEntry{std::move(responses), 0};
}

std::string JudgeClient::mock_lookup(const JudgeRequest& request) {
  std::lock_guard lock(mock_mutex_);
  auto it = mock_.find({request.sample_id, request.mode});
  if (it == mock_.end())
    throw Error(ErrorCode::BackendFailure,
                "no mock fixture for sample '" + request.sample_id +
                    "' in mode " + std::string(prompt_mode_name(request.mode)));
  MockEntry& entry = it->second;
  const std::string& response =
      entry.responses[std::min(entry.next, entry.responses.size() - 1)];
  ++entry.next;
  return response;
}

std::string JudgeClient::transport_send(const std::string& rendered_prompt,
                                        const std::string& image_ref) {
  const SplitUrl url = split_url(spec_.endpoint);

  json content = json::array();
  content.push_back({{"type", "text"}, {"text", rendered_prompt}});
  if (!image_ref.empty()) {
    std::string image_url;
    if (is_url(image_ref)) {
      image_url = image_ref;
    } else {
      const std::string bytes = read_file_bytes(image_ref);
      image_url = "data:" + image_mime(image_ref) + ";base64," +
                  base64_encode(bytes);
    }
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", image_url}}}});
  }
  json body = {
      {"model", spec_.model_name},
      {"temperature", spec_.temperature},
      {"messages", json::array({json{{"role", "user"}, {"content", content}}})},
  };

  httplib::Client client(url.host);
  client.set_connection_timeout(static_cast<int>(spec_.timeout_s), 0);
  client.set_read_timeout(static_cast<int>(spec_.timeout_s), 0);
  httplib::Headers headers;
  if (!spec_.api_key_env.empty()) {
    const char* key = std::getenv(spec_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw Error(ErrorCode::AuthMissing,
                  "environment variable " + spec_.api_key_env + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res)
    throw Error(ErrorCode::Transport,
                "request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error(ErrorCode::Transport,
                "http status " + std::to_string(res->status));

  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded())
    throw Error(ErrorCode::Transport, "response body is not JSON");
  try {
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::Transport,
                "response body missing choices[0].message.content");
  }
}

QueryResult JudgeClient::query(const JudgeRequest& request) {
  QueryResult result;

  if (mode_requires_image(request.mode) && request.image_ref.empty()) {
    result.status = QueryStatus::MissingImage;
    result.error = std::string(prompt_mode_name(request.mode)) +
                   " requires an image_ref";
    return result;
  }

  std::string rendered;
  std::string key;
  try {
    rendered = render_prompt(request.mode, request.slots);
    if (!spec_.cache_dir.empty()) key = cache_key(request);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnreadableImage) {
      result.status = QueryStatus::MissingImage;
      result.error = e.what();
      return result;
    }
    throw;  // slot errors are caller bugs
  }

  const fs::path cache_path =
      spec_.cache_dir.empty() ? fs::path{} : fs::path(spec_.cache_dir) / (key + ".json");

  if (!cache_path.empty() && fs::exists(cache_path)) {
    std::ifstream in(cache_path, std::ios::binary);
    json entry = json::parse(in, nullptr, false);
    if (!entry.is_discarded() && entry.is_object() && entry.contains("raw")) {
      result.cache_hit = true;
      result.raw_text = entry["raw"].get<std::string>();
      if (entry.value("parse_ok", false)) {
        result.parsed =
            parse_for_mode(request.mode, result.raw_text, request.sample_id);
        result.status = QueryStatus::Ok;
      } else {
        result.status = QueryStatus::MalformedAfterRetries;
        result.error = entry.value("error", "cached malformed response");
      }
      return result;
    }
  }

  const int attempts_allowed = 1 + spec_.max_retries;
  std::string parse_error;
  bool parsed_ok = false;
  for (int attempt = 0; attempt < attempts_allowed; ++attempt) {
    try {
      requests_issued_.fetch_add(1);
      result.raw_text = spec_.kind == BackendKind::Mock
                            ? mock_lookup(request)
                            : transport_send(rendered, request.image_ref);
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::BackendFailure:
          result.status = QueryStatus::MissingFixture;
          break;
        case ErrorCode::AuthMissing:
          result.status = QueryStatus::AuthMissing;
          break;
        case ErrorCode::UnreadableImage:
          result.status = QueryStatus::MissingImage;
          break;
        default:
          result.status = QueryStatus::Transport;
          break;
      }
      result.error = e.what();
      result.retry_count = attempt;
      return result;  // transport-level failures are not retried
    }
    try {
      result.parsed =
          parse_for_mode(request.mode, result.raw_text, request.sample_id);
      result.status = QueryStatus::Ok;
      result.retry_count = attempt;
      parsed_ok = true;
      break;
    } catch (const Error& e) {
      parse_error = e.what();
      result.retry_count = attempt;
    }
  }
  if (!parsed_ok) {
    result.status = QueryStatus::MalformedAfterRetries;
    result.error = parse_error;
    result.retry_count = attempts_allowed - 1;
  }

  if (!cache_path.empty()) {
    json entry = {
        {"key", key},
        {"sample_id", request.sample_id},
        {"mode", std::string(prompt_mode_name(request.mode))},
        {"parse_ok", parsed_ok},
        {"raw", result.raw_text},
    };
    if (!parsed_ok) entry["error"] = result.error;
    // Single writer per key: write to a temp file, then rename atomically.
    const fs::path tmp = cache_path.string() + ".tmp." +
                         std::to_string(reinterpret_cast<uintptr_t>(&entry));
    std::ofstream out(tmp, std::ios::binary);
    out << entry.dump();
    out.close();
    std::error_code ec;
    fs::rename(tmp, cache_path, ec);
    if (ec) fs::remove(tmp, ec);
  }
  return result;
}

}  // namespace claimdiff::judge
