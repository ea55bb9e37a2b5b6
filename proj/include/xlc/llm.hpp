#pragma once

#include "xlc/corpus.hpp"
#include "xlc/sanitize.hpp"

#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xlc::llm {

struct CompletionRequest {
    std::string model = "gpt-4";
    std::string prompt;
    double temperature = 0.0;
    std::size_t max_output_tokens = 1024;

    /// Throws PreconditionError when temperature < 0, prompt is empty or max_output_tokens is 0.
    void validate() const;
};

enum class ProviderKind { remote_http, replay_fixture, rule_stub };

std::string_view to_string(ProviderKind kind) noexcept;
std::optional<ProviderKind> parse_provider_kind(std::string_view text) noexcept;

/// Token counts as reported by a remote provider.
struct Usage {
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
};

struct Completion {
    std::string text;
    std::optional<Usage> usage;
};

/// chars/4, rounded up.
std::size_t estimate_tokens(std::string_view text) noexcept;

/// A chat-completion backend. Implementations are safe for concurrent `send` calls.
class Provider {
  public:
    virtual ~Provider() = default;
    virtual ProviderKind kind() const noexcept = 0;
    /// Performs the request; does not apply the token budget (see `complete`).
    virtual Completion send(const CompletionRequest& request) = 0;

    /// Estimated prompt tokens plus max_output_tokens must fit this budget.
    std::size_t context_window() const noexcept { return context_window_; }
    void set_context_window(std::size_t tokens) noexcept { context_window_ = tokens; }

  private:
    std::size_t context_window_ = 32768;
};

/// Validates `request`, enforces the provider's token budget, then sends it.
std::string complete(Provider& provider, const CompletionRequest& request);

/// As `complete`, keeping the provider-reported usage.
Completion complete_with_usage(Provider& provider, const CompletionRequest& request);

// ---------------------------------------------------------------------------

/// Deterministic responder driven only by prompt content:
///  - root-cause prompts: answers "Yes" naming every upstream in the
///    upstream-dependency section whose description carries a `faulty: <name>`
///    marker, otherwise "No";
///  - monitor prompts: picks the menu class with the most vocabulary hits in
///    the monitor data sections;
///  - summarization prompts: first two sentences of each input, third person.
class RuleStubProvider final : public Provider {
  public:
    ProviderKind kind() const noexcept override { return ProviderKind::rule_stub; }
    Completion send(const CompletionRequest& request) override;

    static std::string respond(std::string_view prompt);
};

/// Returns recorded responses from `<dir>/<prompt_hash>.txt`.
class ReplayProvider final : public Provider {
  public:
    explicit ReplayProvider(std::filesystem::path fixture_dir);
    ProviderKind kind() const noexcept override { return ProviderKind::replay_fixture; }
    /// Throws FixtureMiss when no fixture exists for the prompt.
    Completion send(const CompletionRequest& request) override;

  private:
    std::filesystem::path dir_;
};

struct RetryPolicy {
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;
    int max_attempts = 5;
    /// Injected for tests; defaults to std::this_thread::sleep_for.
    std::function<void(std::chrono::milliseconds)> sleep;

    std::chrono::milliseconds delay_before(int attempt) const;  // attempt >= 2
};

struct RemoteConfig {
    std::string endpoint;  ///< full chat-completions URL
    std::string api_key;
    RetryPolicy retry;
    std::chrono::seconds timeout{120};

    /// Reads XLC_LLM_ENDPOINT and XLC_LLM_KEY.
    static RemoteConfig from_environment();
};

/// OpenAI-compatible chat-completions client. Retries transport failures,
/// 408, 429 and 5xx with exponential backoff; other statuses fail at once.
class RemoteHttpProvider final : public Provider {
  public:
    explicit RemoteHttpProvider(RemoteConfig config);
    ProviderKind kind() const noexcept override { return ProviderKind::remote_http; }
    Completion send(const CompletionRequest& request) override;

  private:
    RemoteConfig config_;
};

/// Wraps another provider and writes every response as a replay fixture
/// (`<hash>.txt`, plus `<hash>.usage.json` when usage is reported).
class RecordingProvider final : public Provider {
  public:
    RecordingProvider(std::unique_ptr<Provider> inner, std::filesystem::path fixture_dir);
    ProviderKind kind() const noexcept override { return inner_->kind(); }
    Completion send(const CompletionRequest& request) override;

  private:
    std::unique_ptr<Provider> inner_;
    std::filesystem::path dir_;
};

/// Reads `<dir>/<hash>.usage.json` if present.
std::optional<Usage> read_recorded_usage(const std::filesystem::path& fixture_dir, std::string_view hash);

/// Provider plus a bound on in-flight requests. Results are matched to
/// requests by index, whatever order calls complete in.
class Gateway {
  public:
    explicit Gateway(Provider& provider, std::size_t max_in_flight = 4);

    Provider& provider() const noexcept { return provider_; }
    std::size_t max_in_flight() const noexcept { return max_in_flight_; }

    struct Outcome {
        std::string text;
        std::exception_ptr error;
        std::chrono::milliseconds elapsed{0};
        bool ok() const noexcept { return !error; }
    };

    std::vector<Outcome> complete_all(std::span<const CompletionRequest> requests) const;

    /// Runs task(i) for i in [0, n) on at most max_in_flight threads.
    void run_bounded(std::size_t n, const std::function<void(std::size_t)>& task) const;

  private:
    Provider& provider_;
    std::size_t max_in_flight_;
};

// ---------------------------------------------------------------------------
// Summarization

struct SummaryBundle {
    std::string summary;
    std::vector<std::string> source_ids;
    std::uint64_t prompt_hash = 0;
};

struct SummarizeOptions {
    std::string model = "gpt-3.5-turbo";
    std::size_t max_output_tokens = 256;
};

/// Service-description summarization prompt: role line, one
/// "Upstream service i - <description>" line per service, focus bullets,
/// length and person constraint.
std::string render_service_summary_prompt(std::span<const Service> services);

/// Throws PreconditionError for an empty list or a service without description.
SummaryBundle summarize_service_descriptions(Provider& provider, std::span<const Service> services,
                                             const SummarizeOptions& options = {});

enum class IncidentField { summary, root_cause };

std::string render_incident_summary_prompt(IncidentField field, std::string_view cleaned_text);

struct IncidentSummaries {
    std::string clean_summary;
    std::optional<std::string> clean_root_cause;
};

/// Summarizes the (sanitized) raw summary and, when present, the ground-truth
/// root cause. Input text is passed through sanitize::clean_text first.
IncidentSummaries summarize_incident_fields(Provider& provider, const Incident& incident,
                                            const SummarizeOptions& options = {},
                                            const sanitize::CleanOptions& clean = {});

}  // namespace xlc::llm
