#include "sheafcheck/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "sheafcheck/error.hpp"

namespace sheafcheck::oracle {

namespace detail {
std::string_view embedded_initialization_prompt();
}

void ClaimText::validate() const {
  if (text.empty()) throw InputError("claim '" + id + "' has empty text");
  if (text.find_first_of("[]") != std::string::npos)
    throw InputError("claim '" + id + "' contains a square bracket, which delimits claims in the query");
}

std::string_view initialization_prompt() { return detail::embedded_initialization_prompt(); }

std::string user_message(const ClaimText& a, const ClaimText& b) {
  a.validate();
  b.validate();
  return "evalConsistency: [" + a.text + "] [" + b.text + "]";
}

std::vector<ChatMessage> build_prompt(const ClaimText& a, const ClaimText& b) {
  return {{"system", std::string(initialization_prompt())}, {"user", user_message(a, b)}};
}

// Rating extraction ----------------------------------------------------------------

namespace {

bool is_trailing_noise(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || std::string_view(".!?,;:*_\"'`)]}>").find(c) !=
                                                            std::string_view::npos;
}

std::string_view rstrip_noise(std::string_view s) {
  while (!s.empty() && is_trailing_noise(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view rstrip_space(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool ends_with_ci(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  auto tail = s.substr(s.size() - suffix.size());
  return std::equal(tail.begin(), tail.end(), suffix.begin(), [](char x, char y) {
    return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
  });
}

// Integer that ends exactly at the end of `s`, rejecting decimals and signs.
std::optional<long> trailing_integer(std::string_view s) {
  std::size_t end = s.size();
  std::size_t start = end;
  while (start > 0 && std::isdigit(static_cast<unsigned char>(s[start - 1]))) --start;
  if (start == end || end - start > 6) return std::nullopt;
  if (start > 0) {
    const char before = s[start - 1];
    if (before == '-' || before == '+') return std::nullopt;
    if ((before == '.' || before == ',') && start > 1 && std::isdigit(static_cast<unsigned char>(s[start - 2])))
      return std::nullopt;
    if (std::isalpha(static_cast<unsigned char>(before))) return std::nullopt;
  }
  return std::stol(std::string(s.substr(start, end - start)));
}

std::optional<int> in_scale(std::optional<long> v) {
  if (!v || *v < 0 || *v > 10) return std::nullopt;
  return static_cast<int>(*v);
}

}  // namespace

std::optional<int> extract_rating(std::string_view reply) {
  auto s = rstrip_noise(reply);
  if (s.empty()) return std::nullopt;

  // "7/10" and "7 out of 10" name the rating before the scale.
  for (std::string_view scale : {"/10", "out of 10"}) {
    if (!ends_with_ci(s, scale)) continue;
    auto head = rstrip_space(s.substr(0, s.size() - scale.size()));
    if (auto v = trailing_integer(head)) return in_scale(v);
  }

  // Final sentence: text after the last terminator that is followed by whitespace.
  std::size_t begin = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const char c = s[i];
    if (c == '\n' || ((c == '.' || c == '!' || c == '?') && std::isspace(static_cast<unsigned char>(s[i + 1]))))
      begin = i + 1;
  }
  const auto sentence = s.substr(begin);

  // Last integer token in that sentence.
  for (std::size_t end = sentence.size(); end > 0; --end) {
    if (!std::isdigit(static_cast<unsigned char>(sentence[end - 1]))) continue;
    if (end < sentence.size()) {
      const char after = sentence[end];
      if ((after == '.' || after == ',') && end + 1 < sentence.size() &&
          std::isdigit(static_cast<unsigned char>(sentence[end + 1])))
        return std::nullopt;  // decimal
      if (std::isalpha(static_cast<unsigned char>(after))) {
        // Part of a word such as "3rd"; skip past it.
        std::size_t start = end;
        while (start > 0 && std::isdigit(static_cast<unsigned char>(sentence[start - 1]))) --start;
        end = start + 1;
        continue;
      }
    }
    return in_scale(trailing_integer(sentence.substr(0, end)));
  }
  return std::nullopt;
}

// Distributions ------------------------------------------------------------------------

RatingDistribution RatingDistribution::from_ratings(const std::vector<std::optional<int>>& ratings) {
  RatingDistribution d;
  for (const auto& r : ratings) {
    if (r && *r >= 0 && *r <= 10) {
      ++d.counts[static_cast<std::size_t>(*r)];
      ++d.n_success;
    } else {
      ++d.n_fail;
    }
  }
  return d;
}

RatingDistribution RatingDistribution::from_counts(const std::array<std::size_t, 11>& counts, std::size_t n_fail) {
  RatingDistribution d;
  d.counts = counts;
  for (auto c : counts) d.n_success += c;
  d.n_fail = n_fail;
  return d;
}

std::optional<Rational> RatingDistribution::exact_mean() const {
  if (n_success == 0) return std::nullopt;
  std::int64_t sum = 0;
  for (std::size_t r = 0; r < counts.size(); ++r) sum += static_cast<std::int64_t>(r * counts[r]);
  return Rational(sum, static_cast<std::int64_t>(n_success));
}

std::optional<double> RatingDistribution::mean() const {
  if (auto m = exact_mean()) return to_double(*m);
  return std::nullopt;
}

std::optional<double> RatingDistribution::stddev() const {
  const auto m = exact_mean();
  if (!m) return std::nullopt;
  // Exact variance: E[r^2] - mean^2.
  std::int64_t sq = 0;
  for (std::size_t r = 0; r < counts.size(); ++r) sq += static_cast<std::int64_t>(r * r * counts[r]);
  const Rational var = Rational(sq, static_cast<std::int64_t>(n_success)) - *m * *m;
  return std::sqrt(to_double(var));
}

std::optional<bool> RatingDistribution::bimodal(const BimodalityRule& rule) const {
  if (n_success < rule.min_samples) return std::nullopt;
  return detect_bimodality(*this, rule);
}

bool detect_bimodality(const RatingDistribution& d, const BimodalityRule& rule) {
  if (d.n_success < rule.min_samples)
    throw InputError("bimodality needs at least " + std::to_string(rule.min_samples) + " successful ratings, got " +
                     std::to_string(d.n_success));
  const auto& c = d.counts;
  const auto n = static_cast<std::int64_t>(d.n_success);
  std::vector<int> modes;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    const bool left_ok = i == 0 || c[i] >= c[i - 1];
    const bool right_ok = i + 1 == c.size() || c[i] >= c[i + 1];
    if (left_ok && right_ok && Rational(static_cast<std::int64_t>(c[i]), n) >= rule.min_mass)
      modes.push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t j = i + 1; j < modes.size(); ++j)
      if (modes[j] - modes[i] >= rule.min_separation) return true;
  return false;
}

// Sampling ---------------------------------------------------------------------------------

void OracleConfig::validate() const {
  if (n_repeats < 1) throw InputError("n_repeats must be at least 1");
  if (!(timeout_seconds > 0)) throw InputError("timeout must be positive");
  if (max_retries < 0) throw InputError("max_retries must be non-negative");
  if (max_in_flight < 1) throw InputError("max_in_flight must be at least 1");
  if (model.empty()) throw InputError("model name must be non-empty");
}

RatingDistribution rate_pair(const OracleConfig& config, ChatTransport& transport, const ClaimText& a,
                             const ClaimText& b, std::vector<RatingSample>* samples) {
  config.validate();
  const auto messages = build_prompt(a, b);
  const std::size_t n = config.n_repeats;

  std::vector<RatingSample> results(n);
  std::vector<char> issued(n, 0);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> transport_failures{0};
  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto work = [&] {
    for (;;) {
      if (abort.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      ChatRequest req{config.model, messages, config.temperature, config.seed, i};
      RatingSample& out = results[i];
      const auto t0 = std::chrono::steady_clock::now();
      bool done = false;
      for (int attempt = 0; attempt <= config.max_retries && !done; ++attempt) {
        try {
          out.reply = transport.complete(req);
          out.rating = extract_rating(out.reply);
          done = true;
        } catch (const TransportFailure& e) {
          out.reply = e.what();
        }
      }
      out.transport_failed = !done;
      out.latency_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      issued[i] = 1;  // each index is written by exactly one worker
      if (!done && transport_failures.fetch_add(1) + 1 > config.max_transport_failures) abort = true;
    }
  };
  // Anything other than a transport failure (a missing fixture, say) stops
  // every worker and is rethrown on the calling thread.
  auto worker = [&] {
    try {
      work();
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
      abort = true;
    }
  };

  const std::size_t workers = std::min(config.max_in_flight, n);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<std::optional<int>> ratings;
  for (std::size_t i = 0; i < n; ++i)
    if (issued[i]) ratings.push_back(results[i].transport_failed ? std::nullopt : results[i].rating);
  auto dist = RatingDistribution::from_ratings(ratings);
  if (samples) {
    samples->clear();
    for (std::size_t i = 0; i < n; ++i)
      if (issued[i]) samples->push_back(results[i]);
  }
  if (abort.load())
    throw TransportError("endpoint failed " + std::to_string(transport_failures.load()) +
                             " calls after retries; aborting this pair",
                         dist);
  return dist;
}

// Triage ------------------------------------------------------------------------------------

std::string_view to_string(TriageDecision d) {
  switch (d) {
    case TriageDecision::Accept: return "accept";
    case TriageDecision::Reprompt: return "reprompt";
    case TriageDecision::Escalate: return "escalate";
  }
  return "?";
}

TriageDecision triage(const RatingDistribution& d, const TriagePolicy& policy, int reprompts_done,
                      std::vector<TriageRecord>* log) {
  std::string reason;
  const auto bimodal = d.bimodal(policy.rule);
  const auto sd = d.stddev();
  if (d.n_success == 0)
    reason = "no ratings extracted";
  else if (bimodal.value_or(false))
    reason = "bimodal";
  else if (*sd > policy.max_stddev)
    reason = "standard deviation above threshold";

  TriageDecision decision = TriageDecision::Accept;
  if (!reason.empty()) decision = reprompts_done < policy.max_reprompts ? TriageDecision::Reprompt : TriageDecision::Escalate;
  if (reason.empty()) reason = "unimodal, low variance";
  if (log) log->push_back({reprompts_done, {}, decision, reason});
  return decision;
}

TriagedRating rate_with_triage(const OracleConfig& config, ChatTransport& transport, const TriagePolicy& policy,
                               const ClaimText& a, const ClaimText& b) {
  TriagedRating out;
  OracleConfig cfg = config;
  for (int round = 0;; ++round) {
    out.distribution = rate_pair(cfg, transport, a, b);
    const bool escalated = cfg.model == policy.stronger_model && round > policy.max_reprompts;
    const auto decision = triage(out.distribution, policy, std::min(round, policy.max_reprompts), &out.log);
    out.log.back().round = round;
    out.log.back().model = cfg.model;
    if (decision == TriageDecision::Accept) return out;
    if (escalated) {
      out.ambiguous = true;
      return out;
    }
    if (decision == TriageDecision::Escalate) cfg.model = policy.stronger_model;
    cfg.seed = config.seed + static_cast<std::uint64_t>(round) + 1;
  }
}

}  // namespace sheafcheck::oracle
