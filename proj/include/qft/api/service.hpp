#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qft/pipeline.hpp"

namespace qft::api {

using nlohmann::json;

/// Error carrying the HTTP status it should map to.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

/// One design session. The workbench is built once and never mutated;
/// only the controller and revision change, under the session mutex.
struct Session {
  std::string id;
  pipeline::Workbench workbench;
  std::optional<shaping::ControllerDesign> design;
  std::uint64_t revision = 0;
  mutable std::mutex mutex;
};

/// Transport-independent request handlers. Every method is safe to call
/// concurrently; requests on different sessions never contend.
class Service {
 public:
  /// Body is a run configuration document. File references are not
  /// accepted over the wire; the plant and controller must be inline.
  json create_session(const json& body);

  json templates(const std::string& id) const;
  json bounds(const std::string& id) const;

  /// Body is a controller document. An optional integer "base_revision"
  /// turns the request into a compare-and-set (409 on mismatch).
  json evaluate_controller(const std::string& id, const json& body);

  /// Body: {"scenario": road profile, "dt", "horizon", "stride"}; all optional.
  json simulate(const std::string& id, const json& body) const;

  json report(const std::string& id) const;

  std::size_t session_count() const;

  /// Session export: config, current design and revision per session.
  json export_sessions() const;
  void import_sessions(const json& doc);
  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);

 private:
  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<Session> add(pipeline::Workbench wb, std::optional<shaping::ControllerDesign> design, std::uint64_t revision,
                               std::optional<std::string> id);

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// Nominal loop G(jw) P0(jw) in Nichols coordinates on a log grid.
json loop_samples(const lti::TransferFunctiond& controller, const suspension::PlantInstance& nominal, double w_lo, double w_hi,
                  int points);

}  // namespace qft::api
