#include <gtest/gtest.h>

#include <thread>

#include "qft/api/http.hpp"
#include "qft/api/service.hpp"
#include "qft/io/config.hpp"

// After Eigen: resolv.h, pulled in by httplib, defines _res as a macro.
#include <httplib.h>

using namespace qft;
using namespace qft::api;

namespace {

json small_config(int levels = 2) {
  return {{"levels", levels}, {"phase_step_deg", 10}};
}

json baseline_controller_json() { return io::controller_to_json(shaping::baseline_controller()); }

int status_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ApiError& e) {
    return e.status();
  }
  return 200;
}

}  // namespace

TEST(Service, SessionCoversDefaultGrid) {
  Service svc;
  const auto s = svc.create_session(small_config());
  const auto id = s.at("session_id").get<std::string>();
  EXPECT_EQ(s.at("frequencies").size(), 10u);
  EXPECT_EQ(s.at("plants").get<int>(), 33);
  EXPECT_EQ(s.at("revision").get<int>(), 0);
  const auto b = svc.bounds(id);
  EXPECT_EQ(b.at("bounds").size(), 10u);
  EXPECT_EQ(b.at("bounds")[0].at("combined").at("phases").size(), 37u);
  EXPECT_EQ(svc.templates(id).at("templates").size(), 10u);
}

TEST(Service, SingleLevelTemplatesArePoints) {
  Service svc;
  const auto id = svc.create_session(small_config(1)).at("session_id").get<std::string>();
  for (const auto& t : svc.templates(id).at("templates")) EXPECT_EQ(t.at("points").size(), 1u);
}

TEST(Service, InvalidConfigRejected) {
  Service svc;
  EXPECT_EQ(status_of([&] { svc.create_session(json{{"levels", 0}}); }), 400);
  EXPECT_EQ(status_of([&] { svc.create_session(json::array()); }), 400);
  EXPECT_EQ(status_of([&] { svc.create_session(json{{"plant_file", "/etc/passwd"}}); }), 400);
  EXPECT_EQ(status_of([&] { svc.templates("nope"); }), 404);
}

TEST(Service, ControllerEvaluationAndRevisions) {
  Service svc;
  const auto id = svc.create_session(small_config()).at("session_id").get<std::string>();
  const auto r1 = svc.evaluate_controller(id, baseline_controller_json());
  const auto r2 = svc.evaluate_controller(id, baseline_controller_json());
  EXPECT_EQ(r1.at("revision").get<int>(), 1);
  EXPECT_EQ(r2.at("revision").get<int>(), 2);
  EXPECT_TRUE(r1.at("report").at("nominal_stable").get<bool>());
  EXPECT_EQ(r1.at("report"), r2.at("report"));
  EXPECT_EQ(r1.at("loop").size(), 500u);
  for (const auto& p : r1.at("loop")) {
    EXPECT_LE(p.at("phase_deg").get<double>(), 0.0);
    EXPECT_GE(p.at("phase_deg").get<double>(), -360.0);
  }
  // Stale compare-and-set.
  json stale = {{"elements", baseline_controller_json()}, {"base_revision", 1}};
  EXPECT_EQ(status_of([&] { svc.evaluate_controller(id, stale); }), 409);
  stale["base_revision"] = 2;
  EXPECT_EQ(svc.evaluate_controller(id, stale).at("revision").get<int>(), 3);
}

TEST(Service, ZeroGainFailsDisturbance) {
  Service svc;
  const auto id = svc.create_session(small_config()).at("session_id").get<std::string>();
  const auto r = svc.evaluate_controller(id, json::parse(R"([{"kind":"gain","params":{"k":0}}])"));
  EXPECT_FALSE(r.at("report").at("frequencies")[0].at("disturbance_ok").get<bool>());
}

TEST(Service, ImproperControllerNamesRelativeDegree) {
  Service svc;
  const auto id = svc.create_session(small_config()).at("session_id").get<std::string>();
  try {
    svc.evaluate_controller(id, json::parse(R"([{"kind":"real_zero","params":{"a":1}}])"));
    FAIL();
  } catch (const ApiError& e) {
    EXPECT_EQ(e.status(), 400);
    EXPECT_NE(std::string(e.what()).find("relative degree -1"), std::string::npos);
  }
}

TEST(Service, SimulateNeedsController) {
  Service svc;
  const auto id = svc.create_session(small_config()).at("session_id").get<std::string>();
  EXPECT_EQ(status_of([&] { svc.simulate(id, json::object()); }), 409);
  svc.evaluate_controller(id, baseline_controller_json());
  const auto r = svc.simulate(id, json{{"stride", 10}});
  EXPECT_EQ(r.at("closed_loop").at("t").size(), 1001u);
  EXPECT_EQ(r.at("scenario").at("kind"), "two_bumps");
  EXPECT_EQ(status_of([&] { svc.simulate(id, json{{"horizon", 2.0}}); }), 400);
  const auto imp = svc.simulate(id, json{{"scenario", {{"kind", "impulse"}}}, {"horizon", 2.0}});
  EXPECT_EQ(imp.at("open_loop").at("t").size(), 2001u);
  EXPECT_EQ(status_of([&] { svc.simulate(id, json{{"dt", -1.0}}); }), 400);
  svc.evaluate_controller(id, json::parse(R"([{"kind":"gain","params":{"k":-1000}}])"));
  EXPECT_EQ(status_of([&] { svc.simulate(id, json::object()); }), 422);
}

TEST(Service, ConcurrentSessionsAndEdits) {
  Service svc;
  std::vector<std::string> ids;
  for (int i = 0; i < 3; ++i) ids.push_back(svc.create_session(small_config(1)).at("session_id").get<std::string>());
  std::vector<std::thread> threads;
  for (int t = 0; t < 6; ++t) {
    threads.emplace_back([&, t] {
      for (int k = 0; k < 4; ++k) svc.evaluate_controller(ids[t % 3], baseline_controller_json());
    });
  }
  for (auto& th : threads) th.join();
  for (const auto& id : ids) EXPECT_EQ(svc.report(id).at("revision").get<int>(), 8);
}

TEST(Service, ExportAndImport) {
  Service a;
  const auto id = a.create_session(small_config(1)).at("session_id").get<std::string>();
  a.evaluate_controller(id, baseline_controller_json());
  const auto path = std::filesystem::temp_directory_path() / "qft_sessions.json";
  a.save(path);
  Service b;
  b.load(path);
  EXPECT_EQ(b.session_count(), 1u);
  const auto rep = b.report(id);
  EXPECT_EQ(rep.at("revision").get<int>(), 1);
  EXPECT_EQ(rep.at("loop_report"), a.report(id).at("loop_report"));
  std::filesystem::remove(path);
}

TEST(Http, RoundTripOnLoopback) {
  Service svc;
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  httplib::Client cli("127.0.0.1", port);

  auto res = cli.Post("/sessions", small_config().dump(), "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  const auto id = json::parse(res->body).at("session_id").get<std::string>();

  res = cli.Get("/sessions/" + id + "/bounds");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body).at("bounds").size(), 10u);

  res = cli.Get("/sessions/" + id + "/templates");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);

  res = cli.Put("/sessions/" + id + "/controller", baseline_controller_json().dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body).at("revision").get<int>(), 1);

  res = cli.Post("/sessions/" + id + "/simulate", R"({"stride": 100})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);

  res = cli.Get("/sessions/" + id + "/report");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_TRUE(json::parse(res->body).at("loop_report").at("nominal_stable").get<bool>());

  res = cli.Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_NE(json::parse(res->body).at("error").get<std::string>().find("malformed JSON"), std::string::npos);

  res = cli.Get("/sessions/missing/report");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);

  server.stop();
  th.join();
}
