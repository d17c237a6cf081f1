// Copyright 2026 The lqmeter Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LQMETER_SERVICE_HPP
#define LQMETER_SERVICE_HPP

#include <algorithm>
#include <exception>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include <lqmeter/error.hpp>
#include <lqmeter/formats.hpp>
#include <lqmeter/matrix.hpp>
#include <lqmeter/measure.hpp>
#include <lqmeter/optimize.hpp>
#include <lqmeter/policy.hpp>
#include <lqmeter/taxonomy.hpp>

/**
 * \file
 * \brief Read-only HTTP front end.
 *
 *   GET  /healthz              -> {"status":"ok"}
 *   GET  /taxonomy             -> taxonomy document
 *   GET  /languages?q=<prefix> -> [{name, path}]
 *   POST /lq       {portfolio, policy?}                -> {score, policy, breakdown:[{node, depth, lambda}]}
 *   POST /whatif   {portfolio, add:{language, proficiency}, policy?} -> {base, new, gain}
 *   POST /suggest  {portfolio, top_k, policy?}         -> [{language, gain}]
 *   POST /matrix   {rho, r?}                           -> {score}
 *   POST /optimize {problem, policy?}                  -> {bundle, total_cost, per_member_cost, method}
 *
 * Malformed bodies answer 400, failed validation 422; errors carry
 * {"error": {"code", "message", "name"}}. The service holds no per-request state.
 */

namespace lqmeter {

struct ApiConfig {
  std::string host{"0.0.0.0"};
  int listen_port{8080};
  std::string taxonomy_path;
  std::string default_policy{"sqrt"};
  /// Origins granted CORS access; "*" admits any.
  std::vector<std::string> allowed_origins;
};

struct ApiResponse {
  int status{200};
  nlohmann::json body;
};

class LqService {
 public:
  LqService(TaxonomyTree tree, ExponentPolicy default_policy, std::vector<std::string> allowed_origins = {})
      : tree_(std::move(tree)),
        default_policy_(std::move(default_policy)),
        allowed_origins_(std::move(allowed_origins)) {
    detail::validate_policy(tree_, default_policy_);
  }

  [[nodiscard]] const TaxonomyTree& tree() const noexcept { return tree_; }

  /// Routes one request. Never throws; failures become 4xx responses.
  [[nodiscard]] ApiResponse dispatch(const std::string& method, const std::string& path,
                                     const std::multimap<std::string, std::string>& params,
                                     const std::string& body) const {
    try {
      if (method == "GET") {
        if (path == "/healthz") {
          return {200, {{"status", "ok"}}};
        }
        if (path == "/taxonomy") {
          return {200, tree_.to_json()};
        }
        if (path == "/languages") {
          const auto q = params.find("q");
          return {200, languages(q == params.end() ? std::string{} : q->second)};
        }
      } else if (method == "POST") {
        static const std::map<std::string, nlohmann::json (LqService::*)(const nlohmann::json&) const> routes{
            {"/lq", &LqService::post_lq},           {"/whatif", &LqService::post_whatif},
            {"/suggest", &LqService::post_suggest}, {"/matrix", &LqService::post_matrix},
            {"/optimize", &LqService::post_optimize},
        };
        if (auto route = routes.find(path); route != routes.end()) {
          const auto request = parse_json_text(body, "request body");
          if (!request.is_object()) {
            throw Error(ErrorCode::parse_error, "request body must be a JSON object");
          }
          return {200, (this->*route->second)(request)};
        }
      }
      return error_response(404, "not_found", "no route for " + method + " " + path, {});
    } catch (const Error& e) {
      const int status = e.code() == ErrorCode::parse_error ? 400 : 422;
      return error_response(status, std::string(to_string(e.code())), e.what(), e.subject());
    } catch (const nlohmann::json::exception& e) {
      return error_response(400, "parse_error", e.what(), {});
    } catch (const std::exception& e) {
      return error_response(422, "computation_error", e.what(), {});
    }
  }

  /// Registers every route (plus CORS handling) on `server`.
  void mount(httplib::Server& server) const {
    const auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
      const auto out = dispatch(req.method, req.path, params, req.body);
      res.status = out.status;
      res.set_content(out.body.dump(), "application/json");
    };
    for (const char* path : {"/healthz", "/taxonomy", "/languages"}) {
      server.Get(path, forward);
    }
    for (const char* path : {"/lq", "/whatif", "/suggest", "/matrix", "/optimize"}) {
      server.Post(path, forward);
    }
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      const auto origin = req.get_header_value("Origin");
      if (!origin.empty() && origin_allowed(origin)) {
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Vary", "Origin");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
      }
    });
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (res.body.empty()) {
        res.set_content(
            nlohmann::json{{"error", {{"code", "not_found"}, {"message", "no route for " + req.method + " " + req.path}}}}
                .dump(),
            "application/json");
      }
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "unexpected failure";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      res.status = 422;
      res.set_content(nlohmann::json{{"error", {{"code", "computation_error"}, {"message", message}}}}.dump(),
                      "application/json");
    });
  }

  [[nodiscard]] bool origin_allowed(const std::string& origin) const {
    return std::any_of(allowed_origins_.begin(), allowed_origins_.end(),
                       [&](const std::string& o) { return o == "*" || o == origin; });
  }

 private:
  static ApiResponse error_response(int status, const std::string& code, const std::string& message,
                                    const std::string& name) {
    nlohmann::json err{{"code", code}, {"message", message}};
    if (!name.empty()) {
      err["name"] = name;
    }
    return {status, {{"error", std::move(err)}}};
  }

  [[nodiscard]] ExponentPolicy policy_of(const nlohmann::json& request) const {
    const auto p = request.find("policy");
    if (p == request.end() || p->is_null()) {
      return default_policy_;
    }
    if (!p->is_string()) {
      throw Error(ErrorCode::parse_error, "\"policy\" must be a string");
    }
    return ExponentPolicy::parse(p->get<std::string>());
  }

  static const nlohmann::json& member(const nlohmann::json& request, const char* key) {
    const auto it = request.find(key);
    if (it == request.end()) {
      throw Error(ErrorCode::parse_error, std::string("request is missing \"") + key + "\"");
    }
    return *it;
  }

  [[nodiscard]] nlohmann::json languages(const std::string& prefix) const {
    auto out = nlohmann::json::array();
    for (const auto& entry : list_languages(tree_, prefix)) {
      out.push_back({{"name", entry.name}, {"path", entry.path}});
    }
    return out;
  }

  [[nodiscard]] nlohmann::json post_lq(const nlohmann::json& request) const {
    const auto portfolio = portfolio_from_json(member(request, "portfolio"));
    return breakdown_to_json(tree_, lq(tree_, portfolio, policy_of(request)));
  }

  [[nodiscard]] nlohmann::json post_whatif(const nlohmann::json& request) const {
    const auto portfolio = portfolio_from_json(member(request, "portfolio"));
    const auto& add = member(request, "add");
    if (!add.is_object() || !add.contains("language") || !add["language"].is_string()) {
      throw Error(ErrorCode::parse_error, "\"add\" must be {\"language\": <name>, \"proficiency\": <number>}");
    }
    const double proficiency = add.value("proficiency", 1.0);
    const auto w = what_if(tree_, portfolio, add["language"].get<std::string>(), proficiency, policy_of(request));
    return {{"base", round4(w.base)}, {"new", round4(w.updated)}, {"gain", round4(w.gain)}};
  }

  [[nodiscard]] nlohmann::json post_suggest(const nlohmann::json& request) const {
    const auto portfolio = portfolio_from_json(member(request, "portfolio"));
    const auto top = request.value("top_k", 5LL);
    if (top < 1) {
      throw Error(ErrorCode::invalid_argument, "top_k must be at least 1");
    }
    auto out = nlohmann::json::array();
    for (const auto& s : suggest_next(tree_, portfolio, static_cast<std::size_t>(top), policy_of(request))) {
      out.push_back({{"language", s.language}, {"gain", round4(s.gain)}});
    }
    return out;
  }

  [[nodiscard]] nlohmann::json post_matrix(const nlohmann::json& request) const {
    const auto& rho = member(request, "rho");
    if (!rho.is_number()) {
      throw Error(ErrorCode::parse_error, "\"rho\" must be a number");
    }
    const double r = request.value("r", 1.0);
    return {{"score", round4(matrix_lq({rho.get<double>(), r}))}};
  }

  [[nodiscard]] nlohmann::json post_optimize(const nlohmann::json& request) const {
    const auto problem = problem_from_json(member(request, "problem"), policy_of(request));
    return solution_to_json(optimize_bundle(tree_, problem));
  }

  TaxonomyTree tree_;
  ExponentPolicy default_policy_;
  std::vector<std::string> allowed_origins_;
};

/// Loads the taxonomy, binds the port and serves until `server.stop()`.
/**
 * `on_ready` runs after the socket is bound and before the accept loop,
 * receiving the server and the bound port. Throws Error when the taxonomy
 * is invalid or the port cannot be bound.
 */
inline void serve(const ApiConfig& config,
                  const std::function<void(httplib::Server&, int)>& on_ready = {}) {
  const LqService service(load_taxonomy_file(config.taxonomy_path), ExponentPolicy::parse(config.default_policy),
                          config.allowed_origins);
  httplib::Server server;
  service.mount(server);

  int port = config.listen_port;
  if (port == 0) {
    port = server.bind_to_any_port(config.host);
    if (port < 0) {
      throw Error(ErrorCode::invalid_argument, "cannot bind " + config.host);
    }
  } else if (!server.bind_to_port(config.host, port)) {
    throw Error(ErrorCode::invalid_argument,
                "cannot bind " + config.host + ":" + std::to_string(port) + " (port in use?)");
  }
  if (on_ready) {
    on_ready(server, port);
  }
  server.listen_after_bind();
}

}  // namespace lqmeter

#endif  // LQMETER_SERVICE_HPP
