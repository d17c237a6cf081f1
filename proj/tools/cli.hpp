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

#ifndef LQMETER_TOOLS_CLI_HPP
#define LQMETER_TOOLS_CLI_HPP

#include <atomic>
#include <csignal>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>
#include <time.h>

#include "CLI11.hpp"

#include <lqmeter/axioms.hpp>
#include <lqmeter/formats.hpp>
#include <lqmeter/matrix.hpp>
#include <lqmeter/measure.hpp>
#include <lqmeter/optimize.hpp>
#include <lqmeter/service.hpp>
#include <lqmeter/taxonomy.hpp>

namespace lqmeter::cli {

/// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kInvalidInput = 1;
inline constexpr int kAxiomViolated = 2;

namespace detail {

inline std::string fixed4(double x) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << round4(x);
  return out.str();
}

inline void print_breakdown(std::ostream& out, const TaxonomyTree& tree, const LqBreakdown& b) {
  out << std::left << std::setw(36) << "node" << std::right << std::setw(6) << "depth" << std::setw(10) << "lambda"
      << '\n';
  for (const auto& row : breakdown_rows(tree, b)) {
    out << std::left << std::setw(36) << (std::string(2 * row.depth, ' ') + row.node) << std::right << std::setw(6)
        << row.depth << std::setw(10) << fixed4(row.lambda) << '\n';
  }
}

/// Blocks SIGINT/SIGTERM in this thread (and the server's future workers) and stops
/// `server` once either arrives.
class SignalStopper {
 public:
  SignalStopper() {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, &previous_);
  }

  void watch(httplib::Server& server) {
    waiter_ = std::thread([this, &server] {
      const timespec tick{0, 200'000'000};
      while (!done_) {
        if (sigtimedwait(&set_, nullptr, &tick) > 0) {
          server.stop();
          return;
        }
      }
    });
  }

  ~SignalStopper() {
    done_ = true;
    if (waiter_.joinable()) {
      waiter_.join();
    }
    pthread_sigmask(SIG_SETMASK, &previous_, nullptr);
  }

  SignalStopper(const SignalStopper&) = delete;
  SignalStopper& operator=(const SignalStopper&) = delete;

 private:
  sigset_t set_{};
  sigset_t previous_{};
  std::atomic<bool> done_{false};
  std::thread waiter_;
};

}  // namespace detail

/// Entry point shared by the `lqmeter` binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Effective number of languages (LQ) of a language portfolio"};
  app.require_subcommand(1);

  std::string taxonomy_path;
  std::string portfolio_path;
  std::string problem_path;
  std::string policy_name = "sqrt";
  std::string objective = "marginal";
  std::string query;
  std::string host = "0.0.0.0";
  std::vector<std::string> origins;
  bool show_breakdown = false;
  bool recursive = false;
  std::size_t trials = 1000;
  std::uint64_t seed = 42;
  std::size_t top = 5;
  double rho = 0.0;
  double r = 1.0;
  int port = 8080;

  const auto add_policy = [&](CLI::App* cmd) {
    cmd->add_option("--policy", policy_name, "Exponent policy: sqrt, identity or pow:<a>")->capture_default_str();
  };

  auto* compute = app.add_subcommand("compute", "Score a portfolio");
  compute->add_option("--taxonomy", taxonomy_path, "Taxonomy file")->required();
  compute->add_option("--portfolio", portfolio_path, "Portfolio file")->required();
  add_policy(compute);
  compute->add_flag("--breakdown", show_breakdown, "Print the value of every node");
  compute->add_flag("--recursive", recursive, "Use the recursive evaluator");

  auto* axioms = app.add_subcommand("check-axioms", "Randomized coherence-axiom check");
  axioms->add_option("--taxonomy", taxonomy_path, "Taxonomy file")->required();
  axioms->add_option("--trials", trials, "Samples per axiom")->capture_default_str()->check(CLI::PositiveNumber);
  axioms->add_option("--seed", seed, "Random seed")->capture_default_str();
  add_policy(axioms);

  auto* suggest = app.add_subcommand("suggest", "Rank languages by marginal gain");
  suggest->add_option("--taxonomy", taxonomy_path, "Taxonomy file")->required();
  suggest->add_option("--portfolio", portfolio_path, "Portfolio file")->required();
  suggest->add_option("--top", top, "Number of suggestions")->capture_default_str()->check(CLI::PositiveNumber);
  add_policy(suggest);

  auto* matrix = app.add_subcommand("matrix", "Two-language correlation measure 2 - rho^r");
  matrix->add_option("--rho", rho, "Correlation in [0, 1]")->required();
  matrix->add_option("--r", r, "Family exponent r > 0")->capture_default_str();

  auto* optimize = app.add_subcommand("optimize", "Choose a working-language bundle");
  optimize->add_option("--taxonomy", taxonomy_path, "Taxonomy file")->required();
  optimize->add_option("--problem", problem_path, "Problem file")->required();
  optimize->add_option("--objective", objective, "marginal or aggregate")
      ->capture_default_str()
      ->check(CLI::IsMember({"marginal", "aggregate"}));
  add_policy(optimize);

  auto* languages = app.add_subcommand("languages", "List the languages of a taxonomy");
  languages->add_option("--taxonomy", taxonomy_path, "Taxonomy file")->required();
  languages->add_option("--query", query, "Case-insensitive name prefix");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--taxonomy", taxonomy_path, "Taxonomy file")->required();
  serve_cmd->add_option("--port", port, "TCP port (0 picks a free one)")->capture_default_str();
  serve_cmd->add_option("--host", host, "Listen address")->capture_default_str();
  serve_cmd->add_option("--allow-origin", origins, "Origin allowed for CORS (repeatable, * for any)");
  add_policy(serve_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  try {
    if (*compute) {
      const auto tree = load_taxonomy_file(taxonomy_path);
      const auto portfolio = load_portfolio_file(portfolio_path);
      const auto policy = ExponentPolicy::parse(policy_name);
      const auto b = recursive ? lq_recursive(tree, portfolio, policy) : lq(tree, portfolio, policy);
      if (show_breakdown) {
        detail::print_breakdown(out, tree, b);
      }
      out << "LQ = " << detail::fixed4(b.score) << '\n';
      return kOk;
    }

    if (*axioms) {
      const auto tree = load_taxonomy_file(taxonomy_path);
      const auto report = check_axioms(tree, ExponentPolicy::parse(policy_name), trials, seed);
      for (const auto& res : report.results) {
        out << std::left << std::setw(14) << res.axiom << (res.passed ? "pass" : "FAIL") << "  " << res.checks
            << " checks  " << res.statement << '\n';
        if (res.counterexample) {
          out << "    counterexample: " << *res.counterexample << '\n';
        }
      }
      return report.all_passed() ? kOk : kAxiomViolated;
    }

    if (*suggest) {
      const auto tree = load_taxonomy_file(taxonomy_path);
      const auto portfolio = load_portfolio_file(portfolio_path);
      for (const auto& s : suggest_next(tree, portfolio, top, ExponentPolicy::parse(policy_name))) {
        out << std::left << std::setw(32) << s.language << detail::fixed4(s.gain) << '\n';
      }
      return kOk;
    }

    if (*matrix) {
      out << detail::fixed4(matrix_lq({rho, r})) << '\n';
      return kOk;
    }

    if (*optimize) {
      const auto tree = load_taxonomy_file(taxonomy_path);
      auto problem = problem_from_json(read_json_file(problem_path, "problem"), ExponentPolicy::parse(policy_name));
      if (optimize->count("--objective") > 0) {
        problem.objective = objective == "aggregate" ? BundleObjective::aggregate : BundleObjective::marginal;
      }
      const auto solution = optimize_bundle(tree, problem);
      out << "bundle:";
      for (const auto& language : solution.bundle) {
        out << ' ' << language;
      }
      out << "\nmethod: " << to_string(solution.method) << "\nobjective: " << to_string(problem.objective) << '\n';
      for (std::size_t i = 0; i < solution.per_member_cost.size(); ++i) {
        out << "member " << i << ": " << detail::fixed4(solution.per_member_cost[i]) << '\n';
      }
      out << "total cost = " << detail::fixed4(solution.total_cost) << '\n';
      return kOk;
    }

    if (*languages) {
      const auto tree = load_taxonomy_file(taxonomy_path);
      for (const auto& entry : list_languages(tree, query)) {
        out << entry.name << '\t';
        for (std::size_t i = 0; i < entry.path.size(); ++i) {
          out << (i ? " > " : "") << entry.path[i];
        }
        out << '\n';
      }
      return kOk;
    }

    if (*serve_cmd) {
      ApiConfig config;
      config.host = host;
      config.listen_port = port;
      config.taxonomy_path = taxonomy_path;
      config.default_policy = policy_name;
      config.allowed_origins = origins;
      detail::SignalStopper stopper;
      serve(config, [&](httplib::Server& server, int bound) {
        out << "listening on " << host << ':' << bound << std::endl;
        stopper.watch(server);
      });
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace lqmeter::cli

#endif  // LQMETER_TOOLS_CLI_HPP
