// Reference child for the optba-eval line protocol: reads one JSON request per
// line on stdin, answers with the default surrogate surface on stdout. Also a
// test fixture with deliberate misbehavior modes; diagnostics go to stderr.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "optba/external_eval.hpp"
#include "optba/objectives.hpp"

using nlohmann::json;

namespace {

struct Options {
    std::vector<std::int64_t> optimum{49, 108};
    std::vector<double> coeffs{2e-5, 1e-6};
    double peak = optba::kDefaultPeak;
    std::vector<std::string> names{"epochs", "units"};
    std::string mode = "normal";
    bool no_handshake = false;
    bool bad_handshake = false;
    std::int64_t exit_after = -1;
    std::int64_t sleep_ms = 0;
};

json respond(const Options& opts, optba::SurrogateUnimodal& surface, const json& request) {
    json response;
    response["id"] = request["id"];
    optba::ParamVector params;
    const json& in = request["params"];
    for (const auto& name : opts.names) {
        if (!in.contains(name)) {
            response["error"] = "missing parameter '" + name + "'";
            return response;
        }
        params.push_back(in[name].get<std::int64_t>());
    }
    response["fitness"] = surface.evaluate(params, 0);
    return response;
}

void emit(const json& line) { std::cout << line.dump() << "\n" << std::flush; }

} // namespace

int main(int argc, char** argv) {
    Options opts;
    CLI::App app{"optba-eval protocol child (default surrogate surface)"};
    app.add_option("--optimum", opts.optimum, "planted optimum");
    app.add_option("--coeffs", opts.coeffs, "per-dimension quadratic coefficients");
    app.add_option("--peak", opts.peak, "fitness at the optimum");
    app.add_option("--names", opts.names, "parameter names, in order");
    app.add_option("--mode", opts.mode,
                   "normal | shuffle2 | malformed | bad-id | string-fitness | error-response");
    app.add_flag("--no-handshake", opts.no_handshake, "skip the handshake line");
    app.add_flag("--bad-handshake", opts.bad_handshake, "send a wrong handshake line");
    app.add_option("--exit-after", opts.exit_after, "exit after answering N requests");
    app.add_option("--sleep-ms", opts.sleep_ms, "sleep before each response");
    CLI11_PARSE(app, argc, argv);

    optba::SurrogateUnimodal surface(opts.optimum, opts.peak, opts.coeffs);

    if (opts.bad_handshake) {
        emit(json{{"protocol", "something-else"}, {"version", 99}});
    } else if (!opts.no_handshake) {
        emit(json{{"protocol", optba::kProtocolName}, {"version", optba::kProtocolVersion}});
    }

    std::int64_t answered = 0;
    std::vector<json> held; // shuffle2 buffer
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        json request = json::parse(line, nullptr, false);
        if (request.is_discarded() || !request.contains("id")) {
            std::cerr << "eval-child: unreadable request: " << line << "\n";
            return 1;
        }
        if (opts.sleep_ms > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(opts.sleep_ms));
        }
        if (opts.mode == "malformed") {
            std::cout << "this is not json\n" << std::flush;
            continue;
        }
        if (opts.mode == "bad-id") {
            json response = respond(opts, surface, request);
            response["id"] = request["id"].get<std::uint64_t>() + 900000001u;
            emit(response);
            continue;
        }
        if (opts.mode == "string-fitness") {
            emit(json{{"id", request["id"]}, {"fitness", "NaN"}});
            continue;
        }
        if (opts.mode == "error-response") {
            emit(json{{"id", request["id"]}, {"error", "synthetic trainer failure"}});
            continue;
        }
        if (opts.mode == "shuffle2") {
            held.push_back(request);
            if (held.size() == 2) {
                emit(respond(opts, surface, held[1]));
                emit(respond(opts, surface, held[0]));
                held.clear();
                answered += 2;
            }
        } else {
            emit(respond(opts, surface, request));
            ++answered;
        }
        if (opts.exit_after >= 0 && answered >= opts.exit_after) {
            return 0;
        }
    }
    return 0;
}
