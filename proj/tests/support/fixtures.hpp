#pragma once

// Synthetic 50-tool world: five tool families with heavy shared vocabulary
// inside a family and disjoint vocabulary across families, so the hash
// embedder produces the similarity structure the pipeline needs.

#include <map>
#include <string>
#include <vector>

#include "toolgate/bench.hpp"
#include "toolgate/index.hpp"
#include "toolgate/mock_llm.hpp"
#include "toolgate/tool_spec.hpp"

namespace fixtures {

struct Family {
    std::string category;
    std::string shared;  // tokens shared by every description in the family
    std::vector<std::pair<std::string, std::string>> tools;  // name, specific tokens
};

inline const std::vector<Family>& families() {
    static const std::vector<Family> data = {
        {"weather",
         "weather atmosphere meteorology service reporting conditions for a requested city",
         {
             {"weather_current", "current temperature humidity wind right now"},
             {"weather_forecast_daily", "daily forecast upcoming days outlook"},
             {"weather_forecast_hourly", "hourly forecast next hours timeline"},
             {"weather_alerts", "severe alerts warnings advisories active"},
             {"weather_history", "historical past records archive lookup"},
             {"air_quality_index", "air quality pollution particulate index"},
             {"uv_index_lookup", "ultraviolet uv sun exposure index"},
             {"sunrise_sunset_times", "sunrise sunset daylight times"},
             {"precipitation_radar", "precipitation rain radar imagery"},
             {"storm_tracker", "storm hurricane cyclone tracking position"},
         }},
        {"language",
         "language text linguistic processing service operating on a provided passage",
         {
             {"translate_text", "translate translation target french spanish german"},
             {"detect_language", "detect identify which language written"},
             {"transliterate_text", "transliterate script alphabet conversion"},
             {"summarize_text", "summarize condense shorter summary"},
             {"spell_check_text", "spelling spell check mistakes corrections"},
             {"grammar_check_text", "grammar syntax check mistakes corrections"},
             {"sentiment_of_text", "sentiment positive negative tone"},
             {"extract_keywords", "keywords key phrases extraction"},
             {"count_words", "count words characters statistics"},
             {"readability_score", "readability grade level scoring"},
         }},
        {"mapping",
         "geographic map location service resolving places coordinates on the earth",
         {
             {"geocode_address", "geocode address into latitude longitude"},
             {"reverse_geocode", "reverse lookup coordinates into address"},
             {"route_directions", "route driving walking directions between"},
             {"distance_between", "distance travel between two places"},
             {"nearby_places", "nearby restaurants shops points interest"},
             {"elevation_lookup", "elevation altitude height terrain"},
             {"timezone_for_location", "timezone utc offset local clock"},
             {"traffic_conditions", "traffic congestion delays roads"},
             {"plot_locations_map", "plot markers captions overlay map image"},
             {"satellite_imagery", "satellite aerial imagery tiles"},
         }},
        {"files",
         "filesystem document storage service manipulating files inside a workspace",
         {
             {"read_file", "read open contents return text"},
             {"write_file", "write save new contents into"},
             {"list_directory", "list directory folder entries"},
             {"move_file", "move rename relocate path"},
             {"delete_file", "delete remove permanently"},
             {"compress_archive", "compress zip archive bundle"},
             {"extract_archive", "extract unzip unpack archive"},
             {"file_checksum", "checksum hash digest integrity"},
             {"search_file_contents", "search grep match pattern inside"},
             {"file_metadata", "metadata size modified timestamps"},
         }},
        {"calendar",
         "calendar scheduling agenda service managing events meetings appointments",
         {
             {"create_event", "create new event meeting appointment"},
             {"list_events", "list upcoming events agenda entries"},
             {"delete_event", "delete cancel remove event"},
             {"update_event", "update reschedule modify event"},
             {"find_free_slot", "find free available slot time"},
             {"send_invite", "send invitation attendees email"},
             {"set_reminder", "set reminder notification before"},
             {"list_calendars", "list available calendars accounts"},
             {"share_calendar", "share calendar access permissions"},
             {"import_ics", "import ics icalendar file entries"},
         }},
    };
    return data;
}

inline std::vector<toolgate::ToolSpec> synthetic_tools() {
    std::vector<toolgate::ToolSpec> tools;
    for (const auto& family : families()) {
        for (const auto& [name, specific] : family.tools) {
            toolgate::ToolSpec tool;
            tool.id = name;
            tool.name = name;
            tool.description = family.shared + " " + specific;
            tool.parameters = {
                {"type", "object"},
                {"properties",
                 {{"target", {{"type", "string"}, {"description", "what to operate on"}}},
                  {"limit", {{"type", "number"}, {"description", "result cap"}}}}},
                {"required", nlohmann::json::array({"target"})},
            };
            tools.push_back(std::move(tool));
        }
    }
    return tools;
}

// Corpus for Level 2: four queries per family, together referencing every
// tool in the family; texts reuse the family vocabulary.
inline std::vector<toolgate::AugmentedQuery> synthetic_corpus() {
    std::vector<toolgate::AugmentedQuery> corpus;
    int counter = 0;
    for (const auto& family : families()) {
        for (std::size_t group = 0; group < 4; ++group) {
            toolgate::AugmentedQuery query;
            query.id = "q" + std::to_string(counter++);
            query.category = family.category;
            std::string text = family.shared;
            // Groups of 2-3 tools; group g takes tools [g*3, g*3+2] clamped.
            for (std::size_t t = group * 3; t < std::min<std::size_t>(group * 3 + 3, 10); ++t) {
                query.gold_tools.push_back(family.tools[t].first);
                text += " " + family.tools[t].second;
            }
            query.text = text;
            query.origin = toolgate::QueryOrigin::seed;
            corpus.push_back(std::move(query));
        }
    }
    return corpus;
}

// One single-tool bench query per tool, plus one two-tool query per family
// pair to exercise multi-call judging (55 queries total).
inline std::vector<toolgate::BenchQuery> synthetic_bench() {
    std::vector<toolgate::BenchQuery> bench;
    int counter = 0;
    for (const auto& family : families()) {
        for (const auto& [name, specific] : family.tools) {
            toolgate::BenchQuery query;
            query.id = "b" + std::to_string(counter++);
            query.category = family.category;
            query.text = "please use the " + family.shared + " " + specific;
            query.gold_calls.push_back(
                {name, {{"target", "fixture-target-" + std::to_string(counter)}}});
            bench.push_back(std::move(query));
        }
    }
    for (std::size_t f = 0; f + 1 < families().size(); ++f) {
        const auto& first = families()[f];
        const auto& second = families()[f + 1];
        toolgate::BenchQuery query;
        query.id = "b" + std::to_string(counter++);
        query.category = first.category + "+" + second.category;
        query.text = "combined task " + first.shared + " " + first.tools[0].second + " and " +
                     second.shared + " " + second.tools[0].second;
        query.gold_calls.push_back({first.tools[0].first, {{"target", "combined"}}});
        query.gold_calls.push_back({second.tools[0].first, {{"target", "combined"}}});
        bench.push_back(std::move(query));
    }
    return bench;
}

// Scripted model with ideal-recommender behaviour and a capacity-limited
// function caller: the call succeeds iff every gold tool is attached and at
// most `capacity` tool schemas were presented.
inline toolgate::MockLlmClient::Handler scripted_pipeline_handler(
    std::vector<toolgate::BenchQuery> bench, std::vector<toolgate::ToolSpec> tools,
    std::size_t capacity) {
    return [bench = std::move(bench), tools = std::move(tools),
            capacity](const toolgate::ChatRequest& request) -> toolgate::ChatResponse {
        auto find_query = [&]() -> const toolgate::BenchQuery* {
            for (const auto& message : request.messages) {
                for (const auto& query : bench) {
                    if (message.content.find(query.text) != std::string::npos) return &query;
                }
            }
            return nullptr;
        };
        const toolgate::BenchQuery* query = find_query();
        if (query == nullptr) {
            throw toolgate::Error(toolgate::ErrorCode::ScriptExhausted,
                                  "mock got a request for an unknown query");
        }

        if (request.tools.empty()) {
            // Recommender call: answer with the gold tools' real descriptions.
            nlohmann::json ideal = nlohmann::json::array();
            for (const auto& call : query->gold_calls) {
                const toolgate::ToolSpec* tool = toolgate::find_tool(tools, call.tool_name);
                ideal.push_back({{"name", tool->name}, {"description", tool->description}});
            }
            return toolgate::MockLlmClient::text_response(
                nlohmann::json{{"tools", ideal}}.dump());
        }

        if (request.tools.size() > capacity) {
            return toolgate::MockLlmClient::error_sentinel_response("too many tools to reason about");
        }
        std::vector<toolgate::PredictedCall> calls;
        for (const auto& call : query->gold_calls) {
            bool attached = false;
            for (const auto& tool : request.tools) {
                if (tool.name == call.tool_name) attached = true;
            }
            if (!attached) {
                return toolgate::MockLlmClient::error_sentinel_response(
                    "required tool not available");
            }
            calls.push_back({call.tool_name, call.arguments});
        }
        return toolgate::MockLlmClient::tool_calls_response(std::move(calls));
    };
}

}  // namespace fixtures
