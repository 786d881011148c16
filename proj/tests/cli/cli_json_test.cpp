// JSON-mode contract checks for the CLI: field presence, exact recomposition
// of term2 from the trace terms, 1-based index mapping, and repeatability.
// Usage: cli_json_test <path-to-cli>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
int failures = 0;

void expect(bool ok, const std::string& what) {
    std::cout << (ok ? "[ok] " : "[FAIL] ") << what << "\n";
    if (!ok) ++failures;
}

std::string run_capture(const std::string& command, const fs::path& out_file) {
    const int rc = std::system((command + " > \"" + out_file.string() + "\"").c_str());
    expect(rc == 0, "exit 0: " + command);
    std::ifstream in(out_file, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_json_test <cli>\n";
        return 1;
    }
    const std::string cli = std::string("\"") + argv[1] + "\"";
    const fs::path dir = fs::temp_directory_path() / "wishmom_cli_json";
    fs::create_directories(dir);

    const fs::path generic_csv = dir / "generic4.csv";
    {
        std::ofstream out(generic_csv);
        out << "4,1,0.5,0.2\n1,5,1.5,0.7\n0.5,1.5,4.5,0.9\n0.2,0.7,0.9,3.8\n";
    }
    const fs::path diag_csv = dir / "diag.csv";
    {
        std::ofstream out(diag_csv);
        out << "4,0\n0,1\n";
    }
    const fs::path diag_json = dir / "diag.json";
    {
        std::ofstream out(diag_json);
        out << R"({"matrix": [[4, 0], [0, 1]]})";
    }

    // Term breakdown recomposes exactly after a JSON round trip.
    const std::string var_cmd = cli + " variance --sigma \"" + generic_csv.string() +
                                "\" --n 6 --rows 1,2 --cols 3,4 --json";
    const std::string text = run_capture(var_cmd, dir / "var1.json");
    const auto doc = nlohmann::json::parse(text);
    for (const char* field : {"mean", "variance", "second_moment", "term1", "term2", "trace_terms"}) {
        expect(doc.contains(field), std::string("field present: ") + field);
    }
    double term_sum = 0.0;
    for (const auto& t : doc["trace_terms"]) term_sum += t["value"].get<double>();
    const double term2 = doc["term2"].get<double>();
    expect(doc["trace_terms"].size() == 2, "two trace terms at m - c = 2");
    expect(std::abs(term_sum - term2) <= 1e-12 * std::max(1.0, std::abs(term2)),
           "trace terms recompose term2");
    const double variance = doc["variance"].get<double>();
    const double mean = doc["mean"].get<double>();
    expect(variance == doc["term1"].get<double>() + term2, "variance = term1 + term2");
    expect(doc["second_moment"].get<double>() == variance + mean * mean,
           "second moment = variance + mean^2");

    // Identical command lines give byte-identical output.
    const std::string text2 = run_capture(var_cmd, dir / "var2.json");
    expect(text == text2, "byte-identical repeat");

    // 1-based indices address the first row of the file in both formats:
    // E[s_11] = n sigma_11 = 6 * 4.
    for (const fs::path& sigma : {diag_csv, diag_json}) {
        const std::string mean_text =
            run_capture(cli + " mean --sigma \"" + sigma.string() + "\" --n 6 --rows 1 --cols 1 --json",
                        dir / "mean.json");
        const auto mean_doc = nlohmann::json::parse(mean_text);
        expect(mean_doc["mean"].get<double>() == 24.0,
               "1-based mapping on " + sigma.extension().string());
    }

    return failures;
}
