#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "toda/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Spectrum of the quantum Toda chain from the TBA equation"};
    std::string mode, config_path, out_path, csv_path;
    bool verbose = false;
    app.add_option("mode", mode, "check | nlie | quantize | spectrum | oracle-n2")->required();
    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--out", out_path, "write the result document here instead of stdout");
    app.add_option("--csv", csv_path, "write lambda,ln_y columns here (nlie, check, quantize, spectrum)");
    app.add_flag("--verbose", verbose, "iteration logs on stderr");
    app.set_version_flag("--version", toda::cli::version());
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : toda::cli::Validation;
    }

    toda::cli::Json config;
    {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "toda-tba: cannot read " << config_path << "\n";
            return toda::cli::Validation;
        }
        try {
            config = toda::cli::Json::parse(in);
        } catch (const std::exception& e) {
            std::cerr << "toda-tba: malformed JSON: " << e.what() << "\n";
            return toda::cli::Validation;
        }
    }

    const auto res = toda::cli::run(mode, config, verbose);
    const std::string text = res.document.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream(out_path, std::ios::binary) << text;
    }
    if (!csv_path.empty() && !res.csv.empty()) std::ofstream(csv_path, std::ios::binary) << res.csv;
    if (res.exit_code != 0 && res.document.contains("error"))
        std::cerr << "toda-tba: " << res.document["error"].get<std::string>() << "\n";
    return res.exit_code;
}
