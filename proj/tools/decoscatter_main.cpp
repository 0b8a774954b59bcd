#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "decoscatter/cli.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        if (comma == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, comma - start));
        start = comma + 1;
    }
    return parts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delta-coupled spin-bath scattering workbench"};
    std::string experiment, config_path, out_dir = "out", format;
    int threads = 0;
    app.add_option("experiment", experiment,
                   "one of: amplitudes, narrow, full-density, oracle-validate, "
                   "entropy-scan, lindblad, contrast")
        ->required();
    app.add_option("--config", config_path, "JSON experiment configuration")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "comma-separated output formats: csv,json");
    app.add_option("--threads", threads, "worker threads for sector evolution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    deco::ExperimentConfig cfg;
    try {
        cfg = deco::load_config_file(config_path);
        if (cfg.experiment.empty())
            cfg.experiment = experiment;
        else if (cfg.experiment != experiment)
            throw std::invalid_argument("config: experiment '" + cfg.experiment +
                                        "' does not match the command line '" + experiment + "'");
        if (!format.empty()) cfg.formats = split_csv(format);
        if (threads > 0) cfg.threads = threads;
        deco::validate_config(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        const deco::RunResult result = deco::run(cfg);
        deco::write_outputs(result, out_dir);
        for (const deco::OutputFile& f : result.files)
            std::cout << "wrote " << out_dir << '/' << f.name << '\n';
        std::cout << "ok " << cfg.experiment << '\n';
    } catch (const std::exception& e) {
        std::cerr << "execution error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
