// Command-line front end: classify cusps, estimate Busemann volumes, plot
// sections, compute sandwich constants, and check bending data.

#include <bendcusp/io.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"bend: totally geodesic bending toolkit"};
    app.require_subcommand(1);

    bendcusp::io::RunOptions opt;
    std::vector<double> ts;

    for (const char* name :
         {"classify", "volume", "plot", "sandwich", "bendcheck"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--input", opt.input, "input JSON file")->required();
        sub->add_option("--t", ts, "bending parameter list")->delimiter(',');
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--out", opt.out_dir, "output directory")->required();
        sub->add_option("--tol", opt.tol, "classification tolerance");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : bendcusp::io::kInputError;
    }

    if (!ts.empty()) opt.ts = ts;
    std::string command = app.get_subcommands().front()->get_name();
    std::string error;
    int code = bendcusp::io::run_command(command, opt, &error);
    if (code != 0 && !error.empty()) std::cerr << "bend: " << error << "\n";
    return code;
}
