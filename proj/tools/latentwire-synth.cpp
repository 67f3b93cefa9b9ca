// Writes synthetic records in the NSL-KDD CSV layout.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "latentwire/data/synth.hpp"

int main(int argc, char** argv) {
    CLI::App cli{"Synthetic NSL-KDD-layout traffic records"};
    latentwire::data::SynthOptions opt;
    std::string out;
    cli.add_option("--rows", opt.rows, "number of records")->capture_default_str();
    cli.add_option("--seed", opt.seed, "generator seed")->capture_default_str();
    cli.add_option("--attack-fraction", opt.attack_fraction)->capture_default_str();
    cli.add_option("--label-noise", opt.label_noise)->capture_default_str();
    cli.add_flag("--difficulty", opt.difficulty_column, "append a difficulty column (NSL-KDD+ layout)");
    cli.add_option("--out", out, "output CSV (stdout when omitted)");
    CLI11_PARSE(cli, argc, argv);

    const std::string csv = latentwire::data::synth_nsl_kdd_csv(opt);
    if (out.empty()) {
        std::cout << csv;
        return 0;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        std::cerr << "cannot write " << out << '\n';
        return 6;
    }
    f << csv;
    return 0;
}
