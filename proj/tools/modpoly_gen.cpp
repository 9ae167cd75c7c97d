// Writes a classical modular polynomial in the sparse "[i,j] c" format.

#include "isogate/modgen.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Generate classical modular polynomials Phi_N"};
    int level = 0;
    std::string out_path;
    bool quiet = false;
    app.add_option("--level", level, "N: a prime <= 13, or 4, 9, 25, 49")->required();
    app.add_option("--out", out_path, "output file")->required();
    app.add_flag("--quiet", quiet, "no progress on stderr");
    CLI11_PARSE(app, argc, argv);

    try {
        auto start = std::chrono::steady_clock::now();
        auto progress = [&](int done, int total) {
            if (!quiet && (done % 8 == 0 || done == total)) std::cerr << "  interpolation column " << done << "/" << total << "\n";
        };
        isogate::ModularPolynomial phi = isogate::modgen::classical(level, progress);
        std::filesystem::path p(out_path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::string tmp = out_path + ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw isogate::Error("cannot write '" + tmp + "'");
            out << "# classical modular polynomial Phi_" << level << "(X, Y), symmetric; entries [i,j] with i >= j\n";
            isogate::write_modpoly(out, phi);
        }
        std::filesystem::rename(tmp, out_path);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!quiet)
            std::cerr << "Phi_" << level << ": " << phi.stored_terms() << " stored terms, degree " << phi.degree()
                      << ", " << secs << " s\n";
    } catch (const std::exception& e) {
        std::cerr << "modpoly_gen: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
