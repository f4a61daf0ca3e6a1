#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace polyspec::cli {

enum class Format { Json, Text, Csv };

struct Common {
    unsigned threads = 0;
    std::string format;  // empty: per-command default
    std::string out;     // empty: stdout
};

struct ClassifyArgs {
    std::string tau;
    double tol = 0.0;
    bool squared = false;
};

struct VolumeArgs {
    std::optional<int> n;
    std::optional<int> k;
    std::string tau;
    std::string method = "quadrature";
    std::uint64_t seed = 0;
    std::uint64_t samples = 1'000'000;
    double rel_tol = 1e-10;
};

struct TorusArgs {
    int n = 2;
    std::optional<int> k;
    std::string window;
    bool verify_bad = false;
    std::string tau;
    double eps = 0.0;
    std::optional<double> cap;
    bool boundary_family = false;
    std::string v;
    std::string r;
    std::uint64_t max_tuples = 20'000'000'000ULL;
    std::uint64_t max_atoms = 10'000'000ULL;
};

struct SweepArgs {
    std::optional<int> n;
    std::optional<int> k;
    std::string tau0;
    std::string r;
    double a = 0.0;  // set to the default halfwidth by the parser
    std::string route = "lattice";
    double cutoff_tol = 1e-6;
    bool scaling_only = false;
    std::string summary;
    std::string method = "quadrature";
    std::uint64_t seed = 0;
    std::uint64_t samples = 1'000'000;
};

int run_classify(const ClassifyArgs& args, const Common& common);
int run_volume(const VolumeArgs& args, const Common& common);
int run_torus(const TorusArgs& args, const Common& common);
int run_sweep(const SweepArgs& args, const Common& common);

}  // namespace polyspec::cli
