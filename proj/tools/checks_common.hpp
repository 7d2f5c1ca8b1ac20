#pragma once

// Helpers shared by the CLI driver and the acceptance runner: 17-digit float
// formatting, CSV emission, named pass/fail checks with a JSON summary, range
// parsing, seeded probe profiles, and the pointwise kernel-bound fit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hypdisp/kernel.hpp"
#include "hypdisp/transform.hpp"

namespace hypcli {

using nlohmann::json;

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

struct Check {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct CsvWriter {
    std::ofstream out;

    CsvWriter(const std::filesystem::path& path, const std::string& header) {
        out.open(path, std::ios::binary); // fixed newlines keep outputs byte-stable
        if (!out) throw std::runtime_error("cannot open " + path.string());
        out << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out << (i ? "," : "") << cells[i];
        out << "\n";
    }
};

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

// Writes <out>/<command>.summary.json and prints one line per check.
// Returns 0 when every check passed, 1 otherwise.
inline int finish_summary(const std::string& command, const json& config_echo,
                          const std::vector<Check>& checks, double wall_time_s,
                          const std::filesystem::path& out_dir,
                          const json& extras = json::object()) {
    json failures = json::array();
    json jchecks = json::array();
    bool all_pass = true;
    for (const Check& c : checks) {
        jchecks.push_back({{"name", c.name},
                           {"value", c.value},
                           {"bound", c.bound},
                           {"pass", c.pass}});
        if (!c.pass) {
            all_pass = false;
            failures.push_back(c.name);
        }
    }
    json summary = {{"command", command},
                    {"config", config_echo},
                    {"wall_time_s", wall_time_s},
                    {"checks", jchecks},
                    {"failures", failures}};
    for (auto it = extras.begin(); it != extras.end(); ++it) summary[it.key()] = *it;

    std::filesystem::create_directories(out_dir);
    std::ofstream js(out_dir / (command + ".summary.json"), std::ios::binary);
    js << summary.dump(2) << "\n";

    for (const Check& c : checks)
        std::printf("%-34s value=%-13.6g bound=%-13.6g %s\n", c.name.c_str(), c.value,
                    c.bound, c.pass ? "pass" : "FAIL");
    std::printf("%s: %s (%.2f s)\n", command.c_str(), all_pass ? "ok" : "FAILED",
                wall_time_s);
    return all_pass ? 0 : 1;
}

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
};

// "lo:hi:count", count >= 1; rejects empty or backwards ranges
inline Range parse_range(const std::string& s) {
    Range r;
    char trail = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &r.lo, &r.hi, &r.count, &trail) != 3)
        throw std::invalid_argument("range must be lo:hi:count, got '" + s + "'");
    if (r.count < 1 || !(r.hi >= r.lo))
        throw std::invalid_argument("empty or backwards range '" + s + "'");
    return r;
}

inline std::vector<double> lin_spaced(const Range& r) {
    std::vector<double> v(r.count);
    for (int i = 0; i < r.count; ++i)
        v[i] = r.count == 1
                   ? r.lo
                   : r.lo + (r.hi - r.lo) * double(i) / double(r.count - 1);
    return v;
}

inline std::vector<double> log_spaced(const Range& r) {
    if (!(r.lo > 0.0)) throw std::invalid_argument("log range needs lo > 0");
    std::vector<double> v(r.count);
    const double ll = std::log(r.lo), lh = std::log(r.hi);
    for (int i = 0; i < r.count; ++i)
        v[i] = r.count == 1
                   ? r.lo
                   : std::exp(ll + (lh - ll) * double(i) / double(r.count - 1));
    return v;
}

inline bool power_of_two_in(int v, int lo, int hi) {
    if (v < lo || v > hi) return false;
    return (v & (v - 1)) == 0;
}

// smooth decaying probe a e^{-((r-c)/w)^2} + its mirror to keep a well-defined
// even radial profile
inline hypdisp::RadialFunction seeded_profile(const hypdisp::RadialGrid& grid,
                                              std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.5, 2.0), ctr(0.0, 2.0), wid(0.7, 2.0);
    const double a = amp(rng), c = ctr(rng), w = wid(rng);
    hypdisp::RadialFunction f;
    f.values.reserve(grid.r_nodes.size());
    for (double r : grid.r_nodes) {
        const double x = (r - c) / w, y = (r + c) / w;
        f.values.push_back(0.5 * a * (std::exp(-x * x) + std::exp(-y * y)));
    }
    return f;
}

struct ChatFit {
    double c_hat = 0.0;   // sup |I| / weight
    double arg_t = 0.0;   // where the sup is attained
    double arg_r = 0.0;
    long panels = 0;
    bool converged = true;
};

// C-hat = sup over the (t, r) grid of |I_eps(t,r)| / (|t|^tpow r^((n+3)/4)
// e^{-(n-1) r / 2}); the kernel-bound constant of the pointwise estimate
inline ChatFit kernel_chat_fit(const hypdisp::GeometryParams& geom, double eps,
                               const std::vector<double>& tvals,
                               const std::vector<double>& rvals, double tpow,
                               const hypdisp::QuadratureBudget& quad) {
    hypdisp::KernelSweep sweep(geom, eps, quad);
    const double n = double(geom.n);
    ChatFit fit;
    for (double t : tvals) {
        const hypdisp::SweepResult res = sweep.eval(t, rvals);
        fit.panels += res.panels_used;
        fit.converged = fit.converged && res.converged;
        for (std::size_t i = 0; i < rvals.size(); ++i) {
            const double r = rvals[i];
            const double weight = std::pow(std::fabs(t), tpow) *
                                  std::pow(r, (n + 3.0) / 4.0) *
                                  std::exp(-(n - 1.0) * r / 2.0);
            const double ratio = std::abs(res.values[i]) / weight;
            if (ratio > fit.c_hat) {
                fit.c_hat = ratio;
                fit.arg_t = t;
                fit.arg_r = r;
            }
        }
    }
    return fit;
}

} // namespace hypcli
