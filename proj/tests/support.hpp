#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "bn6/critical.hpp"

namespace bn6::test {

// Ground state, spectra, v0 and constants on the unit ball, computed once per process.
inline const CriticalData& unit_ball() {
    static const CriticalData cd = analyze_critical(DomainBall(1.0));
    return cd;
}

inline constexpr double kLambda0 = 22.469107870741613;
inline constexpr double kLambda1 = 26.374616427163392;
inline constexpr double kU0Center = 11.234553935371114;
inline constexpr double kV0Center = -3.2284194179457919;

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("bn6-" + tag + "-" + std::to_string(rd()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace bn6::test
