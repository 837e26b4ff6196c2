#pragma once

#include "emstress/geometry.hpp"
#include "emstress/physics.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace test {

inline emstress::SegmentSpec segment(int id, double length, double j, int a, int b)
{
    emstress::SegmentSpec s;
    s.id = id;
    s.length = length;
    s.current_density = j;
    s.node_a = a;
    s.node_b = b;
    return s;
}

/// 20 um + 30 um wire, j = 4e10 and -1e10 A/m^2.
inline std::vector<emstress::SegmentSpec> two_segment_specs()
{
    return {segment(0, 20e-6, 4e10, 0, 1), segment(1, 30e-6, -1e10, 1, 2)};
}

inline std::vector<emstress::SegmentSpec> cross_specs()
{
    std::vector<emstress::SegmentSpec> s{segment(0, 20e-6, 1e10, 0, 1), segment(1, 30e-6, 2e10, 0, 2),
                                         segment(2, 10e-6, -3e10, 0, 3), segment(3, 20e-6, 4e10, 0, 4)};
    for (int i = 0; i < 4; ++i)
        s[static_cast<std::size_t>(i)].direction_deg = 90.0 * i;
    return s;
}

inline emstress::ThermalModel thermal(emstress::ThermalCase c)
{
    emstress::ThermalModel t;
    t.kind = c;
    return t;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

/// Fresh directory under the system temp path.
inline std::string temp_dir(const std::string& name)
{
    const auto p = std::filesystem::temp_directory_path() / ("emstress_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
}

} // namespace test
