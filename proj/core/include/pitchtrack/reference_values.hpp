#pragma once

#include <array>

#include "pitchtrack/simulate.hpp"

// Published results of the soccer low-quality-video study the simulator is
// calibrated against. Indexing: [quality N/40/50][detector Original/Normal/40/50],
// ReID rows Without/Original/Normal/40/50. Percent unless noted.
namespace pitchtrack::reference {

inline constexpr int kGroundTruthTracks = 32;

inline constexpr std::array<std::array<double, 4>, 3> kRecall{{
    {24.6, 99.3, 99.4, 99.3},
    {25.9, 93.7, 97.2, 97.4},
    {13.1, 82.3, 91.4, 93.8},
}};

inline constexpr std::array<std::array<double, 4>, 3> kPrecision{{
    {99.1, 98.2, 93.8, 93.8},
    {98.5, 98.7, 97.4, 96.8},
    {94.5, 97.5, 97.4, 97.4},
}};

/// Mean (1 - IoU); lower is better.
inline constexpr std::array<std::array<double, 4>, 3> kMotp{{
    {0.22, 0.07, 0.10, 0.13},
    {0.24, 0.15, 0.13, 0.13},
    {0.27, 0.28, 0.18, 0.18},
}};

inline constexpr std::array<std::array<int, 4>, 3> kMostlyTracked{{
    {2, 31, 31, 30},
    {2, 22, 26, 26},
    {0, 17, 20, 22},
}};
inline constexpr std::array<std::array<int, 4>, 3> kPartiallyTracked{{
    {5, 0, 0, 1},
    {5, 4, 4, 4},
    {5, 6, 5, 3},
}};
inline constexpr std::array<std::array<int, 4>, 3> kMostlyLost{{
    {25, 1, 1, 1},
    {25, 6, 2, 2},
    {27, 9, 7, 7},
}};

/// [quality][reid row][detector]
inline constexpr std::array<std::array<std::array<double, 4>, 5>, 3> kMota{{
    {{
        {21.4, 96.3, 92.1, 92.1},
        {24.0, 97.1, 92.5, 92.4},
        {24.0, 97.1, 92.6, 92.5},
        {24.0, 97.1, 92.6, 92.5},
        {24.0, 97.1, 92.6, 92.5},
    }},
    {{
        {22.7, 90.1, 92.9, 93.0},
        {25.2, 92.0, 94.1, 93.7},
        {25.2, 91.8, 94.0, 93.8},
        {25.2, 91.9, 94.1, 93.8},
        {25.3, 92.0, 94.1, 93.8},
    }},
    {{
        {9.8, 75.6, 86.3, 88.5},
        {12.0, 79.3, 88.3, 90.1},
        {12.0, 79.1, 88.1, 90.0},
        {12.0, 79.2, 88.2, 90.1},
        {12.0, 79.4, 88.3, 90.1},
    }},
}};

inline constexpr std::array<int, 3> kSequenceFrames{462, 497, 595};
inline constexpr int kFps = 30;

constexpr std::size_t index(DetectorModel d) { return static_cast<std::size_t>(d); }
constexpr std::size_t index(Quality q) { return static_cast<std::size_t>(q); }

}  // namespace pitchtrack::reference
