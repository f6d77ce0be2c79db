#pragma once

#include <array>

namespace helio::testing {

struct TableRow {
  int year;
  unsigned month;
  double rmse_a;
  double rmse_b;
  int percent;
};

// Monthly RMSE at C = 16, gamma = 1 against per-month tuned parameters, with the printed improvement.
inline constexpr std::array<TableRow, 12> kFixedVsAdaptive{{
    {2013, 6, 0.0758, 0.0734, 3},
    {2013, 7, 0.0872, 0.0851, 2},
    {2013, 8, 0.0827, 0.0818, 1},
    {2013, 9, 0.0751, 0.0751, 0},
    {2013, 10, 0.0743, 0.0712, 4},
    {2013, 11, 0.0670, 0.0663, 1},
    {2013, 12, 0.0583, 0.0574, 2},
    {2014, 1, 0.0557, 0.0534, 4},
    {2014, 2, 0.0739, 0.0684, 7},
    {2014, 3, 0.0817, 0.0810, 1},
    {2014, 4, 0.0644, 0.0635, 1},
    {2014, 5, 0.0553, 0.0553, 0},
}};

// Monthly RMSE without and with heat index and wind speed, with the printed difference.
inline constexpr std::array<TableRow, 12> kHeatIndexWind{{
    {2013, 6, 0.0734, 0.0746, -2},
    {2013, 7, 0.0851, 0.0845, 1},
    {2013, 8, 0.0818, 0.0834, -2},
    {2013, 9, 0.0751, 0.0722, 4},
    {2013, 10, 0.0712, 0.0698, 2},
    {2013, 11, 0.0663, 0.0665, 0},
    {2013, 12, 0.0574, 0.0572, 0},
    {2014, 1, 0.0534, 0.0562, -5},
    {2014, 2, 0.0684, 0.0793, -16},
    {2014, 3, 0.0810, 0.0846, -4},
    {2014, 4, 0.0635, 0.0681, -7},
    {2014, 5, 0.0553, 0.0549, 1},
}};

}  // namespace helio::testing
